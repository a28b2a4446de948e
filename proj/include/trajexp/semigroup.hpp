#pragma once

#include <optional>
#include <vector>

#include "trajexp/common.hpp"
#include "trajexp/rational.hpp"

namespace trajexp {

/// One term of the recursion's right-hand side: an ordered tuple (k; j1..jm)
/// with mu_k + mu_j1 + ... + mu_jm = mu_n exactly. m == 0 encodes the bare
/// q_n contribution (then k == n).
struct Decomposition {
  int n = 0;
  int k = 0;
  std::vector<int> js;
  int order() const { return static_cast<int>(js.size()); }
  bool operator==(const Decomposition&) const = default;
};

/// The additive semigroup generated by nu*g for g in a finite generator set,
/// arranged as the n_cap smallest elements mu_1 < mu_2 < ... < mu_{n_cap}.
/// Exponents are stored as exact rational residues in units of nu; index
/// arithmetic (sums, the s_n ceiling, decomposition enumeration) never touches
/// floating point. Immutable after construction.
class Semigroup {
 public:
  Semigroup(std::vector<Rational> generators, Rational nu, int n_cap);

  int cap() const { return cap_; }
  const Rational& nu() const { return nu_; }
  const std::vector<Rational>& generators() const { return gens_; }
  const std::vector<Rational>& residues() const { return elements_; }

  const Rational& residue(int n) const;  // 1-based
  Rational mu(int n) const;              // physical exponent nu * residue(n)
  double mu_double(int n) const;

  /// Smallest positive integer s with s >= mu_n/mu_1 - 1.
  int s_index(int n) const;

  /// All decompositions of mu_n, including the m = 0 term, ordered
  /// lexicographically in (m, k, js). Every index is in [1, n-1] when m >= 1.
  std::vector<Decomposition> decompositions(int n) const;

  /// Exact lookup of a residue among the enumerated elements.
  std::optional<int> index_of(const Rational& residue) const;

 private:
  void check_index(int n) const;

  std::vector<Rational> gens_;
  Rational nu_;
  int cap_ = 0;
  std::vector<Rational> elements_;
};

}  // namespace trajexp
