#include "trajexp/semigroup.hpp"

#include <algorithm>
#include <set>

namespace trajexp {

Semigroup::Semigroup(std::vector<Rational> generators, Rational nu, int n_cap)
    : gens_(std::move(generators)), nu_(std::move(nu)), cap_(n_cap) {
  if (gens_.empty()) throw InvalidInput("semigroup: generator list is empty");
  for (const auto& g : gens_)
    if (g <= 0) throw InvalidInput("semigroup: generators must be > 0");
  if (nu_ <= 0) throw InvalidInput("semigroup: nu must be > 0");
  if (cap_ < 1) throw InvalidInput("semigroup: n_cap must be >= 1");

  std::sort(gens_.begin(), gens_.end());
  gens_.erase(std::unique(gens_.begin(), gens_.end()), gens_.end());

  // Smallest-first enumeration: pop the least reachable sum, push its
  // successors. The frontier set dedups collisions (resonances).
  std::set<Rational> frontier(gens_.begin(), gens_.end());
  elements_.reserve(cap_);
  while (static_cast<int>(elements_.size()) < cap_) {
    Rational r = *frontier.begin();
    frontier.erase(frontier.begin());
    for (const auto& g : gens_) frontier.insert(r + g);
    elements_.push_back(std::move(r));
  }
}

void Semigroup::check_index(int n) const {
  if (n < 1 || n > cap_)
    throw InvalidInput("semigroup: index " + std::to_string(n) +
                       " out of range [1, " + std::to_string(cap_) + "]");
}

const Rational& Semigroup::residue(int n) const {
  check_index(n);
  return elements_[n - 1];
}

Rational Semigroup::mu(int n) const { return nu_ * residue(n); }

double Semigroup::mu_double(int n) const { return to_double(mu(n)); }

int Semigroup::s_index(int n) const {
  check_index(n);
  Rational ratio = elements_[n - 1] / elements_[0] - 1;
  long s = ceil_to_long(ratio);
  return static_cast<int>(std::max(1L, s));
}

std::optional<int> Semigroup::index_of(const Rational& residue) const {
  auto it = std::lower_bound(elements_.begin(), elements_.end(), residue);
  if (it == elements_.end() || *it != residue) return std::nullopt;
  return static_cast<int>(it - elements_.begin()) + 1;
}

std::vector<Decomposition> Semigroup::decompositions(int n) const {
  check_index(n);
  std::vector<Decomposition> out;
  out.push_back({n, n, {}});  // m = 0: the q_n term itself

  if (n == 1) return out;
  const int s_n = s_index(n);
  const Rational& target = elements_[n - 1];
  const Rational& mu1 = elements_[0];
  const Rational& mu_top = elements_[n - 2];  // largest admissible index n-1

  std::vector<int> js;
  // Depth-first over ordered tuples (j_1,...,j_m), each in [1, n-1], with
  // running remainder pruning; emission order is lexicographic in (m, k, js).
  auto dfs = [&](auto&& self, int m, const Rational& remaining) -> void {
    int slots = m - static_cast<int>(js.size());
    if (slots == 0) {
      if (remaining == 0) {
        Decomposition d;
        d.n = n;
        d.k = js[0];
        d.js.assign(js.begin() + 1, js.end());
        out.push_back(std::move(d));
      }
      return;
    }
    if (remaining < slots * mu1 || remaining > slots * mu_top) return;
    for (int j = 1; j <= n - 1; ++j) {
      const Rational& mj = elements_[j - 1];
      if (mj > remaining) break;
      js.push_back(j);
      self(self, m, remaining - mj);
      js.pop_back();
    }
  };

  // js[0] plays the role of k so (k, j_1, ..., j_m) is enumerated in one walk.
  for (int m = 1; m <= s_n; ++m) dfs(dfs, m + 1, target);
  return out;
}

}  // namespace trajexp
