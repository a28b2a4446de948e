#pragma once

#include "trajexp/field.hpp"

namespace trajexp {

/// The computed trajectory expansion x(t) ~ (x* + U0 t) + sum_n zeta_n(t)
/// e^{-mu_n t}. zeta_1 is constant and equals -q_1(x*)/mu_1; every zeta_n
/// solves zeta_n' - mu_n zeta_n = P_n with the assembled right-hand side P_n.
template <typename T>
struct TrajectoryExpansion {
  Vec<T> x_star;
  Vec<T> mean_flow;
  Semigroup sg;
  int order = 0;
  std::vector<PolyVec<T>> zetas;  // zetas[n-1] is zeta_n

  const PolyVec<T>& zeta(int n) const {
    if (n < 1 || n > order) throw InvalidInput("trajectory expansion: order out of range");
    return zetas[n - 1];
  }

  bool t_independent() const {
    return std::all_of(zetas.begin(), zetas.end(),
                       [](const PolyVec<T>& z) { return z.degree() == 0; });
  }
};

/// Right-hand side P_n(t): the q_n(x*, t) term plus one tensor contraction
/// Q_{k,m}(x*, t)(zeta_{j1}, ..., zeta_{jm}) per decomposition of mu_n.
/// `zetas` must hold zeta_1 .. zeta_{n-1}.
template <typename T>
PolyVec<T> assemble_rhs(const FieldExpansion<T>& fe, const Vec<T>& x_star,
                        std::span<const PolyVec<T>> zetas, int n) {
  PolyVec<T> rhs(fe.dim());
  for (const Decomposition& dec : fe.semigroup().decompositions(n)) {
    if (dec.order() == 0) {
      // m = 0 collapses to the bare q_n(x*, t) contribution.
      rhs += fe.q_at(n, x_star);
      continue;
    }
    if (!fe.term(dec.k)) continue;  // absent coefficient field: zero tensor
    DerivativeTensor<T> q = fe.tensor_poly(dec.k, dec.order(), x_star);
    std::vector<PolyVec<T>> args;
    args.reserve(dec.js.size());
    for (int j : dec.js) args.push_back(zetas[j - 1]);
    rhs += q.apply(args);
  }
  return rhs;
}

/// Same sum assembled over the inflated index box m <= m_bound, k <= k_bound,
/// js <= j_bound with the exact exponent-sum constraint. Any bounds at least
/// as large as the minimal ones yield the identical polynomial; the test
/// suites exercise that equivalence.
template <typename T>
PolyVec<T> assemble_rhs_bounded(const FieldExpansion<T>& fe, const Vec<T>& x_star,
                                std::span<const PolyVec<T>> zetas, int n,
                                int m_bound, int k_bound, int j_bound) {
  const Semigroup& sg = fe.semigroup();
  if (k_bound > sg.cap() || j_bound > sg.cap())
    throw InvalidInput("assemble_rhs_bounded: bound exceeds semigroup cap");
  PolyVec<T> rhs(fe.dim());
  const Rational target = sg.residue(n);
  std::vector<int> js;
  auto contribution = [&](int k) {
    if (js.empty()) {
      if (k == n) rhs += fe.q_at(n, x_star);
      return;
    }
    if (!fe.term(k)) return;
    for (int j : js)
      if (static_cast<std::size_t>(j) > zetas.size())
        throw InvalidInput("assemble_rhs_bounded: zeta index beyond available orders");
    DerivativeTensor<T> q = fe.tensor_poly(k, static_cast<int>(js.size()), x_star);
    std::vector<PolyVec<T>> args;
    for (int j : js) args.push_back(zetas[j - 1]);
    rhs += q.apply(args);
  };
  auto dfs = [&](auto&& self, int m, Rational remaining) -> void {
    if (static_cast<int>(js.size()) == m) {
      if (remaining > 0) {
        if (auto k = sg.index_of(remaining); k && *k <= k_bound) contribution(*k);
      }
      return;
    }
    for (int j = 1; j <= j_bound; ++j) {
      const Rational& mj = sg.residue(j);
      if (mj >= remaining) break;  // must leave room for mu_k > 0
      js.push_back(j);
      self(self, m, remaining - mj);
      js.pop_back();
    }
  };
  for (int m = 0; m <= m_bound; ++m) dfs(dfs, m, target);
  return rhs;
}

/// Theorem-level recursion: for n = 1..order assemble P_n from the already
/// computed zeta_1..zeta_{n-1} and solve the resolvent equation
/// zeta_n' - mu_n zeta_n = P_n for its unique polynomial solution.
template <typename T>
TrajectoryExpansion<T> compute_expansion(const FieldExpansion<T>& fe,
                                         Vec<T> x_star, int order) {
  if (static_cast<int>(x_star.size()) != fe.dim())
    throw InvalidInput("compute_expansion: x_star dimension mismatch");
  if (order < 0 || order > fe.semigroup().cap() || order > fe.declared_order())
    throw InvalidInput("compute_expansion: order outside semigroup cap or stored terms");

  // The tensor orders actually needed follow from the decomposition lists;
  // check them against m_max before any tensor is built.
  int m_needed = 0;
  for (int n = 1; n <= order; ++n)
    for (const auto& d : fe.semigroup().decompositions(n))
      m_needed = std::max(m_needed, d.order());
  if (m_needed > fe.m_max())
    throw InvalidInput("compute_expansion: requires derivative order " +
                       std::to_string(m_needed) + " > m_max " +
                       std::to_string(fe.m_max()) + " (raise m_max)");

  TrajectoryExpansion<T> te{std::move(x_star), fe.mean_flow(), fe.semigroup(), order, {}};
  te.zetas.reserve(order);
  for (int n = 1; n <= order; ++n) {
    std::span<const PolyVec<T>> below(te.zetas.data(), te.zetas.size());
    PolyVec<T> rhs = assemble_rhs(fe, te.x_star, below, n);
    T mu_n = scalar_mode<T>::from_rational(fe.semigroup().mu(n));
    te.zetas.push_back(resolvent_solve(mu_n, rhs));
  }
  return te;
}

/// x* + U0 t + sum_{n<=truncation} zeta_n(t) e^{-mu_n t}, in doubles.
template <typename T>
VecD evaluate_expansion(const TrajectoryExpansion<T>& te, double t, int truncation) {
  if (truncation < 0 || truncation > te.order)
    throw InvalidInput("evaluate_expansion: truncation out of range");
  VecD out = as_double_vec(te.x_star);
  VecD u0 = as_double_vec(te.mean_flow);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += u0[i] * t;
  for (int n = 1; n <= truncation; ++n) {
    double damp = std::exp(-te.sg.mu_double(n) * t);
    VecD z = te.zetas[n - 1].eval_double(t);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += z[i] * damp;
  }
  return out;
}

/// Residual zeta_n' - mu_n zeta_n - P_n of the defining equation; identically
/// zero for a correctly computed expansion (exactly so in rational mode).
template <typename T>
PolyVec<T> zeneq_residual(const FieldExpansion<T>& fe,
                          const TrajectoryExpansion<T>& te, int n) {
  std::span<const PolyVec<T>> below(te.zetas.data(), n - 1);
  PolyVec<T> rhs = assemble_rhs(fe, te.x_star, below, n);
  T mu_n = scalar_mode<T>::from_rational(fe.semigroup().mu(n));
  PolyVec<T> res = te.zeta(n).derivative();
  res -= te.zeta(n).scaled(mu_n);
  res -= rhs;
  return res;
}

/// Theorem-level frame shift: attaches a mean flow U0 to a zero-mean
/// expansion. The returned object evaluates u(x,t) = U0 + v(x - U0 t, t); the
/// recursion keeps running on v and the reported trajectory is X(t) + U0 t.
template <typename T>
FieldExpansion<T> galilean_compose(const FieldExpansion<T>& v, Vec<T> u0) {
  if (v.has_mean_flow())
    throw InvalidInput("galilean_compose: input expansion must be zero-mean");
  if (static_cast<int>(u0.size()) != v.dim())
    throw InvalidInput("galilean_compose: mean flow dimension mismatch");
  return FieldExpansion<T>(v.dim(), v.semigroup(), v.terms(), std::move(u0),
                           v.declared_order(), v.trig_mode(), v.periods(), v.m_max());
}

}  // namespace trajexp
