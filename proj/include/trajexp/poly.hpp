#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "trajexp/common.hpp"
#include "trajexp/rational.hpp"

namespace trajexp {

template <typename T>
using Vec = std::vector<T>;

inline VecD as_double_vec(const Vec<Rational>& v) {
  VecD out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = to_double(v[i]);
  return out;
}
inline VecD as_double_vec(const VecD& v) { return v; }

/// Scalar polynomial in the time variable, coefficients ascending. The zero
/// polynomial is a single zero coefficient; trailing coefficients are trimmed
/// (exactly in rational mode, below 1e-14 * max|coeff| in float mode).
template <typename T>
class Poly {
 public:
  Poly() : c_{T(0)} {}
  explicit Poly(T constant) : c_{std::move(constant)} {}
  explicit Poly(std::vector<T> coeffs) : c_(std::move(coeffs)) {
    if (c_.empty()) c_.push_back(T(0));
    trim();
  }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const std::vector<T>& coeffs() const { return c_; }
  T coeff(int k) const {
    return (k >= 0 && k < static_cast<int>(c_.size())) ? c_[k] : T(0);
  }
  bool is_zero() const { return c_.size() == 1 && c_[0] == T(0); }

  T eval(const T& t) const {
    T acc = c_.back();
    for (auto it = c_.rbegin() + 1; it != c_.rend(); ++it) acc = acc * t + *it;
    return acc;
  }
  double eval_double(double t) const {
    double acc = scalar_mode<T>::to_dbl(c_.back());
    for (auto it = c_.rbegin() + 1; it != c_.rend(); ++it)
      acc = acc * t + scalar_mode<T>::to_dbl(*it);
    return acc;
  }

  Poly& operator+=(const Poly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), T(0));
    for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] += o.c_[k];
    trim();
    return *this;
  }
  Poly& operator-=(const Poly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), T(0));
    for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] -= o.c_[k];
    trim();
    return *this;
  }
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }

  friend Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return Poly();
    std::vector<T> out(a.c_.size() + b.c_.size() - 1, T(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) out[i + j] += a.c_[i] * b.c_[j];
    return Poly(std::move(out));
  }

  Poly scaled(const T& s) const {
    std::vector<T> out(c_);
    for (auto& v : out) v *= s;
    return Poly(std::move(out));
  }

  Poly derivative() const {
    if (c_.size() == 1) return Poly();
    std::vector<T> out(c_.size() - 1);
    for (std::size_t k = 1; k < c_.size(); ++k) out[k - 1] = c_[k] * T(static_cast<int>(k));
    return Poly(std::move(out));
  }

  /// Multiplication by t^k.
  Poly shifted(int k) const {
    if (is_zero() || k == 0) return k == 0 ? *this : Poly();
    std::vector<T> out(c_.size() + k, T(0));
    std::copy(c_.begin(), c_.end(), out.begin() + k);
    return Poly(std::move(out));
  }

  bool operator==(const Poly& o) const { return c_ == o.c_; }

 private:
  void trim() {
    T scale = T(0);
    for (const auto& v : c_) scale = std::max(scale, scalar_mode<T>::abs(v));
    while (c_.size() > 1 && scalar_mode<T>::negligible(c_.back(), scale)) c_.pop_back();
    if (c_.size() == 1 && scalar_mode<T>::negligible(c_[0], scale)) c_[0] = T(0);
  }

  std::vector<T> c_;
};

/// Vector-valued polynomial in t: d scalar components. Houses the zeta_n, the
/// point values q_n(x*, .), and the X_n of the shifted frame.
template <typename T>
class PolyVec {
 public:
  PolyVec() = default;
  explicit PolyVec(int dim) : comp_(dim) {}
  PolyVec(int dim, std::vector<Poly<T>> comps) : comp_(std::move(comps)) {
    if (static_cast<int>(comp_.size()) != dim)
      throw InvalidInput("polyvec: component count does not match dimension");
  }

  /// Builds from coefficient-major layout: coeffs[k] is the d-vector of t^k.
  static PolyVec from_coefficients(int dim, const std::vector<Vec<T>>& coeffs) {
    PolyVec p(dim);
    for (const auto& a : coeffs)
      if (static_cast<int>(a.size()) != dim)
        throw InvalidInput("polyvec: ragged coefficient list");
    for (int i = 0; i < dim; ++i) {
      std::vector<T> ci(coeffs.size(), T(0));
      for (std::size_t k = 0; k < coeffs.size(); ++k) ci[k] = coeffs[k][i];
      if (ci.empty()) ci.push_back(T(0));
      p.comp_[i] = Poly<T>(std::move(ci));
    }
    return p;
  }

  /// Coefficient-major layout, trailing zero vectors trimmed.
  std::vector<Vec<T>> coefficients() const {
    std::vector<Vec<T>> out(degree() + 1, Vec<T>(dim(), T(0)));
    for (int i = 0; i < dim(); ++i)
      for (int k = 0; k <= comp_[i].degree(); ++k) out[k][i] = comp_[i].coeff(k);
    return out;
  }

  int dim() const { return static_cast<int>(comp_.size()); }
  int degree() const {
    int d = 0;
    for (const auto& c : comp_) d = std::max(d, c.degree());
    return d;
  }
  bool is_zero() const {
    return std::all_of(comp_.begin(), comp_.end(), [](const auto& c) { return c.is_zero(); });
  }

  const Poly<T>& component(int i) const { return comp_.at(i); }
  Poly<T>& component(int i) { return comp_.at(i); }

  Vec<T> eval(const T& t) const {
    Vec<T> out(dim());
    for (int i = 0; i < dim(); ++i) out[i] = comp_[i].eval(t);
    return out;
  }
  VecD eval_double(double t) const {
    VecD out(dim());
    for (int i = 0; i < dim(); ++i) out[i] = comp_[i].eval_double(t);
    return out;
  }

  PolyVec& operator+=(const PolyVec& o) {
    if (o.dim() != dim()) throw InvalidInput("polyvec: dimension mismatch in add");
    for (int i = 0; i < dim(); ++i) comp_[i] += o.comp_[i];
    return *this;
  }
  PolyVec& operator-=(const PolyVec& o) {
    if (o.dim() != dim()) throw InvalidInput("polyvec: dimension mismatch in sub");
    for (int i = 0; i < dim(); ++i) comp_[i] -= o.comp_[i];
    return *this;
  }
  friend PolyVec operator+(PolyVec a, const PolyVec& b) { return a += b; }
  friend PolyVec operator-(PolyVec a, const PolyVec& b) { return a -= b; }

  PolyVec scaled(const T& s) const {
    PolyVec out(*this);
    for (auto& c : out.comp_) c = c.scaled(s);
    return out;
  }

  /// Scalar polynomial times vector polynomial.
  friend PolyVec operator*(const Poly<T>& s, const PolyVec& p) {
    PolyVec out(p.dim());
    for (int i = 0; i < p.dim(); ++i) out.comp_[i] = s * p.comp_[i];
    return out;
  }

  PolyVec derivative() const {
    PolyVec out(dim());
    for (int i = 0; i < dim(); ++i) out.comp_[i] = comp_[i].derivative();
    return out;
  }

  bool operator==(const PolyVec& o) const { return comp_ == o.comp_; }

 private:
  std::vector<Poly<T>> comp_;
};

/// Unique polynomial solution of q' - gamma q = p for gamma > 0, in closed
/// form q = -sum_{j>=0} gamma^{-(j+1)} p^{(j)}. Degree-preserving; the
/// residual vanishes identically (exactly in rational mode).
template <typename T>
Poly<T> resolvent_solve(const T& gamma, const Poly<T>& p) {
  if (!(gamma > T(0)))
    throw InvalidInput("resolvent_solve: gamma must be positive");
  T ginv = T(1) / gamma;
  Poly<T> q;
  Poly<T> dp = p;
  T factor = ginv;
  for (int j = 0; j <= p.degree(); ++j) {
    q -= dp.scaled(factor);
    dp = dp.derivative();
    factor *= ginv;
  }
  return q;
}

template <typename T>
PolyVec<T> resolvent_solve(const T& gamma, const PolyVec<T>& p) {
  PolyVec<T> q(p.dim());
  for (int i = 0; i < p.dim(); ++i) q.component(i) = resolvent_solve(gamma, p.component(i));
  return q;
}

}  // namespace trajexp
