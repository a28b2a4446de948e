#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <span>

#include "trajexp/poly.hpp"
#include "trajexp/semigroup.hpp"

namespace trajexp {

/// Dense symmetric m-linear map from (R^d)^m to R^d, constant entries.
/// Entry layout: component i, then the m-tuple alpha in row-major order.
template <typename T>
class Tensor {
 public:
  Tensor() = default;
  Tensor(int dim, int order) : dim_(dim), order_(order) {
    std::size_t n = dim_;
    for (int s = 0; s < order_; ++s) n *= dim_;
    a_.assign(n, T(0));
  }

  int dim() const { return dim_; }
  int order() const { return order_; }

  T& at(int i, std::span<const int> alpha) { return a_[flat(i, alpha)]; }
  const T& at(int i, std::span<const int> alpha) const { return a_[flat(i, alpha)]; }

  bool is_zero() const {
    return std::all_of(a_.begin(), a_.end(), [](const T& v) { return v == T(0); });
  }

  /// Contraction with m constant vectors.
  Vec<T> apply(std::span<const Vec<T>> args) const {
    if (static_cast<int>(args.size()) != order_)
      throw InvalidInput("tensor: arity mismatch in apply");
    for (const auto& a : args)
      if (static_cast<int>(a.size()) != dim_)
        throw InvalidInput("tensor: argument dimension mismatch");
    Vec<T> out(dim_, T(0));
    std::vector<int> alpha(order_, 0);
    do {
      T w(1);
      for (int s = 0; s < order_; ++s) w *= args[s][alpha[s]];
      for (int i = 0; i < dim_; ++i) out[i] += at(i, alpha) * w;
    } while (next_index(alpha));
    return out;
  }

  /// Advances a multi-index odometer-style; false once exhausted.
  bool next_index(std::vector<int>& alpha) const {
    for (int s = order_ - 1; s >= 0; --s) {
      if (++alpha[s] < dim_) return true;
      alpha[s] = 0;
    }
    return false;
  }

 private:
  std::size_t flat(int i, std::span<const int> alpha) const {
    std::size_t idx = i;
    for (int s = 0; s < order_; ++s) idx = idx * dim_ + alpha[s];
    return idx;
  }

  int dim_ = 0, order_ = 0;
  std::vector<T> a_;
};

/// Polynomial-in-t family of m-linear maps: Q(t) = sum_k t^k A_k. Houses the
/// scaled derivative tensors (1/m!) D^m q_n(x*, t).
template <typename T>
class DerivativeTensor {
 public:
  DerivativeTensor(int dim, int order) : dim_(dim), order_(order) {}

  int dim() const { return dim_; }
  int order() const { return order_; }
  int degree() const { return static_cast<int>(tpow_.size()) - 1; }

  void set_power(int k, Tensor<T> a) {
    if (a.dim() != dim_ || a.order() != order_)
      throw InvalidInput("derivative tensor: shape mismatch");
    if (k >= static_cast<int>(tpow_.size())) tpow_.resize(k + 1, Tensor<T>(dim_, order_));
    tpow_[k] = std::move(a);
  }
  const Tensor<T>& power(int k) const { return tpow_.at(k); }

  /// Scalar polynomial entry (i; alpha) across all powers of t.
  Poly<T> entry(int i, std::span<const int> alpha) const {
    std::vector<T> c(tpow_.size(), T(0));
    for (std::size_t k = 0; k < tpow_.size(); ++k) c[k] = tpow_[k].at(i, alpha);
    if (c.empty()) c.push_back(T(0));
    return Poly<T>(std::move(c));
  }

  /// Contraction with m polynomial arguments; result degree is bounded by
  /// deg Q + sum of argument degrees.
  PolyVec<T> apply(std::span<const PolyVec<T>> args) const {
    if (static_cast<int>(args.size()) != order_)
      throw InvalidInput("derivative tensor: arity mismatch in apply");
    for (const auto& a : args)
      if (a.dim() != dim_)
        throw InvalidInput("derivative tensor: argument dimension mismatch");
    PolyVec<T> out(dim_);
    if (tpow_.empty()) return out;
    std::vector<int> alpha(order_, 0);
    Tensor<T> probe(dim_, order_);
    do {
      Poly<T> prod(T(1));
      bool zero = false;
      for (int s = 0; s < order_ && !zero; ++s) {
        const Poly<T>& c = args[s].component(alpha[s]);
        if (c.is_zero()) zero = true;
        else prod = prod * c;
      }
      if (zero) continue;
      for (std::size_t k = 0; k < tpow_.size(); ++k) {
        const Poly<T> shifted = prod.shifted(static_cast<int>(k));
        for (int i = 0; i < dim_; ++i) {
          const T& w = tpow_[k].at(i, alpha);
          if (!(w == T(0))) out.component(i) += shifted.scaled(w);
        }
      }
    } while (probe.next_index(alpha));
    return out;
  }

  /// The m = 0 case: Q(t) is itself a d-vector polynomial.
  PolyVec<T> as_polyvec() const {
    if (order_ != 0)
      throw InvalidInput("derivative tensor: as_polyvec requires order 0");
    std::vector<Vec<T>> coeffs(tpow_.size());
    for (std::size_t k = 0; k < tpow_.size(); ++k) {
      coeffs[k].resize(dim_);
      for (int i = 0; i < dim_; ++i) coeffs[k][i] = tpow_[k].at(i, {});
    }
    return PolyVec<T>::from_coefficients(dim_, coeffs);
  }

 private:
  int dim_, order_;
  std::vector<Tensor<T>> tpow_;
};

template <typename T>
PolyVec<T> apply_tensor(const DerivativeTensor<T>& q, std::span<const PolyVec<T>> args) {
  return q.apply(args);
}

/// Spatial coefficient field q_{n,k}: evaluation plus exact point derivative
/// tensors of any order.
template <typename T>
class SpatialField {
 public:
  virtual ~SpatialField() = default;
  virtual int dim() const = 0;
  virtual Vec<T> eval(const Vec<T>& x) const = 0;
  virtual VecD eval_at(const VecD& x) const = 0;
  /// Raw m-th derivative D^m f(x) as a symmetric m-linear map (no 1/m!).
  virtual Tensor<T> derivative_tensor(const Vec<T>& x, int m) const = 0;
  virtual bool is_identically_zero() const = 0;
};

template <typename T>
using FieldPtr = std::shared_ptr<const SpatialField<T>>;

/// Real trigonometric polynomial field on the L-periodic torus. Modes are
/// stored for a half-space of wave vectors; the conjugate partner is implied,
/// so eval sums 2 Re(c e^{i kappa.x}) per stored mode (plus a real k = 0 term
/// when the field is not zero-mean).
struct TrigMode {
  std::vector<int> k;
  std::vector<std::complex<double>> c;
};

class TrigField final : public SpatialField<double> {
 public:
  TrigField(int dim, VecD periods, std::vector<TrigMode> modes,
            bool zero_mean = true, bool divergence_free = false);

  int dim() const override { return dim_; }
  VecD eval(const VecD& x) const override;
  VecD eval_at(const VecD& x) const override { return eval(x); }
  Tensor<double> derivative_tensor(const VecD& x, int m) const override;
  bool is_identically_zero() const override { return modes_.empty(); }

  const std::vector<TrigMode>& modes() const { return modes_; }
  const VecD& periods() const { return periods_; }
  bool zero_mean() const { return zero_mean_; }
  bool divergence_free() const { return divergence_free_; }

  /// max_kappa |kappa . c(kappa)| over stored modes (0 for a solenoidal field).
  double divergence_defect() const;

  TrigField scaled(double s) const;

 private:
  VecD wavevector(const TrigMode& m) const;  // physical 2*pi*k/L

  int dim_;
  VecD periods_;
  std::vector<TrigMode> modes_;
  bool zero_mean_, divergence_free_;
};

/// Multivariate polynomial field. A test-fixture representation: the engine
/// consumes only point derivative tensors, and polynomial fields admit
/// closed-form trajectory oracles.
template <typename T>
struct PolyMonomial {
  std::vector<int> powers;
  Vec<T> coeff;
};

template <typename T>
class PolyField final : public SpatialField<T> {
 public:
  PolyField(int dim, std::vector<PolyMonomial<T>> monomials)
      : dim_(dim), monos_(std::move(monomials)) {
    for (const auto& m : monos_) {
      if (static_cast<int>(m.powers.size()) != dim_ ||
          static_cast<int>(m.coeff.size()) != dim_)
        throw InvalidInput("poly field: monomial shape mismatch");
      for (int p : m.powers)
        if (p < 0) throw InvalidInput("poly field: negative exponent");
    }
  }

  int dim() const override { return dim_; }

  Vec<T> eval(const Vec<T>& x) const override {
    Vec<T> out(dim_, T(0));
    for (const auto& m : monos_) {
      T w(1);
      for (int a = 0; a < dim_; ++a)
        for (int p = 0; p < m.powers[a]; ++p) w *= x[a];
      for (int i = 0; i < dim_; ++i) out[i] += m.coeff[i] * w;
    }
    return out;
  }

  VecD eval_at(const VecD& x) const override {
    VecD out(dim_, 0.0);
    for (const auto& m : monos_) {
      double w = 1.0;
      for (int a = 0; a < dim_; ++a)
        for (int p = 0; p < m.powers[a]; ++p) w *= x[a];
      for (int i = 0; i < dim_; ++i) out[i] += scalar_mode<T>::to_dbl(m.coeff[i]) * w;
    }
    return out;
  }

  /// D^m of x^p is a falling-factorial weight times x^{p - beta}, where beta
  /// counts how many times each axis appears in the derivative multi-index.
  Tensor<T> derivative_tensor(const Vec<T>& x, int m) const override {
    Tensor<T> out(dim_, m);
    std::vector<int> alpha(m, 0);
    if (monos_.empty()) return out;
    do {
      std::vector<int> beta(dim_, 0);
      for (int s = 0; s < m; ++s) ++beta[alpha[s]];
      for (const auto& mono : monos_) {
        T w(1);
        bool vanish = false;
        for (int a = 0; a < dim_ && !vanish; ++a) {
          int p = mono.powers[a], b = beta[a];
          if (b > p) { vanish = true; break; }
          for (int r = 0; r < b; ++r) w *= T(p - r);
          for (int r = 0; r < p - b; ++r) w *= x[a];
        }
        if (vanish) continue;
        for (int i = 0; i < dim_; ++i)
          if (!(mono.coeff[i] == T(0))) out.at(i, alpha) += mono.coeff[i] * w;
      }
    } while (out.next_index(alpha));
    return out;
  }

  bool is_identically_zero() const override {
    for (const auto& m : monos_)
      for (const auto& c : m.coeff)
        if (!(c == T(0))) return false;
    return true;
  }

  const std::vector<PolyMonomial<T>>& monomials() const { return monos_; }

 private:
  int dim_;
  std::vector<PolyMonomial<T>> monos_;
};

/// One term of the velocity expansion: q_n(x, t) = sum_k t^k q_{n,k}(x).
template <typename T>
struct ExpansionTerm {
  int n = 0;
  std::vector<FieldPtr<T>> time_coeffs;  // index = power of t
};

/// Velocity expansion u(x,t) ~ U0 + sum_n q_n(x - U0 t, t) e^{-mu_n t}:
/// spatial coefficient fields per exponent plus the semigroup that orders the
/// exponents. Immutable after construction.
template <typename T>
class FieldExpansion {
 public:
  FieldExpansion(int dim, Semigroup sg, std::vector<ExpansionTerm<T>> terms,
                 Vec<T> mean_flow, int declared_order, bool trig = false,
                 VecD periods = {}, int m_max = 6)
      : dim_(dim),
        sg_(std::move(sg)),
        terms_(std::move(terms)),
        mean_flow_(std::move(mean_flow)),
        declared_order_(declared_order),
        trig_(trig),
        periods_(std::move(periods)),
        m_max_(m_max) {
    if (dim_ < 1 || dim_ > 3) throw InvalidInput("field expansion: dim must be 1, 2 or 3");
    if (static_cast<int>(mean_flow_.size()) != dim_)
      throw InvalidInput("field expansion: mean_flow dimension mismatch");
    if (declared_order_ < 1 || declared_order_ > sg_.cap())
      throw InvalidInput("field expansion: declared order outside semigroup cap");
    std::sort(terms_.begin(), terms_.end(),
              [](const auto& a, const auto& b) { return a.n < b.n; });
    int prev = 0;
    for (const auto& t : terms_) {
      if (t.n <= prev) throw InvalidInput("field expansion: duplicate term index");
      if (t.n > declared_order_)
        throw InvalidInput("field expansion: term index beyond declared order");
      if (t.time_coeffs.empty())
        throw InvalidInput("field expansion: term without coefficients");
      for (const auto& f : t.time_coeffs)
        if (!f || f->dim() != dim_)
          throw InvalidInput("field expansion: coefficient dimension mismatch");
      // q_1 is independent of t; reject higher powers at ingestion.
      if (t.n == 1 && t.time_coeffs.size() > 1) {
        for (std::size_t k = 1; k < t.time_coeffs.size(); ++k)
          if (!t.time_coeffs[k]->is_identically_zero())
            throw InvalidInput("field expansion: q_1 must be constant in t");
      }
      prev = t.n;
    }
  }

  int dim() const { return dim_; }
  const Semigroup& semigroup() const { return sg_; }
  int declared_order() const { return declared_order_; }
  int m_max() const { return m_max_; }
  bool trig_mode() const { return trig_; }
  const VecD& periods() const { return periods_; }
  const Vec<T>& mean_flow() const { return mean_flow_; }
  const std::vector<ExpansionTerm<T>>& terms() const { return terms_; }

  bool has_mean_flow() const {
    return std::any_of(mean_flow_.begin(), mean_flow_.end(),
                       [](const T& v) { return !(v == T(0)); });
  }

  const ExpansionTerm<T>* term(int n) const {
    for (const auto& t : terms_)
      if (t.n == n) return &t;
    return nullptr;
  }

  /// q_n(x, .) as a polynomial in t (zero when the term is not stored).
  PolyVec<T> q_at(int n, const Vec<T>& x) const {
    const ExpansionTerm<T>* t = term(n);
    if (!t) return PolyVec<T>(dim_);
    std::vector<Vec<T>> coeffs(t->time_coeffs.size());
    for (std::size_t k = 0; k < t->time_coeffs.size(); ++k)
      coeffs[k] = t->time_coeffs[k]->eval(x);
    return PolyVec<T>::from_coefficients(dim_, coeffs);
  }

  /// Q_{n,m}(x*, t) = sum_k (t^k/m!) D^m q_{n,k}(x*). Throws when the term is
  /// not stored; callers that treat absent terms as zero check term(n) first.
  DerivativeTensor<T> tensor_poly(int n, int m, const Vec<T>& x_star) const {
    const ExpansionTerm<T>* t = term(n);
    if (!t)
      throw InvalidInput("field expansion: term " + std::to_string(n) + " not stored");
    T inv_fact(1);
    for (int r = 2; r <= m; ++r) inv_fact *= T(r);
    inv_fact = T(1) / inv_fact;
    DerivativeTensor<T> q(dim_, m);
    for (std::size_t k = 0; k < t->time_coeffs.size(); ++k) {
      Tensor<T> a = t->time_coeffs[k]->derivative_tensor(x_star, m);
      if (!(inv_fact == T(1))) {
        std::vector<int> alpha(m, 0);
        do {
          for (int i = 0; i < dim_; ++i) a.at(i, alpha) *= inv_fact;
        } while (a.next_index(alpha));
      }
      q.set_power(static_cast<int>(k), std::move(a));
    }
    return q;
  }

  /// Truncated velocity U0 + sum_{n<=N} q_n(x - U0 t, t) e^{-mu_n t}.
  VecD eval_velocity(const VecD& x, double t, int truncation) const {
    if (truncation < 0 || truncation > declared_order_)
      throw InvalidInput("eval_velocity: truncation exceeds stored terms");
    VecD u0 = as_double_vec(mean_flow_);
    VecD xs(dim_);
    for (int i = 0; i < dim_; ++i) xs[i] = x[i] - u0[i] * t;
    VecD out = u0;
    for (const auto& term : terms_) {
      if (term.n > truncation) break;
      double damp = std::exp(-sg_.mu_double(term.n) * t);
      double tk = 1.0;
      for (std::size_t k = 0; k < term.time_coeffs.size(); ++k) {
        VecD v = term.time_coeffs[k]->eval_at(xs);
        for (int i = 0; i < dim_; ++i) out[i] += v[i] * tk * damp;
        tk *= t;
      }
    }
    return out;
  }

  /// Velocity evaluator over all declared terms, for the trajectory oracle.
  /// Captures a copy so the functor outlives this object.
  std::function<VecD(const VecD&, double)> velocity() const {
    return [fe = *this](const VecD& x, double t) {
      return fe.eval_velocity(x, t, fe.declared_order_);
    };
  }

  /// True when every stored coefficient family is constant in t.
  bool t_independent() const {
    for (const auto& t : terms_)
      for (std::size_t k = 1; k < t.time_coeffs.size(); ++k)
        if (!t.time_coeffs[k]->is_identically_zero()) return false;
    return true;
  }

 private:
  int dim_;
  Semigroup sg_;
  std::vector<ExpansionTerm<T>> terms_;
  Vec<T> mean_flow_;
  int declared_order_;
  bool trig_;
  VecD periods_;
  int m_max_;
};

}  // namespace trajexp
