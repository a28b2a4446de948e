#include "trajexp/field.hpp"

#include <cmath>
#include <numbers>

namespace trajexp {

namespace {

bool half_space_positive(const std::vector<int>& k) {
  for (int v : k) {
    if (v > 0) return true;
    if (v < 0) return false;
  }
  return false;  // k == 0
}

bool is_zero_vec(const std::vector<int>& k) {
  return std::all_of(k.begin(), k.end(), [](int v) { return v == 0; });
}

}  // namespace

TrigField::TrigField(int dim, VecD periods, std::vector<TrigMode> modes,
                     bool zero_mean, bool divergence_free)
    : dim_(dim),
      periods_(std::move(periods)),
      modes_(std::move(modes)),
      zero_mean_(zero_mean),
      divergence_free_(divergence_free) {
  if (dim_ < 1 || dim_ > 3) throw InvalidInput("trig field: dim must be 1, 2 or 3");
  if (static_cast<int>(periods_.size()) != dim_)
    throw InvalidInput("trig field: need one period per dimension");
  for (double L : periods_)
    if (!(L > 0)) throw InvalidInput("trig field: periods must be > 0");

  // Normalize to the half-space representation: fold kappa < 0 modes onto
  // their conjugates and merge duplicates.
  std::vector<TrigMode> folded;
  for (auto& m : modes_) {
    if (static_cast<int>(m.k.size()) != dim_ || static_cast<int>(m.c.size()) != dim_)
      throw InvalidInput("trig field: mode shape mismatch");
    TrigMode mm = m;
    if (!is_zero_vec(mm.k) && !half_space_positive(mm.k)) {
      for (auto& v : mm.k) v = -v;
      for (auto& c : mm.c) c = std::conj(c);
    }
    bool merged = false;
    for (auto& f : folded) {
      if (f.k == mm.k) {
        for (int i = 0; i < dim_; ++i) f.c[i] += mm.c[i];
        merged = true;
        break;
      }
    }
    if (!merged) folded.push_back(std::move(mm));
  }
  modes_ = std::move(folded);

  for (auto& m : modes_) {
    if (is_zero_vec(m.k)) {
      if (zero_mean_) throw InvalidInput("trig field: k = 0 mode in a zero-mean field");
      for (auto& c : m.c)
        if (std::abs(c.imag()) > 0)
          throw InvalidInput("trig field: k = 0 coefficient must be real");
    }
  }
  if (divergence_free_) {
    double defect = divergence_defect();
    double scale = 0;
    for (const auto& m : modes_)
      for (const auto& c : m.c) scale = std::max(scale, std::abs(c));
    if (defect > 1e-12 * std::max(scale, 1.0))
      throw InvalidInput("trig field: divergence-free flag violated");
  }
}

VecD TrigField::wavevector(const TrigMode& m) const {
  VecD kappa(dim_);
  for (int i = 0; i < dim_; ++i)
    kappa[i] = 2.0 * std::numbers::pi * m.k[i] / periods_[i];
  return kappa;
}

VecD TrigField::eval(const VecD& x) const {
  VecD out(dim_, 0.0);
  for (const auto& m : modes_) {
    if (is_zero_vec(m.k)) {
      for (int i = 0; i < dim_; ++i) out[i] += m.c[i].real();
      continue;
    }
    VecD kappa = wavevector(m);
    double phase = 0;
    for (int i = 0; i < dim_; ++i) phase += kappa[i] * x[i];
    std::complex<double> e(std::cos(phase), std::sin(phase));
    for (int i = 0; i < dim_; ++i) out[i] += 2.0 * (m.c[i] * e).real();
  }
  return out;
}

Tensor<double> TrigField::derivative_tensor(const VecD& x, int m) const {
  Tensor<double> out(dim_, m);
  std::vector<int> alpha(m, 0);
  if (modes_.empty()) return out;
  // Differentiating the mode e^{i kappa.x} m times along axes alpha brings
  // down i^m * kappa_{alpha_1} ... kappa_{alpha_m}.
  std::complex<double> im_pow(1, 0);
  for (int s = 0; s < m; ++s) im_pow *= std::complex<double>(0, 1);
  do {
    for (const auto& mode : modes_) {
      if (is_zero_vec(mode.k)) {
        if (m == 0)
          for (int i = 0; i < dim_; ++i) out.at(i, alpha) += mode.c[i].real();
        continue;
      }
      VecD kappa = wavevector(mode);
      double kprod = 1.0;
      for (int s = 0; s < m; ++s) kprod *= kappa[alpha[s]];
      double phase = 0;
      for (int i = 0; i < dim_; ++i) phase += kappa[i] * x[i];
      std::complex<double> e = im_pow * std::complex<double>(std::cos(phase), std::sin(phase));
      for (int i = 0; i < dim_; ++i)
        out.at(i, alpha) += 2.0 * (mode.c[i] * e).real() * kprod;
    }
  } while (out.next_index(alpha));
  return out;
}

double TrigField::divergence_defect() const {
  double worst = 0;
  for (const auto& m : modes_) {
    VecD kappa = wavevector(m);
    std::complex<double> dot(0, 0);
    for (int i = 0; i < dim_; ++i) dot += kappa[i] * m.c[i];
    worst = std::max(worst, std::abs(dot));
  }
  return worst;
}

TrigField TrigField::scaled(double s) const {
  std::vector<TrigMode> modes = modes_;
  for (auto& m : modes)
    for (auto& c : m.c) c *= s;
  return TrigField(dim_, periods_, std::move(modes), zero_mean_, divergence_free_);
}

}  // namespace trajexp
