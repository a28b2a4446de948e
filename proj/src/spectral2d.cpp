#include "trajexp/spectral2d.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <random>
#include <utility>

#include "trajexp/oracle.hpp"

namespace trajexp {

namespace {
constexpr double kPi = std::numbers::pi;
}

struct Spectral2D::Impl {
  // Scratch arrays owned by the solver; plans are bound to them.
  double* u1 = nullptr;
  double* u2 = nullptr;
  double* wx = nullptr;
  double* wy = nullptr;
  double* sr = nullptr;  // advection term in physical space
  fftw_complex* spec = nullptr;
  fftw_plan c2r_u1{}, c2r_u2{}, c2r_wx{}, c2r_wy{}, r2c_s{};

  explicit Impl(int M) {
    const std::size_t nr = static_cast<std::size_t>(M) * M;
    const std::size_t nc = static_cast<std::size_t>(M) * (M / 2 + 1);
    u1 = fftw_alloc_real(nr);
    u2 = fftw_alloc_real(nr);
    wx = fftw_alloc_real(nr);
    wy = fftw_alloc_real(nr);
    sr = fftw_alloc_real(nr);
    spec = fftw_alloc_complex(nc);
    c2r_u1 = fftw_plan_dft_c2r_2d(M, M, spec, u1, FFTW_ESTIMATE);
    c2r_u2 = fftw_plan_dft_c2r_2d(M, M, spec, u2, FFTW_ESTIMATE);
    c2r_wx = fftw_plan_dft_c2r_2d(M, M, spec, wx, FFTW_ESTIMATE);
    c2r_wy = fftw_plan_dft_c2r_2d(M, M, spec, wy, FFTW_ESTIMATE);
    r2c_s = fftw_plan_dft_r2c_2d(M, M, sr, spec, FFTW_ESTIMATE);
  }
  ~Impl() {
    fftw_destroy_plan(c2r_u1);
    fftw_destroy_plan(c2r_u2);
    fftw_destroy_plan(c2r_wx);
    fftw_destroy_plan(c2r_wy);
    fftw_destroy_plan(r2c_s);
    fftw_free(u1);
    fftw_free(u2);
    fftw_free(wx);
    fftw_free(wy);
    fftw_free(sr);
    fftw_free(spec);
  }
};

Spectral2D::Spectral2D(int M, std::array<double, 2> periods, double nu)
    : M_(M), L_(periods), nu_(nu), impl_(std::make_unique<Impl>(M)) {
  if (M_ < 4 || M_ % 2 != 0 || M_ > 64)
    throw InvalidInput("spectral2d: M must be even, 4 <= M <= 64");
  if (!(L_[0] > 0) || !(L_[1] > 0)) throw InvalidInput("spectral2d: periods must be > 0");
  if (!(nu_ > 0)) throw InvalidInput("spectral2d: nu must be > 0");
}

Spectral2D::~Spectral2D() = default;

namespace {

inline int wrap_k(int i, int M) { return i <= M / 2 ? i : i - M; }

inline bool dealias_keep(int kx, int ky, int M) {
  const int cut = M / 3;
  return std::abs(kx) <= cut && std::abs(ky) <= cut;
}

}  // namespace

SpectralState Spectral2D::taylor_green(double amplitude, VecD mean_flow) const {
  // u = A (cos x1 sin x2, -sin x1 cos x2), w = -2A cos x1 cos x2: the modes
  // (+-1, +-1) with coefficient -A/2 each.
  SpectralState s;
  s.M = M_;
  s.periods = L_;
  s.nu = nu_;
  s.mean_flow = std::move(mean_flow);
  s.what.assign(spec_size(), {0.0, 0.0});
  const int stride = M_ / 2 + 1;
  auto put = [&](int kx, int ky, std::complex<double> v) {
    int ix = kx >= 0 ? kx : kx + M_;
    s.what[static_cast<std::size_t>(ix) * stride + ky] = v;
  };
  put(1, 1, {-amplitude / 2, 0});
  put(-1, 1, {-amplitude / 2, 0});
  return s;
}

SpectralState Spectral2D::single_mode(std::array<int, 2> k, double amplitude,
                                      VecD mean_flow) const {
  if (k[0] == 0 && k[1] == 0)
    throw InvalidInput("spectral2d: single mode must have k != 0");
  if (!dealias_keep(k[0], k[1], M_))
    throw InvalidInput("spectral2d: mode outside the dealiased band");
  SpectralState s;
  s.M = M_;
  s.periods = L_;
  s.nu = nu_;
  s.mean_flow = std::move(mean_flow);
  s.what.assign(spec_size(), {0.0, 0.0});
  const int stride = M_ / 2 + 1;
  // Store the half-space representative; the conjugate partner is implicit
  // for ky > 0 and explicit on the ky = 0 row.
  int kx = k[0], ky = k[1];
  if (ky < 0 || (ky == 0 && kx < 0)) {
    kx = -kx;
    ky = -ky;
  }
  int ix = kx >= 0 ? kx : kx + M_;
  s.what[static_cast<std::size_t>(ix) * stride + ky] = {amplitude, 0};
  if (ky == 0) {
    int ixc = (M_ - kx) % M_;
    s.what[static_cast<std::size_t>(ixc) * stride] = {amplitude, 0};
  }
  return s;
}

SpectralState Spectral2D::random_field(std::uint64_t seed, double amplitude,
                                       int k_max, VecD mean_flow) const {
  SpectralState s;
  s.M = M_;
  s.periods = L_;
  s.nu = nu_;
  s.mean_flow = std::move(mean_flow);
  s.what.assign(spec_size(), {0.0, 0.0});
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int stride = M_ / 2 + 1;
  for (int i = 0; i < M_; ++i) {
    int kx = wrap_k(i, M_);
    for (int ky = 0; ky <= M_ / 2; ++ky) {
      if (kx == 0 && ky == 0) continue;
      if (!dealias_keep(kx, ky, M_)) continue;
      if (std::abs(kx) > k_max || std::abs(ky) > k_max) continue;
      if (ky == 0 && kx < 0) continue;  // fill half, mirror below
      double k2 = double(kx) * kx + double(ky) * ky;
      std::complex<double> v(gauss(rng), gauss(rng));
      v *= amplitude / (1.0 + k2);
      s.what[static_cast<std::size_t>(i) * stride + ky] = v;
      if (ky == 0) {
        int ixc = (M_ - kx) % M_;
        s.what[static_cast<std::size_t>(ixc) * stride] = std::conj(v);
      }
    }
  }
  return s;
}

void Spectral2D::nonlinear(const std::vector<std::complex<double>>& what,
                           std::vector<std::complex<double>>& out, double* umax) {
  const int stride = M_ / 2 + 1;
  const double kx0 = 2 * kPi / L_[0], ky0 = 2 * kPi / L_[1];
  const std::size_t nc = spec_size();
  auto* spec = reinterpret_cast<std::complex<double>*>(impl_->spec);

  // velocity u = (d psi / dx2, -d psi / dx1), psi = w / |kappa|^2
  for (int comp = 0; comp < 2; ++comp) {
    for (int i = 0; i < M_; ++i) {
      double kx = kx0 * wrap_k(i, M_);
      for (int j = 0; j <= M_ / 2; ++j) {
        double ky = ky0 * j;
        double k2 = kx * kx + ky * ky;
        std::complex<double> w = what[static_cast<std::size_t>(i) * stride + j];
        std::complex<double> psi = k2 > 0 ? w / k2 : 0.0;
        std::complex<double> im(0, 1);
        spec[static_cast<std::size_t>(i) * stride + j] =
            comp == 0 ? im * ky * psi : -im * kx * psi;
      }
    }
    fftw_execute(comp == 0 ? impl_->c2r_u1 : impl_->c2r_u2);
  }
  // vorticity gradient
  for (int comp = 0; comp < 2; ++comp) {
    for (int i = 0; i < M_; ++i) {
      double kx = kx0 * wrap_k(i, M_);
      for (int j = 0; j <= M_ / 2; ++j) {
        double ky = ky0 * j;
        std::complex<double> w = what[static_cast<std::size_t>(i) * stride + j];
        std::complex<double> im(0, 1);
        spec[static_cast<std::size_t>(i) * stride + j] = im * (comp == 0 ? kx : ky) * w;
      }
    }
    fftw_execute(comp == 0 ? impl_->c2r_wx : impl_->c2r_wy);
  }

  const std::size_t nr = static_cast<std::size_t>(M_) * M_;
  double mx = 0;
  for (std::size_t p = 0; p < nr; ++p) {
    impl_->sr[p] = impl_->u1[p] * impl_->wx[p] + impl_->u2[p] * impl_->wy[p];
    mx = std::max(mx, std::hypot(impl_->u1[p], impl_->u2[p]));
  }
  if (umax) *umax = mx;

  fftw_execute(impl_->r2c_s);
  out.resize(nc);
  const double norm = 1.0 / (static_cast<double>(M_) * M_);
  for (int i = 0; i < M_; ++i) {
    int kx = wrap_k(i, M_);
    for (int j = 0; j <= M_ / 2; ++j) {
      std::size_t idx = static_cast<std::size_t>(i) * stride + j;
      out[idx] = dealias_keep(kx, j, M_) ? -spec[idx] * norm : 0.0;
    }
  }
}

std::vector<std::complex<double>> Spectral2D::rhs(const SpectralState& s) {
  std::vector<std::complex<double>> out;
  nonlinear(s.what, out, nullptr);
  const int stride = M_ / 2 + 1;
  const double kx0 = 2 * kPi / L_[0], ky0 = 2 * kPi / L_[1];
  for (int i = 0; i < M_; ++i) {
    double kx = kx0 * wrap_k(i, M_);
    for (int j = 0; j <= M_ / 2; ++j) {
      double ky = ky0 * j;
      std::size_t idx = static_cast<std::size_t>(i) * stride + j;
      out[idx] -= nu_ * (kx * kx + ky * ky) * s.what[idx];
    }
  }
  return out;
}

void Spectral2D::step(SpectralState& s, double dt) {
  if (s.M != M_) throw InvalidInput("spectral2d: state/solver grid mismatch");
  if (!(dt > 0)) throw InvalidInput("spectral2d: dt must be > 0");

  const int stride = M_ / 2 + 1;
  const std::size_t nc = spec_size();
  const double kx0 = 2 * kPi / L_[0], ky0 = 2 * kPi / L_[1];

  // Integrating-factor RK4: exact viscous decay between stages, classical
  // RK4 on the dealiased advection term.
  std::vector<std::complex<double>> E(nc), E2(nc);
  for (int i = 0; i < M_; ++i) {
    double kx = kx0 * wrap_k(i, M_);
    for (int j = 0; j <= M_ / 2; ++j) {
      double ky = ky0 * j;
      double f = std::exp(-nu_ * (kx * kx + ky * ky) * dt / 2);
      std::size_t idx = static_cast<std::size_t>(i) * stride + j;
      E[idx] = f;
      E2[idx] = f * f;
    }
  }

  std::vector<std::complex<double>> a, b, c, d, tmp(nc);
  double umax = 0;
  nonlinear(s.what, a, &umax);

  const double dx = std::min(L_[0], L_[1]) / M_;
  if (umax > 0 && dt > 0.5 * dx / umax)
    throw CflError("spectral2d: CFL violated (dt = " + std::to_string(dt) +
                       ", max|u| = " + std::to_string(umax) + ")",
                   0.45 * dx / umax);

  for (std::size_t p = 0; p < nc; ++p) a[p] *= dt;
  for (std::size_t p = 0; p < nc; ++p) tmp[p] = E[p] * (s.what[p] + a[p] * 0.5);
  nonlinear(tmp, b, nullptr);
  for (std::size_t p = 0; p < nc; ++p) b[p] *= dt;
  for (std::size_t p = 0; p < nc; ++p) tmp[p] = E[p] * s.what[p] + b[p] * 0.5;
  nonlinear(tmp, c, nullptr);
  for (std::size_t p = 0; p < nc; ++p) c[p] *= dt;
  for (std::size_t p = 0; p < nc; ++p) tmp[p] = E2[p] * s.what[p] + E[p] * c[p];
  nonlinear(tmp, d, nullptr);
  for (std::size_t p = 0; p < nc; ++p) d[p] *= dt;

  for (std::size_t p = 0; p < nc; ++p) {
    s.what[p] = E2[p] * s.what[p] +
                (E2[p] * a[p] + 2.0 * E[p] * (b[p] + c[p]) + d[p]) / 6.0;
    if (!std::isfinite(s.what[p].real()) || !std::isfinite(s.what[p].imag()))
      throw NumericsError("spectral2d: non-finite coefficient (check dt)");
  }
  s.t += dt;
  s.what_t.clear();
}

std::vector<SpectralState> Spectral2D::simulate(SpectralState s, double t_end,
                                                double stride, double dt) {
  if (!(t_end > s.t)) throw InvalidInput("spectral2d: t_end must exceed the state time");
  if (!(stride > 0)) throw InvalidInput("spectral2d: store stride must be > 0");

  if (dt <= 0) {
    double umax = max_speed(s);
    const double dx = std::min(L_[0], L_[1]) / M_;
    double dt_cfl = umax > 0 ? 0.4 * dx / umax : stride;
    dt = std::min(dt_cfl, stride);
  }

  std::vector<SpectralState> out;
  const double t_begin = s.t;
  const int n_strides = static_cast<int>(std::ceil((t_end - t_begin) / stride - 1e-12));
  s.what_t = rhs(s);
  out.push_back(s);
  for (int seg = 0; seg < n_strides; ++seg) {
    const double seg_end = std::min(t_begin + (seg + 1) * stride, t_end);
    const double span = seg_end - s.t;
    const int n_sub = std::max(1, static_cast<int>(std::ceil(span / dt - 1e-12)));
    const double h = span / n_sub;
    for (int sub = 0; sub < n_sub; ++sub) step(s, h);
    s.t = seg_end;  // suppress accumulated roundoff
    s.what_t = rhs(s);
    out.push_back(s);
  }
  return out;
}

double Spectral2D::energy(const SpectralState& s) const {
  const int stride = M_ / 2 + 1;
  const double kx0 = 2 * kPi / L_[0], ky0 = 2 * kPi / L_[1];
  double sum = 0;
  for (int i = 0; i < M_; ++i) {
    double kx = kx0 * wrap_k(i, M_);
    for (int j = 0; j <= M_ / 2; ++j) {
      double ky = ky0 * j;
      double k2 = kx * kx + ky * ky;
      if (k2 == 0) continue;
      double w2 = std::norm(s.what[static_cast<std::size_t>(i) * stride + j]);
      double weight = (j == 0 || j == M_ / 2) ? 1.0 : 2.0;
      sum += weight * w2 / k2;  // |u_hat|^2 = |w_hat|^2 / |kappa|^2
    }
  }
  return 0.5 * L_[0] * L_[1] * sum;
}

double Spectral2D::max_speed(const SpectralState& s) {
  std::vector<std::complex<double>> scratch;
  double umax = 0;
  nonlinear(s.what, scratch, &umax);
  return umax;
}

double Spectral2D::divergence_defect(const SpectralState& s) const {
  // Velocity from the streamfunction satisfies kappa . u_hat =
  // psi_hat (kappa . kappa^perp) = 0; this recomputes it explicitly.
  const int stride = M_ / 2 + 1;
  const double kx0 = 2 * kPi / L_[0], ky0 = 2 * kPi / L_[1];
  double worst = 0;
  for (int i = 0; i < M_; ++i) {
    double kx = kx0 * wrap_k(i, M_);
    for (int j = 0; j <= M_ / 2; ++j) {
      double ky = ky0 * j;
      double k2 = kx * kx + ky * ky;
      if (k2 == 0) continue;
      std::complex<double> w = s.what[static_cast<std::size_t>(i) * stride + j];
      std::complex<double> im(0, 1);
      std::complex<double> u1 = im * ky * w / k2;
      std::complex<double> u2 = -im * kx * w / k2;
      worst = std::max(worst, std::abs(kx * u1 + ky * u2));
    }
  }
  return worst;
}

VecD Spectral2D::velocity_at(std::span<const SpectralState> states, const VecD& x,
                             double t) const {
  if (states.empty()) throw InvalidInput("spectral2d: no states");
  if (t < states.front().t - 1e-12 || t > states.back().t + 1e-12)
    throw InvalidInput("spectral2d: time outside the stored range");
  t = std::clamp(t, states.front().t, states.back().t);

  // Locate the bracketing checkpoints and Hermite-interpolate the vorticity
  // coefficients (velocity is linear in them).
  std::size_t hi = 1;
  while (hi + 1 < states.size() && states[hi].t < t) ++hi;
  const SpectralState& s0 = states[hi - 1];
  const SpectralState& s1 = states[hi];
  const double h = s1.t - s0.t;
  const double th = h > 0 ? (t - s0.t) / h : 0.0;
  const double h00 = (1 + 2 * th) * (1 - th) * (1 - th);
  const double h10 = th * (1 - th) * (1 - th);
  const double h01 = th * th * (3 - 2 * th);
  const double h11 = th * th * (th - 1);

  const VecD& u0 = s0.mean_flow;
  VecD xs{x[0] - u0[0] * t, x[1] - u0[1] * t};

  const int stride = M_ / 2 + 1;
  const double kx0 = 2 * kPi / L_[0], ky0 = 2 * kPi / L_[1];
  double v1 = 0, v2 = 0;
  for (int i = 0; i < M_; ++i) {
    double kx = kx0 * wrap_k(i, M_);
    for (int j = 0; j <= M_ / 2; ++j) {
      double ky = ky0 * j;
      double k2 = kx * kx + ky * ky;
      if (k2 == 0) continue;
      std::size_t idx = static_cast<std::size_t>(i) * stride + j;
      std::complex<double> w = h00 * s0.what[idx] + h01 * s1.what[idx];
      if (!s0.what_t.empty() && !s1.what_t.empty())
        w += h * (h10 * s0.what_t[idx] + h11 * s1.what_t[idx]);
      std::complex<double> psi = w / k2;
      std::complex<double> im(0, 1);
      std::complex<double> uh1 = im * ky * psi;
      std::complex<double> uh2 = -im * kx * psi;
      double phase = kx * xs[0] + ky * xs[1];
      std::complex<double> e(std::cos(phase), std::sin(phase));
      double weight = (j == 0 || j == M_ / 2) ? 1.0 : 2.0;
      v1 += weight * (uh1 * e).real();
      v2 += weight * (uh2 * e).real();
    }
  }
  return {u0[0] + v1, u0[1] + v2};
}

LeadingTerm Spectral2D::extract_leading_term(std::span<const SpectralState> tail,
                                             double dominance) const {
  if (tail.size() < 4)
    throw InvalidInput("spectral2d: need at least 4 checkpoints to extract a rate");
  const int stride = M_ / 2 + 1;
  const double kx0 = 2 * kPi / L_[0], ky0 = 2 * kPi / L_[1];

  // Group modes into eigenshells by |kappa|^2.
  std::vector<double> lambdas;
  auto shell_of = [&](double k2) -> std::size_t {
    for (std::size_t s = 0; s < lambdas.size(); ++s)
      if (std::abs(lambdas[s] - k2) <= 1e-9 * k2) return s;
    lambdas.push_back(k2);
    return lambdas.size() - 1;
  };
  std::vector<std::pair<std::size_t, std::size_t>> mode_shell;  // (flat idx, shell)
  for (int i = 0; i < M_; ++i) {
    double kx = kx0 * wrap_k(i, M_);
    for (int j = 0; j <= M_ / 2; ++j) {
      double ky = ky0 * j;
      double k2 = kx * kx + ky * ky;
      if (k2 == 0) continue;
      mode_shell.emplace_back(static_cast<std::size_t>(i) * stride + j, shell_of(k2));
    }
  }

  auto shell_amp2 = [&](const SpectralState& s, std::vector<double>& amp2) {
    amp2.assign(lambdas.size(), 0.0);
    for (auto [idx, sh] : mode_shell) {
      int j = static_cast<int>(idx % stride);
      double weight = (j == 0 || j == M_ / 2) ? 1.0 : 2.0;
      amp2[sh] += weight * std::norm(s.what[idx]) / lambdas[sh];
    }
  };

  // Dominant shell: the largest amplitude at the window end (decay sorts the
  // shells, so this is the slowest populated one).
  std::vector<double> amp_end;
  shell_amp2(tail.back(), amp_end);
  std::size_t dom = 0;
  double total = 0;
  for (std::size_t s = 0; s < amp_end.size(); ++s) {
    total += amp_end[s];
    if (amp_end[s] > amp_end[dom]) dom = s;
  }
  if (total <= 0)
    throw InvalidInput("spectral2d: field is identically zero; nothing to extract");
  const double ratio = amp_end[dom] / total;
  if (ratio < dominance)
    throw InvalidInput("spectral2d: transient not decayed (dominant shell holds " +
                       std::to_string(100 * ratio) + "% of the energy)");

  std::vector<double> times, amps;
  std::vector<double> amp2;
  const SpectralState* ref_state = nullptr;
  for (const auto& s : tail) {
    shell_amp2(s, amp2);
    if (amp2[dom] <= 0) continue;
    if (!ref_state) ref_state = &s;
    times.push_back(s.t);
    amps.push_back(std::sqrt(amp2[dom]));
  }
  DecayFit fit_result = fit_decay_rate(times, amps, 1e-12, 4);

  LeadingTerm out;
  out.mu1_hat = fit_result.slope;
  out.lambda_shell = lambdas[dom];
  out.fit_r2 = fit_result.r2;
  out.shell_energy_ratio = ratio;
  out.t_ref = times.front();

  auto q1_at = [&](const SpectralState& s, double t_ref) {
    std::vector<TrigMode> modes;
    for (auto [idx, sh] : mode_shell) {
      if (sh != dom) continue;
      int i = static_cast<int>(idx / stride);
      int j = static_cast<int>(idx % stride);
      int kx = wrap_k(i, M_);
      if (j == 0 && kx <= 0) continue;  // half-space reps only
      double kxp = kx0 * kx, kyp = ky0 * j;
      double k2 = kxp * kxp + kyp * kyp;
      std::complex<double> w = s.what[idx] * std::exp(out.mu1_hat * t_ref);
      std::complex<double> im(0, 1);
      TrigMode m;
      m.k = {kx, j};
      m.c = {im * kyp * w / k2, -im * kxp * w / k2};
      modes.push_back(std::move(m));
    }
    return std::make_shared<TrigField>(2, VecD{L_[0], L_[1]}, std::move(modes),
                                       /*zero_mean=*/true, /*divergence_free=*/true);
  };
  out.q1_hat = q1_at(*ref_state, out.t_ref);

  // Sensitivity of the extracted coefficients to the reference time: rebuild
  // from the window midpoint and compare.
  const SpectralState& mid = tail[tail.size() / 2];
  auto q_mid = q1_at(mid, mid.t);
  double num = 0, den = 0;
  for (std::size_t m = 0; m < out.q1_hat->modes().size() && m < q_mid->modes().size(); ++m)
    for (int c = 0; c < 2; ++c) {
      num += std::abs(out.q1_hat->modes()[m].c[c] - q_mid->modes()[m].c[c]);
      den += std::abs(out.q1_hat->modes()[m].c[c]);
    }
  out.t_ref_sensitivity = den > 0 ? num / den : 0.0;
  return out;
}

void save_checkpoint(const std::string& path, const SpectralState& s) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open checkpoint for writing: " + path);
  const char magic[8] = {'T', 'R', 'J', 'X', 'S', 'P', 'C', '\0'};
  std::uint32_t version = 1, M = static_cast<std::uint32_t>(s.M);
  f.write(magic, 8);
  f.write(reinterpret_cast<const char*>(&version), 4);
  f.write(reinterpret_cast<const char*>(&M), 4);
  f.write(reinterpret_cast<const char*>(s.periods.data()), 16);
  f.write(reinterpret_cast<const char*>(&s.nu), 8);
  f.write(reinterpret_cast<const char*>(&s.t), 8);
  double u0[2] = {s.mean_flow[0], s.mean_flow[1]};
  f.write(reinterpret_cast<const char*>(u0), 16);
  std::uint64_t n = s.what.size();
  std::uint64_t has_rhs = s.what_t.empty() ? 0 : 1;
  f.write(reinterpret_cast<const char*>(&n), 8);
  f.write(reinterpret_cast<const char*>(&has_rhs), 8);
  f.write(reinterpret_cast<const char*>(s.what.data()), 16 * n);
  if (has_rhs) f.write(reinterpret_cast<const char*>(s.what_t.data()), 16 * n);
  if (!f) throw Error("short write on checkpoint: " + path);
}

SpectralState load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open checkpoint: " + path);
  char magic[8];
  f.read(magic, 8);
  if (std::memcmp(magic, "TRJXSPC\0", 8) != 0)
    throw Error("bad checkpoint magic in " + path);
  std::uint32_t version = 0, M = 0;
  f.read(reinterpret_cast<char*>(&version), 4);
  f.read(reinterpret_cast<char*>(&M), 4);
  if (version != 1) throw Error("unsupported checkpoint version");
  SpectralState s;
  s.M = static_cast<int>(M);
  f.read(reinterpret_cast<char*>(s.periods.data()), 16);
  f.read(reinterpret_cast<char*>(&s.nu), 8);
  f.read(reinterpret_cast<char*>(&s.t), 8);
  double u0[2];
  f.read(reinterpret_cast<char*>(u0), 16);
  s.mean_flow = {u0[0], u0[1]};
  std::uint64_t n = 0, has_rhs = 0;
  f.read(reinterpret_cast<char*>(&n), 8);
  f.read(reinterpret_cast<char*>(&has_rhs), 8);
  s.what.resize(n);
  f.read(reinterpret_cast<char*>(s.what.data()), 16 * n);
  if (has_rhs) {
    s.what_t.resize(n);
    f.read(reinterpret_cast<char*>(s.what_t.data()), 16 * n);
  }
  if (!f) throw Error("truncated checkpoint: " + path);
  return s;
}

}  // namespace trajexp
