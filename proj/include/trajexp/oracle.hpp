#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>

#include "trajexp/common.hpp"

namespace trajexp {

using VelocityFn = std::function<VecD(const VecD&, double)>;

struct IntegratorStats {
  long accepted = 0;
  long rejected = 0;
  double tol = 0;
};

/// Numerical trajectory of x' = u(x, t): positions and velocities at strictly
/// increasing sample times.
struct TrajectorySamples {
  std::vector<double> times;
  std::vector<VecD> positions;
  std::vector<VecD> velocities;
  IntegratorStats stats;

  double speed(std::size_t i) const {
    double s = 0;
    for (double v : velocities[i]) s += v * v;
    return std::sqrt(s);
  }
};

/// Adaptive Dormand-Prince 5(4) with the pair's quartic interpolant for dense
/// output. Per-step error control is mixed absolute/relative at `tol`. When
/// `sample_times` is empty, accepted steps are recorded instead.
TrajectorySamples integrate_trajectory(const VelocityFn& u, VecD x0, double t0,
                                       double t_end, double tol,
                                       std::vector<double> sample_times = {});

struct LimitEstimate {
  VecD x_star;
  double bound = 0;   // a posteriori: c0_hat / mu1 * e^{-mu1 t_end}
  double c0_hat = 0;  // measured sup of |u(x(t),t)| e^{mu1 t} on the last third
};

/// Endpoint estimate of the trajectory limit with the tail bound measured
/// from the observed velocity decay. Throws HorizonError when the bound
/// exceeds `x_star_tol`. With a nonzero `mean_flow` the limit of the shifted
/// frame X(t) = x(t) - U0 t is estimated and the decay of |u - U0| measured.
LimitEstimate estimate_limit(const TrajectorySamples& samples, double mu1,
                             double x_star_tol = std::numeric_limits<double>::infinity(),
                             const VecD& mean_flow = {});

struct DecayFit {
  double slope = 0;  // positive for decay
  double intercept = 0;
  double r2 = 0;
  int points = 0;
};

/// Least-squares line on (t, ln value). Values at or below
/// `floor_rel * values.front()` are discarded; fewer than `min_points`
/// surviving points is an error.
DecayFit fit_decay_rate(std::span<const double> times, std::span<const double> values,
                        double floor_rel = 1e-12, int min_points = 10);

struct VerifyOptions {
  double margin_frac = 0.02;       // pass needs slope >= mu_N * (1 + margin_frac)
  double next_band = 0.05;         // and |slope - mu_{N+1}| <= band * mu_{N+1} when t-independent
  double transient_factor = 2.0;   // exclude t < transient_factor / mu_1
  double noise_floor_rel = 1e-12;  // relative to the largest sample of each curve
  double noise_guard = 100.0;      // also exclude samples below noise_guard * tol
  double x_star_guard = 2.0;       // and below x_star_guard * (limit-point bound)
  int samples = 400;
  int min_points = 10;
};

struct OrderVerdict {
  int order = 0;
  double sup_error = 0;
  bool below_floor = false;  // curve never rose above the floor: super-exponential decay
  double slope = 0;
  double r2 = 0;
  double mu_n = 0;
  double required_slope = 0;
  std::optional<double> mu_next;          // absent when the cap is reached
  std::optional<double> next_rel_dev;     // |slope - mu_next| / mu_next
  double margin = 0;                      // slope - mu_n
  double window_lo = 0, window_hi = 0;
  int points = 0;
  bool passed = false;
};

struct VerificationReport {
  VecD x_star;
  double x_star_bound = 0;
  double c0_hat = 0;
  double t0 = 0, horizon = 0, tol = 0;
  bool t_independent = false;
  std::vector<OrderVerdict> orders;
  bool all_passed = true;
  // Raw error curves for CSV emission: e_N at each sample time.
  std::vector<double> sample_times;
  std::vector<std::vector<double>> error_curves;  // [order-1][sample]
  VerifyOptions options;
};

/// Type-erased view of (field expansion, trajectory expansion) so the
/// verifier is independent of the coefficient mode.
struct VerifyInput {
  VelocityFn velocity;                              // full declared field
  std::function<VecD(double, int)> expansion_at;    // evaluate_expansion(te, t, N)
  VecD x_star;
  VecD mean_flow;  // empty or zero when there is no Galilean shift
  int order = 0;
  int cap = 0;
  std::vector<double> mu;  // mu_1 .. mu_cap
  bool t_independent = false;
};

/// Measures e_N(t) = |x_oracle(t) - expansion_N(t)| on a log-spaced grid,
/// fits the decay rate per truncation order on an automatically selected
/// window, and applies the slope criteria. Curves entirely below the noise
/// floor count as super-exponential decay and pass.
VerificationReport verify_expansion(const VerifyInput& input, VecD x0, double t0,
                                    double horizon, double tol,
                                    const VerifyOptions& options = {});

}  // namespace trajexp
