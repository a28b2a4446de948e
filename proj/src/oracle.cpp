#include "trajexp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace trajexp {

namespace {

bool finite(const VecD& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

// Dormand-Prince 5(4) tableau, error weights and dense-output weights.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432.0,
                 d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0,
                 d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0,
                 d7 = 69997945.0 / 29380423.0;

struct DenseSegment {
  double t, h;
  VecD r1, r2, r3, r4, r5;

  VecD at(double tq) const {
    double th = (tq - t) / h;
    VecD out(r1.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] = r1[i] + th * (r2[i] + (1 - th) * (r3[i] + th * (r4[i] + (1 - th) * r5[i])));
    }
    return out;
  }
};

}  // namespace

TrajectorySamples integrate_trajectory(const VelocityFn& u, VecD x0, double t0,
                                       double t_end, double tol,
                                       std::vector<double> sample_times) {
  if (!(t_end > t0)) throw InvalidInput("integrate_trajectory: t_end must exceed t0");
  if (!(tol > 0)) throw InvalidInput("integrate_trajectory: tol must be > 0");
  for (double ts : sample_times)
    if (ts < t0 || ts > t_end)
      throw InvalidInput("integrate_trajectory: sample time outside [t0, t_end]");
  std::sort(sample_times.begin(), sample_times.end());

  const std::size_t d = x0.size();
  const double atol = tol, rtol = tol;

  TrajectorySamples out;
  out.stats.tol = tol;

  auto rhs = [&](double t, const VecD& y) {
    VecD f = u(y, t);
    if (f.size() != d) throw InvalidInput("integrate_trajectory: velocity dimension mismatch");
    if (!finite(f))
      throw NumericsError("integrate_trajectory: non-finite velocity at t = " + std::to_string(t));
    return f;
  };

  double t = t0;
  VecD y = std::move(x0);
  VecD k1 = rhs(t, y);

  auto record = [&](double tt, const VecD& yy) {
    out.times.push_back(tt);
    out.positions.push_back(yy);
    out.velocities.push_back(u(yy, tt));
  };

  std::size_t next_sample = 0;
  const bool grid = !sample_times.empty();
  if (!grid) record(t, y);
  while (grid && next_sample < sample_times.size() && sample_times[next_sample] <= t) {
    record(sample_times[next_sample], y);
    ++next_sample;
  }

  double h = std::min(0.01 * (t_end - t0), 1.0);
  VecD k2(d), k3(d), k4(d), k5(d), k6(d), k7(d), ytmp(d), y1(d), err(d);

  while (t < t_end) {
    const double gap = t_end - t;
    if (gap <= 1e-13 * std::max(std::abs(t_end), 1.0)) {
      t = t_end;  // sub-roundoff remainder
      break;
    }
    h = std::min(h, gap);
    if (h < 1e-14 * std::max(std::abs(t), 1.0)) {
      std::ostringstream os;
      os << "integrate_trajectory: step size underflow at t = " << t << ", state = (";
      for (std::size_t i = 0; i < d; ++i) os << (i ? ", " : "") << y[i];
      os << ")";
      throw NumericsError(os.str());
    }

    for (std::size_t i = 0; i < d; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
    k2 = rhs(t + h / 5, ytmp);
    for (std::size_t i = 0; i < d; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    k3 = rhs(t + 3 * h / 10, ytmp);
    for (std::size_t i = 0; i < d; ++i)
      ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    k4 = rhs(t + 4 * h / 5, ytmp);
    for (std::size_t i = 0; i < d; ++i)
      ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    k5 = rhs(t + 8 * h / 9, ytmp);
    for (std::size_t i = 0; i < d; ++i)
      ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    k6 = rhs(t + h, ytmp);
    for (std::size_t i = 0; i < d; ++i)
      y1[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    k7 = rhs(t + h, y1);

    double errnorm = 0;
    for (std::size_t i = 0; i < d; ++i) {
      err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(y1[i]));
      errnorm += (err[i] / sc) * (err[i] / sc);
    }
    errnorm = std::sqrt(errnorm / d);

    if (errnorm <= 1.0) {
      DenseSegment seg;
      if (grid) {
        seg.t = t;
        seg.h = h;
        seg.r1 = y;
        seg.r2.resize(d);
        seg.r3.resize(d);
        seg.r4.resize(d);
        seg.r5.resize(d);
        for (std::size_t i = 0; i < d; ++i) {
          double ydiff = y1[i] - y[i];
          double bspl = h * k1[i] - ydiff;
          seg.r2[i] = ydiff;
          seg.r3[i] = bspl;
          seg.r4[i] = ydiff - h * k7[i] - bspl;
          seg.r5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                           d6 * k6[i] + d7 * k7[i]);
        }
      }
      t += h;
      y = y1;
      k1 = k7;  // FSAL
      ++out.stats.accepted;
      if (grid) {
        while (next_sample < sample_times.size() && sample_times[next_sample] <= t) {
          record(sample_times[next_sample], seg.at(sample_times[next_sample]));
          ++next_sample;
        }
      } else {
        record(t, y);
      }
      double fac = 0.9 * std::pow(std::max(errnorm, 1e-10), -0.2);
      h *= std::clamp(fac, 0.2, 5.0);
    } else {
      ++out.stats.rejected;
      double fac = 0.9 * std::pow(errnorm, -0.2);
      h *= std::clamp(fac, 0.2, 1.0);
    }
  }
  // Cover any residual grid points at t_end within roundoff.
  while (grid && next_sample < sample_times.size()) {
    record(sample_times[next_sample], y);
    ++next_sample;
  }
  return out;
}

LimitEstimate estimate_limit(const TrajectorySamples& samples, double mu1,
                             double x_star_tol, const VecD& mean_flow) {
  if (samples.times.size() < 2)
    throw InvalidInput("estimate_limit: need at least two samples");
  if (!(mu1 > 0)) throw InvalidInput("estimate_limit: mu1 must be > 0");

  LimitEstimate est;
  est.x_star = samples.positions.back();
  const double t_end = samples.times.back();
  if (!mean_flow.empty())
    for (std::size_t c = 0; c < est.x_star.size(); ++c)
      est.x_star[c] -= mean_flow[c] * t_end;
  const double t_lo = t_end - (t_end - samples.times.front()) / 3.0;
  double c0 = 0;
  for (std::size_t i = 0; i < samples.times.size(); ++i) {
    if (samples.times[i] < t_lo) continue;
    double sp = 0;
    for (std::size_t c = 0; c < samples.velocities[i].size(); ++c) {
      double v = samples.velocities[i][c] - (mean_flow.empty() ? 0.0 : mean_flow[c]);
      sp += v * v;
    }
    c0 = std::max(c0, std::sqrt(sp) * std::exp(mu1 * samples.times[i]));
  }
  est.c0_hat = c0;
  est.bound = c0 / mu1 * std::exp(-mu1 * t_end);
  if (est.bound > x_star_tol) {
    std::ostringstream os;
    os << "estimate_limit: horizon insufficient (bound " << est.bound
       << " exceeds requested tolerance " << x_star_tol << "); extend t_end";
    throw HorizonError(os.str());
  }
  return est;
}

DecayFit fit_decay_rate(std::span<const double> times, std::span<const double> values,
                        double floor_rel, int min_points) {
  if (times.size() != values.size())
    throw InvalidInput("fit_decay_rate: times/values size mismatch");
  if (times.empty()) throw InvalidInput("fit_decay_rate: empty input");
  const double floor = floor_rel * values.front();

  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  int n = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(values[i] > floor) || !(values[i] > 0)) continue;
    double x = times[i], y = std::log(values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
    ++n;
  }
  if (n < min_points)
    throw InvalidInput("fit_decay_rate: only " + std::to_string(n) +
                       " points above the noise floor (need " +
                       std::to_string(min_points) + ")");

  double denom = n * sxx - sx * sx;
  DecayFit fit;
  fit.points = n;
  double b = (n * sxy - sx * sy) / denom;
  fit.slope = -b;
  fit.intercept = (sy - b * sx) / n;
  double ss_tot = syy - sy * sy / n;
  double ss_res = ss_tot - b * (sxy - sx * sy / n);
  fit.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

VerificationReport verify_expansion(const VerifyInput& input, VecD x0, double t0,
                                    double horizon, double tol,
                                    const VerifyOptions& options) {
  if (input.order < 0) throw InvalidInput("verify_expansion: negative order");
  if (input.mu.empty()) throw InvalidInput("verify_expansion: empty exponent table");

  VerificationReport rep;
  rep.t0 = t0;
  rep.horizon = horizon;
  rep.tol = tol;
  rep.t_independent = input.t_independent;
  rep.options = options;

  const double mu1 = input.mu.front();
  const double transient = options.transient_factor / mu1;

  // Log-spaced sample grid over (t0, horizon].
  const double lo = std::max(t0, 1e-3 * horizon);
  std::vector<double> grid(options.samples);
  for (int i = 0; i < options.samples; ++i) {
    double f = static_cast<double>(i) / (options.samples - 1);
    grid[i] = lo * std::pow(horizon / lo, f);
  }
  grid.front() = lo;
  grid.back() = horizon;

  TrajectorySamples samples = integrate_trajectory(input.velocity, x0, t0, horizon, tol, grid);
  LimitEstimate lim = estimate_limit(samples, mu1,
                                     std::numeric_limits<double>::infinity(),
                                     input.mean_flow);
  rep.x_star = input.x_star;
  rep.x_star_bound = lim.bound;
  rep.c0_hat = lim.c0_hat;
  rep.sample_times = samples.times;

  rep.error_curves.resize(input.order);
  for (int N = 1; N <= input.order; ++N) {
    auto& curve = rep.error_curves[N - 1];
    curve.resize(samples.times.size());
    for (std::size_t i = 0; i < samples.times.size(); ++i) {
      VecD pred = input.expansion_at(samples.times[i], N);
      double e = 0;
      for (std::size_t c = 0; c < pred.size(); ++c) {
        double dv = samples.positions[i][c] - pred[c];
        e += dv * dv;
      }
      curve[i] = std::sqrt(e);
    }
  }

  for (int N = 1; N <= input.order; ++N) {
    const auto& curve = rep.error_curves[N - 1];
    OrderVerdict v;
    v.order = N;
    v.mu_n = input.mu[N - 1];
    v.required_slope = v.mu_n * (1.0 + options.margin_frac);
    if (N < input.cap) v.mu_next = input.mu[N];

    double peak = 0;
    for (std::size_t i = 0; i < curve.size(); ++i) {
      if (samples.times[i] < transient) continue;
      peak = std::max(peak, curve[i]);
      v.sup_error = std::max(v.sup_error, curve[i]);
    }
    // Below the x*-resolution bound e_N is not measurable: the expansion is
    // anchored at a limit point only known to that accuracy.
    const double floor =
        std::max({options.noise_floor_rel * peak, options.noise_guard * tol,
                  options.x_star_guard * lim.bound});

    // Fit window: the longest contiguous post-transient run above the floor.
    std::vector<double> wt, wv;
    std::size_t best_lo = 0, best_n = 0, run_lo = 0, run_n = 0;
    for (std::size_t i = 0; i <= curve.size(); ++i) {
      bool ok = i < curve.size() && samples.times[i] >= transient && curve[i] > floor;
      if (ok) {
        if (run_n == 0) run_lo = i;
        ++run_n;
        if (run_n > best_n) {
          best_n = run_n;
          best_lo = run_lo;
        }
      } else {
        run_n = 0;
      }
    }
    if (best_n < static_cast<std::size_t>(options.min_points)) {
      // Error never rose meaningfully above the floor: decay is faster than
      // every exponential rate resolvable at this tolerance.
      v.below_floor = true;
      v.passed = v.sup_error <= 10 * floor;
      v.slope = std::numeric_limits<double>::quiet_NaN();
      v.window_lo = transient;
      v.window_hi = horizon;
      v.points = static_cast<int>(best_n);
    } else {
      for (std::size_t i = best_lo; i < best_lo + best_n; ++i) {
        wt.push_back(samples.times[i]);
        wv.push_back(curve[i]);
      }
      DecayFit fit = fit_decay_rate(wt, wv, 0.0, options.min_points);
      v.slope = fit.slope;
      v.r2 = fit.r2;
      v.points = fit.points;
      v.window_lo = wt.front();
      v.window_hi = wt.back();
      v.margin = fit.slope - v.mu_n;
      v.passed = fit.slope >= v.required_slope;
      if (v.mu_next && input.t_independent) {
        v.next_rel_dev = std::abs(fit.slope - *v.mu_next) / *v.mu_next;
        v.passed = v.passed && *v.next_rel_dev <= options.next_band;
      }
    }
    rep.all_passed = rep.all_passed && v.passed;
    rep.orders.push_back(std::move(v));
  }
  return rep;
}

}  // namespace trajexp
