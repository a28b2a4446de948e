#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <memory>
#include <span>

#include "trajexp/field.hpp"

namespace trajexp {

/// Spectral snapshot of the 2D vorticity field. `what` holds the analytic
/// Fourier coefficients of the vorticity in FFTW r2c layout (M x (M/2+1),
/// ky = 0..M/2 fastest), so that w(x) = sum_k what(k) e^{i kappa.x}. `what_t`
/// is the stored time derivative used for dense temporal interpolation; it is
/// filled at checkpoints. The mean velocity rides along unmodified: only the
/// zero-mean part is stepped and the physical field is U0 + v(x - U0 t, t).
struct SpectralState {
  int M = 0;
  std::array<double, 2> periods{};
  double nu = 0;
  double t = 0;
  std::vector<std::complex<double>> what;
  std::vector<std::complex<double>> what_t;
  VecD mean_flow{0.0, 0.0};
};

struct LeadingTerm {
  double mu1_hat = 0;
  double lambda_shell = 0;       // |kappa|^2 of the dominant shell
  double fit_r2 = 0;
  double shell_energy_ratio = 0; // dominant shell energy / total, at window end
  double t_ref = 0;
  double t_ref_sensitivity = 0;  // relative coefficient drift when t_ref moves
  std::shared_ptr<TrigField> q1_hat;
};

/// Pseudo-spectral vorticity-streamfunction solver on the L-periodic torus:
/// integrating-factor RK4 with 2/3-rule dealiasing. Desk scale (M <= 64).
class Spectral2D {
 public:
  Spectral2D(int M, std::array<double, 2> periods, double nu);
  ~Spectral2D();
  Spectral2D(const Spectral2D&) = delete;
  Spectral2D& operator=(const Spectral2D&) = delete;

  int grid_size() const { return M_; }
  const std::array<double, 2>& periods() const { return L_; }
  double viscosity() const { return nu_; }

  SpectralState taylor_green(double amplitude, VecD mean_flow = {0, 0}) const;
  SpectralState single_mode(std::array<int, 2> k, double amplitude,
                            VecD mean_flow = {0, 0}) const;
  SpectralState random_field(std::uint64_t seed, double amplitude, int k_max,
                             VecD mean_flow = {0, 0}) const;

  /// One step of size dt. Throws CflError (with a workable dt) when
  /// dt > 0.5 dx / max|u|.
  void step(SpectralState& s, double dt);

  /// Integrates to t_end storing checkpoints every `stride` time units
  /// (including the initial state), with `what_t` attached to each stored
  /// state. dt <= 0 picks a CFL-safe step that divides the stride.
  std::vector<SpectralState> simulate(SpectralState s, double t_end, double stride,
                                      double dt = 0);

  double energy(const SpectralState& s) const;  // (1/2) integral |u|^2 of the zero-mean part
  double max_speed(const SpectralState& s);
  double divergence_defect(const SpectralState& s) const;  // max_k |kappa . u_hat|

  /// Physical velocity at (x, t): direct Fourier summation in space, cubic
  /// Hermite between checkpoints in time, plus the mean-flow recomposition.
  VecD velocity_at(std::span<const SpectralState> states, const VecD& x, double t) const;

  /// Log-linear fit of the dominant (slowest, lowest) eigenshell on the given
  /// tail checkpoints; q1_hat is that shell's velocity rescaled back to t = 0
  /// by e^{mu1_hat t_ref}. Throws when the shell does not dominate yet.
  LeadingTerm extract_leading_term(std::span<const SpectralState> tail,
                                   double dominance = 0.99) const;

  /// d(what)/dt = N(what) - nu |kappa|^2 what (dealiased).
  std::vector<std::complex<double>> rhs(const SpectralState& s);

 private:
  struct Impl;
  void nonlinear(const std::vector<std::complex<double>>& what,
                 std::vector<std::complex<double>>& out, double* umax);
  std::size_t spec_size() const { return static_cast<std::size_t>(M_) * (M_ / 2 + 1); }

  int M_;
  std::array<double, 2> L_;
  double nu_;
  std::unique_ptr<Impl> impl_;
};

/// Flat binary checkpoint plus JSON sidecar (layout documented in the README).
void save_checkpoint(const std::string& path, const SpectralState& s);
SpectralState load_checkpoint(const std::string& path);

}  // namespace trajexp
