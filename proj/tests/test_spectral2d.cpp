#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <filesystem>
#include <numbers>

#include "trajexp/spectral2d.hpp"

using namespace trajexp;

namespace {

constexpr double kPi = std::numbers::pi;
const std::array<double, 2> kBox{2 * kPi, 2 * kPi};

std::complex<double> mode(const SpectralState& s, int kx, int ky) {
  const int stride = s.M / 2 + 1;
  int ix = kx >= 0 ? kx : kx + s.M;
  return s.what[static_cast<std::size_t>(ix) * stride + ky];
}

VecD taylor_green_velocity(double a, double nu, const VecD& x, double t) {
  double damp = a * std::exp(-2 * nu * t);
  return {damp * std::cos(x[0]) * std::sin(x[1]),
          -damp * std::sin(x[0]) * std::cos(x[1])};
}

}  // namespace

TEST_CASE("taylor-green decays at exactly exp(-2 nu t)") {
  const double nu = 0.1, a = 1.0;
  Spectral2D solver(32, kBox, nu);
  auto states = solver.simulate(solver.taylor_green(a), 25.0, 0.5);

  for (const auto& s : states) {
    double expected = (a / 2) * std::exp(-2 * nu * s.t);
    double got = std::abs(mode(s, 1, 1));
    CHECK(std::abs(got - expected) / expected < 1e-6);
    // the nonlinear term vanishes identically: no other shell is excited
    CHECK(std::abs(mode(s, 1, 0)) < 1e-14);
    CHECK(std::abs(mode(s, 2, 1)) < 1e-14);
  }
}

TEST_CASE("a single mode decays at the Stokes rate nu") {
  const double nu = 0.25;
  Spectral2D solver(32, kBox, nu);
  auto states = solver.simulate(solver.single_mode({1, 0}, 0.7), 8.0, 0.25);
  for (const auto& s : states) {
    double expected = 0.7 * std::exp(-nu * s.t);
    CHECK(std::abs(std::abs(mode(s, 1, 0)) - expected) < 1e-9 * 0.7);
  }
}

TEST_CASE("zero state steps to zero state") {
  Spectral2D solver(16, kBox, 0.1);
  SpectralState s = solver.single_mode({1, 0}, 0.0);
  solver.step(s, 0.01);
  for (const auto& c : s.what) CHECK(std::abs(c) == 0.0);
}

TEST_CASE("unforced energy never increases and TG energy is exact") {
  const double nu = 0.2;
  Spectral2D solver(32, kBox, nu);

  auto random_states = solver.simulate(solver.random_field(11, 0.05, 5), 6.0, 0.1);
  for (std::size_t i = 1; i < random_states.size(); ++i)
    CHECK(solver.energy(random_states[i]) <=
          solver.energy(random_states[i - 1]) * (1 + 1e-12));

  auto tg = solver.simulate(solver.taylor_green(1.0), 10.0, 0.5);
  double e0 = solver.energy(tg.front());
  for (const auto& s : tg)
    CHECK(solver.energy(s) == doctest::Approx(e0 * std::exp(-4 * nu * s.t)).epsilon(1e-6));
}

TEST_CASE("the mean flow rides along untouched") {
  Spectral2D solver(16, kBox, 0.1);
  SpectralState s = solver.taylor_green(1.0, {0.3, -0.2});
  for (int i = 0; i < 50; ++i) solver.step(s, 0.02);
  CHECK(s.mean_flow[0] == 0.3);  // bitwise: the kappa = 0 data is never stepped
  CHECK(s.mean_flow[1] == -0.2);
}

TEST_CASE("stepping preserves conjugate symmetry on the ky = 0 row") {
  Spectral2D solver(32, kBox, 0.05);
  SpectralState s = solver.random_field(3, 0.05, 6);
  for (int i = 0; i < 25; ++i) solver.step(s, 0.01);
  for (int kx = 1; kx < 32 / 3; ++kx) {
    auto a = mode(s, kx, 0);
    auto b = mode(s, -kx, 0);
    CHECK(a.real() == doctest::Approx(b.real()).epsilon(1e-12));
    CHECK(a.imag() == doctest::Approx(-b.imag()).epsilon(1e-12));
  }
}

TEST_CASE("dealiased ring stays exactly zero") {
  Spectral2D solver(32, kBox, 0.05);
  SpectralState s = solver.random_field(5, 0.1, 6);
  for (int i = 0; i < 20; ++i) solver.step(s, 0.01);
  const int stride = s.M / 2 + 1;
  const int cut = s.M / 3;
  for (int i = 0; i < s.M; ++i) {
    int kx = i <= s.M / 2 ? i : i - s.M;
    for (int ky = 0; ky <= s.M / 2; ++ky) {
      if (std::abs(kx) <= cut && ky <= cut) continue;
      CHECK(std::abs(s.what[static_cast<std::size_t>(i) * stride + ky]) == 0.0);
    }
  }
}

TEST_CASE("velocity is spectrally divergence-free") {
  Spectral2D solver(32, kBox, 0.05);
  SpectralState s = solver.random_field(9, 0.1, 8);
  for (int i = 0; i < 10; ++i) solver.step(s, 0.01);
  CHECK(solver.divergence_defect(s) < 1e-13);
}

TEST_CASE("velocity_at: exactness at checkpoints, interpolation, periodic wrap") {
  const double nu = 0.1, a = 1.0;
  Spectral2D solver(32, kBox, nu);
  auto states = solver.simulate(solver.taylor_green(a), 5.0, 0.25);

  // at a stored time the Fourier sum is exact for the trig field
  VecD x{1.234, 4.321};
  VecD u = solver.velocity_at(states, x, states[4].t);
  VecD expected = taylor_green_velocity(a, nu, x, states[4].t);
  CHECK(u[0] == doctest::Approx(expected[0]).epsilon(1e-12));
  CHECK(u[1] == doctest::Approx(expected[1]).epsilon(1e-12));

  // between checkpoints the Hermite interpolant tracks the closed form
  for (double t : {0.111, 1.371, 3.999}) {
    VecD ui = solver.velocity_at(states, x, t);
    VecD ue = taylor_green_velocity(a, nu, x, t);
    CHECK(std::abs(ui[0] - ue[0]) < 1e-8);
    CHECK(std::abs(ui[1] - ue[1]) < 1e-8);
  }

  // periodic wrap: x and x + L see the same field
  VecD xw{x[0] + 2 * kPi, x[1] - 2 * kPi};
  VecD uw = solver.velocity_at(states, xw, 2.0);
  VecD u0 = solver.velocity_at(states, x, 2.0);
  CHECK(uw[0] == doctest::Approx(u0[0]).epsilon(1e-12));
  CHECK(uw[1] == doctest::Approx(u0[1]).epsilon(1e-12));

  CHECK_THROWS_AS(solver.velocity_at(states, x, 99.0), InvalidInput);
}

TEST_CASE("leading-term extraction") {
  SUBCASE("taylor-green gives mu1 = 2 nu and the TG mode pair") {
    const double nu = 0.1;
    Spectral2D solver(32, kBox, nu);
    auto states = solver.simulate(solver.taylor_green(1.0), 40.0, 0.5);
    std::span<const SpectralState> tail(states.data() + states.size() / 2,
                                        states.size() - states.size() / 2);
    auto lead = solver.extract_leading_term(tail);
    CHECK(std::abs(lead.mu1_hat - 2 * nu) / (2 * nu) < 0.01);
    CHECK(lead.lambda_shell == doctest::Approx(2.0));
    CHECK(lead.q1_hat->modes().size() == 2);
    CHECK(lead.t_ref_sensitivity < 1e-6);

    // q1_hat rescaled to t = 0 reproduces the initial TG velocity
    VecD x{0.77, 2.13};
    VecD q = lead.q1_hat->eval(x);
    VecD expected = taylor_green_velocity(1.0, nu, x, 0.0);
    CHECK(q[0] == doctest::Approx(expected[0]).epsilon(1e-6));
    CHECK(q[1] == doctest::Approx(expected[1]).epsilon(1e-6));
  }
  SUBCASE("single mode gives mu1 = nu") {
    const double nu = 0.3;
    Spectral2D solver(32, kBox, nu);
    auto states = solver.simulate(solver.single_mode({1, 0}, 0.5), 20.0, 0.5);
    auto lead = solver.extract_leading_term(states);
    CHECK(std::abs(lead.mu1_hat - nu) / nu < 0.01);
    CHECK(lead.lambda_shell == doctest::Approx(1.0));
  }
  SUBCASE("generic random data settles on the lowest shell rate") {
    const double nu = 0.5;
    Spectral2D solver(32, kBox, nu);
    auto states = solver.simulate(solver.random_field(7, 0.01, 4), 40.0, 0.25);
    std::size_t first = states.size() / 2;
    std::span<const SpectralState> tail(states.data() + first, states.size() - first);
    auto lead = solver.extract_leading_term(tail);
    CHECK(std::abs(lead.mu1_hat - nu) / nu < 0.05);  // nu * Lambda_1, Lambda_1 = 1
  }
  SUBCASE("an undecayed transient is refused") {
    const double nu = 0.01;
    Spectral2D solver(32, kBox, nu);
    auto states = solver.simulate(solver.random_field(13, 0.05, 6), 2.0, 0.25);
    CHECK_THROWS_WITH_AS(solver.extract_leading_term(states, 0.999999),
                         doctest::Contains("transient not decayed"), InvalidInput);
  }
}

TEST_CASE("stepping converges at fourth order in dt") {
  // Nonlinearly active field; compare against a much finer reference run.
  const double nu = 0.05, t_end = 0.8;
  Spectral2D solver(32, kBox, nu);
  SpectralState s0 = solver.random_field(17, 0.5, 3);

  auto advance = [&](double dt) {
    SpectralState s = s0;
    int n = static_cast<int>(std::round(t_end / dt));
    for (int i = 0; i < n; ++i) solver.step(s, dt);
    return s;
  };
  auto err_vs = [&](const SpectralState& a, const SpectralState& b) {
    double e = 0;
    for (std::size_t i = 0; i < a.what.size(); ++i) e = std::max(e, std::abs(a.what[i] - b.what[i]));
    return e;
  };

  SpectralState ref = advance(0.0025);
  double e1 = err_vs(advance(0.04), ref);
  double e2 = err_vs(advance(0.02), ref);
  double rate = std::log2(e1 / e2);
  CHECK(rate > 3.5);
  CHECK(rate < 4.8);
}

TEST_CASE("CFL violation names a workable step") {
  Spectral2D solver(32, kBox, 0.1);
  SpectralState s = solver.taylor_green(1.0);
  try {
    solver.step(s, 10.0);
    FAIL("expected CflError");
  } catch (const CflError& e) {
    CHECK(e.suggested_dt > 0);
    CHECK(e.suggested_dt < 10.0);
    SpectralState fresh = solver.taylor_green(1.0);
    CHECK_NOTHROW(solver.step(fresh, e.suggested_dt));
  }
}

TEST_CASE("checkpoint round trip is bit-exact") {
  Spectral2D solver(16, kBox, 0.07);
  SpectralState s = solver.random_field(21, 0.2, 4, {0.1, 0.0});
  s.what_t = solver.rhs(s);
  s.t = 3.25;

  auto path = std::filesystem::temp_directory_path() / "trajexp_chk_test.bin";
  save_checkpoint(path.string(), s);
  SpectralState r = load_checkpoint(path.string());
  std::filesystem::remove(path);

  CHECK(r.M == s.M);
  CHECK(r.t == s.t);
  CHECK(r.nu == s.nu);
  CHECK(r.periods == s.periods);
  CHECK(r.mean_flow == s.mean_flow);
  REQUIRE(r.what.size() == s.what.size());
  for (std::size_t i = 0; i < s.what.size(); ++i) {
    CHECK(r.what[i] == s.what[i]);
    CHECK(r.what_t[i] == s.what_t[i]);
  }
}
