#include "trajexp/fixtures.hpp"

#include <cmath>
#include <numbers>

namespace trajexp {

namespace {

constexpr double kPi = std::numbers::pi;

json poly_term(int n, std::vector<json> time_coeffs) {
  return json{{"n", n}, {"time_coeffs", time_coeffs}};
}

json monomials(std::vector<json> ms) { return json{{"monomials", ms}}; }

json mono(std::vector<int> powers, std::vector<std::string> coeff) {
  return json{{"powers", powers}, {"coeff", coeff}};
}

/// u(x,t) = (1 + x) e^{-t}: trajectory e^{-e^{-t}} - 1 from x(0) = 1/e - 1,
/// expansion coefficients (-1)^n / n!.
Fixture decay_1d() {
  Fixture f;
  f.name = "decay-1d";
  f.description = "1D polynomial field q1 = 1 + x with exponents 1, 2, 3, ...; "
                  "closed-form trajectory exp(-exp(-t)) - 1";
  f.config = json{
      {"mode", "analytic-field"},
      {"arithmetic", "rational"},
      {"semigroup", json{{"generators", {"1"}}, {"nu", "1"}, {"cap", 10}}},
      {"field",
       json{{"type", "poly"},
            {"dim", 1},
            {"order", 8},
            {"mean_flow", {"0"}},
            {"terms", json::array({poly_term(
                          1, {monomials({mono({0}, {"1"}), mono({1}, {"1"})})})})}}},
      {"x0", {std::exp(-1.0) - 1.0}},
      {"x_star", {"0"}},
      {"t0", 0.0},
      {"horizon", 20.0},
      {"tol", 1e-12},
      {"order", 4},
      {"m_max", 10}};
  f.closed_form = [](double t) { return VecD{std::exp(-std::exp(-t)) - 1.0}; };
  return f;
}

Fixture galilean_1d() {
  Fixture f = decay_1d();
  f.name = "galilean-1d";
  f.description = "decay-1d carried by a unit mean flow";
  f.config["field"]["mean_flow"] = {"1"};
  f.closed_form = [](double t) { return VecD{t + std::exp(-std::exp(-t)) - 1.0}; };
  return f;
}

Fixture zero_1d() {
  Fixture f;
  f.name = "zero-1d";
  f.description = "identically zero velocity: the trajectory is constant";
  f.config = json{
      {"mode", "analytic-field"},
      {"arithmetic", "rational"},
      {"semigroup", json{{"generators", {"1"}}, {"nu", "1"}, {"cap", 5}}},
      {"field",
       json{{"type", "poly"},
            {"dim", 1},
            {"order", 4},
            {"mean_flow", {"0"}},
            {"terms", json::array({poly_term(1, {monomials({})})})}}},
      {"x0", {0.25}},
      {"x_star", {"1/4"}},
      {"horizon", 20.0},
      {"tol", 1e-12},
      {"order", 4}};
  f.closed_form = [](double) { return VecD{0.25}; };
  return f;
}

/// All q_n and every derivative tensor (m <= 6) vanish at x* = 0; started on
/// the limit point the trajectory never leaves it, so every truncation error
/// decays faster than any tested exponential rate.
Fixture degenerate_septic_1d() {
  Fixture f;
  f.name = "degenerate-septic-1d";
  f.description = "q1 = q2 = x^7 started at the flat limit point x* = 0";
  f.config = json{
      {"mode", "analytic-field"},
      {"arithmetic", "rational"},
      {"semigroup", json{{"generators", {"1"}}, {"nu", "1"}, {"cap", 6}}},
      {"field",
       json{{"type", "poly"},
            {"dim", 1},
            {"order", 4},
            {"mean_flow", {"0"}},
            {"terms",
             json::array({poly_term(1, {monomials({mono({7}, {"1"})})}),
                          poly_term(2, {monomials({mono({7}, {"1"})})})})}}},
      {"x0", {0.0}},
      {"x_star", {"0"}},
      {"horizon", 20.0},
      {"tol", 1e-12},
      {"order", 4}};
  f.closed_form = [](double) { return VecD{0.0}; };
  return f;
}

/// q2(x*, t) has a genuine t-dependence, so zeta_2 picks up degree 1.
Fixture poly_2term_1d() {
  Fixture f;
  f.name = "poly-2term-1d";
  f.description = "decay-1d plus a time-polynomial second term";
  f.config = json{
      {"mode", "analytic-field"},
      {"arithmetic", "rational"},
      {"semigroup", json{{"generators", {"1"}}, {"nu", "1"}, {"cap", 6}}},
      {"field",
       json{{"type", "poly"},
            {"dim", 1},
            {"order", 4},
            {"mean_flow", {"0"}},
            {"terms",
             json::array({poly_term(1, {monomials({mono({0}, {"1"}), mono({1}, {"1"})})}),
                          poly_term(2, {monomials({mono({0}, {"1/4"})}),
                                        monomials({mono({0}, {"1/2"})})})})}}},
      {"x0", {std::exp(-1.0) - 1.0}},
      {"horizon", 20.0},
      {"tol", 1e-12},
      {"order", 4},
      {"m_max", 8}};
  return f;
}

/// u = (sin x2, 0) e^{-nu t} on the 2 pi torus: a single-shell exact solution
/// whose trajectory is elementary (x2 frozen, x1 integrates an exponential).
Fixture single_mode_2d(bool with_mean) {
  Fixture f;
  f.name = with_mean ? "galilean-2d" : "single-mode-2d";
  f.description = with_mean
                      ? "single-mode-2d in a frame moving with U0 = (1, 0)"
                      : "single trigonometric mode with pure Stokes decay";
  json mode = json{{"k", {0, 1}}, {"re", {0.0, 0.0}}, {"im", {-0.5, 0.0}}};
  f.config = json{
      {"mode", "analytic-field"},
      {"arithmetic", "float"},
      {"semigroup", json{{"generators", {"1"}}, {"nu", "1/10"}, {"cap", 6}}},
      {"field",
       json{{"type", "trig"},
            {"dim", 2},
            {"periods", {2 * kPi, 2 * kPi}},
            {"order", 3},
            {"zero_mean", true},
            {"divergence_free", true},
            {"mean_flow", {with_mean ? 1.0 : 0.0, 0.0}},
            {"terms",
             json::array({json{{"n", 1}, {"time_coeffs", json::array({json{
                                             {"modes", json::array({mode})}}})}}})}}},
      {"x0", {0.0, 1.0}},
      {"horizon", 20.0},
      {"tol", 1e-12},
      {"order", 3}};
  const double nu = 0.1, a = 1.0, x01 = 0.0, x02 = 1.0;
  const double u0 = with_mean ? 1.0 : 0.0;
  f.closed_form = [=](double t) {
    return VecD{u0 * t + x01 + a * std::sin(x02) * (1.0 - std::exp(-nu * t)) / nu, x02};
  };
  return f;
}

Fixture taylor_green() {
  Fixture f;
  f.name = "taylor-green";
  f.description = "2D Taylor-Green simulation preset (nu = 0.1, M = 32)";
  f.config = json{{"mode", "simulate-2d"},
                  {"arithmetic", "float"},
                  {"simulation", json{{"M", 32},
                                      {"periods", {2 * kPi, 2 * kPi}},
                                      {"nu", 0.1},
                                      {"t_end", 200.0},
                                      {"stride", 0.5},
                                      {"initial", json{{"type", "taylor-green"},
                                                       {"amplitude", 1.0}}}}},
                  {"x0", {1.0, 0.5}},
                  {"horizon", 200.0},
                  {"tol", 1e-10},
                  {"x_star_tol", 1e-8},
                  {"order", 1}};
  return f;
}

Fixture random_2d() {
  Fixture f;
  f.name = "random-2d";
  f.description = "small random divergence-free initial data (seeded)";
  f.config = json{{"mode", "simulate-2d"},
                  {"arithmetic", "float"},
                  {"simulation", json{{"M", 32},
                                      {"periods", {2 * kPi, 2 * kPi}},
                                      {"nu", 0.5},
                                      {"t_end", 40.0},
                                      {"stride", 0.04},
                                      {"initial", json{{"type", "random"},
                                                       {"amplitude", 0.01},
                                                       {"k_max", 3},
                                                       {"seed", 7}}}}},
                  {"x0", {1.0, 2.0}},
                  {"horizon", 40.0},
                  {"tol", 1e-10},
                  {"order", 1}};
  return f;
}

}  // namespace

std::vector<std::string> fixture_names() {
  return {"decay-1d",  "galilean-1d",    "zero-1d",     "degenerate-septic-1d",
          "poly-2term-1d", "single-mode-2d", "galilean-2d", "taylor-green",
          "random-2d"};
}

Fixture make_fixture(const std::string& name) {
  if (name == "decay-1d") return decay_1d();
  if (name == "galilean-1d") return galilean_1d();
  if (name == "zero-1d") return zero_1d();
  if (name == "degenerate-septic-1d") return degenerate_septic_1d();
  if (name == "poly-2term-1d") return poly_2term_1d();
  if (name == "single-mode-2d") return single_mode_2d(false);
  if (name == "galilean-2d") return single_mode_2d(true);
  if (name == "taylor-green") return taylor_green();
  if (name == "random-2d") return random_2d();
  throw ConfigError("unknown fixture \"" + name + "\"; try the fixtures --list subcommand");
}

}  // namespace trajexp
