#include "trajexp/pipeline.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace trajexp {

namespace {

RunConfig merge_overrides(const RunConfig& fixture_cfg, const RunConfig& user) {
  json merged = fixture_cfg.raw;
  for (const char* key : {"order", "tol", "horizon", "out", "seed", "x0", "t0",
                          "x_star_tol", "m_max", "arithmetic", "inject_fault"}) {
    if (user.raw.contains(key)) merged[key] = user.raw.at(key);
  }
  return parse_run_config(merged);
}

template <typename T>
Vec<T> parse_point(const std::vector<std::string>& xs, int dim) {
  if (static_cast<int>(xs.size()) != dim)
    throw ConfigError("x_star has wrong dimension");
  Vec<T> out;
  for (const auto& s : xs) {
    if constexpr (std::is_same_v<T, Rational>) {
      out.push_back(parse_rational(s));
    } else {
      if (s.find('/') != std::string::npos) {
        out.push_back(to_double(parse_rational(s)));
        continue;
      }
      std::size_t used = 0;
      double v = std::stod(s, &used);
      if (used != s.size()) throw ConfigError("x_star entry is not a number: " + s);
      out.push_back(v);
    }
  }
  return out;
}

template <typename T>
struct ResolvedRun {
  Semigroup sg;
  FieldExpansion<T> fe;
  Vec<T> x_star;
  std::string x_star_source;
  std::string field_hash;
};

/// Builds the field and settles x*: taken from the config when supplied,
/// otherwise estimated as the oracle's trajectory endpoint (of the shifted
/// frame when a mean flow is present) with the a posteriori tail bound.
template <typename T>
ResolvedRun<T> resolve_run(const RunConfig& cfg) {
  Semigroup sg = semigroup_from_json(cfg.semigroup);
  FieldExpansion<T> fe = field_expansion_from_json<T>(cfg.field, sg, cfg.m_max);
  std::string field_hash = fnv1a64_hex(cfg.field.dump());

  if (cfg.x_star) {
    return {sg, fe, parse_point<T>(*cfg.x_star, fe.dim()), "config", field_hash};
  }
  if (cfg.x0.empty() || static_cast<int>(cfg.x0.size()) != fe.dim())
    throw ConfigError("config: need x0 of dimension " + std::to_string(fe.dim()) +
                      " to estimate x_star");

  // Estimation horizon well past the verification window: the trajectory
  // tail costs the adaptive integrator little and anchors x* to ~1e-13
  // relative, below the verifier's noise guard.
  const double mu1 = sg.mu_double(1);
  const double t_end = std::max(cfg.horizon, std::log(1e13) / mu1);

  VelocityFn vel;
  VecD x0 = cfg.x0;
  if (fe.has_mean_flow()) {
    // Estimate the limit of X(t) = x(t) - U0 t, which is what converges.
    FieldExpansion<T> shifted(fe.dim(), fe.semigroup(), fe.terms(),
                              Vec<T>(fe.dim(), T(0)), fe.declared_order(),
                              fe.trig_mode(), fe.periods(), fe.m_max());
    vel = shifted.velocity();
    VecD u0 = as_double_vec(fe.mean_flow());
    for (int i = 0; i < fe.dim(); ++i) x0[i] -= u0[i] * cfg.t0;
  } else {
    vel = fe.velocity();
  }
  TrajectorySamples samples = integrate_trajectory(vel, x0, cfg.t0, t_end, cfg.tol);
  LimitEstimate lim = estimate_limit(samples, mu1, cfg.x_star_tol);
  Vec<T> x_star;
  for (double v : lim.x_star) {
    if constexpr (std::is_same_v<T, Rational>)
      x_star.push_back(exact_rational(v));
    else
      x_star.push_back(v);
  }
  return {sg, fe, std::move(x_star), "oracle", field_hash};
}

template <typename T>
ExpandResult expand_impl(const RunConfig& cfg) {
  ResolvedRun<T> run = resolve_run<T>(cfg);
  TrajectoryExpansion<T> te = compute_expansion(run.fe, run.x_star, cfg.order);
  ExpandResult out;
  out.expansion =
      trajectory_expansion_to_json(te, run.field_hash, cfg.hash(), run.x_star_source);

  std::ostringstream os;
  os << "trajectory expansion to order " << te.order << " (" << scalar_mode<T>::name
     << " mode, x* from " << run.x_star_source << ")\n";
  os << "  x* = [";
  for (int i = 0; i < run.fe.dim(); ++i) {
    if (i) os << ", ";
    os << format_double(scalar_mode<T>::to_dbl(te.x_star[i]));
  }
  os << "]\n";
  for (int n = 1; n <= te.order; ++n) {
    os << "  n = " << n << "  mu_n = " << fraction_string(te.sg.mu(n)) << "  zeta_n = "
       << polyvec_to_json<T>(te.zeta(n))["coeffs"].dump() << "\n";
  }
  out.summary = os.str();
  return out;
}

template <typename T>
VerifyResult verify_impl(const RunConfig& cfg) {
  ResolvedRun<T> run = resolve_run<T>(cfg);
  TrajectoryExpansion<T> te = compute_expansion(run.fe, run.x_star, cfg.order);

  if (cfg.inject_fault) {
    if (cfg.inject_fault->n > te.order)
      throw ConfigError("inject_fault.n exceeds the expansion order");
    PolyVec<T>& z = te.zetas[cfg.inject_fault->n - 1];
    Poly<T>& c0 = z.component(0);
    std::vector<T> coeffs = c0.coeffs();
    coeffs[0] += scalar_mode<T>::from_rational(exact_rational(cfg.inject_fault->delta));
    c0 = Poly<T>(std::move(coeffs));
  }

  VerifyInput in;
  in.velocity = run.fe.velocity();
  in.expansion_at = [te](double t, int N) { return evaluate_expansion(te, t, N); };
  in.x_star = as_double_vec(te.x_star);
  in.mean_flow = as_double_vec(run.fe.mean_flow());
  in.order = te.order;
  in.cap = run.sg.cap();
  for (int n = 1; n <= run.sg.cap(); ++n) in.mu.push_back(run.sg.mu_double(n));
  in.t_independent = run.fe.t_independent() && te.t_independent();

  if (cfg.x0.empty()) throw ConfigError("config: verify needs x0");
  VerificationReport rep =
      verify_expansion(in, cfg.x0, cfg.t0, cfg.horizon, cfg.tol);

  VerifyResult out;
  out.report = verification_report_to_json(rep, run.field_hash, cfg.hash());
  out.csv = error_curves_csv(rep, run.field_hash);
  out.passed = rep.all_passed;
  return out;
}

}  // namespace

RunConfig resolve_fixture(const RunConfig& cfg) {
  if (cfg.mode != "fixture") return cfg;
  Fixture f = make_fixture(cfg.fixture);
  RunConfig materialized = parse_run_config(f.config);
  return merge_overrides(materialized, cfg);
}

SemigroupTable run_semigroup(const json& config) {
  if (!config.is_object() || !config.contains("semigroup"))
    throw ConfigError("config: missing semigroup block");
  Semigroup sg = semigroup_from_json(config.at("semigroup"));
  json rows = json::array();
  for (int n = 1; n <= sg.cap(); ++n) {
    rows.push_back(json{{"n", n},
                        {"mu", fraction_string(sg.mu(n))},
                        {"mu_decimal", sg.mu_double(n)},
                        {"s_n", sg.s_index(n)},
                        {"decompositions", sg.decompositions(n).size()}});
  }
  SemigroupTable out;
  out.table = json{{"semigroup", semigroup_to_json(sg)}, {"rows", rows}};
  return out;
}

ExpandResult run_expand(const RunConfig& config) {
  RunConfig cfg = resolve_fixture(config);
  if (cfg.mode != "analytic-field")
    throw ConfigError("expand requires an analytic-field (or fixture) config");
  return cfg.arithmetic == "rational" ? expand_impl<Rational>(cfg) : expand_impl<double>(cfg);
}

VerifyResult run_verify(const RunConfig& config) {
  RunConfig cfg = resolve_fixture(config);
  if (cfg.mode != "analytic-field")
    throw ConfigError("verify requires an analytic-field (or fixture) config");
  return cfg.arithmetic == "rational" ? verify_impl<Rational>(cfg) : verify_impl<double>(cfg);
}

SimulateResult run_simulate(const RunConfig& config, const std::string& out_dir) {
  RunConfig cfg = resolve_fixture(config);
  if (cfg.mode != "simulate-2d")
    throw ConfigError("simulate requires a simulate-2d (or fixture) config");
  const json& sim = cfg.simulation;
  const int M = sim.value("M", 32);
  std::array<double, 2> L{2 * 3.141592653589793, 2 * 3.141592653589793};
  if (sim.contains("periods")) {
    L[0] = sim.at("periods").at(0).get<double>();
    L[1] = sim.at("periods").at(1).get<double>();
  }
  const double nu = sim.value("nu", 0.1);
  const double t_end = sim.value("t_end", 100.0);
  const double stride = sim.value("stride", 0.5);
  const double dt = sim.value("dt", 0.0);

  Spectral2D solver(M, L, nu);
  VecD mean{0.0, 0.0};
  if (sim.contains("mean_flow")) {
    mean[0] = sim.at("mean_flow").at(0).get<double>();
    mean[1] = sim.at("mean_flow").at(1).get<double>();
  }
  const json& init = sim.contains("initial") ? sim.at("initial") : json::object();
  const std::string type = init.value("type", "taylor-green");
  SpectralState s0;
  if (type == "taylor-green") {
    s0 = solver.taylor_green(init.value("amplitude", 1.0), mean);
  } else if (type == "single-mode") {
    std::array<int, 2> k{1, 0};
    if (init.contains("k")) {
      k[0] = init.at("k").at(0).get<int>();
      k[1] = init.at("k").at(1).get<int>();
    }
    s0 = solver.single_mode(k, init.value("amplitude", 1.0), mean);
  } else if (type == "random") {
    s0 = solver.random_field(init.value("seed", cfg.seed), init.value("amplitude", 0.01),
                             init.value("k_max", 4), mean);
  } else {
    throw ConfigError("simulation.initial.type must be taylor-green, single-mode or random");
  }

  std::vector<SpectralState> states = solver.simulate(s0, t_end, stride, dt);

  // Interpolation self-check: redo the first stride at half the stride and
  // compare velocities at the midpoint against the coarse Hermite interpolant.
  double interp_err = 0;
  if (states.size() >= 2) {
    auto probe = solver.simulate(states.front(), states[1].t, stride / 2, dt);
    std::span<const SpectralState> coarse(states.data(), 2);
    const double t_mid = states.front().t + stride / 2;
    double scale = std::max(solver.max_speed(states.front()), 1e-30);
    for (double fx : {0.13, 0.47, 0.81}) {
      VecD x{fx * L[0], (1 - fx) * L[1]};
      VecD fine = solver.velocity_at(probe, x, t_mid);
      VecD coarse_u = solver.velocity_at(coarse, x, t_mid);
      interp_err = std::max(
          interp_err, std::hypot(fine[0] - coarse_u[0], fine[1] - coarse_u[1]) / scale);
    }
  }
  const double interp_warn = 1e-6;

  SimulateResult out;
  std::ostringstream energy;
  energy << "# trajexp energy history; config_hash=" << cfg.hash() << "\n";
  energy << "t,energy\n";
  for (const auto& s : states)
    energy << format_double(s.t) << "," << format_double(solver.energy(s)) << "\n";
  out.energy_csv = energy.str();

  if (!out_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(fs::path(out_dir) / "checkpoints");
    char name[64];
    for (std::size_t i = 0; i < states.size(); ++i) {
      std::snprintf(name, sizeof(name), "chk_%06zu.bin", i);
      std::string path = (fs::path(out_dir) / "checkpoints" / name).string();
      save_checkpoint(path, states[i]);
      json sidecar{{"M", states[i].M},
                   {"periods", {states[i].periods[0], states[i].periods[1]}},
                   {"nu", states[i].nu},
                   {"t", states[i].t},
                   {"mean_flow", states[i].mean_flow},
                   {"energy", solver.energy(states[i])},
                   {"has_rhs", !states[i].what_t.empty()}};
      std::ofstream sc(path + ".json");
      sc << sidecar.dump(2) << "\n";
    }
    out.checkpoints_written = static_cast<int>(states.size());
  }

  // Leading-term extraction on the tail half of the run.
  const double window_start = sim.value("fit_window_start", (s0.t + t_end) / 2);
  std::size_t first = 0;
  while (first + 4 < states.size() && states[first].t < window_start) ++first;
  std::span<const SpectralState> tail(states.data() + first, states.size() - first);
  LeadingTerm lead = solver.extract_leading_term(tail, sim.value("dominance", 0.99));

  out.extraction = json{{"mu1_hat", lead.mu1_hat},
                        {"lambda_shell", lead.lambda_shell},
                        {"fit_r2", lead.fit_r2},
                        {"shell_energy_ratio", lead.shell_energy_ratio},
                        {"t_ref", lead.t_ref},
                        {"t_ref_sensitivity", lead.t_ref_sensitivity},
                        {"interpolation_error", interp_err},
                        {"interpolation_warning", interp_err > interp_warn},
                        {"q1_hat", trig_field_to_json_entry(*lead.q1_hat)},
                        {"config_hash", cfg.hash()},
                        {"versions", json{{"trajexp", kVersion}}}};

  // Handoff: a one-term analytic expansion consumable by expand/verify.
  json field{{"type", "trig"},
             {"dim", 2},
             {"periods", {L[0], L[1]}},
             {"order", 1},
             {"zero_mean", true},
             {"divergence_free", true},
             {"mean_flow", mean},
             {"terms", json::array({json{
                           {"n", 1},
                           {"time_coeffs", json::array({trig_field_to_json_entry(
                                               *lead.q1_hat)})}}})}};
  out.handoff_config =
      json{{"mode", "analytic-field"},
           {"arithmetic", "float"},
           {"semigroup", json{{"generators", {"1"}},
                              {"nu", fraction_string(exact_rational(lead.mu1_hat))},
                              {"cap", 2}}},
           {"field", field},
           {"x0", cfg.x0},
           {"t0", 0.0},
           {"horizon", cfg.horizon},
           {"tol", cfg.tol},
           {"order", 1}};
  return out;
}

}  // namespace trajexp
