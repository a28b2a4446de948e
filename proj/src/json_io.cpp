#include "trajexp/json_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace trajexp {

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw ConfigError(where + ": " + what);
}

Rational rational_of(const json& v, const std::string& where) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<long long>());
  if (v.is_number_float()) return exact_rational(v.get<double>());
  bad(where, "expected an integer, decimal or \"p/q\" string");
}

double double_of(const json& v, const std::string& where) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return to_double(parse_rational(v.get<std::string>()));
  bad(where, "expected a number");
}

template <typename T>
T scalar_of(const json& v, const std::string& where);
template <>
Rational scalar_of<Rational>(const json& v, const std::string& where) {
  return rational_of(v, where);
}
template <>
double scalar_of<double>(const json& v, const std::string& where) {
  return double_of(v, where);
}

template <typename T>
json scalar_to_json(const T& v);
template <>
json scalar_to_json<Rational>(const Rational& v) {
  return fraction_string(v);
}
template <>
json scalar_to_json<double>(const double& v) {
  return v;
}

template <typename T>
Vec<T> vec_of(const json& v, int dim, const std::string& where) {
  if (!v.is_array() || static_cast<int>(v.size()) != dim)
    bad(where, "expected an array of length " + std::to_string(dim));
  Vec<T> out;
  out.reserve(dim);
  for (const auto& e : v) out.push_back(scalar_of<T>(e, where));
  return out;
}

const json& need(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) bad(where, std::string("missing key \"") + key + "\"");
  return j.at(key);
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json semigroup_to_json(const Semigroup& sg, bool with_elements) {
  json j;
  j["nu"] = fraction_string(sg.nu());
  json gens = json::array();
  for (const auto& g : sg.generators()) gens.push_back(fraction_string(g));
  j["generators"] = gens;
  j["cap"] = sg.cap();
  if (with_elements) {
    json el = json::array();
    for (const auto& e : sg.residues()) el.push_back(fraction_string(e));
    j["elements"] = el;
  }
  return j;
}

Semigroup semigroup_from_json(const json& j) {
  const std::string where = "semigroup";
  std::vector<Rational> gens;
  const json& g = need(j, "generators", where);
  if (!g.is_array() || g.empty()) bad(where, "generators must be a non-empty array");
  for (const auto& e : g) gens.push_back(rational_of(e, where + ".generators"));
  Rational nu = rational_of(need(j, "nu", where), where + ".nu");
  const json& cap = need(j, "cap", where);
  if (!cap.is_number_integer() || cap.get<long long>() < 1)
    bad(where, "cap must be a positive integer");
  return Semigroup(std::move(gens), std::move(nu), cap.get<int>());
}

template <typename T>
json polyvec_to_json(const PolyVec<T>& p) {
  json coeffs = json::array();
  for (const auto& row : p.coefficients()) {
    json r = json::array();
    for (const auto& v : row) r.push_back(scalar_to_json<T>(v));
    coeffs.push_back(std::move(r));
  }
  return json{{"dim", p.dim()}, {"coeffs", std::move(coeffs)}};
}

template <typename T>
PolyVec<T> polyvec_from_json(const json& j) {
  const std::string where = "polyvec";
  int dim = need(j, "dim", where).get<int>();
  const json& coeffs = need(j, "coeffs", where);
  if (!coeffs.is_array()) bad(where, "coeffs must be an array");
  std::vector<Vec<T>> rows;
  for (const auto& r : coeffs) rows.push_back(vec_of<T>(r, dim, where + ".coeffs"));
  return PolyVec<T>::from_coefficients(dim, rows);
}

namespace {

template <typename T>
FieldPtr<T> poly_field_from_json(const json& jf, int dim, const std::string& where) {
  const json& monos = need(jf, "monomials", where);
  if (!monos.is_array()) bad(where, "monomials must be an array");
  std::vector<PolyMonomial<T>> ms;
  for (const auto& m : monos) {
    PolyMonomial<T> pm;
    const json& pw = need(m, "powers", where);
    if (!pw.is_array() || static_cast<int>(pw.size()) != dim)
      bad(where, "powers must have one entry per dimension");
    for (const auto& p : pw) {
      if (!p.is_number_integer() || p.get<int>() < 0)
        bad(where, "powers must be non-negative integers");
      pm.powers.push_back(p.get<int>());
    }
    pm.coeff = vec_of<T>(need(m, "coeff", where), dim, where + ".coeff");
    ms.push_back(std::move(pm));
  }
  return std::make_shared<PolyField<T>>(dim, std::move(ms));
}

FieldPtr<double> trig_field_from_json(const json& jf, int dim, const VecD& periods,
                                      bool zero_mean, bool divergence_free,
                                      const std::string& where) {
  const json& modes = need(jf, "modes", where);
  if (!modes.is_array()) bad(where, "modes must be an array");
  std::vector<TrigMode> ms;
  for (const auto& m : modes) {
    TrigMode tm;
    const json& k = need(m, "k", where);
    if (!k.is_array() || static_cast<int>(k.size()) != dim)
      bad(where, "k must have one integer per dimension");
    for (const auto& v : k) tm.k.push_back(v.get<int>());
    VecD re = vec_of<double>(need(m, "re", where), dim, where + ".re");
    VecD im = vec_of<double>(need(m, "im", where), dim, where + ".im");
    for (int i = 0; i < dim; ++i) tm.c.emplace_back(re[i], im[i]);
    ms.push_back(std::move(tm));
  }
  return std::make_shared<TrigField>(dim, periods, std::move(ms), zero_mean,
                                     divergence_free);
}

template <typename T>
std::vector<ExpansionTerm<T>> terms_from_json(const json& field, int dim, bool trig,
                                              const VecD& periods, bool zero_mean,
                                              bool divergence_free) {
  const json& terms = need(field, "terms", "field");
  if (!terms.is_array()) bad("field", "terms must be an array");
  std::vector<ExpansionTerm<T>> out;
  bool has_q1 = false;
  for (const auto& t : terms) {
    ExpansionTerm<T> term;
    term.n = need(t, "n", "field.terms").get<int>();
    if (term.n < 1) bad("field.terms", "n must be >= 1");
    if (term.n == 1) has_q1 = true;
    const json& tc = need(t, "time_coeffs", "field.terms");
    if (!tc.is_array() || tc.empty()) bad("field.terms", "time_coeffs must be non-empty");
    std::string where = "field.terms[n=" + std::to_string(term.n) + "]";
    for (const auto& f : tc) {
      if (trig) {
        if constexpr (std::is_same_v<T, double>) {
          term.time_coeffs.push_back(
              trig_field_from_json(f, dim, periods, zero_mean, divergence_free, where));
        } else {
          bad("field", "trig fields require float arithmetic");
        }
      } else {
        term.time_coeffs.push_back(poly_field_from_json<T>(f, dim, where));
      }
    }
    out.push_back(std::move(term));
  }
  if (!has_q1) bad("field", "missing the leading term (n = 1)");
  return out;
}

}  // namespace

template <typename T>
FieldExpansion<T> field_expansion_from_json(const json& field, const Semigroup& sg,
                                            int m_max) {
  const std::string type = need(field, "type", "field").get<std::string>();
  if (type != "trig" && type != "poly") bad("field", "type must be \"trig\" or \"poly\"");
  const bool trig = type == "trig";
  if (trig && !std::is_same_v<T, double>)
    bad("field", "trig fields require float arithmetic");
  int dim = need(field, "dim", "field").get<int>();
  VecD periods;
  if (trig) {
    periods = vec_of<double>(need(field, "periods", "field"), dim, "field.periods");
  } else if (field.contains("periods")) {
    periods = vec_of<double>(field.at("periods"), dim, "field.periods");
  }
  bool zero_mean = field.value("zero_mean", true);
  if (trig && !zero_mean)
    bad("field", "trig expansion coefficients must be zero-mean; declare the mean "
                 "in mean_flow instead");
  bool divergence_free = field.value("divergence_free", false);
  int order = need(field, "order", "field").get<int>();
  Vec<T> mean(dim, T(0));
  if (field.contains("mean_flow"))
    mean = vec_of<T>(field.at("mean_flow"), dim, "field.mean_flow");
  auto terms = terms_from_json<T>(field, dim, trig, periods, zero_mean, divergence_free);
  return FieldExpansion<T>(dim, sg, std::move(terms), std::move(mean), order, trig,
                           periods, m_max);
}

json trig_field_to_json_entry(const TrigField& f) {
  json modes = json::array();
  for (const auto& m : f.modes()) {
    json re = json::array(), im = json::array(), k = json::array();
    for (int i = 0; i < f.dim(); ++i) {
      k.push_back(m.k[i]);
      re.push_back(m.c[i].real());
      im.push_back(m.c[i].imag());
    }
    modes.push_back(json{{"k", k}, {"re", re}, {"im", im}});
  }
  return json{{"modes", modes}};
}

namespace {

template <typename T>
json spatial_field_to_json(const SpatialField<T>& f) {
  if constexpr (std::is_same_v<T, double>) {
    if (auto* tf = dynamic_cast<const TrigField*>(&f)) return trig_field_to_json_entry(*tf);
  }
  auto* pf = dynamic_cast<const PolyField<T>*>(&f);
  if (!pf) throw Error("unknown spatial field type in serialization");
  json monos = json::array();
  for (const auto& m : pf->monomials()) {
    json pw = json::array(), co = json::array();
    for (int p : m.powers) pw.push_back(p);
    for (const auto& c : m.coeff) co.push_back(scalar_to_json<T>(c));
    monos.push_back(json{{"powers", pw}, {"coeff", co}});
  }
  return json{{"monomials", monos}};
}

}  // namespace

template <typename T>
json field_expansion_to_json(const FieldExpansion<T>& fe) {
  json j;
  j["type"] = fe.trig_mode() ? "trig" : "poly";
  j["dim"] = fe.dim();
  if (!fe.periods().empty()) j["periods"] = fe.periods();
  j["order"] = fe.declared_order();
  json mean = json::array();
  for (const auto& v : fe.mean_flow()) mean.push_back(scalar_to_json<T>(v));
  j["mean_flow"] = mean;
  json terms = json::array();
  for (const auto& t : fe.terms()) {
    json tc = json::array();
    for (const auto& f : t.time_coeffs) tc.push_back(spatial_field_to_json<T>(*f));
    terms.push_back(json{{"n", t.n}, {"time_coeffs", tc}});
  }
  j["terms"] = terms;
  return j;
}

template <typename T>
json trajectory_expansion_to_json(const TrajectoryExpansion<T>& te,
                                  const std::string& field_hash,
                                  const std::string& config_hash,
                                  const std::string& x_star_source) {
  json j;
  j["mode"] = scalar_mode<T>::name;
  j["order"] = te.order;
  json xs = json::array(), u0 = json::array();
  for (const auto& v : te.x_star) xs.push_back(scalar_to_json<T>(v));
  for (const auto& v : te.mean_flow) u0.push_back(scalar_to_json<T>(v));
  j["x_star"] = xs;
  j["mean_flow"] = u0;
  j["semigroup"] = semigroup_to_json(te.sg);
  json zs = json::array();
  for (int n = 1; n <= te.order; ++n) {
    zs.push_back(json{{"n", n},
                      {"mu", fraction_string(te.sg.mu(n))},
                      {"poly", polyvec_to_json<T>(te.zeta(n))}});
  }
  j["zetas"] = zs;
  j["provenance"] = json{{"field_hash", field_hash},
                         {"config_hash", config_hash},
                         {"x_star_source", x_star_source},
                         {"versions", json{{"trajexp", kVersion}}}};
  return j;
}

json verification_report_to_json(const VerificationReport& rep,
                                 const std::string& field_hash,
                                 const std::string& config_hash) {
  json j;
  j["pass"] = rep.all_passed;
  j["t_independent"] = rep.t_independent;
  j["x_star"] = rep.x_star;
  j["x_star_bound"] = rep.x_star_bound;
  j["c0_hat"] = rep.c0_hat;
  j["t0"] = rep.t0;
  j["horizon"] = rep.horizon;
  j["tol"] = rep.tol;
  json orders = json::array();
  for (const auto& v : rep.orders) {
    json o;
    o["N"] = v.order;
    o["pass"] = v.passed;
    o["below_noise_floor"] = v.below_floor;
    o["sup_error"] = v.sup_error;
    o["mu_N"] = v.mu_n;
    o["required_slope"] = v.required_slope;
    if (std::isfinite(v.slope))
      o["fitted_slope"] = v.slope;
    else
      o["fitted_slope"] = nullptr;
    o["r2"] = v.r2;
    o["margin"] = v.margin;
    if (v.mu_next)
      o["mu_next"] = *v.mu_next;
    else
      o["mu_next"] = nullptr;  // cap reached: margin target unavailable
    if (v.next_rel_dev) o["slope_vs_next_rel_dev"] = *v.next_rel_dev;
    o["fit_window"] = json::array({v.window_lo, v.window_hi});
    o["fit_points"] = v.points;
    orders.push_back(std::move(o));
  }
  j["orders"] = orders;
  j["fit_options"] = json{{"margin_frac", rep.options.margin_frac},
                          {"next_band", rep.options.next_band},
                          {"transient_factor", rep.options.transient_factor},
                          {"noise_floor_rel", rep.options.noise_floor_rel},
                          {"noise_guard", rep.options.noise_guard},
                          {"samples", rep.options.samples}};
  j["provenance"] = json{{"field_hash", field_hash},
                         {"config_hash", config_hash},
                         {"versions", json{{"trajexp", kVersion}}}};
  return j;
}

std::string error_curves_csv(const VerificationReport& rep, const std::string& field_hash) {
  std::ostringstream os;
  os << "# trajexp error curves; field_hash=" << field_hash << " tol=" << format_double(rep.tol)
     << " horizon=" << format_double(rep.horizon) << "\n";
  os << "t";
  for (std::size_t n = 1; n <= rep.error_curves.size(); ++n) os << ",e_" << n;
  os << "\n";
  for (std::size_t i = 0; i < rep.sample_times.size(); ++i) {
    os << format_double(rep.sample_times[i]);
    for (const auto& curve : rep.error_curves) os << "," << format_double(curve[i]);
    os << "\n";
  }
  return os.str();
}

RunConfig parse_run_config(const json& j) {
  if (!j.is_object()) bad("config", "expected an object");
  RunConfig c;
  c.raw = j;
  c.mode = need(j, "mode", "config").get<std::string>();
  if (c.mode != "analytic-field" && c.mode != "simulate-2d" && c.mode != "fixture")
    bad("config.mode", "must be analytic-field, simulate-2d or fixture");

  if (c.mode == "analytic-field") {
    c.field = need(j, "field", "config");
    c.semigroup = need(j, "semigroup", "config");
  } else if (c.mode == "fixture") {
    c.fixture = need(j, "fixture", "config").get<std::string>();
  } else {
    c.simulation = need(j, "simulation", "config");
  }

  std::string default_arith = "float";
  if (c.mode == "analytic-field" && c.field.value("type", "poly") == "poly")
    default_arith = "rational";
  c.arithmetic = j.value("arithmetic", default_arith);
  if (c.arithmetic != "rational" && c.arithmetic != "float")
    bad("config.arithmetic", "must be rational or float");

  if (j.contains("x0")) {
    if (!j.at("x0").is_array()) bad("config.x0", "expected an array");
    for (const auto& v : j.at("x0")) c.x0.push_back(double_of(v, "config.x0"));
  }
  c.t0 = j.contains("t0") ? double_of(j.at("t0"), "config.t0") : 0.0;
  c.horizon = j.contains("horizon") ? double_of(j.at("horizon"), "config.horizon") : 20.0;
  c.tol = j.contains("tol") ? double_of(j.at("tol"), "config.tol") : 1e-10;
  if (!(c.tol > 0)) bad("config.tol", "must be > 0");
  c.x_star_tol =
      j.contains("x_star_tol") ? double_of(j.at("x_star_tol"), "config.x_star_tol") : 1e-8;
  if (j.contains("x_star")) {
    if (!j.at("x_star").is_array()) bad("config.x_star", "expected an array");
    std::vector<std::string> xs;
    for (const auto& v : j.at("x_star")) {
      if (v.is_string())
        xs.push_back(v.get<std::string>());
      else
        xs.push_back(v.dump());
    }
    c.x_star = xs;
  }
  if (j.contains("order")) {
    if (!j.at("order").is_number_integer() || j.at("order").get<int>() < 0)
      bad("config.order", "must be a non-negative integer");
    c.order = j.at("order").get<int>();
  }
  c.m_max = j.value("m_max", 6);
  if (c.m_max < 0) bad("config.m_max", "must be >= 0");
  c.seed = j.value("seed", 0ull);
  c.out = j.value("out", "");
  if (j.contains("inject_fault")) {
    const json& f = j.at("inject_fault");
    RunConfig::Fault fault;
    fault.n = need(f, "n", "config.inject_fault").get<int>();
    fault.delta = double_of(need(f, "delta", "config.inject_fault"), "config.inject_fault");
    if (fault.n < 1) bad("config.inject_fault.n", "must be >= 1");
    c.inject_fault = fault;
  }
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    f >> j;
  } catch (const std::exception& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  return parse_run_config(j);
}

// Explicit instantiations for both coefficient modes.
template json polyvec_to_json<Rational>(const PolyVec<Rational>&);
template json polyvec_to_json<double>(const PolyVec<double>&);
template PolyVec<Rational> polyvec_from_json<Rational>(const json&);
template PolyVec<double> polyvec_from_json<double>(const json&);
template FieldExpansion<Rational> field_expansion_from_json<Rational>(const json&,
                                                                      const Semigroup&, int);
template FieldExpansion<double> field_expansion_from_json<double>(const json&,
                                                                  const Semigroup&, int);
template json field_expansion_to_json<Rational>(const FieldExpansion<Rational>&);
template json field_expansion_to_json<double>(const FieldExpansion<double>&);
template json trajectory_expansion_to_json<Rational>(const TrajectoryExpansion<Rational>&,
                                                     const std::string&, const std::string&,
                                                     const std::string&);
template json trajectory_expansion_to_json<double>(const TrajectoryExpansion<double>&,
                                                   const std::string&, const std::string&,
                                                   const std::string&);

}  // namespace trajexp
