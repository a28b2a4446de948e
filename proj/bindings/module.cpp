#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "trajexp/pipeline.hpp"

namespace py = pybind11;
using trajexp::json;

namespace {

json to_json(const py::object& obj) {
  py::module_ pyjson = py::module_::import("json");
  std::string dumped = py::cast<std::string>(pyjson.attr("dumps")(obj));
  return json::parse(dumped);
}

py::object to_py(const json& j) {
  py::module_ pyjson = py::module_::import("json");
  return pyjson.attr("loads")(j.dump());
}

std::vector<trajexp::Rational> parse_rationals(const std::vector<std::string>& xs) {
  std::vector<trajexp::Rational> out;
  out.reserve(xs.size());
  for (const auto& s : xs) out.push_back(trajexp::parse_rational(s));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "asymptotic expansions of Lagrangian trajectories in decaying flows";
  m.attr("__version__") = trajexp::kVersion;

  py::register_exception<trajexp::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<trajexp::InvalidInput>(m, "InvalidInput", PyExc_ValueError);
  py::register_exception<trajexp::HorizonError>(m, "HorizonError", PyExc_RuntimeError);

  py::class_<trajexp::Semigroup>(m, "Semigroup")
      .def(py::init([](const std::vector<std::string>& generators, const std::string& nu,
                       int cap) {
             return trajexp::Semigroup(parse_rationals(generators),
                                       trajexp::parse_rational(nu), cap);
           }),
           py::arg("generators"), py::arg("nu"), py::arg("cap"))
      .def_property_readonly("cap", &trajexp::Semigroup::cap)
      .def("elements",
           [](const trajexp::Semigroup& sg) {
             std::vector<std::string> out;
             for (int n = 1; n <= sg.cap(); ++n)
               out.push_back(trajexp::fraction_string(sg.mu(n)));
             return out;
           })
      .def("elements_float",
           [](const trajexp::Semigroup& sg) {
             std::vector<double> out;
             for (int n = 1; n <= sg.cap(); ++n) out.push_back(sg.mu_double(n));
             return out;
           })
      .def("mu", &trajexp::Semigroup::mu_double, py::arg("n"))
      .def("s_index", &trajexp::Semigroup::s_index, py::arg("n"))
      .def("decompositions", [](const trajexp::Semigroup& sg, int n) {
        std::vector<std::pair<int, std::vector<int>>> out;
        for (const auto& d : sg.decompositions(n)) out.emplace_back(d.k, d.js);
        return out;
      });

  m.def(
      "resolvent_solve",
      [](double gamma, const std::vector<std::vector<double>>& coeffs) {
        if (coeffs.empty()) throw trajexp::InvalidInput("empty coefficient list");
        int dim = static_cast<int>(coeffs.front().size());
        auto p = trajexp::PolyVec<double>::from_coefficients(dim, coeffs);
        return trajexp::resolvent_solve(gamma, p).coefficients();
      },
      py::arg("gamma"), py::arg("coeffs"),
      "Unique polynomial solution of q' - gamma q = p, coefficient-major layout.");

  m.def(
      "resolvent_solve_exact",
      [](const std::string& gamma, const std::vector<std::vector<std::string>>& coeffs) {
        if (coeffs.empty()) throw trajexp::InvalidInput("empty coefficient list");
        int dim = static_cast<int>(coeffs.front().size());
        std::vector<trajexp::Vec<trajexp::Rational>> rows;
        for (const auto& r : coeffs) rows.push_back(parse_rationals(r));
        auto p = trajexp::PolyVec<trajexp::Rational>::from_coefficients(dim, rows);
        auto q = trajexp::resolvent_solve(trajexp::parse_rational(gamma), p);
        std::vector<std::vector<std::string>> out;
        for (const auto& row : q.coefficients()) {
          std::vector<std::string> r;
          for (const auto& v : row) r.push_back(trajexp::fraction_string(v));
          out.push_back(std::move(r));
        }
        return out;
      },
      py::arg("gamma"), py::arg("coeffs"));

  m.def(
      "semigroup_table",
      [](const py::object& config) {
        return to_py(trajexp::run_semigroup(to_json(config)).table);
      },
      py::arg("config"));

  m.def(
      "expand",
      [](const py::object& config) {
        trajexp::RunConfig cfg = trajexp::parse_run_config(to_json(config));
        return to_py(trajexp::run_expand(cfg).expansion);
      },
      py::arg("config"), "Compute a trajectory expansion from a run config dict.");

  m.def(
      "verify",
      [](const py::object& config) {
        trajexp::RunConfig cfg = trajexp::parse_run_config(to_json(config));
        trajexp::VerifyResult res = trajexp::run_verify(cfg);
        py::dict out;
        out["report"] = to_py(res.report);
        out["csv"] = res.csv;
        out["passed"] = res.passed;
        return out;
      },
      py::arg("config"));

  m.def(
      "simulate",
      [](const py::object& config, const std::string& out_dir) {
        trajexp::RunConfig cfg = trajexp::parse_run_config(to_json(config));
        trajexp::SimulateResult res = trajexp::run_simulate(cfg, out_dir);
        py::dict out;
        out["extraction"] = to_py(res.extraction);
        out["handoff_config"] = to_py(res.handoff_config);
        out["energy_csv"] = res.energy_csv;
        out["checkpoints_written"] = res.checkpoints_written;
        return out;
      },
      py::arg("config"), py::arg("out_dir") = std::string(),
      "Run the 2D spectral solver; returns the extracted leading term.");

  m.def(
      "integrate_trajectory",
      [](const std::function<std::vector<double>(std::vector<double>, double)>& u,
         std::vector<double> x0, double t0, double t_end, double tol,
         std::vector<double> sample_times) {
        auto samples = trajexp::integrate_trajectory(
            [&](const trajexp::VecD& x, double t) { return u(x, t); }, std::move(x0), t0,
            t_end, tol, std::move(sample_times));
        py::dict out;
        out["times"] = samples.times;
        out["positions"] = samples.positions;
        out["accepted"] = samples.stats.accepted;
        out["rejected"] = samples.stats.rejected;
        return out;
      },
      py::arg("u"), py::arg("x0"), py::arg("t0"), py::arg("t_end"), py::arg("tol") = 1e-10,
      py::arg("sample_times") = std::vector<double>{});

  m.def("fixture_names", &trajexp::fixture_names);
  m.def(
      "fixture",
      [](const std::string& name) { return to_py(trajexp::make_fixture(name).config); },
      py::arg("name"), "Config dict of a named fixture.");
}
