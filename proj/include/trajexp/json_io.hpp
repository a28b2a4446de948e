#pragma once

#include <json.hpp>

#include "trajexp/engine.hpp"
#include "trajexp/oracle.hpp"

namespace trajexp {

using json = nlohmann::json;

json semigroup_to_json(const Semigroup& sg, bool with_elements = true);
Semigroup semigroup_from_json(const json& j);

template <typename T>
json polyvec_to_json(const PolyVec<T>& p);
template <typename T>
PolyVec<T> polyvec_from_json(const json& j);

/// Field schema: {"type": "trig"|"poly", "dim": d, "periods": [...],
/// "order": n, "terms": [{"n": int, "time_coeffs": [<mode or monomial
/// table>, ...]}], "mean_flow": [...]}. Rational mode accepts integers and
/// "p/q" strings and requires a poly field.
template <typename T>
FieldExpansion<T> field_expansion_from_json(const json& field, const Semigroup& sg,
                                            int m_max = 6);
template <typename T>
json field_expansion_to_json(const FieldExpansion<T>& fe);

json trig_field_to_json_entry(const TrigField& f);

template <typename T>
json trajectory_expansion_to_json(const TrajectoryExpansion<T>& te,
                                  const std::string& field_hash,
                                  const std::string& config_hash,
                                  const std::string& x_star_source);

json verification_report_to_json(const VerificationReport& rep,
                                 const std::string& field_hash,
                                 const std::string& config_hash);

/// CSV error curves: comment header naming the field hash and tolerances,
/// then one row t, e_1, ..., e_N per sample with round-trip formatting.
std::string error_curves_csv(const VerificationReport& rep, const std::string& field_hash);

/// Run configuration, schema-validated before any computation.
struct RunConfig {
  std::string mode;        // analytic-field | simulate-2d | fixture
  std::string arithmetic;  // rational | float
  json semigroup;          // generators/nu/cap block (analytic-field, fixture)
  json field;              // inline field spec (analytic-field)
  std::string fixture;     // fixture name (fixture mode)
  json simulation;         // simulate-2d block
  VecD x0;
  double t0 = 0;
  double horizon = 20;
  double tol = 1e-10;
  double x_star_tol = 1e-8;
  std::optional<std::vector<std::string>> x_star;  // rationals or decimals, as written
  int order = 4;
  int m_max = 6;
  std::uint64_t seed = 0;
  std::string out;

  // Self-test: perturb zeta_n by delta before verifying, to demonstrate the
  // harness catches a wrong coefficient.
  struct Fault {
    int n = 0;
    double delta = 0;
  };
  std::optional<Fault> inject_fault;

  json raw;  // canonical parsed config, for hashing and report embedding

  /// Hash of the semantic config: the output location does not participate.
  std::string hash() const {
    json j = raw;
    j.erase("out");
    return fnv1a64_hex(j.dump());
  }
};

RunConfig parse_run_config(const json& j);
RunConfig load_run_config(const std::string& path);

/// Number formatting helpers shared by the CSV writers.
std::string format_double(double v);

}  // namespace trajexp
