#pragma once

#include "trajexp/fixtures.hpp"
#include "trajexp/spectral2d.hpp"

namespace trajexp {

/// Orchestration shared by the CLI and the python bindings: resolve a run
/// config into field + semigroup, obtain x*, run the engine and the verifier.

struct SemigroupTable {
  json table;  // rows: n, mu fraction, mu decimal, s_n, decomposition count
};
SemigroupTable run_semigroup(const json& config);

struct ExpandResult {
  json expansion;
  std::string summary;  // human-readable zeta table
};
ExpandResult run_expand(const RunConfig& config);

struct VerifyResult {
  json report;
  std::string csv;
  bool passed = false;
};
VerifyResult run_verify(const RunConfig& config);

struct SimulateResult {
  json extraction;      // mu1_hat, q1_hat, fit diagnostics
  json handoff_config;  // analytic-field config holding the one-term expansion
  std::string energy_csv;
  int checkpoints_written = 0;
};
/// Runs the 2D simulation; writes checkpoints under out_dir/checkpoints when
/// out_dir is non-empty.
SimulateResult run_simulate(const RunConfig& config, const std::string& out_dir);

/// Materializes fixture configs (fixture mode) into analytic-field/simulate
/// configs; identity otherwise.
RunConfig resolve_fixture(const RunConfig& config);

}  // namespace trajexp
