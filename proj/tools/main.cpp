#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "trajexp/pipeline.hpp"

namespace fs = std::filesystem;
using trajexp::json;

namespace {

int log_level() {
  const char* env = std::getenv("TRAJEXP_LOG");
  if (!env) return 1;
  std::string v(env);
  if (v == "quiet") return 0;
  if (v == "debug") return 2;
  return 1;
}

void info(const std::string& msg) {
  if (log_level() >= 1) std::cerr << "[trajexp] " << msg << "\n";
}

json read_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw trajexp::ConfigError("cannot open config file: " + path);
  json j;
  f >> j;
  return j;
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream f(path);
  if (!f) throw trajexp::Error("cannot write " + path.string());
  f << content;
}

struct CommonFlags {
  std::string config_path;
  std::string out;
  int order = -1;
  long long seed = -1;
  double tol = -1;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool config_required = true) {
  auto* opt = cmd->add_option("--config", flags.config_path, "run config JSON");
  if (config_required) opt->required();
  cmd->add_option("--out", flags.out, "output directory");
  cmd->add_option("--order", flags.order, "expansion order override");
  cmd->add_option("--seed", flags.seed, "seed override");
  cmd->add_option("--tol", flags.tol, "integration tolerance override");
}

/// Flags override config keys; the merged config is what gets hashed.
json apply_overrides(json cfg, const CommonFlags& flags) {
  if (!flags.out.empty()) cfg["out"] = flags.out;
  if (flags.order >= 0) cfg["order"] = flags.order;
  if (flags.seed >= 0) cfg["seed"] = flags.seed;
  if (flags.tol > 0) cfg["tol"] = flags.tol;
  return cfg;
}

std::string out_dir_of(const trajexp::RunConfig& cfg, const CommonFlags& flags) {
  if (!flags.out.empty()) return flags.out;
  return cfg.out;
}

int cmd_semigroup(const CommonFlags& flags) {
  json cfg = apply_overrides(read_json_file(flags.config_path), flags);
  trajexp::SemigroupTable table = trajexp::run_semigroup(cfg);
  std::cout << "  n  mu (exact)        mu (decimal)        s_n  #decompositions\n";
  for (const auto& row : table.table.at("rows")) {
    std::printf("%3d  %-16s  %-18.12g  %3d  %zu\n", row.at("n").get<int>(),
                row.at("mu").get<std::string>().c_str(), row.at("mu_decimal").get<double>(),
                row.at("s_n").get<int>(), row.at("decompositions").get<std::size_t>());
  }
  std::string out = flags.out.empty() ? cfg.value("out", "") : flags.out;
  if (!out.empty()) {
    write_file(fs::path(out) / "semigroup.json", table.table.dump(2) + "\n");
    info("wrote " + (fs::path(out) / "semigroup.json").string());
  }
  return 0;
}

int cmd_expand(const CommonFlags& flags) {
  trajexp::RunConfig cfg =
      trajexp::parse_run_config(apply_overrides(read_json_file(flags.config_path), flags));
  trajexp::ExpandResult res = trajexp::run_expand(cfg);
  std::cout << res.summary;
  std::string out = out_dir_of(cfg, flags);
  if (!out.empty()) {
    write_file(fs::path(out) / "expansion.json", res.expansion.dump(2) + "\n");
    info("wrote " + (fs::path(out) / "expansion.json").string());
  }
  return 0;
}

int cmd_verify(const CommonFlags& flags) {
  trajexp::RunConfig cfg =
      trajexp::parse_run_config(apply_overrides(read_json_file(flags.config_path), flags));
  trajexp::VerifyResult res = trajexp::run_verify(cfg);
  for (const auto& o : res.report.at("orders")) {
    std::string slope = o.at("fitted_slope").is_null()
                            ? "below noise floor"
                            : trajexp::format_double(o.at("fitted_slope").get<double>());
    std::cout << "N = " << o.at("N").get<int>() << "  "
              << (o.at("pass").get<bool>() ? "PASS" : "FAIL") << "  slope = " << slope
              << "  required >= "
              << trajexp::format_double(o.at("required_slope").get<double>()) << "\n";
  }
  std::cout << (res.passed ? "verification PASSED" : "verification FAILED") << "\n";
  std::string out = out_dir_of(cfg, flags);
  if (!out.empty()) {
    write_file(fs::path(out) / "report.json", res.report.dump(2) + "\n");
    write_file(fs::path(out) / "curves.csv", res.csv);
    info("wrote report.json and curves.csv under " + out);
  }
  return res.passed ? 0 : 1;
}

int cmd_simulate(const CommonFlags& flags) {
  trajexp::RunConfig cfg =
      trajexp::parse_run_config(apply_overrides(read_json_file(flags.config_path), flags));
  std::string out = out_dir_of(cfg, flags);
  trajexp::SimulateResult res = trajexp::run_simulate(cfg, out);
  std::cout << "mu1_hat = " << trajexp::format_double(res.extraction.at("mu1_hat").get<double>())
            << "  (shell |kappa|^2 = "
            << trajexp::format_double(res.extraction.at("lambda_shell").get<double>())
            << ", r2 = " << trajexp::format_double(res.extraction.at("fit_r2").get<double>())
            << ")\n";
  if (res.extraction.at("interpolation_warning").get<bool>()) {
    std::cerr << "warning: checkpoint stride too coarse for temporal interpolation "
              << "(midpoint velocity error "
              << trajexp::format_double(res.extraction.at("interpolation_error").get<double>())
              << " relative); halve simulation.stride\n";
  }
  if (!out.empty()) {
    write_file(fs::path(out) / "extraction.json", res.extraction.dump(2) + "\n");
    write_file(fs::path(out) / "handoff_config.json", res.handoff_config.dump(2) + "\n");
    write_file(fs::path(out) / "energy.csv", res.energy_csv);
    info("wrote extraction.json, handoff_config.json, energy.csv and " +
         std::to_string(res.checkpoints_written) + " checkpoints under " + out);
  }
  return 0;
}

int cmd_fixtures(bool list, const std::string& name, const std::string& out) {
  if (list || name.empty()) {
    for (const auto& n : trajexp::fixture_names()) {
      trajexp::Fixture f = trajexp::make_fixture(n);
      std::cout << n << "  -  " << f.description << "\n";
    }
    return 0;
  }
  trajexp::Fixture f = trajexp::make_fixture(name);
  if (out.empty()) {
    std::cout << f.config.dump(2) << "\n";
  } else {
    write_file(fs::path(out) / (f.name + ".json"), f.config.dump(2) + "\n");
    info("wrote " + (fs::path(out) / (f.name + ".json")).string());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"trajexp: asymptotic expansions of Lagrangian trajectories in decaying flows"};
  app.require_subcommand(1);

  CommonFlags sg_flags, ex_flags, vf_flags, sim_flags;
  auto* sg = app.add_subcommand("semigroup", "print the exponent table for a config");
  add_common(sg, sg_flags);
  auto* ex = app.add_subcommand("expand", "compute a trajectory expansion");
  add_common(ex, ex_flags);
  auto* vf = app.add_subcommand("verify", "verify an expansion against the trajectory oracle");
  add_common(vf, vf_flags);
  auto* sim = app.add_subcommand("simulate", "run the 2D spectral solver and extract mu1, q1");
  add_common(sim, sim_flags);

  bool fx_list = false;
  std::string fx_name, fx_out;
  auto* fx = app.add_subcommand("fixtures", "list or emit the built-in fixtures");
  fx->add_flag("--list", fx_list, "list fixture names");
  fx->add_option("--name", fx_name, "fixture to emit");
  fx->add_option("--out", fx_out, "directory to write the fixture config into");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sg->parsed()) return cmd_semigroup(sg_flags);
    if (ex->parsed()) return cmd_expand(ex_flags);
    if (vf->parsed()) return cmd_verify(vf_flags);
    if (sim->parsed()) return cmd_simulate(sim_flags);
    if (fx->parsed()) return cmd_fixtures(fx_list, fx_name, fx_out);
  } catch (const trajexp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const trajexp::CflError& e) {
    std::cerr << "error: " << e.what() << "; try dt = " << e.suggested_dt << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
