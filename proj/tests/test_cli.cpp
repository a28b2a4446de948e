#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "trajexp/fixtures.hpp"

using namespace trajexp;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code;
  std::string out;
};

RunResult run_cli(const std::string& args) {
  fs::path dir = fs::temp_directory_path() / "trajexp_cli_io";
  fs::create_directories(dir);
  fs::path out_file = dir / "stdout.txt";
  std::string cmd = std::string(TRAJEXP_CLI_PATH) + " " + args + " > " +
                    out_file.string() + " 2>&1";
  int rc = std::system(cmd.c_str());
  std::ifstream f(out_file);
  std::stringstream ss;
  ss << f.rdbuf();
  return {WEXITSTATUS(rc), ss.str()};
}

fs::path write_config(const json& j, const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "trajexp_cli_cfg";
  fs::create_directories(dir);
  fs::path p = dir / name;
  std::ofstream f(p);
  f << j.dump(2);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("semigroup subcommand prints the exponent table") {
  json cfg{{"semigroup", json{{"generators", {"1"}}, {"nu", "1"}, {"cap", 5}}}};
  auto res = run_cli("semigroup --config " + write_config(cfg, "sg.json").string());
  CHECK(res.exit_code == 0);
  int rows = 0;
  std::istringstream lines(res.out);
  std::string line;
  while (std::getline(lines, line))
    if (line.find("  1  ") == 0 || line.find("  2") == 0 || line.find("  3") == 0 ||
        line.find("  4") == 0 || line.find("  5") == 0)
      ++rows;
  CHECK(rows == 5);

  json g25{{"semigroup", json{{"generators", {"2", "5"}}, {"nu", "1"}, {"cap", 6}}}};
  auto res25 = run_cli("semigroup --config " + write_config(g25, "sg25.json").string());
  CHECK(res25.exit_code == 0);
  for (const char* mu : {"2", "4", "5", "6", "7", "8"}) CHECK(res25.out.find(mu) != std::string::npos);

  json bad{{"semigroup", json{{"generators", {"1"}}, {"nu", "1"}, {"cap", 0}}}};
  auto resbad = run_cli("semigroup --config " + write_config(bad, "sgbad.json").string());
  CHECK(resbad.exit_code != 0);
}

TEST_CASE("expand on the closed-form fixture writes the factorial table") {
  json cfg{{"mode", "fixture"}, {"fixture", "decay-1d"}};
  fs::path out = fs::temp_directory_path() / "trajexp_cli_expand";
  fs::remove_all(out);
  auto res = run_cli("expand --config " + write_config(cfg, "expand.json").string() +
                     " --out " + out.string() + " --order 6");
  REQUIRE(res.exit_code == 0);
  json expansion = json::parse(slurp(out / "expansion.json"));
  CHECK(expansion.at("mode") == "rational");
  CHECK(expansion.at("zetas")[0].at("poly").at("coeffs")[0][0] == "-1");
  CHECK(expansion.at("zetas")[1].at("poly").at("coeffs")[0][0] == "1/2");
  CHECK(expansion.at("zetas")[5].at("poly").at("coeffs")[0][0] == "1/720");
  CHECK(expansion.at("provenance").contains("config_hash"));
}

TEST_CASE("expand on the zero fixture is the all-zero expansion at x0") {
  json cfg{{"mode", "fixture"}, {"fixture", "zero-1d"}};
  fs::path out = fs::temp_directory_path() / "trajexp_cli_zero";
  fs::remove_all(out);
  auto res = run_cli("expand --config " + write_config(cfg, "zero.json").string() +
                     " --out " + out.string());
  REQUIRE(res.exit_code == 0);
  json expansion = json::parse(slurp(out / "expansion.json"));
  CHECK(expansion.at("x_star")[0] == "1/4");
  for (const auto& z : expansion.at("zetas"))
    CHECK(z.at("poly").at("coeffs")[0][0] == "0");
}

TEST_CASE("a field without q_1 is a schema error with exit code 2") {
  json cfg{{"mode", "analytic-field"},
           {"semigroup", json{{"generators", {"1"}}, {"nu", "1"}, {"cap", 4}}},
           {"field",
            json{{"type", "poly"},
                 {"dim", 1},
                 {"order", 2},
                 {"terms", json::array({json{{"n", 2},
                                             {"time_coeffs",
                                              json::array({json{{"monomials",
                                                                 json::array()}}})}}})}}},
           {"x0", {0.0}}};
  auto res = run_cli("expand --config " + write_config(cfg, "noq1.json").string());
  CHECK(res.exit_code == 2);
  CHECK(res.out.find("missing the leading term") != std::string::npos);
}

TEST_CASE("verify passes on the fixture and fails under an injected fault") {
  json cfg{{"mode", "fixture"}, {"fixture", "decay-1d"}};
  auto ok = run_cli("verify --config " + write_config(cfg, "verify.json").string());
  CHECK(ok.exit_code == 0);
  CHECK(ok.out.find("verification PASSED") != std::string::npos);

  cfg["inject_fault"] = json{{"n", 2}, {"delta", 1e-3}};
  auto bad = run_cli("verify --config " + write_config(cfg, "verify_fault.json").string());
  CHECK(bad.exit_code == 1);
  CHECK(bad.out.find("N = 2  FAIL") != std::string::npos);
}

TEST_CASE("verify at order 0 reports only the limit point") {
  json cfg{{"mode", "fixture"}, {"fixture", "decay-1d"}, {"order", 0}};
  fs::path out = fs::temp_directory_path() / "trajexp_cli_order0";
  fs::remove_all(out);
  auto res = run_cli("verify --config " + write_config(cfg, "order0.json").string() +
                     " --out " + out.string());
  CHECK(res.exit_code == 0);
  json report = json::parse(slurp(out / "report.json"));
  CHECK(report.at("orders").empty());
  CHECK(report.at("x_star_bound").get<double>() < 1e-8);
}

TEST_CASE("identical configs produce byte-identical artifacts") {
  json cfg{{"mode", "fixture"}, {"fixture", "decay-1d"}, {"order", 3}};
  fs::path out1 = fs::temp_directory_path() / "trajexp_det_1";
  fs::path out2 = fs::temp_directory_path() / "trajexp_det_2";
  fs::remove_all(out1);
  fs::remove_all(out2);
  auto cfg_path = write_config(cfg, "det.json").string();
  REQUIRE(run_cli("verify --config " + cfg_path + " --out " + out1.string()).exit_code == 0);
  REQUIRE(run_cli("verify --config " + cfg_path + " --out " + out2.string()).exit_code == 0);
  CHECK(slurp(out1 / "report.json") == slurp(out2 / "report.json"));
  CHECK(slurp(out1 / "curves.csv") == slurp(out2 / "curves.csv"));
}

TEST_CASE("simulate emits checkpoints, extraction and a consumable handoff") {
  json cfg = make_fixture("taylor-green").config;
  cfg["simulation"]["t_end"] = 40.0;  // short run is plenty for the handoff test
  cfg["horizon"] = 40.0;
  fs::path out = fs::temp_directory_path() / "trajexp_cli_sim";
  fs::remove_all(out);
  auto res = run_cli("simulate --config " + write_config(cfg, "sim.json").string() +
                     " --out " + out.string());
  REQUIRE(res.exit_code == 0);
  CHECK(fs::exists(out / "extraction.json"));
  CHECK(fs::exists(out / "energy.csv"));
  CHECK(fs::exists(out / "checkpoints" / "chk_000000.bin"));
  CHECK(fs::exists(out / "checkpoints" / "chk_000000.bin.json"));

  json extraction = json::parse(slurp(out / "extraction.json"));
  CHECK(std::abs(extraction.at("mu1_hat").get<double>() - 0.2) < 0.002);

  // the handoff config feeds straight back into expand
  auto res2 = run_cli("expand --config " + (out / "handoff_config.json").string());
  CHECK(res2.exit_code == 0);
  CHECK(res2.out.find("n = 1") != std::string::npos);
}

TEST_CASE("a too-coarse checkpoint stride raises the interpolation warning") {
  json cfg = make_fixture("taylor-green").config;
  cfg["simulation"]["nu"] = 0.4;        // faster dynamics
  cfg["simulation"]["stride"] = 10.0;   // far too coarse for cubic interpolation
  cfg["simulation"]["t_end"] = 60.0;
  cfg["horizon"] = 60.0;
  fs::path out = fs::temp_directory_path() / "trajexp_cli_coarse";
  fs::remove_all(out);
  auto res = run_cli("simulate --config " + write_config(cfg, "coarse.json").string() +
                     " --out " + out.string());
  REQUIRE(res.exit_code == 0);
  CHECK(res.out.find("stride too coarse") != std::string::npos);
  json extraction = json::parse(slurp(out / "extraction.json"));
  CHECK(extraction.at("interpolation_warning").get<bool>());

  // at the fixture's own stride the check stays quiet
  json fine = make_fixture("taylor-green").config;
  fine["simulation"]["t_end"] = 30.0;
  fine["horizon"] = 30.0;
  auto res2 = run_cli("simulate --config " + write_config(fine, "fine.json").string());
  REQUIRE(res2.exit_code == 0);
  CHECK(res2.out.find("stride too coarse") == std::string::npos);
}

TEST_CASE("fixtures subcommand lists and emits") {
  auto res = run_cli("fixtures --list");
  CHECK(res.exit_code == 0);
  for (const auto& name : fixture_names()) CHECK(res.out.find(name) != std::string::npos);

  fs::path out = fs::temp_directory_path() / "trajexp_cli_fx";
  fs::remove_all(out);
  auto res2 = run_cli("fixtures --name taylor-green --out " + out.string());
  CHECK(res2.exit_code == 0);
  CHECK(fs::exists(out / "taylor-green.json"));

  auto res3 = run_cli("fixtures --name nope");
  CHECK(res3.exit_code == 2);
}
