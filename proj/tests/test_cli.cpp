#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "chtumor/config.hpp"
#include "chtumor/report.hpp"

using namespace chtumor;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  REQUIRE(bool(f));
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / name;
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("empty config yields the documented defaults") {
  RunConfig cfg = parse_config_text("");
  CHECK(cfg.gamma == doctest::Approx(1.0));
  CHECK(cfg.epsilon == doctest::Approx(1e-3));
  CHECK(cfg.dt == doctest::Approx(1e-3));
  CHECK(cfg.potential == "double_well");
  CHECK(cfg.n == 128);
  finalize_config(cfg, "simulate");
  CHECK(cfg.command == "simulate");
  CHECK(cfg.sweep_fixed == doctest::Approx(0.05));
  CHECK(cfg.nu_alpha == doctest::Approx(0.5));
  CHECK(cfg.mf_n == 32);
  CHECK(cfg.mf_dt == doctest::Approx(1e-5));
  CHECK(cfg.mf_T == doctest::Approx(0.01));
}

TEST_CASE("unknown keys and sections are rejected by name") {
  try {
    (void)parse_config_text("[model]\nzeta = 3\n");
    FAIL("expected invalid_argument");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("zeta") != std::string::npos);
    CHECK(msg.find("not a recognized key") != std::string::npos);
  }
  try {
    (void)parse_config_text("[magic]\nx = 1\n");
    FAIL("expected invalid_argument");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("unknown section") != std::string::npos);
  }
}

TEST_CASE("range violations name the offending key") {
  try {
    (void)parse_config_text("[solver]\ndt = -0.001\n");
    FAIL("expected invalid_argument");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("solver.dt") != std::string::npos);
    CHECK(msg.find("positive") != std::string::npos);
  }
}

TEST_CASE("every violation is reported, not just the first") {
  try {
    (void)parse_config_text(
        "[model]\nalpha = 1.5\n[solver]\ndt = -1\n[grid]\ndim = 5\n");
    FAIL("expected invalid_argument");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("model.alpha") != std::string::npos);
    CHECK(msg.find("solver.dt") != std::string::npos);
    CHECK(msg.find("grid.dim") != std::string::npos);
  }
}

TEST_CASE("alpha sweep rejects a non-constant proliferation profile") {
  RunConfig cfg = parse_config_text("[model]\nproliferation = smooth_bump\n");
  try {
    finalize_config(cfg, "sweep-alpha");
    FAIL("expected invalid_argument");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("p is a nonnegative constant") !=
          std::string::npos);
  }
}

TEST_CASE("command resolution between config and command line") {
  RunConfig cfg = parse_config_text("[run]\ncommand = simulate\n");
  CHECK_NOTHROW(finalize_config(cfg, "simulate"));
  RunConfig conflicted = parse_config_text("[run]\ncommand = simulate\n");
  CHECK_THROWS_AS(finalize_config(conflicted, "sweep-beta"),
                  std::invalid_argument);
  RunConfig from_file = parse_config_text("[run]\ncommand = nonuniq\n");
  CHECK_NOTHROW(finalize_config(from_file, ""));
  CHECK(from_file.command == "nonuniq");
  RunConfig none = parse_config_text("");
  CHECK_THROWS_AS(finalize_config(none, ""), std::invalid_argument);
}

TEST_CASE("comments, blank lines, and whitespace are tolerated") {
  RunConfig cfg = parse_config_text(
      "# leading comment\n"
      "\n"
      "[model]  ; trailing section comment\n"
      "  alpha = 0.25  # inline\n"
      "gamma=2.0\n");
  CHECK(cfg.alpha == doctest::Approx(0.25));
  CHECK(cfg.gamma == doctest::Approx(2.0));
}

TEST_CASE("the effective config reparses to an equal configuration") {
  RunConfig cfg = parse_config_text(
      "[model]\nalpha = 0.25\nbeta = 0\npotential = indicator\nepsilon = "
      "1e-4\n[grid]\nn = 96\n[solver]\ndt = 2e-3\n[sweep]\nvalues = "
      "1e-1,1e-2,1e-3\n[output]\nformat = json\njobs = 3\n");
  finalize_config(cfg, "simulate");
  const std::string emitted = emit_config(cfg);
  RunConfig back = parse_config_text(emitted, "emitted");
  finalize_config(back, "");
  CHECK(back == cfg);
}

TEST_CASE("run artifacts respect the format switch and stay deterministic") {
  const std::string text =
      "[run]\ncommand = simulate\n[model]\nT = 0.01\n[grid]\nn = "
      "32\n[solver]\ndt = 1e-3\n";

  RunConfig cfg = parse_config_text(text);
  finalize_config(cfg, "");

  const fs::path d1 = fresh_dir("chtumor_cli_run1");
  const fs::path d2 = fresh_dir("chtumor_cli_run2");
  const RunOutcome o1 = run_command(cfg, d1.string());
  const RunOutcome o2 = run_command(cfg, d2.string());

  CHECK(fs::exists(d1 / "effective_config.ini"));
  CHECK(fs::exists(d1 / "simulate.json"));
  CHECK(fs::exists(d1 / "trajectory.csv"));
  CHECK(fs::exists(d1 / "final_state.csv"));
  CHECK(slurp(d1 / "simulate.json") == slurp(d2 / "simulate.json"));
  CHECK(slurp(d1 / "effective_config.ini") ==
        slurp(d2 / "effective_config.ini"));
  CHECK(slurp(d1 / "trajectory.csv") == slurp(d2 / "trajectory.csv"));

  const nlohmann::json status = nlohmann::json::parse(o1.status_json);
  CHECK(status.at("ok").get<bool>());
  CHECK(status.at("command").get<std::string>() == "simulate");
  CHECK(o1.status_json == o2.status_json);
  CHECK(o1.status_json.find('\n') == std::string::npos);

  RunConfig json_only = cfg;
  json_only.format = "json";
  const fs::path d3 = fresh_dir("chtumor_cli_run3");
  (void)run_command(json_only, d3.string());
  CHECK(fs::exists(d3 / "simulate.json"));
  CHECK(!fs::exists(d3 / "trajectory.csv"));

  RunConfig csv_only = cfg;
  csv_only.format = "csv";
  const fs::path d4 = fresh_dir("chtumor_cli_run4");
  (void)run_command(csv_only, d4.string());
  CHECK(!fs::exists(d4 / "simulate.json"));
  CHECK(fs::exists(d4 / "trajectory.csv"));

  fs::remove_all(d1);
  fs::remove_all(d2);
  fs::remove_all(d3);
  fs::remove_all(d4);
}

TEST_CASE("sweep output is independent of the worker count") {
  const std::string text =
      "[run]\ncommand = sweep-beta\n[model]\nT = 0.05\n[grid]\nn = "
      "32\n[solver]\ndt = 1e-3\n[sweep]\nvalues = 1e-1,3e-2,1e-2\n"
      "check_reference = false\n";
  RunConfig cfg = parse_config_text(text);
  finalize_config(cfg, "");

  const fs::path d1 = fresh_dir("chtumor_cli_jobs1");
  const fs::path d2 = fresh_dir("chtumor_cli_jobs4");
  RunConfig serial = cfg;
  serial.jobs = 1;
  RunConfig parallel = cfg;
  parallel.jobs = 4;
  (void)run_command(serial, d1.string());
  (void)run_command(parallel, d2.string());
  CHECK(slurp(d1 / "sweep_beta.json") == slurp(d2 / "sweep_beta.json"));
  CHECK(slurp(d1 / "sweep_beta.csv") == slurp(d2 / "sweep_beta.csv"));
  CHECK(slurp(d1 / "sweep_beta_loglog.dat") ==
        slurp(d2 / "sweep_beta_loglog.dat"));
  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST_CASE("nonuniq run reports both candidates") {
  RunConfig cfg = parse_config_text(
      "[run]\ncommand = nonuniq\n[nonuniq]\nL = 2\n[model]\nT = 1\n"
      "[solver]\ndt = 1e-2\n[grid]\nn = 64\n");
  finalize_config(cfg, "");
  const fs::path d = fresh_dir("chtumor_cli_nonuniq");
  const RunOutcome o = run_command(cfg, d.string());
  const nlohmann::json j = nlohmann::json::parse(slurp(d / "nonuniq.json"));
  CHECK(j.at("alpha").get<double>() == doctest::Approx(0.5));
  CHECK(j.at("separation").get<double>() == doctest::Approx(0.5));
  CHECK(j.at("residual_max_b").at("r2").get<double>() <= 1e-12);
  const nlohmann::json status = nlohmann::json::parse(o.status_json);
  CHECK(status.at("ok").get<bool>());
  fs::remove_all(d);
}
