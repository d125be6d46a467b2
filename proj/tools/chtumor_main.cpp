#include <cstdio>
#include <exception>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "chtumor/config.hpp"
#include "chtumor/kernels.hpp"
#include "chtumor/log.hpp"
#include "chtumor/report.hpp"

namespace {

int fail(const std::string& command, const std::string& what, int code) {
  nlohmann::json status;
  status["command"] = command;
  status["ok"] = false;
  status["error"] = what;
  std::printf("%s\n", status.dump().c_str());
  std::fflush(stdout);
  chtumor::logging::error(what);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Finite-difference solver for a viscous Cahn-Hilliard tumor-growth "
      "system, with parameter-limit rate studies, a non-uniqueness "
      "certificate, and manufactured-solution order checks."};
  app.require_subcommand(0, 1);
  app.fallthrough();  // accept global flags after the subcommand

  std::string config_path;
  std::string out_dir = "out";
  std::string format;
  int jobs = 0;
  app.add_option("--config", config_path, "INI config file");
  app.add_option("--out", out_dir, "output directory")->capture_default_str();
  app.add_option("--jobs", jobs, "worker threads for sweep solves")
      ->check(CLI::PositiveNumber);
  app.add_option("--format", format, "artifact format")
      ->check(CLI::IsMember({"json", "csv", "both"}));

  app.add_subcommand("simulate",
                     "run one trajectory; report conservation, energy decay, "
                     "and the a-priori estimate ratio");
  app.add_subcommand("sweep-beta",
                     "rate study for the vanishing-viscosity limit beta -> 0");
  app.add_subcommand("sweep-alpha",
                     "rate study for the vanishing-regularization limit "
                     "alpha -> 0");
  app.add_subcommand("nonuniq",
                     "certify two distinct exact solutions at alpha*L = 1, "
                     "beta = 0");
  app.add_subcommand("manufactured",
                     "order-of-convergence study against a closed-form "
                     "solution");

  CLI11_PARSE(app, argc, argv);

  std::string cli_command;
  for (const CLI::App* sub : app.get_subcommands()) cli_command = sub->get_name();

  chtumor::RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = chtumor::parse_config(config_path);
    if (jobs > 0) cfg.jobs = jobs;
    if (!format.empty()) cfg.format = format;
    chtumor::finalize_config(cfg, cli_command);
  } catch (const std::exception& e) {
    return fail(cli_command.empty() ? cfg.command : cli_command, e.what(), 2);
  }

  chtumor::logging::info(std::string("backend: ") +
                         chtumor::kernels::backend_name());

  try {
    const chtumor::RunOutcome out = chtumor::run_command(cfg, out_dir);
    std::printf("%s\n", out.status_json.c_str());
    std::fflush(stdout);
  } catch (const std::exception& e) {
    return fail(cfg.command, e.what(), 1);
  }
  return 0;
}
