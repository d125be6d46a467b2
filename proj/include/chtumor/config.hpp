#pragma once

#include <limits>
#include <string>
#include <vector>

#include "chtumor/grid.hpp"
#include "chtumor/solver.hpp"
#include "chtumor/studies.hpp"

// INI-style configuration for the command-line front end. Parsing collects
// every violation (unknown keys, malformed values, range errors) and reports
// them all in one exception.
namespace chtumor {

struct RunConfig {
  // [run] command = simulate | sweep-beta | sweep-alpha | nonuniq |
  // manufactured; may instead come from the CLI subcommand.
  std::string command;
  // [model]
  double alpha = 0.5;
  double beta = 0.5;
  double gamma = 1.0;
  double T = 1.0;
  std::string potential = "double_well";
  double kappa = 2.0;
  double epsilon = 1e-3;
  double L = 2.0;
  std::string proliferation = "constant";
  double p_value = 1.0;
  double p_scale = 1.0;
  double p_center = 0.0;
  double p_width = 1.0;
  double p_height = 1.0;
  // [grid]
  int dim = 1;
  int n = 128;
  double extent = 1.0;
  // [solver]
  double dt = 1e-3;
  double newton_tol = 1e-10;
  int newton_max = 50;
  double damping = 0.5;
  int max_halvings = 20;
  double lin_tol = 1e-12;
  // [initial]
  std::string preset = "default";  // default | zero
  double amplitude = 1.0;
  // [sweep]; fixed defaults to 0.05 (sweep-beta) or 0.5 (sweep-alpha)
  double sweep_fixed = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> sweep_values = {1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
  bool check_reference = true;
  // [nonuniq]; alpha defaults to 1/L
  double nu_L = 2.0;
  double nu_alpha = std::numeric_limits<double>::quiet_NaN();
  double psi_a = 0.0;
  double psi_b = 0.5;
  // [manufactured]; n/dt/T default per refinement direction
  std::string refine = "spatial";  // spatial | temporal
  int mf_levels = 3;
  int mf_n = 0;
  double mf_dt = std::numeric_limits<double>::quiet_NaN();
  double mf_T = std::numeric_limits<double>::quiet_NaN();
  // [output]
  std::string format = "both";  // json | csv | both
  int jobs = 1;

  bool operator==(const RunConfig&) const = default;
};

RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text,
                            const std::string& origin = "config");

// Resolves command-dependent defaults and cross-validates. `cli_command` is
// the subcommand named on the command line (may be empty when the config
// file carries [run] command); a conflict between the two is an error.
void finalize_config(RunConfig& cfg, const std::string& cli_command);

// Canonical serialization; for a finalized config,
// parse_config_text(emit_config(c)) compares equal to c.
std::string emit_config(const RunConfig& cfg);

PotentialSpec make_potential(const RunConfig& cfg);
ProliferationSpec make_proliferation(const RunConfig& cfg);
ModelParams make_model(const RunConfig& cfg);
Grid make_grid(const RunConfig& cfg);
SolverConfig make_solver(const RunConfig& cfg);
State make_initial(const RunConfig& cfg);
SweepConfig make_sweep(const RunConfig& cfg);
NonuniqConfig make_nonuniq(const RunConfig& cfg);

}  // namespace chtumor
