#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "chtumor/grid.hpp"
#include "chtumor/solver.hpp"

// Verification studies: the beta->0 and alpha->0 vanishing-viscosity sweeps
// with their composite error norms, the non-uniqueness construction at
// alpha*L = 1, and manufactured-solution order checks.
namespace chtumor {

struct SweepConfig {
  // Fixed companion parameter: alpha for the beta sweep, beta for the
  // alpha sweep.
  double fixed = 0.05;
  // Swept values, strictly decreasing, all in (0, 1).
  std::vector<double> values = {1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
  Grid grid = Grid(1, 128);
  double dt = 5e-4;
  double T = 0.5;
  double gamma = 1.0;
  PotentialSpec potential = PotentialSpec::double_well();
  ProliferationSpec proliferation = ProliferationSpec::constant(1.0);
  double amplitude = 1.0;  // scales the default initial data
  int jobs = 1;
  // Beta sweep only: additionally solve at beta = min(values)/10 and report
  // how much the composite errors move when that replaces the exact limit.
  bool check_reference = true;
  SolverConfig solver;
};

struct SweepPoint {
  double value = 0.0;  // the swept alpha or beta
  double error = 0.0;  // composite norm against the limit reference
  // The five contributions, in the order listed for the sweep's norm.
  std::array<double, 5> parts{};
};

struct StudyResult {
  std::string swept;  // "beta" or "alpha"
  std::vector<SweepPoint> points;
  double rate = 0.0;       // log-log slope
  double intercept = 0.0;  // log of the fitted constant
  double r2 = 0.0;
  double reference_value = 0.0;  // parameter of the reference solve
  // Max relative change of the composite errors under the alternate
  // reference (beta sweep with check_reference); NaN when not computed.
  double ref_shift_max = std::numeric_limits<double>::quiet_NaN();
};

// Error norm: |mu_d|_L2(H) + |phi_d|_L2(V) + |sigma_d|_Linf(H)
//   + |sigma_d|_L2(V) + |alpha mu_d + phi_d + sigma_d|_Linf(V*),
// differences against the beta = 0 solution with the same alpha, data,
// grid and dt.
StudyResult sweep_beta(const SweepConfig& cfg);

// Error norm: |mu_d|_L2(V) + |phi_d|_Linf(H) + |phi_d|_L2(V)
//   + |sigma_d|_Linf(H) + |sigma_d|_L2(V), against the alpha = 0 solution.
// Requires a constant nonnegative proliferation rate and the double-well
// potential (the quadratic-growth hypothesis of the error bound).
StudyResult sweep_alpha(const SweepConfig& cfg);

struct RateFit {
  double rate = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

// Ordinary least squares of log(error) on log(param). Needs at least three
// pairs, all entries positive.
RateFit fit_rate(const std::vector<std::pair<double, double>>& pairs);

struct NonuniqConfig {
  double L = 2.0;
  // Defaults to 1/L; any explicit value must satisfy alpha * L = 1.
  double alpha = std::numeric_limits<double>::quiet_NaN();
  double epsilon = 1e-3;
  Grid grid = Grid(1, 64);
  double dt = 1e-2;
  double T = 1.0;
  // Constant-in-space profiles with |psi| <= 1; defaults psi_a = 0,
  // psi_b = 1/2.
  std::function<double(double)> psi_a, psi_b;
};

struct NonuniqResult {
  double alpha = 0.0;  // the enforced 1/L
  long steps = 0;
  // Max over transitions of each equation residual norm, per candidate.
  ResidualNorms max_a{0.0, 0.0, 0.0}, max_b{0.0, 0.0, 0.0};
  double separation = 0.0;  // |phi_a - phi_b|_L2(H) over space-time
};

// Certifies two distinct exact trajectories of the beta = 0, p = 0 system
// with the indicator potential and pi(r) = -L r: mu = -L psi(t),
// phi = psi(t), sigma = 0, selection xi = 0, which solve the system when
// alpha * L = 1.
NonuniqResult nonuniqueness_demo(const NonuniqConfig& cfg);

struct ManufacturedSolution {
  // Closed forms of (x, y, t); y is ignored in 1D. Must satisfy the Neumann
  // conditions (cosine profiles do).
  std::function<double(double, double, double)> mu, phi, sigma;
  std::function<double(double, double, double)> dmu_dt, dphi_dt, dsigma_dt;
  std::function<double(double, double, double)> lap_mu, lap_phi, lap_sigma;
};

// Smooth cosine/exponential triple with |phi| <= 0.8 (inside every
// potential's finite region). Profiles satisfy the Neumann conditions on the
// unit domain.
ManufacturedSolution default_manufactured(int dim = 1);

// Forcing fields that make `ex` an exact solution of the continuous system
// with parameters `p`.
Forcing manufactured_forcing(const ManufacturedSolution& ex,
                             const ModelParams& p);

struct ManufacturedErrors {
  double mu = 0.0, phi = 0.0, sigma = 0.0;
  double combined = 0.0;  // sum of the three H-norm errors at final time
};

ManufacturedErrors manufactured_errors(const ManufacturedSolution& ex,
                                       const ModelParams& p, const Grid& grid,
                                       const SolverConfig& cfg);

enum class Refinement { Spatial, Temporal };

struct OrderReport {
  Refinement which = Refinement::Spatial;
  std::vector<ManufacturedErrors> levels;
  std::vector<double> ratios;  // error[l] / error[l+1] on combined
};

// Spatial: grids n, 2n, 4n, ... at fixed dt (expect ratios near 4).
// Temporal: fixed grid, dt, dt/2, dt/4, ... (expect ratios near 2).
OrderReport manufactured_order_study(const ManufacturedSolution& ex,
                                     const ModelParams& p, const Grid& base,
                                     const SolverConfig& cfg, Refinement which,
                                     int levels = 3);

}  // namespace chtumor
