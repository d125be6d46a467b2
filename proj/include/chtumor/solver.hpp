#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "chtumor/grid.hpp"
#include "chtumor/potentials.hpp"

// Fully implicit backward-Euler integration of the coupled (mu, phi, sigma)
// system with a monolithic Newton solve per step. The same machinery covers
// the viscous regime (alpha, beta > 0) and both degenerate regimes: beta = 0
// drops the beta*d_t(phi) term (the second equation becomes the elliptic
// relation mu = -Lap(phi) + xi + pi(phi)), alpha = 0 drops alpha*d_t(mu).
namespace chtumor {

struct ModelParams {
  double alpha = 0.5;
  double beta = 0.5;
  double gamma = 1.0;
  PotentialSpec potential = PotentialSpec::double_well();
  ProliferationSpec proliferation = ProliferationSpec::constant(1.0);
  double T = 1.0;

  // Throws std::invalid_argument listing every violated constraint.
  void validate() const;
};

struct State {
  Field mu, phi, sigma;
  Field xi;  // recorded selection, eval_B(potential, phi) after accepted steps
  double t = 0.0;
};

struct SolverConfig {
  double dt = 1e-3;
  // Convergence is on the combined scaled residual:
  // sqrt(|r1|_H^2 + |r2|_H^2 + |r3|_H^2) / max(1, |mu|_H, |phi|_H, |sigma|_H).
  double newton_tol = 1e-10;
  int newton_max = 50;
  double damping = 0.5;
  int max_halvings = 20;
  double lin_tol = 1e-12;

  void validate() const;
};

// Optional manufactured forcing, evaluated at cell centers and the implicit
// time level t + dt. Arguments: (x, y, t); y is 0 in 1D.
struct Forcing {
  std::function<double(double, double, double)> f1, f2, f3;
  bool any() const { return bool(f1) || bool(f2) || bool(f3); }
};

struct StepFailure : std::runtime_error {
  StepFailure(const std::string& msg, double residual_, double t_)
      : std::runtime_error(msg), residual(residual_), t(t_) {}
  double residual;
  double t;
};

struct SolveDiagnostics {
  long total_newton_iters = 0;
  int dt_halvings = 0;
  // max over steps of r_last / r_penultimate^2 for the final consecutive
  // Newton residual pair with r_penultimate >= 1e-8 (below that the pair is
  // resolution-limited and says nothing about the quadratic tail).
  double quadratic_tail_C = 0.0;
};

struct Trajectory {
  std::vector<State> states;
  double dt = 0.0;
  SolveDiagnostics diag;
};

// Initial data used by the verification studies: phi0 = 0.2 cos(pi x),
// mu0 = sigma0 = 0.1 + 0.1 cos(pi x) (products of cosines in 2D), all
// multiplied by `amplitude`.
State default_initial_state(const Grid& g, const PotentialSpec& pot,
                            double amplitude = 1.0);
State zero_initial_state(const Grid& g, const PotentialSpec& pot);
// xi is set to eval_B(pot, phi) cellwise, t to `t0`.
State make_state(const PotentialSpec& pot, Field mu, Field phi, Field sigma,
                 double t0 = 0.0);

State step(const State& s, const ModelParams& p, const SolverConfig& cfg,
           const Forcing* forcing = nullptr);

// Runs ceil(T/dt) accepted steps (the last one shortened to land on T when
// T is not a multiple of dt). On a Newton failure the offending step is
// retried once as two half steps; a second failure aborts with StepFailure.
Trajectory solve(const State& initial, const ModelParams& p,
                 const SolverConfig& cfg, const Forcing* forcing = nullptr);

// integral of alpha*mu + phi + sigma over the domain
double conserved_quantity(const State& s, const ModelParams& p);

struct ResidualNorms {
  double r1, r2, r3;
};

// H-norms of the three discrete equation residuals for the transition
// prev -> next over dt. The stored next.xi enters the second equation as the
// selection (solver-produced states carry eval_B(potential, phi) there;
// external candidates may carry any admissible selection).
ResidualNorms residual(const State& prev, const State& next,
                       const ModelParams& p, double dt,
                       const Forcing* forcing = nullptr);

struct EnergyReport {
  std::vector<double> energy;  // E(t_k) along the trajectory
  double max_increment = 0.0;  // max of E(t_{k+1}) - E(t_k)
  // A-priori aggregate: sqrt(alpha)|mu|_{Linf(H)} + |grad mu|_{L2(H)}
  //  + sqrt(beta)|d_t phi|_{L2(H)} + |phi|_{Linf(V)} + |F(phi)|_{Linf(L1)}^1/2
  //  + |d_t(alpha mu + phi)|_{L2(V*)} + |sigma|_{H1(V*)} + |sigma|_{Linf(H)}
  //  + |sigma|_{L2(V)}, against the data term sqrt(alpha)|mu0|_H + |phi0|_V
  //  + |F(phi0)|_{L1}^1/2 + |sigma0|_H.
  double aggregate = 0.0;
  double data_term = 0.0;
  double ratio = 0.0;
};

// E = int(0.5 |grad phi|^2 + F(phi)) + (alpha/2) int(mu^2); the gradient
// term uses the summation-by-parts-exact face sum (grad_sq).
EnergyReport energy_check(const Trajectory& traj, const ModelParams& p);

}  // namespace chtumor
