#include "chtumor/solver.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <string>

#include "chtumor/kernels.hpp"
#include "chtumor/log.hpp"
#include "chtumor/operators.hpp"

namespace chtumor {
namespace {

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& s : parts) {
    if (!out.empty()) out += "; ";
    out += s;
  }
  return out;
}

// The logarithmic barrier is only defined on (-1, 1); Newton iterates may
// overshoot, so B and B' are evaluated at a clamped argument there. Other
// families are globally defined.
double sel_arg(const PotentialSpec& s, double r) {
  if (s.family == PotentialFamily::Logarithmic)
    return std::clamp(r, -1.0 + 1e-9, 1.0 - 1e-9);
  return r;
}

struct EqIn {
  const ModelParams* p;
  const Grid* g;
  double dt;
  const double *pmu, *pphi, *psg;  // previous time level
  const double *mu, *phi, *sg;     // implicit-level iterate
  const double* xi;                // selection override, else eval_B(phi)
  const double *g1, *g2, *g3;      // forcing at the implicit level
};

// The three backward-Euler equation residuals, cellwise:
//   r1 = a/dt (mu-mu0) + 1/dt (phi-phi0) - lap mu - p(phi)(sg - g mu) - g1
//   r2 = b/dt (phi-phi0) - lap phi + xi + pi(phi) - mu - g2
//   r3 = 1/dt (sg-sg0) - lap sg + p(phi)(sg - g mu) - g3
// The reaction term is the same expression in r1 and r3, so summing the two
// cancels it exactly (cellwise, in floating point) for any gamma.
void eval_equations(const EqIn& in, double* lmu, double* lphi, double* lsg,
                    double* r1, double* r2, double* r3) {
  const ModelParams& P = *in.p;
  const Grid& G = *in.g;
  const std::size_t nc = G.cells();
  const double inv_h2 = 1.0 / (G.h * G.h);
  if (G.dim == 1) {
    kernels::laplacian1d(in.mu, lmu, nc, inv_h2);
    kernels::laplacian1d(in.phi, lphi, nc, inv_h2);
    kernels::laplacian1d(in.sg, lsg, nc, inv_h2);
  } else {
    const std::size_t n = static_cast<std::size_t>(G.n);
    kernels::laplacian2d(in.mu, lmu, n, n, inv_h2);
    kernels::laplacian2d(in.phi, lphi, n, n, inv_h2);
    kernels::laplacian2d(in.sg, lsg, n, n, inv_h2);
  }
  const double idt = 1.0 / in.dt;
  const double adt = P.alpha * idt;
  const double bdt = P.beta * idt;
  for (std::size_t i = 0; i < nc; ++i) {
    const double ph = in.phi[i];
    const double pv = eval_p(P.proliferation, ph);
    const double R = pv * (in.sg[i] - P.gamma * in.mu[i]);
    const double xi =
        in.xi ? in.xi[i] : eval_B(P.potential, sel_arg(P.potential, ph));
    r1[i] = adt * (in.mu[i] - in.pmu[i]) + idt * (ph - in.pphi[i]) - lmu[i] -
            R - (in.g1 ? in.g1[i] : 0.0);
    r2[i] = bdt * (ph - in.pphi[i]) - lphi[i] + xi + eval_pi(P.potential, ph) -
            in.mu[i] - (in.g2 ? in.g2[i] : 0.0);
    r3[i] = idt * (in.sg[i] - in.psg[i]) - lsg[i] + R -
            (in.g3 ? in.g3[i] : 0.0);
  }
}

// One backward-Euler step: monolithic Newton on the interleaved unknown
// vector (mu_i, phi_i, sg_i), banded Jacobian solved by dgbsv, backtracking
// line search on the scaled combined residual.
class Stepper {
 public:
  Stepper(const Grid& g, const ModelParams& p, const SolverConfig& cfg,
          const Forcing* forcing)
      : grid_(g),
        p_(p),
        cfg_(cfg),
        forcing_(forcing && forcing->any() ? forcing : nullptr),
        nc_(g.cells()),
        hd_(g.dim == 1 ? g.h : g.h * g.h),
        inv_h2_(1.0 / (g.h * g.h)) {
    mu_.resize(nc_);
    phi_.resize(nc_);
    sg_.resize(nc_);
    tmu_.resize(nc_);
    tphi_.resize(nc_);
    tsg_.resize(nc_);
    lmu_.resize(nc_);
    lphi_.resize(nc_);
    lsg_.resize(nc_);
    r1_.resize(nc_);
    r2_.resize(nc_);
    r3_.resize(nc_);
    tr1_.resize(nc_);
    tr2_.resize(nc_);
    tr3_.resize(nc_);
    if (forcing_) {
      g1_.resize(nc_);
      g2_.resize(nc_);
      g3_.resize(nc_);
    }
    m_ = static_cast<lapack_int>(3 * nc_);
    kl_ = grid_.dim == 1 ? 3 : static_cast<lapack_int>(3 * grid_.n);
    ldab_ = 3 * kl_ + 1;
    ab_.resize(static_cast<std::size_t>(ldab_) * static_cast<std::size_t>(m_));
    ipiv_.resize(static_cast<std::size_t>(m_));
    rhs_.resize(static_cast<std::size_t>(m_));
  }

  State advance(const State& s, double dt, SolveDiagnostics* diag) {
    dt_ = dt;
    pmu_ = s.mu.data();
    pphi_ = s.phi.data();
    psg_ = s.sigma.data();
    const double t_next = s.t + dt;
    std::memcpy(mu_.data(), pmu_, nc_ * sizeof(double));
    std::memcpy(phi_.data(), pphi_, nc_ * sizeof(double));
    std::memcpy(sg_.data(), psg_, nc_ * sizeof(double));
    if (forcing_) eval_forcing(t_next);
    scale_ = std::max(
        {1.0, hnorm(pmu_), hnorm(pphi_), hnorm(psg_)});

    double res = eval_scaled(mu_, phi_, sg_, r1_, r2_, r3_);
    if (!std::isfinite(res))
      throw StepFailure("non-finite residual at start of step to t=" +
                            std::to_string(t_next),
                        res, t_next);
    double prev_res = std::numeric_limits<double>::quiet_NaN();
    int iters = 0;
    while (!(res < cfg_.newton_tol)) {
      if (iters >= cfg_.newton_max)
        throw StepFailure("Newton did not converge in " +
                              std::to_string(cfg_.newton_max) +
                              " iterations at t=" + std::to_string(t_next) +
                              " (scaled residual " + std::to_string(res) + ")",
                          res, t_next);
      assemble();
      for (std::size_t i = 0; i < nc_; ++i) {
        rhs_[3 * i + 0] = -r1_[i];
        rhs_[3 * i + 1] = -r2_[i];
        rhs_[3 * i + 2] = -r3_[i];
      }
      const lapack_int info =
          LAPACKE_dgbsv(LAPACK_COL_MAJOR, m_, kl_, kl_, 1, ab_.data(), ldab_,
                        ipiv_.data(), rhs_.data(), m_);
      if (info != 0)
        throw StepFailure("Newton linear solve failed (dgbsv info=" +
                              std::to_string(info) +
                              ") at t=" + std::to_string(t_next),
                          res, t_next);
      double lam = 1.0;
      bool accepted = false;
      for (int h = 0; h <= cfg_.max_halvings; ++h) {
        for (std::size_t i = 0; i < nc_; ++i) {
          tmu_[i] = mu_[i] + lam * rhs_[3 * i + 0];
          tphi_[i] = phi_[i] + lam * rhs_[3 * i + 1];
          tsg_[i] = sg_[i] + lam * rhs_[3 * i + 2];
        }
        const double tres = eval_scaled(tmu_, tphi_, tsg_, tr1_, tr2_, tr3_);
        if (std::isfinite(tres) && tres < res) {
          mu_.swap(tmu_);
          phi_.swap(tphi_);
          sg_.swap(tsg_);
          r1_.swap(tr1_);
          r2_.swap(tr2_);
          r3_.swap(tr3_);
          prev_res = res;
          res = tres;
          accepted = true;
          break;
        }
        lam *= cfg_.damping;
      }
      ++iters;
      if (!accepted)
        throw StepFailure("Newton line search stalled at t=" +
                              std::to_string(t_next) + " (scaled residual " +
                              std::to_string(res) + ")",
                          res, t_next);
    }
    if (diag) {
      diag->total_newton_iters += iters;
      // Pairs with a tiny penultimate residual sit at the floating-point
      // floor and say nothing about the quadratic tail.
      if (std::isfinite(prev_res) && prev_res >= 1e-8)
        diag->quadratic_tail_C =
            std::max(diag->quadratic_tail_C, res / (prev_res * prev_res));
    }

    State out;
    out.mu = Field(grid_);
    out.phi = Field(grid_);
    out.sigma = Field(grid_);
    out.xi = Field(grid_);
    std::memcpy(out.mu.data(), mu_.data(), nc_ * sizeof(double));
    std::memcpy(out.phi.data(), phi_.data(), nc_ * sizeof(double));
    std::memcpy(out.sigma.data(), sg_.data(), nc_ * sizeof(double));
    for (std::size_t i = 0; i < nc_; ++i)
      out.xi[i] = eval_B(p_.potential, sel_arg(p_.potential, phi_[i]));
    out.t = t_next;
    out.mu.require_finite("mu");
    out.phi.require_finite("phi");
    out.sigma.require_finite("sigma");
    out.xi.require_finite("xi");
    return out;
  }

 private:
  double hnorm(const double* x) const {
    return std::sqrt(kernels::dot(x, x, nc_) * hd_);
  }

  double eval_scaled(const std::vector<double>& mu,
                     const std::vector<double>& phi,
                     const std::vector<double>& sg, std::vector<double>& r1,
                     std::vector<double>& r2, std::vector<double>& r3) {
    EqIn in;
    in.p = &p_;
    in.g = &grid_;
    in.dt = dt_;
    in.pmu = pmu_;
    in.pphi = pphi_;
    in.psg = psg_;
    in.mu = mu.data();
    in.phi = phi.data();
    in.sg = sg.data();
    in.xi = nullptr;
    in.g1 = forcing_ ? g1_.data() : nullptr;
    in.g2 = forcing_ ? g2_.data() : nullptr;
    in.g3 = forcing_ ? g3_.data() : nullptr;
    eval_equations(in, lmu_.data(), lphi_.data(), lsg_.data(), r1.data(),
                   r2.data(), r3.data());
    const double ss = kernels::dot(r1.data(), r1.data(), nc_) +
                      kernels::dot(r2.data(), r2.data(), nc_) +
                      kernels::dot(r3.data(), r3.data(), nc_);
    return std::sqrt(ss * hd_) / scale_;
  }

  void eval_forcing(double t) {
    const int n = grid_.n;
    for (std::size_t i = 0; i < nc_; ++i) {
      double x, y;
      if (grid_.dim == 1) {
        x = grid_.coord(static_cast<int>(i));
        y = 0.0;
      } else {
        x = grid_.coord(static_cast<int>(i % static_cast<std::size_t>(n)));
        y = grid_.coord(static_cast<int>(i / static_cast<std::size_t>(n)));
      }
      g1_[i] = forcing_->f1 ? forcing_->f1(x, y, t) : 0.0;
      g2_[i] = forcing_->f2 ? forcing_->f2(x, y, t) : 0.0;
      g3_[i] = forcing_->f3 ? forcing_->f3(x, y, t) : 0.0;
    }
  }

  void assemble() {
    std::fill(ab_.begin(), ab_.end(), 0.0);
    const double idt = 1.0 / dt_;
    const double adt = p_.alpha * idt;
    const double bdt = p_.beta * idt;
    const lapack_int off = 2 * kl_;
    auto add = [&](lapack_int row, lapack_int col, double v) {
      ab_[static_cast<std::size_t>(col) * static_cast<std::size_t>(ldab_) +
          static_cast<std::size_t>(off + row - col)] += v;
    };
    const std::size_t n = static_cast<std::size_t>(grid_.n);
    for (std::size_t i = 0; i < nc_; ++i) {
      std::size_t nb[4];
      int nnb = 0;
      if (grid_.dim == 1) {
        if (i > 0) nb[nnb++] = i - 1;
        if (i + 1 < nc_) nb[nnb++] = i + 1;
      } else {
        const std::size_t ix = i % n;
        const std::size_t iy = i / n;
        if (ix > 0) nb[nnb++] = i - 1;
        if (ix + 1 < n) nb[nnb++] = i + 1;
        if (iy > 0) nb[nnb++] = i - n;
        if (iy + 1 < n) nb[nnb++] = i + n;
      }
      const double ph = phi_[i];
      const double pv = eval_p(p_.proliferation, ph);
      const double ppr = eval_p_prime(p_.proliferation, ph);
      const double Bp = eval_B_prime(p_.potential, sel_arg(p_.potential, ph));
      const double pip = eval_pi_prime(p_.potential, ph);
      const double smu = sg_[i] - p_.gamma * mu_[i];
      const double deg = nnb * inv_h2_;
      const lapack_int b0 = static_cast<lapack_int>(3 * i);
      add(b0 + 0, b0 + 0, adt + deg + p_.gamma * pv);
      add(b0 + 0, b0 + 1, idt - ppr * smu);
      add(b0 + 0, b0 + 2, -pv);
      add(b0 + 1, b0 + 0, -1.0);
      add(b0 + 1, b0 + 1, bdt + deg + Bp + pip);
      add(b0 + 2, b0 + 0, -p_.gamma * pv);
      add(b0 + 2, b0 + 1, ppr * smu);
      add(b0 + 2, b0 + 2, idt + deg + pv);
      for (int k = 0; k < nnb; ++k) {
        const lapack_int c0 = static_cast<lapack_int>(3 * nb[k]);
        add(b0 + 0, c0 + 0, -inv_h2_);
        add(b0 + 1, c0 + 1, -inv_h2_);
        add(b0 + 2, c0 + 2, -inv_h2_);
      }
    }
  }

  Grid grid_;
  ModelParams p_;
  SolverConfig cfg_;
  const Forcing* forcing_;
  std::size_t nc_;
  double hd_, inv_h2_;
  double dt_ = 0.0, scale_ = 1.0;
  const double *pmu_ = nullptr, *pphi_ = nullptr, *psg_ = nullptr;
  std::vector<double> mu_, phi_, sg_, tmu_, tphi_, tsg_;
  std::vector<double> lmu_, lphi_, lsg_;
  std::vector<double> r1_, r2_, r3_, tr1_, tr2_, tr3_;
  std::vector<double> g1_, g2_, g3_;
  lapack_int m_ = 0, kl_ = 0, ldab_ = 0;
  std::vector<double> ab_;
  std::vector<lapack_int> ipiv_;
  std::vector<double> rhs_;
};

void check_state(const State& s) {
  require_same_grid(s.mu, s.phi);
  require_same_grid(s.mu, s.sigma);
  require_same_grid(s.mu, s.xi);
  s.mu.require_finite("mu");
  s.phi.require_finite("phi");
  s.sigma.require_finite("sigma");
  s.xi.require_finite("xi");
}

}  // namespace

void ModelParams::validate() const {
  std::vector<std::string> bad;
  if (!(alpha >= 0.0 && alpha < 1.0))
    bad.push_back("alpha must lie in [0, 1)");
  if (!(beta >= 0.0 && beta < 1.0)) bad.push_back("beta must lie in [0, 1)");
  if (alpha == 0.0 && beta == 0.0)
    bad.push_back("alpha and beta must not both vanish");
  if (!(gamma > 0.0)) bad.push_back("gamma must be positive");
  if (!(T >= 0.0) || !std::isfinite(T)) bad.push_back("T must be nonnegative");
  if (!bad.empty()) throw std::invalid_argument(join(bad));
}

void SolverConfig::validate() const {
  std::vector<std::string> bad;
  if (!(dt > 0.0) || !std::isfinite(dt)) bad.push_back("dt must be positive");
  if (!(newton_tol > 0.0)) bad.push_back("newton_tol must be positive");
  if (newton_max < 1) bad.push_back("newton_max must be at least 1");
  if (!(damping > 0.0 && damping < 1.0))
    bad.push_back("damping must lie in (0, 1)");
  if (max_halvings < 0) bad.push_back("max_halvings must be nonnegative");
  if (!(lin_tol > 0.0)) bad.push_back("lin_tol must be positive");
  if (!bad.empty()) throw std::invalid_argument(join(bad));
}

State make_state(const PotentialSpec& pot, Field mu, Field phi, Field sigma,
                 double t0) {
  require_same_grid(mu, phi);
  require_same_grid(mu, sigma);
  State s;
  s.xi = Field(phi.grid());
  for (std::size_t i = 0; i < phi.size(); ++i)
    s.xi[i] = eval_B(pot, sel_arg(pot, phi[i]));
  s.mu = std::move(mu);
  s.phi = std::move(phi);
  s.sigma = std::move(sigma);
  s.t = t0;
  check_state(s);
  return s;
}

State default_initial_state(const Grid& g, const PotentialSpec& pot,
                            double amplitude) {
  const double pi = 3.14159265358979323846;
  auto mode = [&](double x, double y) {
    double v = std::cos(pi * x / g.extent);
    if (g.dim == 2) v *= std::cos(pi * y / g.extent);
    return v;
  };
  Field phi = Field::from_function(
      g, [&](double x, double y) { return amplitude * 0.2 * mode(x, y); });
  Field mu = Field::from_function(g, [&](double x, double y) {
    return amplitude * (0.1 + 0.1 * mode(x, y));
  });
  Field sigma = mu;
  return make_state(pot, std::move(mu), std::move(phi), std::move(sigma));
}

State zero_initial_state(const Grid& g, const PotentialSpec& pot) {
  return make_state(pot, Field(g), Field(g), Field(g));
}

State step(const State& s, const ModelParams& p, const SolverConfig& cfg,
           const Forcing* forcing) {
  p.validate();
  cfg.validate();
  check_state(s);
  Stepper st(s.mu.grid(), p, cfg, forcing);
  return st.advance(s, cfg.dt, nullptr);
}

Trajectory solve(const State& initial, const ModelParams& p,
                 const SolverConfig& cfg, const Forcing* forcing) {
  p.validate();
  cfg.validate();
  check_state(initial);
  const Grid& g = initial.mu.grid();

  Trajectory traj;
  traj.dt = cfg.dt;
  traj.states.push_back(initial);
  if (p.T == 0.0) return traj;

  const double q = p.T / cfg.dt;
  long steps = std::llround(q);
  if (std::fabs(q - static_cast<double>(steps)) > 1e-9 * std::max(1.0, q))
    steps = static_cast<long>(std::ceil(q));
  if (steps < 1) steps = 1;
  if (steps > 10000000L)
    throw std::invalid_argument("T/dt exceeds 1e7 steps");
  traj.states.reserve(static_cast<std::size_t>(steps) + 1);

  if (p.beta == 0.0)
    logging::info(
        "beta = 0 regime: the second equation is the elliptic relation "
        "mu = -lap(phi) + xi + pi(phi)");
  if (p.alpha == 0.0)
    logging::info("alpha = 0 regime: the first equation has no mu mass term");

  Stepper stepper(g, p, cfg, forcing);
  for (long k = 0; k < steps; ++k) {
    const State& cur = traj.states.back();
    const double dtk =
        (k + 1 < steps) ? cfg.dt
                        : p.T - cfg.dt * static_cast<double>(steps - 1);
    try {
      traj.states.push_back(stepper.advance(cur, dtk, &traj.diag));
    } catch (const StepFailure& e) {
      logging::warn(std::string("step retry with halved dt after: ") +
                    e.what());
      ++traj.diag.dt_halvings;
      try {
        State mid = stepper.advance(cur, dtk / 2, &traj.diag);
        traj.states.push_back(stepper.advance(mid, dtk / 2, &traj.diag));
      } catch (const StepFailure& e2) {
        throw StepFailure(
            std::string("step failed again after halving dt: ") + e2.what(),
            e2.residual, e2.t);
      }
    }
  }
  return traj;
}

double conserved_quantity(const State& s, const ModelParams& p) {
  const Grid& g = s.mu.grid();
  const double hd = g.dim == 1 ? g.h : g.h * g.h;
  const std::size_t nc = g.cells();
  return (p.alpha * kernels::sum(s.mu.data(), nc) +
          kernels::sum(s.phi.data(), nc) + kernels::sum(s.sigma.data(), nc)) *
         hd;
}

ResidualNorms residual(const State& prev, const State& next,
                       const ModelParams& p, double dt,
                       const Forcing* forcing) {
  if (!(dt > 0.0)) throw std::invalid_argument("residual: dt must be positive");
  check_state(prev);
  check_state(next);
  require_same_grid(prev.mu, next.mu);
  const Grid& g = prev.mu.grid();
  const std::size_t nc = g.cells();
  const double hd = g.dim == 1 ? g.h : g.h * g.h;

  std::vector<double> lmu(nc), lphi(nc), lsg(nc), r1(nc), r2(nc), r3(nc);
  std::vector<double> g1, g2, g3;
  const bool has_g = forcing && forcing->any();
  if (has_g) {
    g1.resize(nc);
    g2.resize(nc);
    g3.resize(nc);
    const double t = prev.t + dt;
    const std::size_t n = static_cast<std::size_t>(g.n);
    for (std::size_t i = 0; i < nc; ++i) {
      const double x = g.coord(static_cast<int>(g.dim == 1 ? i : i % n));
      const double y = g.dim == 1 ? 0.0 : g.coord(static_cast<int>(i / n));
      g1[i] = forcing->f1 ? forcing->f1(x, y, t) : 0.0;
      g2[i] = forcing->f2 ? forcing->f2(x, y, t) : 0.0;
      g3[i] = forcing->f3 ? forcing->f3(x, y, t) : 0.0;
    }
  }

  EqIn in;
  in.p = &p;
  in.g = &g;
  in.dt = dt;
  in.pmu = prev.mu.data();
  in.pphi = prev.phi.data();
  in.psg = prev.sigma.data();
  in.mu = next.mu.data();
  in.phi = next.phi.data();
  in.sg = next.sigma.data();
  in.xi = next.xi.data();
  in.g1 = has_g ? g1.data() : nullptr;
  in.g2 = has_g ? g2.data() : nullptr;
  in.g3 = has_g ? g3.data() : nullptr;
  eval_equations(in, lmu.data(), lphi.data(), lsg.data(), r1.data(), r2.data(),
                 r3.data());

  auto hn = [&](const std::vector<double>& r) {
    return std::sqrt(kernels::dot(r.data(), r.data(), nc) * hd);
  };
  return {hn(r1), hn(r2), hn(r3)};
}

EnergyReport energy_check(const Trajectory& traj, const ModelParams& p) {
  if (traj.states.empty())
    throw std::invalid_argument("energy_check: empty trajectory");
  const auto& st = traj.states;
  const Grid& g = st[0].mu.grid();
  const double hd = g.dim == 1 ? g.h : g.h * g.h;
  const std::size_t K = st.size() - 1;
  const double dt = traj.dt;
  if (K > 0 && !(dt > 0.0))
    throw std::invalid_argument("energy_check: trajectory dt must be positive");

  auto int_F = [&](const Field& phi) {
    double acc = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i)
      acc += eval_F(p.potential, phi[i]);
    return acc * hd;
  };

  EnergyReport rep;
  rep.energy.reserve(st.size());
  for (const State& s : st)
    rep.energy.push_back(0.5 * grad_sq(s.phi) + int_F(s.phi) +
                         0.5 * p.alpha * inner_H(s.mu, s.mu));
  rep.max_increment = 0.0;
  for (std::size_t k = 0; k + 1 < rep.energy.size(); ++k)
    rep.max_increment =
        std::max(rep.max_increment, rep.energy[k + 1] - rep.energy[k]);

  // Left-endpoint time sampling throughout (sample k weights [t_k, t_k+1)).
  const std::size_t linf_end = std::max<std::size_t>(K, 1);
  double mu_linf_H = 0.0, phi_linf_V = 0.0, F_linf = 0.0, sg_linf_H = 0.0;
  for (std::size_t k = 0; k < linf_end; ++k) {
    mu_linf_H = std::max(mu_linf_H, norm_H(st[k].mu));
    phi_linf_V = std::max(phi_linf_V, norm_V(st[k].phi));
    F_linf = std::max(F_linf, int_F(st[k].phi));
    sg_linf_H = std::max(sg_linf_H, norm_H(st[k].sigma));
  }
  double grad_mu_l2 = 0.0, dtphi_l2 = 0.0, w_l2 = 0.0;
  double sg_vstar_l2 = 0.0, dtsg_vstar_l2 = 0.0, sg_v_l2 = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    grad_mu_l2 += grad_sq(st[k].mu) * dt;
    Field dphi = st[k + 1].phi;
    dphi -= st[k].phi;
    dphi *= 1.0 / dt;
    dtphi_l2 += inner_H(dphi, dphi) * dt;
    Field w = st[k + 1].mu;
    w -= st[k].mu;
    w *= p.alpha / dt;
    w += dphi;
    const double wn = norm_Vstar(w);
    w_l2 += wn * wn * dt;
    const double sn = norm_Vstar(st[k].sigma);
    sg_vstar_l2 += sn * sn * dt;
    Field dsg = st[k + 1].sigma;
    dsg -= st[k].sigma;
    dsg *= 1.0 / dt;
    const double dsn = norm_Vstar(dsg);
    dtsg_vstar_l2 += dsn * dsn * dt;
    const double sv = norm_V(st[k].sigma);
    sg_v_l2 += sv * sv * dt;
  }
  rep.aggregate = std::sqrt(p.alpha) * mu_linf_H + std::sqrt(grad_mu_l2) +
                  std::sqrt(p.beta) * std::sqrt(dtphi_l2) + phi_linf_V +
                  std::sqrt(std::max(0.0, F_linf)) + std::sqrt(w_l2) +
                  std::sqrt(sg_vstar_l2 + dtsg_vstar_l2) + sg_linf_H +
                  std::sqrt(sg_v_l2);
  rep.data_term = std::sqrt(p.alpha) * norm_H(st[0].mu) + norm_V(st[0].phi) +
                  std::sqrt(std::max(0.0, int_F(st[0].phi))) +
                  norm_H(st[0].sigma);
  if (rep.data_term > 0.0)
    rep.ratio = rep.aggregate / rep.data_term;
  else
    rep.ratio = rep.aggregate > 0.0
                    ? std::numeric_limits<double>::infinity()
                    : 0.0;
  return rep;
}

}  // namespace chtumor
