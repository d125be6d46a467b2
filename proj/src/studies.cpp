#include "chtumor/studies.hpp"

#include <atomic>
#include <exception>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "chtumor/log.hpp"
#include "chtumor/operators.hpp"

namespace chtumor {
namespace {

enum class SweepKind { Beta, Alpha };

std::string num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& s : parts) {
    if (!out.empty()) out += "; ";
    out += s;
  }
  return out;
}

void parallel_for(std::size_t n, int jobs,
                  const std::function<void(std::size_t)>& fn) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t nw = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errs(n);
  std::vector<std::thread> pool;
  pool.reserve(nw);
  for (std::size_t w = 0; w < nw; ++w)
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          errs[i] = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

void validate_sweep(const SweepConfig& cfg, SweepKind kind) {
  std::vector<std::string> bad;
  if (cfg.values.size() < 3)
    bad.push_back("need at least 3 sweep values for the rate fit");
  bool in_range = true, decreasing = true;
  for (std::size_t i = 0; i < cfg.values.size(); ++i) {
    if (!(cfg.values[i] > 0.0 && cfg.values[i] < 1.0)) in_range = false;
    if (i > 0 && !(cfg.values[i] < cfg.values[i - 1])) decreasing = false;
  }
  if (!in_range) bad.push_back("sweep values must lie in (0, 1)");
  if (!decreasing) bad.push_back("sweep values must be strictly decreasing");
  if (!(cfg.fixed > 0.0 && cfg.fixed < 1.0))
    bad.push_back(kind == SweepKind::Beta ? "fixed alpha must lie in (0, 1)"
                                          : "fixed beta must lie in (0, 1)");
  if (!(cfg.dt > 0.0)) bad.push_back("dt must be positive");
  if (!(cfg.T > 0.0)) bad.push_back("T must be positive");
  if (!(cfg.amplitude > 0.0)) bad.push_back("amplitude must be positive");
  if (cfg.jobs < 1) bad.push_back("jobs must be at least 1");
  if (!(cfg.gamma > 0.0)) bad.push_back("gamma must be positive");
  if (kind == SweepKind::Alpha) {
    if (!cfg.proliferation.is_constant())
      bad.push_back(
          "the alpha sweep requires that p is a nonnegative constant "
          "(hypothesis of its error bound); got " +
          proliferation_name(cfg.proliferation));
    if (cfg.potential.family != PotentialFamily::DoubleWell)
      bad.push_back(
          "the alpha sweep requires the double-well potential "
          "(quadratic-growth hypothesis of its error bound); got " +
          potential_name(cfg.potential));
  }
  if (!bad.empty()) throw std::invalid_argument(join(bad));
  if (kind == SweepKind::Beta && cfg.fixed > 0.2)
    logging::warn("beta sweep: fixed alpha " + num(cfg.fixed) +
                  " is above the probed smallness range; the rate may "
                  "degrade");
  if (kind == SweepKind::Beta &&
      cfg.potential.family != PotentialFamily::DoubleWell)
    logging::info("beta sweep: potential '" + potential_name(cfg.potential) +
                  "' is outside the hypothesis set the rate bound was "
                  "stated for");
}

std::vector<Field> diff_samples(const Trajectory& a, const Trajectory& b,
                                Field State::*comp) {
  if (a.states.size() != b.states.size())
    throw std::logic_error("sweep trajectories have different lengths");
  std::vector<Field> out;
  out.reserve(a.states.size());
  for (std::size_t k = 0; k < a.states.size(); ++k) {
    Field d = a.states[k].*comp;
    d -= b.states[k].*comp;
    out.push_back(std::move(d));
  }
  return out;
}

double composite_error(SweepKind kind, const Trajectory& full,
                       const Trajectory& ref, double alpha, double dt,
                       std::array<double, 5>& parts) {
  auto dmu = diff_samples(full, ref, &State::mu);
  auto dphi = diff_samples(full, ref, &State::phi);
  auto dsg = diff_samples(full, ref, &State::sigma);
  if (kind == SweepKind::Beta) {
    std::vector<Field> comb;
    comb.reserve(dmu.size());
    for (std::size_t k = 0; k < dmu.size(); ++k) {
      Field w = dmu[k];
      w *= alpha;
      w += dphi[k];
      w += dsg[k];
      comb.push_back(std::move(w));
    }
    parts = {bochner_norm(dmu, dt, BochnerNorm::L2_H),
             bochner_norm(dphi, dt, BochnerNorm::L2_V),
             bochner_norm(dsg, dt, BochnerNorm::Linf_H),
             bochner_norm(dsg, dt, BochnerNorm::L2_V),
             bochner_norm(comb, dt, BochnerNorm::Linf_Vstar)};
  } else {
    parts = {bochner_norm(dmu, dt, BochnerNorm::L2_V),
             bochner_norm(dphi, dt, BochnerNorm::Linf_H),
             bochner_norm(dphi, dt, BochnerNorm::L2_V),
             bochner_norm(dsg, dt, BochnerNorm::Linf_H),
             bochner_norm(dsg, dt, BochnerNorm::L2_V)};
  }
  return parts[0] + parts[1] + parts[2] + parts[3] + parts[4];
}

StudyResult run_sweep(const SweepConfig& cfg, SweepKind kind) {
  validate_sweep(cfg, kind);
  SolverConfig scfg = cfg.solver;
  scfg.dt = cfg.dt;
  const std::size_t nv = cfg.values.size();
  const bool altref = kind == SweepKind::Beta && cfg.check_reference;
  const std::size_t nsolve = nv + 1 + (altref ? 1 : 0);

  const State init =
      default_initial_state(cfg.grid, cfg.potential, cfg.amplitude);
  auto value_for = [&](std::size_t i) {
    if (i < nv) return cfg.values[i];
    if (i == nv) return 0.0;
    return cfg.values.back() / 10.0;
  };
  auto params_for = [&](std::size_t i) {
    ModelParams p;
    p.gamma = cfg.gamma;
    p.potential = cfg.potential;
    p.proliferation = cfg.proliferation;
    p.T = cfg.T;
    if (kind == SweepKind::Beta) {
      p.alpha = cfg.fixed;
      p.beta = value_for(i);
    } else {
      p.alpha = value_for(i);
      p.beta = cfg.fixed;
    }
    return p;
  };

  std::vector<Trajectory> trajs(nsolve);
  const char* swept = kind == SweepKind::Beta ? "beta" : "alpha";
  parallel_for(nsolve, cfg.jobs, [&](std::size_t i) {
    try {
      trajs[i] = solve(init, params_for(i), scfg);
    } catch (const std::exception& e) {
      throw std::runtime_error(std::string(swept) + " sweep solve failed at " +
                               swept + " = " + num(value_for(i)) + ": " +
                               e.what());
    }
  });

  StudyResult res;
  res.swept = swept;
  res.reference_value = 0.0;
  std::vector<std::pair<double, double>> pairs;
  for (std::size_t i = 0; i < nv; ++i) {
    SweepPoint pt;
    pt.value = cfg.values[i];
    pt.error =
        composite_error(kind, trajs[i], trajs[nv], cfg.fixed, cfg.dt, pt.parts);
    pairs.emplace_back(pt.value, pt.error);
    res.points.push_back(pt);
  }
  const RateFit fit = fit_rate(pairs);
  res.rate = fit.rate;
  res.intercept = fit.intercept;
  res.r2 = fit.r2;
  if (fit.rate > 0.7)
    logging::info(std::string(swept) + " sweep rate " + num(fit.rate) +
                  " is well above the guaranteed 0.5 (expected when the "
                  "solution depends smoothly on the parameter)");
  if (altref) {
    double mx = 0.0;
    for (std::size_t i = 0; i < nv; ++i) {
      std::array<double, 5> parts2;
      const double e2 = composite_error(kind, trajs[i], trajs[nv + 1],
                                        cfg.fixed, cfg.dt, parts2);
      mx = std::max(mx, std::fabs(e2 - res.points[i].error) /
                            res.points[i].error);
    }
    res.ref_shift_max = mx;
  }
  return res;
}

}  // namespace

StudyResult sweep_beta(const SweepConfig& cfg) {
  return run_sweep(cfg, SweepKind::Beta);
}

StudyResult sweep_alpha(const SweepConfig& cfg) {
  return run_sweep(cfg, SweepKind::Alpha);
}

RateFit fit_rate(const std::vector<std::pair<double, double>>& pairs) {
  if (pairs.size() < 3)
    throw std::invalid_argument("rate fit needs at least 3 (param, error) pairs");
  const std::size_t n = pairs.size();
  std::vector<double> lx(n), le(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(pairs[i].first > 0.0) || !(pairs[i].second > 0.0))
      throw std::invalid_argument(
          "rate fit requires positive parameters and errors");
    lx[i] = std::log(pairs[i].first);
    le[i] = std::log(pairs[i].second);
  }
  double mx = 0.0, me = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    me += le[i];
  }
  mx /= static_cast<double>(n);
  me /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (le[i] - me);
  }
  if (sxx == 0.0)
    throw std::invalid_argument("rate fit requires distinct parameter values");
  RateFit fit;
  fit.rate = sxy / sxx;
  fit.intercept = me - fit.rate * mx;
  double ssres = 0.0, sstot = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double pred = fit.intercept + fit.rate * lx[i];
    ssres += (le[i] - pred) * (le[i] - pred);
    sstot += (le[i] - me) * (le[i] - me);
  }
  fit.r2 = sstot > 0.0 ? 1.0 - ssres / sstot : 1.0;
  return fit;
}

NonuniqResult nonuniqueness_demo(const NonuniqConfig& cfg) {
  std::vector<std::string> bad;
  if (!(cfg.L > 0.0)) bad.push_back("L must be positive");
  if (!(cfg.dt > 0.0)) bad.push_back("dt must be positive");
  if (!(cfg.T > 0.0)) bad.push_back("T must be positive");
  if (!(cfg.epsilon > 0.0)) bad.push_back("epsilon must be positive");
  double alpha = cfg.alpha;
  if (std::isnan(alpha)) {
    alpha = cfg.L > 0.0 ? 1.0 / cfg.L : 0.0;
  } else if (!(std::fabs(alpha * cfg.L - 1.0) <= 1e-12)) {
    bad.push_back(
        "the construction requires alpha * L = 1; distinct solutions exist "
        "exactly on that line");
  }
  if (cfg.L > 0.0 && !(alpha < 1.0))
    bad.push_back("alpha = 1/L must be below 1; choose L > 1");
  if (!bad.empty()) throw std::invalid_argument(join(bad));

  const auto pa = cfg.psi_a ? cfg.psi_a : [](double) { return 0.0; };
  const auto pb = cfg.psi_b ? cfg.psi_b : [](double) { return 0.5; };

  const double q = cfg.T / cfg.dt;
  long steps = std::llround(q);
  if (std::fabs(q - static_cast<double>(steps)) > 1e-9 * std::max(1.0, q))
    steps = static_cast<long>(std::ceil(q));
  if (steps < 1) steps = 1;
  if (steps > 10000000L)
    throw std::invalid_argument("T/dt exceeds 1e7 steps");

  ModelParams p;
  p.alpha = alpha;
  p.beta = 0.0;
  p.gamma = 1.0;
  p.T = cfg.T;
  p.potential = PotentialSpec::nonuniqueness(cfg.L, cfg.epsilon);
  p.proliferation = ProliferationSpec::constant(0.0);
  p.validate();

  auto build = [&](const std::function<double(double)>& psi) {
    std::vector<State> st;
    st.reserve(static_cast<std::size_t>(steps) + 1);
    for (long k = 0; k <= steps; ++k) {
      const double t = std::min(static_cast<double>(k) * cfg.dt, cfg.T);
      const double v = psi(t);
      if (!(std::fabs(v) <= 1.0))
        throw std::invalid_argument("psi(t) must stay in [-1, 1]; got " +
                                    num(v) + " at t = " + num(t));
      State s;
      s.mu = Field(cfg.grid, -cfg.L * v);
      s.phi = Field(cfg.grid, v);
      s.sigma = Field(cfg.grid);
      s.xi = Field(cfg.grid);  // the exhibited selection, xi = 0
      s.t = t;
      st.push_back(std::move(s));
    }
    return st;
  };
  const auto sa = build(pa);
  const auto sb = build(pb);

  NonuniqResult out;
  out.alpha = alpha;
  out.steps = steps;
  auto max_res = [&](const std::vector<State>& st) {
    ResidualNorms mx{0.0, 0.0, 0.0};
    for (std::size_t k = 0; k + 1 < st.size(); ++k) {
      const double dtk = st[k + 1].t - st[k].t;
      const ResidualNorms r = residual(st[k], st[k + 1], p, dtk);
      mx.r1 = std::max(mx.r1, r.r1);
      mx.r2 = std::max(mx.r2, r.r2);
      mx.r3 = std::max(mx.r3, r.r3);
    }
    return mx;
  };
  out.max_a = max_res(sa);
  out.max_b = max_res(sb);

  std::vector<Field> dphi;
  dphi.reserve(sa.size());
  for (std::size_t k = 0; k < sa.size(); ++k) {
    Field d = sa[k].phi;
    d -= sb[k].phi;
    dphi.push_back(std::move(d));
  }
  out.separation = bochner_norm(dphi, cfg.dt, BochnerNorm::L2_H);
  return out;
}

ManufacturedSolution default_manufactured(int dim) {
  if (dim != 1 && dim != 2)
    throw std::invalid_argument("dim must be 1 or 2");
  const double pi = 3.14159265358979323846;
  const double lapfac = dim == 2 ? 2.0 : 1.0;
  auto mode = [pi, dim](double x, double y) {
    double v = std::cos(pi * x);
    if (dim == 2) v *= std::cos(pi * y);
    return v;
  };
  auto val = [mode](double a, double b) {
    return [mode, a, b](double x, double y, double t) {
      return std::exp(-t) * (a + b * mode(x, y));
    };
  };
  auto dval = [mode](double a, double b) {
    return [mode, a, b](double x, double y, double t) {
      return -std::exp(-t) * (a + b * mode(x, y));
    };
  };
  auto lap = [mode, pi, lapfac](double b) {
    return [mode, pi, lapfac, b](double x, double y, double t) {
      return -lapfac * pi * pi * b * std::exp(-t) * mode(x, y);
    };
  };
  ManufacturedSolution ex;
  ex.mu = val(0.3, 0.4);
  ex.dmu_dt = dval(0.3, 0.4);
  ex.lap_mu = lap(0.4);
  ex.phi = val(0.0, 0.8);
  ex.dphi_dt = dval(0.0, 0.8);
  ex.lap_phi = lap(0.8);
  ex.sigma = val(0.5, 0.2);
  ex.dsigma_dt = dval(0.5, 0.2);
  ex.lap_sigma = lap(0.2);
  return ex;
}

Forcing manufactured_forcing(const ManufacturedSolution& ex,
                             const ModelParams& p) {
  const ManufacturedSolution e = ex;
  const ModelParams pp = p;
  Forcing f;
  f.f1 = [e, pp](double x, double y, double t) {
    const double mu = e.mu(x, y, t);
    const double phi = e.phi(x, y, t);
    const double sg = e.sigma(x, y, t);
    const double R = eval_p(pp.proliferation, phi) * (sg - pp.gamma * mu);
    return pp.alpha * e.dmu_dt(x, y, t) + e.dphi_dt(x, y, t) -
           e.lap_mu(x, y, t) - R;
  };
  f.f2 = [e, pp](double x, double y, double t) {
    const double phi = e.phi(x, y, t);
    return pp.beta * e.dphi_dt(x, y, t) - e.lap_phi(x, y, t) +
           eval_B(pp.potential, phi) + eval_pi(pp.potential, phi) -
           e.mu(x, y, t);
  };
  f.f3 = [e, pp](double x, double y, double t) {
    const double mu = e.mu(x, y, t);
    const double phi = e.phi(x, y, t);
    const double sg = e.sigma(x, y, t);
    const double R = eval_p(pp.proliferation, phi) * (sg - pp.gamma * mu);
    return e.dsigma_dt(x, y, t) - e.lap_sigma(x, y, t) + R;
  };
  return f;
}

ManufacturedErrors manufactured_errors(const ManufacturedSolution& ex,
                                       const ModelParams& p, const Grid& grid,
                                       const SolverConfig& cfg) {
  Field mu0 = Field::from_function(
      grid, [&](double x, double y) { return ex.mu(x, y, 0.0); });
  Field phi0 = Field::from_function(
      grid, [&](double x, double y) { return ex.phi(x, y, 0.0); });
  Field sg0 = Field::from_function(
      grid, [&](double x, double y) { return ex.sigma(x, y, 0.0); });
  State init =
      make_state(p.potential, std::move(mu0), std::move(phi0), std::move(sg0));
  const Forcing f = manufactured_forcing(ex, p);
  const Trajectory traj = solve(init, p, cfg, &f);
  const State& fin = traj.states.back();
  const double tf = fin.t;
  auto err = [&](const Field& numf,
                 const std::function<double(double, double, double)>& g) {
    Field d = numf;
    d -= Field::from_function(grid,
                              [&](double x, double y) { return g(x, y, tf); });
    return norm_H(d);
  };
  ManufacturedErrors out;
  out.mu = err(fin.mu, ex.mu);
  out.phi = err(fin.phi, ex.phi);
  out.sigma = err(fin.sigma, ex.sigma);
  out.combined = out.mu + out.phi + out.sigma;
  return out;
}

OrderReport manufactured_order_study(const ManufacturedSolution& ex,
                                     const ModelParams& p, const Grid& base,
                                     const SolverConfig& cfg, Refinement which,
                                     int levels) {
  if (levels < 2)
    throw std::invalid_argument("order study needs at least 2 levels");
  OrderReport rep;
  rep.which = which;
  for (int l = 0; l < levels; ++l) {
    Grid g = base;
    SolverConfig c = cfg;
    if (which == Refinement::Spatial)
      g = Grid(base.dim, base.n << l, base.extent);
    else
      c.dt = cfg.dt / static_cast<double>(1 << l);
    rep.levels.push_back(manufactured_errors(ex, p, g, c));
  }
  for (int l = 0; l + 1 < levels; ++l)
    rep.ratios.push_back(rep.levels[static_cast<std::size_t>(l)].combined /
                         rep.levels[static_cast<std::size_t>(l) + 1].combined);
  return rep;
}

}  // namespace chtumor
