#include "chtumor/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "chtumor/kernels.hpp"
#include "chtumor/operators.hpp"
#include "chtumor/solver.hpp"
#include "chtumor/studies.hpp"

namespace chtumor {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Sink {
  fs::path dir;
  std::vector<std::string>* artifacts;

  void write(const std::string& name, const std::string& text) const {
    const fs::path p = dir / name;
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + p.string() + "'");
    f << text;
    f.flush();
    if (!f) throw std::runtime_error("write failed for '" + p.string() + "'");
    artifacts->push_back(p.string());
  }
};

json residual_json(const ResidualNorms& r) {
  return json{{"r1", r.r1}, {"r2", r.r2}, {"r3", r.r3}};
}

std::string run_simulate(const RunConfig& cfg, const Sink& sink,
                         bool want_json, bool want_csv) {
  const ModelParams model = make_model(cfg);
  const SolverConfig solver = make_solver(cfg);
  const State init = make_initial(cfg);
  const Trajectory traj = solve(init, model, solver);
  const EnergyReport er = energy_check(traj, model);

  std::vector<double> cons;
  cons.reserve(traj.states.size());
  for (const State& s : traj.states) cons.push_back(conserved_quantity(s, model));
  double drift = 0.0;
  for (double c : cons) drift = std::max(drift, std::fabs(c - cons.front()));

  const State& last = traj.states.back();
  json j;
  j["command"] = "simulate";
  j["backend"] = kernels::backend_name();
  j["steps"] = traj.states.size() - 1;
  j["dt"] = traj.dt;
  j["final_time"] = last.t;
  j["newton_iters"] = traj.diag.total_newton_iters;
  j["dt_halvings"] = traj.diag.dt_halvings;
  j["quadratic_tail_C"] = traj.diag.quadratic_tail_C;
  j["conserved_initial"] = cons.front();
  j["conserved_final"] = cons.back();
  j["conservation_drift"] = drift;
  j["energy_initial"] = er.energy.front();
  j["energy_final"] = er.energy.back();
  j["energy_max_increment"] = er.max_increment;
  j["estimate_aggregate"] = er.aggregate;
  j["estimate_data_term"] = er.data_term;
  j["estimate_ratio"] = er.ratio;
  j["final_norms"] = json{{"mu_H", norm_H(last.mu)},
                          {"phi_V", norm_V(last.phi)},
                          {"sigma_H", norm_H(last.sigma)}};
  if (want_json) sink.write("simulate.json", j.dump(2) + "\n");

  if (want_csv) {
    std::ostringstream traj_csv;
    traj_csv << "t,conserved,energy,mu_H,phi_H,sigma_H\n";
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
      const State& s = traj.states[k];
      traj_csv << fmt17(s.t) << ',' << fmt17(cons[k]) << ','
               << fmt17(er.energy[k]) << ',' << fmt17(norm_H(s.mu)) << ','
               << fmt17(norm_H(s.phi)) << ',' << fmt17(norm_H(s.sigma))
               << '\n';
    }
    sink.write("trajectory.csv", traj_csv.str());

    const Grid& g = last.mu.grid();
    std::ostringstream st_csv;
    st_csv << (g.dim == 2 ? "x,y,mu,phi,sigma,xi\n" : "x,mu,phi,sigma,xi\n");
    for (std::size_t i = 0; i < g.cells(); ++i) {
      const int ix = g.dim == 2 ? int(i % std::size_t(g.n)) : int(i);
      st_csv << fmt17(g.coord(ix));
      if (g.dim == 2)
        st_csv << ',' << fmt17(g.coord(int(i / std::size_t(g.n))));
      st_csv << ',' << fmt17(last.mu[i]) << ',' << fmt17(last.phi[i]) << ','
             << fmt17(last.sigma[i]) << ',' << fmt17(last.xi[i]) << '\n';
    }
    sink.write("final_state.csv", st_csv.str());
  }

  json status;
  status["command"] = "simulate";
  status["ok"] = true;
  status["final_time"] = last.t;
  status["conservation_drift"] = drift;
  status["energy_max_increment"] = er.max_increment;
  status["estimate_ratio"] = er.ratio;
  return status.dump();
}

std::string run_sweep(const RunConfig& cfg, const Sink& sink, bool want_json,
                      bool want_csv) {
  const bool is_beta = cfg.command == "sweep-beta";
  const SweepConfig sc = make_sweep(cfg);
  const StudyResult r = is_beta ? sweep_beta(sc) : sweep_alpha(sc);
  const std::string stem = is_beta ? "sweep_beta" : "sweep_alpha";

  static const char* const kBetaParts[5] = {
      "dmu_L2H", "dphi_L2V", "dsigma_LinfH", "dsigma_L2V", "dcombo_LinfVstar"};
  static const char* const kAlphaParts[5] = {
      "dmu_L2V", "dphi_LinfH", "dphi_L2V", "dsigma_LinfH", "dsigma_L2V"};
  const char* const* part_names = is_beta ? kBetaParts : kAlphaParts;

  json j;
  j["command"] = cfg.command;
  j["backend"] = kernels::backend_name();
  j["swept"] = r.swept;
  j["fixed"] = sc.fixed;
  j["reference_value"] = r.reference_value;
  j["rate"] = r.rate;
  j["intercept"] = r.intercept;
  j["r2"] = r.r2;
  if (std::isfinite(r.ref_shift_max)) j["ref_shift_max"] = r.ref_shift_max;
  json pts = json::array();
  for (const SweepPoint& p : r.points) {
    json e;
    e["value"] = p.value;
    e["error"] = p.error;
    json parts;
    for (int k = 0; k < 5; ++k) parts[part_names[k]] = p.parts[k];
    e["parts"] = parts;
    pts.push_back(e);
  }
  j["points"] = pts;
  if (want_json) sink.write(stem + ".json", j.dump(2) + "\n");

  if (want_csv) {
    std::ostringstream csv;
    csv << "value,error";
    for (int k = 0; k < 5; ++k) csv << ',' << part_names[k];
    csv << '\n';
    for (const SweepPoint& p : r.points) {
      csv << fmt17(p.value) << ',' << fmt17(p.error);
      for (int k = 0; k < 5; ++k) csv << ',' << fmt17(p.parts[k]);
      csv << '\n';
    }
    sink.write(stem + ".csv", csv.str());
  }

  std::ostringstream dat;
  for (const SweepPoint& p : r.points)
    dat << fmt17(p.value) << ' ' << fmt17(p.error) << '\n';
  sink.write(stem + "_loglog.dat", dat.str());

  json status;
  status["command"] = cfg.command;
  status["ok"] = true;
  status["rate"] = r.rate;
  status["r2"] = r.r2;
  return status.dump();
}

std::string run_nonuniq(const RunConfig& cfg, const Sink& sink, bool want_json,
                        bool want_csv) {
  const NonuniqConfig nc = make_nonuniq(cfg);
  const NonuniqResult r = nonuniqueness_demo(nc);

  json j;
  j["command"] = "nonuniq";
  j["alpha"] = r.alpha;
  j["L"] = nc.L;
  j["steps"] = r.steps;
  j["residual_max_a"] = residual_json(r.max_a);
  j["residual_max_b"] = residual_json(r.max_b);
  j["separation"] = r.separation;
  if (want_json) sink.write("nonuniq.json", j.dump(2) + "\n");

  if (want_csv) {
    std::ostringstream csv;
    csv << "alpha,L,steps,a_r1,a_r2,a_r3,b_r1,b_r2,b_r3,separation\n";
    csv << fmt17(r.alpha) << ',' << fmt17(nc.L) << ',' << r.steps << ','
        << fmt17(r.max_a.r1) << ',' << fmt17(r.max_a.r2) << ','
        << fmt17(r.max_a.r3) << ',' << fmt17(r.max_b.r1) << ','
        << fmt17(r.max_b.r2) << ',' << fmt17(r.max_b.r3) << ','
        << fmt17(r.separation) << '\n';
    sink.write("nonuniq.csv", csv.str());
  }

  json status;
  status["command"] = "nonuniq";
  status["ok"] = true;
  status["separation"] = r.separation;
  const double worst =
      std::max({r.max_a.r1, r.max_a.r2, r.max_a.r3, r.max_b.r1, r.max_b.r2,
                r.max_b.r3});
  status["max_residual"] = worst;
  return status.dump();
}

std::string run_manufactured(const RunConfig& cfg, const Sink& sink,
                             bool want_json, bool want_csv) {
  const ManufacturedSolution ex = default_manufactured(cfg.dim);
  ModelParams model = make_model(cfg);
  model.T = cfg.mf_T;
  SolverConfig solver = make_solver(cfg);
  solver.dt = cfg.mf_dt;
  const Grid base(cfg.dim, cfg.mf_n, cfg.extent);
  const Refinement which = cfg.refine == "temporal" ? Refinement::Temporal
                                                    : Refinement::Spatial;
  const OrderReport rep =
      manufactured_order_study(ex, model, base, solver, which, cfg.mf_levels);

  json j;
  j["command"] = "manufactured";
  j["backend"] = kernels::backend_name();
  j["refine"] = cfg.refine;
  j["T"] = cfg.mf_T;
  json lv = json::array();
  for (int l = 0; l < int(rep.levels.size()); ++l) {
    const ManufacturedErrors& e = rep.levels[l];
    json row;
    row["n"] = which == Refinement::Spatial ? cfg.mf_n << l : cfg.mf_n;
    row["dt"] = which == Refinement::Temporal
                    ? cfg.mf_dt / double(1 << l)
                    : cfg.mf_dt;
    row["err_mu"] = e.mu;
    row["err_phi"] = e.phi;
    row["err_sigma"] = e.sigma;
    row["err_combined"] = e.combined;
    lv.push_back(row);
  }
  j["levels"] = lv;
  j["ratios"] = rep.ratios;
  if (want_json) sink.write("manufactured.json", j.dump(2) + "\n");

  if (want_csv) {
    std::ostringstream csv;
    csv << "level,n,dt,err_mu,err_phi,err_sigma,err_combined,ratio_to_next\n";
    for (int l = 0; l < int(rep.levels.size()); ++l) {
      const ManufacturedErrors& e = rep.levels[l];
      const int n = which == Refinement::Spatial ? cfg.mf_n << l : cfg.mf_n;
      const double dt = which == Refinement::Temporal
                            ? cfg.mf_dt / double(1 << l)
                            : cfg.mf_dt;
      csv << l << ',' << n << ',' << fmt17(dt) << ',' << fmt17(e.mu) << ','
          << fmt17(e.phi) << ',' << fmt17(e.sigma) << ','
          << fmt17(e.combined) << ',';
      if (l < int(rep.ratios.size())) csv << fmt17(rep.ratios[l]);
      csv << '\n';
    }
    sink.write("manufactured.csv", csv.str());
  }

  json status;
  status["command"] = "manufactured";
  status["ok"] = true;
  status["ratios"] = rep.ratios;
  return status.dump();
}

}  // namespace

RunOutcome run_command(const RunConfig& cfg, const std::string& out_dir) {
  RunOutcome out;
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  const Sink sink{dir, &out.artifacts};
  sink.write("effective_config.ini", emit_config(cfg));

  const bool want_json = cfg.format == "json" || cfg.format == "both";
  const bool want_csv = cfg.format == "csv" || cfg.format == "both";

  if (cfg.command == "simulate")
    out.status_json = run_simulate(cfg, sink, want_json, want_csv);
  else if (cfg.command == "sweep-beta" || cfg.command == "sweep-alpha")
    out.status_json = run_sweep(cfg, sink, want_json, want_csv);
  else if (cfg.command == "nonuniq")
    out.status_json = run_nonuniq(cfg, sink, want_json, want_csv);
  else if (cfg.command == "manufactured")
    out.status_json = run_manufactured(cfg, sink, want_json, want_csv);
  else
    throw std::invalid_argument("unknown command '" + cfg.command + "'");
  return out;
}

}  // namespace chtumor
