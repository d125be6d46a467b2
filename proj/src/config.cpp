#include "chtumor/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace chtumor {
namespace {

const char* const kCommands[] = {"simulate", "sweep-beta", "sweep-alpha",
                                 "nonuniq", "manufactured"};

bool known_command(const std::string& c) {
  for (const char* k : kCommands)
    if (c == k) return true;
  return false;
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& s : parts) {
    if (!out.empty()) out += "; ";
    out += s;
  }
  return out;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

bool parse_double(const std::string& v, double& out) {
  const char* s = v.c_str();
  char* end = nullptr;
  errno = 0;
  const double d = std::strtod(s, &end);
  if (end == s || *end != '\0' || errno == ERANGE) return false;
  out = d;
  return true;
}

bool parse_int(const std::string& v, int& out) {
  const char* s = v.c_str();
  char* end = nullptr;
  errno = 0;
  const long l = std::strtol(s, &end, 10);
  if (end == s || *end != '\0' || errno == ERANGE) return false;
  if (l < -2147483647L || l > 2147483647L) return false;
  out = static_cast<int>(l);
  return true;
}

bool parse_bool(const std::string& v, bool& out) {
  if (v == "true" || v == "1") {
    out = true;
    return true;
  }
  if (v == "false" || v == "0") {
    out = false;
    return true;
  }
  return false;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Applier {
  RunConfig& cfg;
  std::vector<std::string>& bad;

  void complain(const std::string& sec, const std::string& key,
                const std::string& msg) {
    bad.push_back(sec + "." + key + " " + msg);
  }

  void set_d(const std::string& sec, const std::string& key,
             const std::string& v, double& dst,
             const std::function<bool(double)>& ok, const std::string& cond) {
    double d;
    if (!parse_double(v, d)) {
      complain(sec, key, "is not a number (got '" + v + "')");
      return;
    }
    if (ok && !ok(d)) {
      complain(sec, key, cond + " (got " + v + ")");
      return;
    }
    dst = d;
  }

  void set_i(const std::string& sec, const std::string& key,
             const std::string& v, int& dst,
             const std::function<bool(int)>& ok, const std::string& cond) {
    int i;
    if (!parse_int(v, i)) {
      complain(sec, key, "is not an integer (got '" + v + "')");
      return;
    }
    if (ok && !ok(i)) {
      complain(sec, key, cond + " (got " + v + ")");
      return;
    }
    dst = i;
  }

  void set_b(const std::string& sec, const std::string& key,
             const std::string& v, bool& dst) {
    bool b;
    if (!parse_bool(v, b)) {
      complain(sec, key, "must be true or false (got '" + v + "')");
      return;
    }
    dst = b;
  }

  void set_enum(const std::string& sec, const std::string& key,
                const std::string& v, std::string& dst,
                std::initializer_list<const char*> allowed) {
    for (const char* a : allowed)
      if (v == a) {
        dst = v;
        return;
      }
    std::string list;
    for (const char* a : allowed) {
      if (!list.empty()) list += ", ";
      list += a;
    }
    complain(sec, key, "must be one of {" + list + "} (got '" + v + "')");
  }

  void set_values(const std::string& sec, const std::string& key,
                  const std::string& v) {
    std::vector<double> vals;
    std::stringstream ss(v);
    std::string item;
    bool ok = true;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      double d;
      if (item.empty() || !parse_double(item, d)) {
        complain(sec, key, "has a malformed entry '" + item + "'");
        ok = false;
        break;
      }
      if (!(d > 0.0 && d < 1.0)) {
        complain(sec, key, "entries must lie in (0, 1) (got " + item + ")");
        ok = false;
        break;
      }
      vals.push_back(d);
    }
    if (ok && vals.empty()) {
      complain(sec, key, "must list at least one value");
      ok = false;
    }
    if (ok) cfg.sweep_values = std::move(vals);
  }

  void apply(const std::string& sec, const std::string& key,
             const std::string& v) {
    auto pos = [](double x) { return x > 0.0; };
    auto nonneg = [](double x) { return x >= 0.0; };
    auto unit_co = [](double x) { return x >= 0.0 && x < 1.0; };
    auto unit_open = [](double x) { return x > 0.0 && x < 1.0; };
    if (sec == "run") {
      if (key == "command") {
        if (known_command(v))
          cfg.command = v;
        else
          complain(sec, key,
                   "must be one of {simulate, sweep-beta, sweep-alpha, "
                   "nonuniq, manufactured} (got '" +
                       v + "')");
      } else {
        complain(sec, key, "is not a recognized key");
      }
    } else if (sec == "model") {
      if (key == "alpha")
        set_d(sec, key, v, cfg.alpha, unit_co, "must lie in [0, 1)");
      else if (key == "beta")
        set_d(sec, key, v, cfg.beta, unit_co, "must lie in [0, 1)");
      else if (key == "gamma")
        set_d(sec, key, v, cfg.gamma, pos, "must be positive");
      else if (key == "T")
        set_d(sec, key, v, cfg.T, nonneg, "must be nonnegative");
      else if (key == "potential")
        set_enum(sec, key, v, cfg.potential,
                 {"double_well", "logarithmic", "indicator", "nonuniq"});
      else if (key == "kappa")
        set_d(sec, key, v, cfg.kappa, pos, "must be positive");
      else if (key == "epsilon")
        set_d(sec, key, v, cfg.epsilon, pos, "must be positive");
      else if (key == "L")
        set_d(sec, key, v, cfg.L, pos, "must be positive");
      else if (key == "proliferation")
        set_enum(sec, key, v, cfg.proliferation,
                 {"constant", "clipped_sqrt_f", "smooth_bump"});
      else if (key == "p_value")
        set_d(sec, key, v, cfg.p_value, nonneg, "must be nonnegative");
      else if (key == "p_scale")
        set_d(sec, key, v, cfg.p_scale, nonneg, "must be nonnegative");
      else if (key == "p_center")
        set_d(sec, key, v, cfg.p_center, nullptr, "");
      else if (key == "p_width")
        set_d(sec, key, v, cfg.p_width, pos, "must be positive");
      else if (key == "p_height")
        set_d(sec, key, v, cfg.p_height, nonneg, "must be nonnegative");
      else
        complain(sec, key, "is not a recognized key");
    } else if (sec == "grid") {
      if (key == "dim")
        set_i(sec, key, v, cfg.dim, [](int i) { return i == 1 || i == 2; },
              "must be 1 or 2");
      else if (key == "n")
        set_i(sec, key, v, cfg.n,
              [](int i) { return i >= 4 && i <= 16384; },
              "must lie in [4, 16384]");
      else if (key == "extent")
        set_d(sec, key, v, cfg.extent, pos, "must be positive");
      else
        complain(sec, key, "is not a recognized key");
    } else if (sec == "solver") {
      if (key == "dt")
        set_d(sec, key, v, cfg.dt, pos, "must be positive");
      else if (key == "newton_tol")
        set_d(sec, key, v, cfg.newton_tol, pos, "must be positive");
      else if (key == "newton_max")
        set_i(sec, key, v, cfg.newton_max, [](int i) { return i >= 1; },
              "must be at least 1");
      else if (key == "damping")
        set_d(sec, key, v, cfg.damping, unit_open, "must lie in (0, 1)");
      else if (key == "max_halvings")
        set_i(sec, key, v, cfg.max_halvings, [](int i) { return i >= 0; },
              "must be nonnegative");
      else if (key == "lin_tol")
        set_d(sec, key, v, cfg.lin_tol, pos, "must be positive");
      else
        complain(sec, key, "is not a recognized key");
    } else if (sec == "initial") {
      if (key == "preset")
        set_enum(sec, key, v, cfg.preset, {"default", "zero"});
      else if (key == "amplitude")
        set_d(sec, key, v, cfg.amplitude, pos, "must be positive");
      else
        complain(sec, key, "is not a recognized key");
    } else if (sec == "sweep") {
      if (key == "fixed")
        set_d(sec, key, v, cfg.sweep_fixed, unit_open, "must lie in (0, 1)");
      else if (key == "values")
        set_values(sec, key, v);
      else if (key == "check_reference")
        set_b(sec, key, v, cfg.check_reference);
      else
        complain(sec, key, "is not a recognized key");
    } else if (sec == "nonuniq") {
      if (key == "L")
        set_d(sec, key, v, cfg.nu_L, pos, "must be positive");
      else if (key == "alpha")
        set_d(sec, key, v, cfg.nu_alpha, unit_open, "must lie in (0, 1)");
      else if (key == "psi_a")
        set_d(sec, key, v, cfg.psi_a,
              [](double x) { return std::fabs(x) <= 1.0; },
              "must lie in [-1, 1]");
      else if (key == "psi_b")
        set_d(sec, key, v, cfg.psi_b,
              [](double x) { return std::fabs(x) <= 1.0; },
              "must lie in [-1, 1]");
      else
        complain(sec, key, "is not a recognized key");
    } else if (sec == "manufactured") {
      if (key == "refine")
        set_enum(sec, key, v, cfg.refine, {"spatial", "temporal"});
      else if (key == "levels")
        set_i(sec, key, v, cfg.mf_levels, [](int i) { return i >= 2; },
              "must be at least 2");
      else if (key == "n")
        set_i(sec, key, v, cfg.mf_n,
              [](int i) { return i >= 4 && i <= 16384; },
              "must lie in [4, 16384]");
      else if (key == "dt")
        set_d(sec, key, v, cfg.mf_dt, pos, "must be positive");
      else if (key == "T")
        set_d(sec, key, v, cfg.mf_T, pos, "must be positive");
      else
        complain(sec, key, "is not a recognized key");
    } else if (sec == "output") {
      if (key == "format")
        set_enum(sec, key, v, cfg.format, {"json", "csv", "both"});
      else if (key == "jobs")
        set_i(sec, key, v, cfg.jobs, [](int i) { return i >= 1; },
              "must be at least 1");
      else
        complain(sec, key, "is not a recognized key");
    } else {
      complain(sec, key, "is not a recognized key");
    }
  }
};

}  // namespace

RunConfig parse_config_text(const std::string& text,
                            const std::string& origin) {
  RunConfig cfg;
  std::vector<std::string> bad;
  Applier ap{cfg, bad};
  std::string section;
  bool section_known = true;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::size_t cut = line.find_first_of("#;");
    if (cut != std::string::npos) line.erase(cut);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        bad.push_back("line " + std::to_string(lineno) +
                      ": unterminated section header");
        continue;
      }
      section = trim(line.substr(1, line.size() - 2));
      static const char* const kSections[] = {
          "run",     "model",        "grid",   "solver", "initial",
          "sweep",   "nonuniq",      "manufactured",     "output"};
      section_known = false;
      for (const char* s : kSections)
        if (section == s) section_known = true;
      if (!section_known)
        bad.push_back("unknown section [" + section + "]");
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      bad.push_back("line " + std::to_string(lineno) +
                    ": expected 'key = value'");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      bad.push_back("line " + std::to_string(lineno) + ": missing key");
      continue;
    }
    if (value.empty()) {
      bad.push_back("line " + std::to_string(lineno) +
                    ": missing value for '" + key + "'");
      continue;
    }
    if (section.empty()) {
      bad.push_back("line " + std::to_string(lineno) + ": key '" + key +
                    "' appears before any section header");
      continue;
    }
    if (!section_known) continue;  // already reported the section
    ap.apply(section, key, value);
  }
  if (!bad.empty())
    throw std::invalid_argument(origin + ": " + join(bad));
  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream f(path);
  if (!f)
    throw std::invalid_argument("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str(), path);
}

void finalize_config(RunConfig& cfg, const std::string& cli_command) {
  std::vector<std::string> bad;
  if (!cli_command.empty()) {
    if (!known_command(cli_command))
      bad.push_back("unknown command '" + cli_command + "'");
    else if (!cfg.command.empty() && cfg.command != cli_command)
      bad.push_back("config sets command '" + cfg.command + "' but '" +
                    cli_command + "' was invoked");
    else
      cfg.command = cli_command;
  }
  if (cfg.command.empty())
    bad.push_back(
        "no command given: pass a subcommand or set [run] command");

  if (std::isnan(cfg.sweep_fixed))
    cfg.sweep_fixed = cfg.command == "sweep-alpha" ? 0.5 : 0.05;
  if (std::isnan(cfg.nu_alpha) && cfg.nu_L > 0.0)
    cfg.nu_alpha = 1.0 / cfg.nu_L;
  const bool temporal = cfg.refine == "temporal";
  if (cfg.mf_n == 0) cfg.mf_n = temporal ? 512 : 32;
  if (std::isnan(cfg.mf_dt)) cfg.mf_dt = temporal ? 5e-2 : 1e-5;
  if (std::isnan(cfg.mf_T)) cfg.mf_T = temporal ? 0.2 : 0.01;

  if (cfg.command == "sweep-alpha") {
    if (cfg.proliferation != "constant")
      bad.push_back(
          "sweep-alpha requires that p is a nonnegative constant; got "
          "proliferation '" +
          cfg.proliferation + "'");
    if (cfg.potential != "double_well")
      bad.push_back(
          "sweep-alpha requires the double-well potential "
          "(quadratic-growth hypothesis); got '" +
          cfg.potential + "'");
  }
  if (cfg.command == "sweep-beta" || cfg.command == "sweep-alpha") {
    if (cfg.sweep_values.size() < 3)
      bad.push_back("sweep.values needs at least 3 entries for the rate fit");
    for (std::size_t i = 1; i < cfg.sweep_values.size(); ++i)
      if (!(cfg.sweep_values[i] < cfg.sweep_values[i - 1])) {
        bad.push_back("sweep.values must be strictly decreasing");
        break;
      }
  }
  if (cfg.command == "manufactured" && cfg.extent != 1.0)
    bad.push_back("manufactured profiles require grid.extent = 1");
  if (cfg.command == "nonuniq" &&
      !(std::fabs(cfg.nu_alpha * cfg.nu_L - 1.0) <= 1e-12))
    bad.push_back(
        "nonuniq requires alpha * L = 1 (distinct solutions exist exactly "
        "on that line)");

  try {
    make_model(cfg).validate();
  } catch (const std::exception& e) {
    bad.push_back(e.what());
  }
  try {
    make_solver(cfg).validate();
  } catch (const std::exception& e) {
    bad.push_back(e.what());
  }
  try {
    make_grid(cfg);
  } catch (const std::exception& e) {
    bad.push_back(e.what());
  }
  if (!bad.empty()) throw std::invalid_argument(join(bad));
}

std::string emit_config(const RunConfig& cfg) {
  std::ostringstream os;
  os << "[run]\n";
  os << "command = " << cfg.command << "\n";
  os << "\n[model]\n";
  os << "alpha = " << fmt17(cfg.alpha) << "\n";
  os << "beta = " << fmt17(cfg.beta) << "\n";
  os << "gamma = " << fmt17(cfg.gamma) << "\n";
  os << "T = " << fmt17(cfg.T) << "\n";
  os << "potential = " << cfg.potential << "\n";
  os << "kappa = " << fmt17(cfg.kappa) << "\n";
  os << "epsilon = " << fmt17(cfg.epsilon) << "\n";
  os << "L = " << fmt17(cfg.L) << "\n";
  os << "proliferation = " << cfg.proliferation << "\n";
  os << "p_value = " << fmt17(cfg.p_value) << "\n";
  os << "p_scale = " << fmt17(cfg.p_scale) << "\n";
  os << "p_center = " << fmt17(cfg.p_center) << "\n";
  os << "p_width = " << fmt17(cfg.p_width) << "\n";
  os << "p_height = " << fmt17(cfg.p_height) << "\n";
  os << "\n[grid]\n";
  os << "dim = " << cfg.dim << "\n";
  os << "n = " << cfg.n << "\n";
  os << "extent = " << fmt17(cfg.extent) << "\n";
  os << "\n[solver]\n";
  os << "dt = " << fmt17(cfg.dt) << "\n";
  os << "newton_tol = " << fmt17(cfg.newton_tol) << "\n";
  os << "newton_max = " << cfg.newton_max << "\n";
  os << "damping = " << fmt17(cfg.damping) << "\n";
  os << "max_halvings = " << cfg.max_halvings << "\n";
  os << "lin_tol = " << fmt17(cfg.lin_tol) << "\n";
  os << "\n[initial]\n";
  os << "preset = " << cfg.preset << "\n";
  os << "amplitude = " << fmt17(cfg.amplitude) << "\n";
  os << "\n[sweep]\n";
  os << "fixed = " << fmt17(cfg.sweep_fixed) << "\n";
  os << "values = ";
  for (std::size_t i = 0; i < cfg.sweep_values.size(); ++i) {
    if (i) os << ",";
    os << fmt17(cfg.sweep_values[i]);
  }
  os << "\n";
  os << "check_reference = " << (cfg.check_reference ? "true" : "false")
     << "\n";
  os << "\n[nonuniq]\n";
  os << "L = " << fmt17(cfg.nu_L) << "\n";
  os << "alpha = " << fmt17(cfg.nu_alpha) << "\n";
  os << "psi_a = " << fmt17(cfg.psi_a) << "\n";
  os << "psi_b = " << fmt17(cfg.psi_b) << "\n";
  os << "\n[manufactured]\n";
  os << "refine = " << cfg.refine << "\n";
  os << "levels = " << cfg.mf_levels << "\n";
  os << "n = " << cfg.mf_n << "\n";
  os << "dt = " << fmt17(cfg.mf_dt) << "\n";
  os << "T = " << fmt17(cfg.mf_T) << "\n";
  os << "\n[output]\n";
  os << "format = " << cfg.format << "\n";
  os << "jobs = " << cfg.jobs << "\n";
  return os.str();
}

PotentialSpec make_potential(const RunConfig& cfg) {
  if (cfg.potential == "double_well") return PotentialSpec::double_well();
  if (cfg.potential == "logarithmic")
    return PotentialSpec::logarithmic(cfg.kappa);
  if (cfg.potential == "indicator")
    return PotentialSpec::regularized_indicator(cfg.epsilon);
  if (cfg.potential == "nonuniq")
    return PotentialSpec::nonuniqueness(cfg.L, cfg.epsilon);
  throw std::invalid_argument("unknown potential '" + cfg.potential + "'");
}

ProliferationSpec make_proliferation(const RunConfig& cfg) {
  if (cfg.proliferation == "constant")
    return ProliferationSpec::constant(cfg.p_value);
  if (cfg.proliferation == "clipped_sqrt_f")
    return ProliferationSpec::clipped_sqrt_f(cfg.p_scale);
  if (cfg.proliferation == "smooth_bump")
    return ProliferationSpec::smooth_bump(cfg.p_center, cfg.p_width,
                                          cfg.p_height);
  throw std::invalid_argument("unknown proliferation '" + cfg.proliferation +
                              "'");
}

ModelParams make_model(const RunConfig& cfg) {
  ModelParams p;
  p.alpha = cfg.alpha;
  p.beta = cfg.beta;
  p.gamma = cfg.gamma;
  p.T = cfg.T;
  p.potential = make_potential(cfg);
  p.proliferation = make_proliferation(cfg);
  return p;
}

Grid make_grid(const RunConfig& cfg) {
  return Grid(cfg.dim, cfg.n, cfg.extent);
}

SolverConfig make_solver(const RunConfig& cfg) {
  SolverConfig s;
  s.dt = cfg.dt;
  s.newton_tol = cfg.newton_tol;
  s.newton_max = cfg.newton_max;
  s.damping = cfg.damping;
  s.max_halvings = cfg.max_halvings;
  s.lin_tol = cfg.lin_tol;
  return s;
}

State make_initial(const RunConfig& cfg) {
  const Grid g = make_grid(cfg);
  const PotentialSpec pot = make_potential(cfg);
  if (cfg.preset == "zero") return zero_initial_state(g, pot);
  return default_initial_state(g, pot, cfg.amplitude);
}

SweepConfig make_sweep(const RunConfig& cfg) {
  SweepConfig s;
  s.fixed = cfg.sweep_fixed;
  s.values = cfg.sweep_values;
  s.grid = make_grid(cfg);
  s.dt = cfg.dt;
  s.T = cfg.T;
  s.gamma = cfg.gamma;
  s.potential = make_potential(cfg);
  s.proliferation = make_proliferation(cfg);
  s.amplitude = cfg.amplitude;
  s.jobs = cfg.jobs;
  s.check_reference = cfg.check_reference;
  s.solver = make_solver(cfg);
  s.solver.dt = cfg.dt;
  return s;
}

NonuniqConfig make_nonuniq(const RunConfig& cfg) {
  NonuniqConfig c;
  c.L = cfg.nu_L;
  c.alpha = cfg.nu_alpha;
  c.epsilon = cfg.epsilon;
  c.grid = make_grid(cfg);
  c.dt = cfg.dt;
  c.T = cfg.T;
  const double a = cfg.psi_a, b = cfg.psi_b;
  c.psi_a = [a](double) { return a; };
  c.psi_b = [b](double) { return b; };
  return c;
}

}  // namespace chtumor
