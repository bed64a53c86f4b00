#pragma once
// Command-line front end. Kept in a header so the unit tests can drive `run` in-process.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "construct1d.hpp"
#include "construct2d.hpp"
#include "minimize.hpp"
#include "parallel.hpp"
#include "scaling.hpp"

namespace blisterlab::cli {

inline constexpr const char* kVersion = "blisterlab 0.1.0";

enum Exit { ok = 0, invalid = 1, numerical = 2 };

struct RunConfig {
  std::string command;
  Params params{1e-5, 0.01, 1e-7, 1.0, 0.25};  // a point inside the lattice regime
  std::string family;
  std::string vary = "h";
  double from = 0.0, to = 0.0;
  int points = 8;
  std::string grid;  // "AxB" for phase, an integer elsewhere
  unsigned long seed = 0;
  int workers = 1;
  std::string out;
  std::string config;
  int cells = 0;             // explicit cell / blister count (0: optimal)
  int max_count = 16;        // minimizer blister counts
  double tolerance = 0.0;    // exponent tolerance override (0: family default)
  double lattice_scale = 1.0;
  double k6 = 0.0;           // 0: calibrate
  double alpha_s_lo = 1e-8, alpha_s_hi = 1e-4, eta_lo = 1e-12, eta_hi = 1.0;
};

inline nlohmann::ordered_json params_json(const Params& p) {
  return {{"h", p.h}, {"eta", p.eta}, {"alpha_s", p.alpha_s}, {"alpha_m", p.alpha_m}, {"theta", p.theta}};
}

inline nlohmann::ordered_json config_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["command"] = c.command;
  j["params"] = params_json(c.params);
  j["family"] = c.family;
  j["vary"] = c.vary;
  j["from"] = c.from;
  j["to"] = c.to;
  j["points"] = c.points;
  j["grid"] = c.grid;
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  j["cells"] = c.cells;
  j["max_count"] = c.max_count;
  j["tolerance"] = c.tolerance;
  j["lattice_scale"] = c.lattice_scale;
  j["k6"] = c.k6;
  j["alpha_s_range"] = {c.alpha_s_lo, c.alpha_s_hi};
  j["eta_range"] = {c.eta_lo, c.eta_hi};
  return j;
}

inline nlohmann::ordered_json energy_json(const EnergyBreakdown& e) {
  return {{"membrane", e.membrane}, {"bending", e.bending}, {"substrate", e.substrate}, {"total", e.total}};
}

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline int parse_int(const std::string& s, const char* what) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (...) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw ValidationError(std::string("invalid ") + what + ": " + s);
  return v;
}

inline std::pair<int, int> parse_grid_pair(const std::string& s) {
  const auto x = s.find('x');
  if (x == std::string::npos) {
    const int n = parse_int(s, "grid");
    return {n, n};
  }
  return {parse_int(s.substr(0, x), "grid"), parse_int(s.substr(x + 1), "grid")};
}

inline QuadSpec quad_of(const RunConfig& c) {
  QuadSpec q;
  if (!c.grid.empty()) q.grid2d = parse_int(c.grid, "grid");
  q.validate();
  return q;
}

inline int minimizer_grid(const RunConfig& c) { return c.grid.empty() ? 512 : parse_int(c.grid, "grid"); }

// Exponents the bound formulas assign to each (family, parameter).
inline std::optional<double> expected_exponent(Family f, const std::string& v) {
  static const std::map<std::pair<Family, std::string>, double> table = {
      {{Family::flat, "h"}, 1.0},           {{Family::flat, "eta"}, 2.0},
      {{Family::flat, "alpha_m"}, 1.0},     {{Family::periodic1d, "h"}, 1.0},
      {{Family::periodic1d, "eta"}, 5.0 / 3.0}, {{Family::periodic1d, "alpha_s"}, 2.0 / 3.0},
      {{Family::lattice2d, "h"}, 1.0},      {{Family::lattice2d, "eta"}, 27.0 / 16.0},
      {{Family::lattice2d, "alpha_s"}, 5.0 / 8.0}, {{Family::lattice2d, "alpha_m"}, 1.0 / 16.0},
  };
  std::string key = v == "alpha-s" ? "alpha_s" : v == "alpha-m" ? "alpha_m" : v;
  auto it = table.find({f, key});
  if (it == table.end()) return std::nullopt;
  return it->second;
}

inline SweepSpec sweep_spec(const RunConfig& c) {
  SweepSpec s;
  s.family = parse_family(c.family.empty() ? "periodic1d" : c.family);
  s.vary = c.vary;
  s.from = c.from;
  s.to = c.to;
  s.points = c.points;
  s.base = c.params;
  s.seed = c.seed;
  s.workers = c.workers;
  s.lattice_scale = c.lattice_scale;
  s.max_count = c.max_count;
  if (s.family == Family::minimized) s.grid = minimizer_grid(c);
  else if (s.family == Family::lattice2d) s.quad = quad_of(c);
  s.base.with(s.vary, s.base.get(s.vary));  // rejects unknown names
  return s;
}

inline std::string sweep_csv(const RunConfig& c, const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << "# " << kVersion << "\n# config " << config_json(c).dump() << "\n";
  os << "h,eta,alpha_s,alpha_m,theta,cell,membrane,bending,substrate,total,excluded,flags\n";
  for (const auto& r : rows) {
    const auto& p = r.params;
    os << num(p.h) << ',' << num(p.eta) << ',' << num(p.alpha_s) << ',' << num(p.alpha_m) << ',' << num(p.theta)
       << ',' << num(r.cell) << ',' << num(r.energy.membrane) << ',' << num(r.energy.bending) << ','
       << num(r.energy.substrate) << ',' << num(r.energy.total) << ',' << (r.excluded ? 1 : 0) << ',' << r.flags
       << '\n';
  }
  return os.str();
}

inline nlohmann::ordered_json with_header(const RunConfig& c, nlohmann::ordered_json body) {
  nlohmann::ordered_json j;
  j["version"] = kVersion;
  j["config"] = config_json(c);
  for (auto& [k, v] : body.items()) j[k] = v;
  return j;
}

inline Construction1D construction_1d(const RunConfig& c, std::vector<std::string>& flags) {
  const Params& p = c.params;
  const std::string fam = c.family.empty() ? "periodic" : c.family;
  if (fam == "flat") return flat_profile(p.theta);
  if (fam == "single" || fam == "single_blister") return single_blister(p);
  if (fam == "periodic" || fam == "periodic1d") {
    if (!bounds_1d(p).cond_1d) flags.push_back("cond_1d");
    const int n = c.cells > 0 ? c.cells : optimal_cell_count(p);
    return periodic_array(p, 1.0 / n);
  }
  throw ValidationError("unknown 1D family: " + fam);
}

// Calibrated lattice constant: best cell-size prefactor, then K6 from an h sweep over two
// decades at that prefactor.
inline std::pair<double, double> calibrate_lattice(const RunConfig& c) {
  Params ref(1e-5, 0.01, 1e-7, c.params.alpha_m, c.params.theta);
  auto scan = scan_lattice_scale(ref, {100, 300, 1000, 3000}, 24, {}, c.workers);
  SweepSpec s;
  s.family = Family::lattice2d;
  s.vary = "h";
  s.from = 8e-10;
  s.to = 1.2e-7;
  s.points = 4;
  s.base = ref;
  s.lattice_scale = scan.best_scale;
  s.workers = c.workers;
  auto cal = calibrate_constants({{"lattice2d", "h", sweep(s)}}, 2.0, scan.best_scale);
  return {cal.c2.K6, scan.best_scale};
}

inline Constants2D phase_constants(const RunConfig& c, nlohmann::ordered_json& info) {
  Constants2D k;
  if (c.k6 > 0.0) {
    k.K6 = c.k6;
    info["k6_source"] = "given";
  } else {
    auto [k6, scale] = calibrate_lattice(c);
    k.K6 = k6;
    info["k6_source"] = "calibrated";
    info["lattice_scale"] = scale;
  }
  info["K4"] = k.K4;
  info["K5"] = k.K5;
  info["K6"] = k.K6;
  return k;
}

class Runner {
 public:
  Runner(const RunConfig& c, std::ostream& out) : c_(c), out_(out) {}

  void emit(const std::string& text) {
    if (c_.out.empty()) {
      out_ << text;
      return;
    }
    const auto parent = std::filesystem::path(c_.out).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream f(c_.out, std::ios::binary);
    if (!f) throw ValidationError("cannot open output file: " + c_.out);
    f << text;
  }
  void emit_json(const nlohmann::ordered_json& body) { emit(with_header(c_, body).dump(2) + "\n"); }

  void eval_1d() {
    std::vector<std::string> flags;
    const std::string fam = c_.family.empty() ? "periodic" : c_.family;
    EnergyBreakdown e;
    if (fam == "periodic" || fam == "periodic1d") {
      if (!bounds_1d(c_.params).cond_1d) flags.push_back("cond_1d");
      e = periodic_array_energy(c_.params, c_.cells > 0 ? c_.cells : optimal_cell_count(c_.params));
    } else {
      auto con = construction_1d(c_, flags);
      e = energy_1d(con.profile, con.omega, c_.params, QuadSpec{});
    }
    auto j = energy_json(e);
    j["params"] = params_json(c_.params);
    j["flags"] = flags;
    emit_json(j);
  }

  void construct() {
    const std::string fam = c_.family.empty() ? "lattice2d" : c_.family;
    nlohmann::ordered_json j;
    std::vector<std::string> flags;
    if (fam == "lattice2d" || fam == "lattice") {
      const auto b = bounds_2d(c_.params);
      if (!b.cond_small_cell) flags.push_back("cond_small_cell");
      if (!b.cond_thin_ridge) flags.push_back("cond_thin_ridge");
      if (!b.cond_lattice_pays) flags.push_back("cond_lattice_pays");
      const double l = c_.cells > 0 ? 1.0 / c_.cells : lattice_cell(c_.params, c_.lattice_scale);
      auto con = assemble_lattice(c_.params, l);
      auto e = energy_2d(*con.field, con.omega, c_.params, quad_of(c_));
      const auto& d = con.field->diagnostics();
      j = energy_json(e);
      j["cell_length"] = l;
      j["l2"] = b.l2;
      j["geometry"] = {{"side", d.s_bonded},
                       {"side_unlifted", d.s_plain},
                       {"alpha", d.alpha},
                       {"lifted_area", d.lifted_area},
                       {"sigma_min", d.sigma_min},
                       {"sigma_max", d.sigma_max},
                       {"phi_min", d.phi_min},
                       {"phi_max", d.phi_max},
                       {"tau_min", d.tau_min},
                       {"folds", con.field->folds().size()}};
    } else if (fam == "step1") {
      const double l = c_.cells > 0 ? 1.0 / c_.cells : snap_cell_length(lattice_length(c_.params));
      auto con = cell_assembly(c_.params, l);
      j = energy_json(energy_2d(*con.field, con.omega, c_.params, quad_of(c_)));
      j["cell_length"] = l;
    } else {
      auto con = construction_1d(c_, flags);
      j = energy_json(energy_1d(con.profile, con.omega, c_.params, QuadSpec{}));
      nlohmann::ordered_json iv = nlohmann::ordered_json::array();
      for (const auto& i : con.omega.intervals()) iv.push_back({i.a, i.b});
      j["bonded_intervals"] = iv;
    }
    j["params"] = params_json(c_.params);
    j["flags"] = flags;
    emit_json(j);
  }

  void sweep_cmd() { emit(sweep_csv(c_, sweep(sweep_spec(c_)))); }

  void fit_cmd() {
    auto spec = sweep_spec(c_);
    auto rows = sweep(spec);
    auto f = fit_exponent(rows, spec.vary);
    nlohmann::ordered_json j;
    j["family"] = to_string(spec.family);
    j["variable"] = spec.vary;
    j["exponent"] = f.exponent;
    j["prefactor"] = f.prefactor;
    j["r2"] = f.r2;
    j["used"] = f.used;
    j["excluded"] = f.excluded;
    if (auto ex = expected_exponent(spec.family, spec.vary)) {
      const double tol = c_.tolerance > 0.0 ? c_.tolerance : (spec.family == Family::lattice2d ? 0.1 : 0.05);
      j["expected"] = *ex;
      j["tolerance"] = tol;
      j["within_tolerance"] = std::abs(f.exponent - *ex) <= tol;
    }
    nlohmann::ordered_json tab = nlohmann::ordered_json::array();
    for (const auto& r : rows)
      tab.push_back({{"value", r.params.get(spec.vary)}, {"total", r.energy.total}, {"excluded", r.excluded},
                     {"flags", r.flags}});
    j["rows"] = tab;
    emit_json(j);
  }

  void minimize_cmd() {
    const int n = minimizer_grid(c_);
    nlohmann::ordered_json j;
    MinimizeResult r;
    int count = c_.cells;
    if (count > 0) {
      const auto g = grid_equispaced(n, count, c_.params.theta);
      r = minimize_profile(c_.params, g.omega, g.n, c_.seed);
      j["realized_theta"] = g.theta;
    } else {
      auto b = best_over_blister_count(c_.params, n, c_.max_count, c_.seed, {}, c_.workers);
      r = b.best;
      count = b.best_count;
      j["totals_by_count"] = b.totals;
    }
    j["blister_count"] = count;
    j["energy"] = energy_json(r.energy);
    j["iterations"] = r.iterations;
    j["converged"] = r.converged;
    j["gradient_norm"] = r.gradient_norm;
    j["grid"] = r.n;
    j["optimal_cell_length_1d"] = l_star(c_.params);
    emit_json(j);
  }

  void classify_cmd() {
    nlohmann::ordered_json info;
    auto k = phase_constants(c_, info);
    auto pt = classify_point(c_.params, k);
    nlohmann::ordered_json j;
    j["alpha_s"] = pt.alpha_s;
    j["eta"] = pt.eta;
    j["winner"] = to_string(pt.winner);
    j["region"] = std::string(1, pt.region);
    j["raw_region"] = std::string(1, pt.raw_region);
    j["flat"] = pt.flat;
    j["single"] = pt.single;
    j["lattice"] = pt.lattice;
    j["flags"] = pt.flags;
    j["constants"] = info;
    emit_json(j);
  }

  void phase_cmd() {
    auto [na, ne] = parse_grid_pair(c_.grid.empty() ? "64x64" : c_.grid);
    nlohmann::ordered_json info;
    auto k = phase_constants(c_, info);
    auto g = classify_phase(log_axis(c_.alpha_s_lo, c_.alpha_s_hi, na), log_axis(c_.eta_lo, c_.eta_hi, ne), c_.params, k);
    auto bc = extract_boundary(g, 'C', 'B');
    auto ba = extract_boundary(g, 'B', 'A');
    info["regions"] = count_regions(g);
    info["raw_regions"] = count_regions(g, true);
    info["boundary_CB_slope"] = bc.slope;
    info["boundary_BA_slope"] = ba.slope;
    std::ostringstream os;
    os << "# " << kVersion << "\n# config " << config_json(c_).dump() << "\n# summary " << info.dump() << "\n";
    os << "h,eta,alpha_s,alpha_m,theta,flat,single,lattice,winner,region,raw_region,flags\n";
    for (const auto& p : g.points)
      os << num(c_.params.h) << ',' << num(p.eta) << ',' << num(p.alpha_s) << ',' << num(c_.params.alpha_m) << ','
         << num(c_.params.theta) << ',' << num(p.flat) << ',' << num(p.single) << ',' << num(p.lattice) << ','
         << to_string(p.winner) << ',' << p.region << ',' << p.raw_region << ',' << p.flags << '\n';
    emit(os.str());
  }

 private:
  RunConfig c_;
  std::ostream& out_;
};

// key = value lines (flag names without dashes); '#' starts a comment.
inline std::vector<std::string> config_file_args(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ValidationError("cannot read config file: " + path);
  std::vector<std::string> args;
  std::string line;
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    const auto b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  while (std::getline(f, line)) {
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ValidationError("config line without '=': " + line);
    const std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
    if (key == "config") throw ValidationError("config files cannot nest");
    args.push_back("--" + key);
    args.push_back(val);
  }
  return args;
}

inline void add_common(CLI::App* sub, RunConfig& c) {
  sub->set_help_flag("--help", "print this help");  // -h would clash with --h
  sub->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  sub->add_option("--h", c.params.h, "film thickness");
  sub->add_option("--eta", c.params.eta, "mismatch strain");
  sub->add_option("--alpha-s", c.params.alpha_s, "substrate compliance ratio");
  sub->add_option("--alpha-m", c.params.alpha_m, "membrane weight");
  sub->add_option("--theta", c.params.theta, "bonded area fraction");
  sub->add_option("--family", c.family, "construction family");
  sub->add_option("--vary", c.vary, "swept parameter");
  sub->add_option("--from", c.from, "sweep start");
  sub->add_option("--to", c.to, "sweep end");
  sub->add_option("--points", c.points, "sweep points");
  sub->add_option("--grid", c.grid, "grid size (AxB for phase, n for the minimizer, panels for 2D)");
  sub->add_option("--seed", c.seed, "random seed");
  sub->add_option("--workers", c.workers, "worker threads");
  sub->add_option("--out", c.out, "output file (default stdout)");
  sub->add_option("--config", c.config, "key = value config file; flags override it");
  sub->add_option("--cells", c.cells, "explicit cell or blister count");
  sub->add_option("--max-count", c.max_count, "largest blister count tried by the minimizer");
  sub->add_option("--tolerance", c.tolerance, "exponent tolerance for fit");
  sub->add_option("--lattice-scale", c.lattice_scale, "lattice cell as a multiple of l2");
  sub->add_option("--k6", c.k6, "lattice constant (default: calibrate)");
  sub->add_option("--alpha-s-min", c.alpha_s_lo, "phase map alpha_s lower end");
  sub->add_option("--alpha-s-max", c.alpha_s_hi, "phase map alpha_s upper end");
  sub->add_option("--eta-min", c.eta_lo, "phase map eta lower end");
  sub->add_option("--eta-max", c.eta_hi, "phase map eta upper end");
}

// Bad input (including impossible geometry) is 1; everything else is a numerical failure.
inline int exit_code(const std::exception& e) {
  return dynamic_cast<const ValidationError*>(&e) ? invalid : numerical;
}

inline const std::vector<std::pair<std::string, std::string>>& commands() {
  static const std::vector<std::pair<std::string, std::string>> v = {
      {"eval-1d", "energy of a 1D construction (flat | single | periodic)"},
      {"construct", "assemble a construction and report its energy and geometry"},
      {"sweep", "evaluate a family over a geometric parameter grid (CSV)"},
      {"fit", "sweep and fit a log-log exponent (JSON)"},
      {"minimize", "discrete 1D minimization over equispaced bonded sets"},
      {"classify", "winner among flat, single blister and lattice at one point"},
      {"phase", "winner map over an (alpha_s, eta) grid (CSV)"},
  };
  return v;
}

inline int run(std::vector<std::string> args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  RunConfig c;
  c.workers = default_workers();
  CLI::App app{"Blister morphology energies: constructions, sweeps, fits and phase maps", "blisterlab"};
  app.set_help_flag("--help", "print this help");
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  for (const auto& [name, help] : commands()) add_common(app.add_subcommand(name, help), c);

  if (args.empty() || std::none_of(commands().begin(), commands().end(),
                                   [&](const auto& cmd) { return cmd.first == args[0]; })) {
    const bool help = !args.empty() && (args[0] == "--help" || args[0] == "--version");
    if (!help) {
      err << (args.empty() ? "missing command" : "unknown command: " + args[0]) << "\n" << app.help();
      return invalid;
    }
  }

  // Config-file values go right after the command so later flags win.
  for (std::size_t i = 1; i + 1 < args.size(); ++i)
    if (args[i] == "--config") {
      try {
        auto extra = config_file_args(args[i + 1]);
        args.insert(args.begin() + 1, extra.begin(), extra.end());
      } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return invalid;
      }
      break;
    }

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : invalid;
  }

  c.command = app.get_subcommands().front()->get_name();
  try {
    c.params.validate();
    if (c.workers < 1) throw ValidationError("workers must be >= 1");
    Runner r(c, out);
    if (c.command == "eval-1d") r.eval_1d();
    else if (c.command == "construct") r.construct();
    else if (c.command == "sweep") r.sweep_cmd();
    else if (c.command == "fit") r.fit_cmd();
    else if (c.command == "minimize") r.minimize_cmd();
    else if (c.command == "classify") r.classify_cmd();
    else if (c.command == "phase") r.phase_cmd();
  } catch (const std::exception& e) {
    const int code = exit_code(e);
    err << (code == invalid ? "error: " : "numerical failure: ") << e.what() << "\n";
    return code;
  }
  return ok;
}

inline int run(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return run(std::vector<std::string>(argv + 1, argv + argc), out, err);
}

}  // namespace blisterlab::cli
