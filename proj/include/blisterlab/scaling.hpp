#pragma once
// Parameter sweeps over the constructions, log-log fits, constant calibration and the
// (alpha_s, eta) phase diagram.

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "construct1d.hpp"
#include "construct2d.hpp"
#include "core.hpp"
#include "energy.hpp"
#include "minimize.hpp"
#include "parallel.hpp"
#include "ridge.hpp"

namespace blisterlab {

enum class Family { flat, single, periodic1d, lattice2d, minimized };

inline const char* to_string(Family f) {
  switch (f) {
    case Family::flat: return "flat";
    case Family::single: return "single";
    case Family::periodic1d: return "periodic1d";
    case Family::lattice2d: return "lattice2d";
    case Family::minimized: return "minimized";
  }
  return "?";
}

inline Family parse_family(const std::string& s) {
  if (s == "flat") return Family::flat;
  if (s == "single" || s == "single_blister") return Family::single;
  if (s == "periodic1d" || s == "periodic") return Family::periodic1d;
  if (s == "lattice2d" || s == "lattice") return Family::lattice2d;
  if (s == "minimized") return Family::minimized;
  throw ValidationError("unknown family: " + s);
}

struct SweepSpec {
  Family family = Family::periodic1d;
  std::string vary = "h";
  double from = 0.0, to = 0.0;
  int points = 8;
  Params base;
  QuadSpec quad;
  Constants1D constants1d;
  Constants2D constants2d;
  double lattice_scale = 1.0;  // lattice cell = lattice_scale * l2
  bool snap_lattice = true;    // nudge the varied value so the lattice cell divides the torus
  int grid = 512;              // minimizer grid
  int max_count = 16;          // minimizer blister counts 1..max_count
  unsigned long seed = 0;
  int workers = 1;

  std::vector<double> values() const {
    if (!(from > 0.0 && to > from)) throw ValidationError("sweep range must satisfy 0 < from < to");
    if (points < 4) throw ValidationError("a sweep needs at least 4 points");
    std::vector<double> v(points);
    for (int i = 0; i < points; ++i) v[i] = from * std::pow(to / from, double(i) / (points - 1));
    return v;
  }
};

struct SweepRow {
  Params params;
  EnergyBreakdown energy;
  double cell = 0.0;  // cell length (1D: 1/N, 2D: l), 0 if none
  bool excluded = false;
  std::string flags;
};

// Value of `name` that puts the lattice cell scale * l2 exactly at 1/n for the nearest n.
inline Params snap_for_lattice(Params p, const std::string& name, double scale) {
  const double l = scale * lattice_length(p);
  const double n = std::max(1.0, std::round(1.0 / l));
  const double ratio = (1.0 / n) / l;  // desired factor on l2
  if (name == "h") p.h *= ratio;
  else if (name == "eta") p.eta *= std::pow(ratio, -16.0 / 5.0);
  else if (name == "alpha_s" || name == "alpha-s") p.alpha_s *= std::pow(ratio, -8.0 / 3.0);
  else if (name == "alpha_m" || name == "alpha-m") p.alpha_m *= std::pow(ratio, 16.0);
  p.validate();
  return p;
}

inline double lattice_cell(const Params& p, double scale) { return snap_cell_length(scale * lattice_length(p)); }

inline void add_flag(std::string& flags, const std::string& f) { flags += flags.empty() ? f : ";" + f; }

inline SweepRow evaluate_row(const SweepSpec& spec, Params p) {
  SweepRow row;
  row.params = p;
  try {
    switch (spec.family) {
      case Family::flat: {
        auto c = flat_profile(p.theta);
        row.energy = energy_1d(c.profile, c.omega, p, spec.quad);
        break;
      }
      case Family::single: {
        auto c = single_blister(p);
        row.energy = energy_1d(c.profile, c.omega, p, spec.quad);
        row.cell = 1.0;
        break;
      }
      case Family::periodic1d: {
        const auto b = bounds_1d(p, spec.constants1d);
        if (!b.cond_1d) {
          add_flag(row.flags, "cond_1d");
          row.excluded = true;
        }
        const int n = optimal_cell_count(p);
        row.energy = periodic_array_energy(p, n, spec.quad);
        row.cell = 1.0 / n;
        break;
      }
      case Family::lattice2d: {
        const auto b = bounds_2d(p, spec.constants2d);
        if (!b.cond_small_cell) add_flag(row.flags, "cond_small_cell");
        if (!b.cond_thin_ridge) add_flag(row.flags, "cond_thin_ridge");
        if (!b.cond_lattice_pays) add_flag(row.flags, "cond_lattice_pays");
        row.excluded = !b.lattice_valid();
        row.cell = lattice_cell(p, spec.lattice_scale);
        auto c = assemble_lattice(p, row.cell);
        row.energy = energy_2d(*c.field, c.omega, p, spec.quad);
        break;
      }
      case Family::minimized: {
        auto r = best_over_blister_count(p, spec.grid, spec.max_count, spec.seed);
        row.energy = r.best.energy;
        row.cell = 1.0 / r.best_count;
        if (!r.best.converged) add_flag(row.flags, "not_converged");
        break;
      }
    }
  } catch (const GeometryError&) {
    add_flag(row.flags, "geometry");
    row.excluded = true;
  } catch (const AdmissibilityError&) {
    add_flag(row.flags, "inadmissible");
    row.excluded = true;
  } catch (const NumericalError&) {
    add_flag(row.flags, "numerical");
    row.excluded = true;
  } catch (const ValidationError&) {
    add_flag(row.flags, "construction_failed");
    row.excluded = true;
  }
  return row;
}

// Rows in grid order; each row is independent, so workers only change wall time.
inline std::vector<SweepRow> sweep(const SweepSpec& spec) {
  spec.base.validate();
  spec.quad.validate();
  const auto vals = spec.values();
  std::vector<Params> ps;
  for (double v : vals) {
    Params p = spec.base.with(spec.vary, v);
    if (spec.family == Family::lattice2d && spec.snap_lattice && spec.vary != "theta")
      p = snap_for_lattice(p, spec.vary, spec.lattice_scale);
    ps.push_back(p);
  }
  for (std::size_t i = 1; i < ps.size(); ++i)
    if (!(ps[i].get(spec.vary) > ps[i - 1].get(spec.vary)))
      throw ValidationError("sweep grid collapses after snapping; use fewer points or a wider range");
  return parallel_map<SweepRow>(ps.size(), spec.workers, [&](std::size_t i) { return evaluate_row(spec, ps[i]); });
}

struct FitResult {
  double exponent = 0.0;
  double prefactor = 0.0;
  double r2 = 0.0;
  std::vector<int> excluded;
  int used = 0;
};

// Least-squares line through (log x, log y).
inline FitResult fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ValidationError("fit needs matching x and y");
  if (x.size() < 4) throw ValidationError("insufficient data: a fit needs at least 4 valid rows");
  const double n = double(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0 && y[i] > 0.0)) throw ValidationError("power-law fit needs positive data");
    sx += std::log(x[i]);
    sy += std::log(y[i]);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double a = std::log(x[i]) - mx, b = std::log(y[i]) - my;
    sxx += a * a;
    sxy += a * b;
    syy += b * b;
  }
  if (!(sxx > 0.0)) throw ValidationError("fit needs at least two distinct x values");
  FitResult f;
  f.exponent = sxy / sxx;
  f.prefactor = std::exp(my - f.exponent * mx);
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = std::log(y[i]) - (std::log(f.prefactor) + f.exponent * std::log(x[i]));
    ss_res += r * r;
  }
  f.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  f.used = int(x.size());
  return f;
}

inline FitResult fit_exponent(const std::vector<SweepRow>& rows, const std::string& variable) {
  std::vector<double> x, y;
  std::vector<int> skipped;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].excluded || !(rows[i].energy.total > 0.0)) {
      skipped.push_back(int(i));
      continue;
    }
    x.push_back(rows[i].params.get(variable));
    y.push_back(rows[i].energy.total);
  }
  auto f = fit_power_law(x, y);
  f.excluded = skipped;
  return f;
}

// ---------------------------------------------------------------- calibration

struct Calibration {
  Constants1D c1;
  Constants2D c2;
  double ridge = 1.0;          // E_ridge / (alpha_m^{1/6} phi^{7/3} L^{1/3} h^{8/3})
  double lattice_scale = 1.0;  // cell-size prefactor the lattice constant was measured at
  std::vector<std::string> notes;
};

inline double upper_periodic_shape(const Params& p) {
  return std::pow(p.theta, 4.0 / 3.0) / std::pow(1.0 - p.theta, 2.0 / 3.0) * std::pow(p.alpha_s, 2.0 / 3.0) *
         std::pow(p.eta, 5.0 / 3.0) * p.h;
}
inline double lower_1d_shape(const Params& p) {
  Constants1D k;
  return bounds_1d(p, k).lower;
}
inline double upper_lattice_shape(const Params& p) { return bounds_2d(p).upper_lattice; }

inline double log_span(const std::vector<SweepRow>& rows, const std::string& var) {
  double lo = INFINITY, hi = 0.0;
  for (const auto& r : rows) {
    lo = std::min(lo, r.params.get(var));
    hi = std::max(hi, r.params.get(var));
  }
  return hi > lo ? std::log10(hi / lo) : 0.0;
}

// Prefactors from sweep tables keyed by family name ("single", "periodic1d", "lattice2d",
// "minimized"), each paired with its varied parameter. Upper-bound constants are geometric
// means of energy / shape; lower-bound constants are the largest K keeping K*shape below
// every observation.
struct CalibrationInput {
  std::string family;
  std::string vary;
  std::vector<SweepRow> rows;
};

inline Calibration calibrate_constants(const std::vector<CalibrationInput>& tables, double min_decades = 2.0,
                                       double lattice_scale = 1.0) {
  Calibration cal;
  cal.lattice_scale = lattice_scale;
  for (const auto& t : tables) {
    if (log_span(t.rows, t.vary) < min_decades - 1e-9)
      throw ValidationError("insufficient span: " + t.family + " sweep over " + t.vary + " covers fewer than " +
                            std::to_string(min_decades) + " decades");
    double logsum = 0.0, lower = INFINITY;
    int used = 0;
    for (const auto& r : t.rows) {
      if (r.excluded || !(r.energy.total > 0.0)) continue;
      const Params& p = r.params;
      double ratio = 0.0;
      if (t.family == "single") ratio = r.energy.bending / (p.h * p.h * p.h * p.eta / (1.0 - p.theta));
      else if (t.family == "periodic1d") ratio = r.energy.total / upper_periodic_shape(p);
      else if (t.family == "lattice2d") ratio = r.energy.total / upper_lattice_shape(p);
      else if (t.family == "minimized") lower = std::min(lower, r.energy.total / lower_1d_shape(p));
      else throw ValidationError("cannot calibrate against family " + t.family);
      if (ratio > 0.0) {
        logsum += std::log(ratio);
        ++used;
      }
    }
    if (t.family == "minimized") {
      if (!std::isfinite(lower)) throw ValidationError("no usable minimized rows");
      cal.c1.K1 = lower;
      continue;
    }
    if (used == 0) throw ValidationError("no usable rows for " + t.family);
    const double k = std::exp(logsum / used);
    if (t.family == "single") cal.c1.K2 = k;
    if (t.family == "periodic1d") cal.c1.K3 = k;
    if (t.family == "lattice2d") cal.c2.K6 = k;
  }
  cal.notes.push_back("K4 and K5 are not calibrated (no 2D minimizer, no single-blister 2D construction)");
  return cal;
}

// Ridge constant from a set of ridge energies (spec, params, energy) with balanced width.
inline double ridge_constant(const std::vector<std::pair<RidgeSpec, Params>>& runs, const QuadSpec& quad = {}) {
  double logsum = 0.0;
  for (const auto& [spec, p] : runs) {
    const double phi = std::max(std::abs(spec.fold.alpha_left), std::abs(spec.fold.alpha_right));
    const double shape = std::pow(p.alpha_m, 1.0 / 6.0) * std::pow(phi, 7.0 / 3.0) * std::cbrt(spec.fold.length) *
                         std::pow(p.h, 8.0 / 3.0);
    logsum += std::log(ridge_energy(spec, p, quad).total / shape);
  }
  if (runs.empty()) throw ValidationError("no ridge runs");
  return std::exp(logsum / runs.size());
}

// Lattice energy over a geometric ladder of cell-size prefactors; returns the prefactor with
// the smallest energy / formula ratio. h is rescaled so that each cell is 1/cells (the
// lattice problem is self-similar in h, so the ratio does not depend on it).
struct LatticeScaleScan {
  std::vector<double> scales, ratios;
  double best_scale = 1.0, best_ratio = 0.0;
};

inline LatticeScaleScan scan_lattice_scale(Params p, const std::vector<double>& scales, int cells = 24,
                                           const QuadSpec& quad = {}, int workers = 1) {
  LatticeScaleScan out;
  out.scales = scales;
  out.ratios = parallel_map<double>(scales.size(), workers, [&](std::size_t i) {
    Params q = p;
    q.h = p.h * (1.0 / cells) / (scales[i] * lattice_length(p));
    q.validate();
    auto c = assemble_lattice(q, 1.0 / cells);
    return energy_2d(*c.field, c.omega, q, quad).total / upper_lattice_shape(q);
  });
  out.best_ratio = INFINITY;
  for (std::size_t i = 0; i < scales.size(); ++i)
    if (out.ratios[i] < out.best_ratio) {
      out.best_ratio = out.ratios[i];
      out.best_scale = scales[i];
    }
  return out;
}

// ---------------------------------------------------------------- phase diagram

enum class Winner { flat, single_blister, lattice };
inline const char* to_string(Winner w) {
  switch (w) {
    case Winner::flat: return "flat";
    case Winner::single_blister: return "single_blister";
    case Winner::lattice: return "lattice";
  }
  return "?";
}

struct PhasePoint {
  double alpha_s = 0.0, eta = 0.0;
  Winner winner = Winner::flat;
  char region = 'C';      // A: lattice ineligible by cond_lattice_pays; B: lattice wins; C: otherwise
  char raw_region = 'C';  // same picture from the constant-free curves eta ~ alpha_s^2, alpha_s^{2/17}
  double flat = 0.0, single = 0.0, lattice = 0.0;
  std::string flags;
};

struct PhaseGrid {
  std::vector<double> alpha_s, eta;  // axes, increasing
  std::vector<PhasePoint> points;    // row-major: eta index outer, alpha_s index inner
  const PhasePoint& at(std::size_t ia, std::size_t ie) const { return points[ie * alpha_s.size() + ia]; }
};

inline PhasePoint classify_point(const Params& p, const Constants2D& k) {
  const auto b = bounds_2d(p, k);
  PhasePoint pt;
  pt.alpha_s = p.alpha_s;
  pt.eta = p.eta;
  pt.flat = b.upper_flat;
  pt.single = b.upper_single;
  pt.lattice = b.upper_lattice;
  if (!b.cond_small_cell) add_flag(pt.flags, "cond_small_cell");
  if (!b.cond_thin_ridge) add_flag(pt.flags, "cond_thin_ridge");
  if (!b.cond_lattice_pays) add_flag(pt.flags, "cond_lattice_pays");
  pt.winner = pt.single < pt.flat ? Winner::single_blister : Winner::flat;
  const double best_plain = std::min(pt.flat, pt.single);
  if (b.lattice_valid() && pt.lattice < best_plain) pt.winner = Winner::lattice;
  pt.region = !b.cond_lattice_pays ? 'A' : (pt.winner == Winner::lattice ? 'B' : 'C');
  const double am = p.alpha_m;
  pt.raw_region = p.eta > std::pow(p.alpha_s, 2.0 / 17.0) / std::pow(am, 3.0 / 17.0)
                      ? 'A'
                      : (p.eta > p.alpha_s * p.alpha_s ? 'B' : 'C');
  return pt;
}

inline PhaseGrid classify_phase(const std::vector<double>& alpha_s, const std::vector<double>& eta, const Params& rest,
                                const Constants2D& k) {
  for (const auto* axis : {&alpha_s, &eta})
    for (std::size_t i = 0; i < axis->size(); ++i) {
      if (!((*axis)[i] > 0.0 && (*axis)[i] < 1.0 + 1e-12)) throw ValidationError("phase grid must lie in (0,1]");
      if (i && !((*axis)[i] > (*axis)[i - 1])) throw ValidationError("phase grid axes must increase");
    }
  PhaseGrid g;
  g.alpha_s = alpha_s;
  g.eta = eta;
  for (double e : eta)
    for (double a : alpha_s) {
      Params p = rest;
      p.alpha_s = a;
      p.eta = e;
      p.validate();
      g.points.push_back(classify_point(p, k));
    }
  return g;
}

inline std::vector<double> log_axis(double lo, double hi, int n) {
  if (!(lo > 0.0 && hi > lo && n >= 2)) throw ValidationError("log axis needs 0 < lo < hi and >= 2 points");
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = lo * std::pow(hi / lo, double(i) / (n - 1));
  v.back() = hi;
  return v;
}

// Connected components (4-neighbour) of equal region labels.
inline int count_regions(const PhaseGrid& g, bool raw = false) {
  const std::size_t na = g.alpha_s.size(), ne = g.eta.size();
  std::vector<int> seen(na * ne, 0);
  int count = 0;
  for (std::size_t s = 0; s < na * ne; ++s) {
    if (seen[s]) continue;
    ++count;
    const char lab = raw ? g.points[s].raw_region : g.points[s].region;
    std::vector<std::size_t> stack{s};
    seen[s] = 1;
    while (!stack.empty()) {
      const std::size_t c = stack.back();
      stack.pop_back();
      const std::size_t ia = c % na, ie = c / na;
      const std::pair<long, long> nb[4] = {{long(ia) - 1, long(ie)}, {long(ia) + 1, long(ie)}, {long(ia), long(ie) - 1},
                                           {long(ia), long(ie) + 1}};
      for (auto [x, y] : nb) {
        if (x < 0 || y < 0 || x >= long(na) || y >= long(ne)) continue;
        const std::size_t d = std::size_t(y) * na + std::size_t(x);
        const char l2 = raw ? g.points[d].raw_region : g.points[d].region;
        if (!seen[d] && l2 == lab) {
          seen[d] = 1;
          stack.push_back(d);
        }
      }
    }
  }
  return count;
}

struct Boundary {
  std::vector<double> alpha_s, eta;  // one point per column where the transition exists
  bool monotone = true;
  double slope = 0.0;
  double r2 = 0.0;
};

// Per alpha_s column, the eta where the region changes from `below` to `above` (geometric
// midpoint of the two grid cells); then a log-log slope through those points.
inline Boundary extract_boundary(const PhaseGrid& g, char below, char above) {
  Boundary b;
  for (std::size_t ia = 0; ia < g.alpha_s.size(); ++ia)
    for (std::size_t ie = 0; ie + 1 < g.eta.size(); ++ie)
      if (g.at(ia, ie).region == below && g.at(ia, ie + 1).region == above) {
        b.alpha_s.push_back(g.alpha_s[ia]);
        b.eta.push_back(std::sqrt(g.eta[ie] * g.eta[ie + 1]));
        break;
      }
  if (b.alpha_s.size() >= 2) {
    const bool up = b.eta.back() >= b.eta.front();
    for (std::size_t i = 1; i < b.eta.size(); ++i)
      if (up ? b.eta[i] < b.eta[i - 1] : b.eta[i] > b.eta[i - 1]) b.monotone = false;
  }
  if (b.alpha_s.size() >= 4) {
    auto f = fit_power_law(b.alpha_s, b.eta);
    b.slope = f.exponent;
    b.r2 = f.r2;
  }
  return b;
}

}  // namespace blisterlab
