#pragma once
// Two-dimensional constructions and the closed-form bounds they are compared against.

#include <cmath>

#include "core.hpp"
#include "corner.hpp"
#include "gamma.hpp"
#include "lattice.hpp"
#include "ridge.hpp"

namespace blisterlab {

struct Constants2D {
  double K4 = 1.0, K5 = 1.0, K6 = 1.0;
  double c1 = 0.125, c2 = 0.5, c3 = 0.25;  // regime smallness constants

  void validate() const {
    if (!(K4 > 0 && K5 > 0 && K6 > 0 && c1 > 0 && c2 > 0 && c3 > 0)) throw ValidationError("constants must be > 0");
  }
};

struct Bounds2D {
  double lower = 0.0;
  double upper_flat = 0.0;
  double upper_single = 0.0;
  double upper_lattice = 0.0;
  double l2 = 0.0;
  bool cond_small_cell = false;   // l2 < c2
  bool cond_thin_ridge = false;   // h / sqrt(alpha_m eta) < c1 l2
  bool cond_lattice_pays = false;  // eta < c3 alpha_s^{2/17} / alpha_m^{3/17}
  bool lattice_valid() const { return cond_small_cell && cond_thin_ridge && cond_lattice_pays; }
};

inline double lattice_length(const Params& p) {
  return std::pow(p.alpha_m, 1.0 / 16.0) * p.h / (std::pow(p.eta, 5.0 / 16.0) * std::pow(p.alpha_s, 3.0 / 8.0));
}

inline Bounds2D bounds_2d(const Params& p, const Constants2D& k = {}) {
  p.validate();
  k.validate();
  const double th = p.theta, eta = p.eta, as = p.alpha_s, am = p.alpha_m, h = p.h;
  Bounds2D b;
  b.lower = k.K4 * std::min(am * eta * eta * th * th * th,
                            std::pow(as, 2.0 / 3.0) * std::pow(eta, 5.0 / 3.0) * std::pow(th, 8.0 / 3.0)) *
            h;
  b.upper_flat = am * eta * eta * h;
  b.upper_single = (am * eta * eta * th + k.K5 * am * std::pow(eta, 1.5) * h) * h;
  b.upper_lattice = k.K6 * std::pow(am, 1.0 / 16.0) * std::pow(as, 5.0 / 8.0) * std::pow(eta, 27.0 / 16.0) * h;
  b.l2 = lattice_length(p);
  b.cond_small_cell = b.l2 < k.c2;
  b.cond_thin_ridge = h / std::sqrt(am * eta) < k.c1 * b.l2;
  b.cond_lattice_pays = eta < k.c3 * std::pow(as, 2.0 / 17.0) / std::pow(am, 3.0 / 17.0);
  return b;
}

// Nearest cell length of the form 1/n.
inline double snap_cell_length(double l) {
  const double n = std::max(1.0, std::round(1.0 / l));
  return 1.0 / n;
}

// Lattice energy at the snapped cell size scale * l2.
inline EnergyBreakdown lattice_energy(const Params& p, const QuadSpec& quad = {}, LatticeOptions opt = {},
                                      double scale = 1.0) {
  if (!(scale > 0.0)) throw ValidationError("lattice cell scale must be > 0");
  const auto c = assemble_lattice(p, snap_cell_length(scale * lattice_length(p)), opt);
  return energy_2d(*c.field, c.omega, p, quad);
}

}  // namespace blisterlab
