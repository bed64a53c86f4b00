#pragma once

#include <cmath>
#include <utility>

#include "core.hpp"
#include "energy.hpp"

namespace blisterlab {

struct Construction1D {
  Profile1D profile;
  BondedSet1D omega;
};

inline Construction1D flat_profile(double theta) {
  if (!(theta > 0.0 && theta < 1.0)) throw ValidationError("theta must lie in (0,1)");
  Construction1D c;
  c.profile.eval = [](double) { return ProfileSample{}; };
  c.profile.pieces = {0.0, theta, 1.0};
  c.omega = BondedSet1D({{0.0, theta}});
  return c;
}

// One blister on [0, 1-theta] with zero membrane strain there; bonded elsewhere.
inline Construction1D single_blister(const Params& p) {
  p.validate();
  const double b = 1.0 - p.theta, eta = p.eta;
  const double w_amp = eta * b / (4.0 * kPi);
  const double u_amp = 2.0 * std::sqrt(eta) * b / kPi;
  Construction1D c;
  c.profile.eval = [=](double x) {
    if (x >= b) return ProfileSample{};
    const double s2 = std::sin(2.0 * kPi * x / b), c2 = std::cos(2.0 * kPi * x / b);
    const double s1 = std::sin(kPi * x / b);
    ProfileSample s;
    s.w = w_amp * std::sin(4.0 * kPi * x / b);
    s.dw = eta * std::cos(4.0 * kPi * x / b);
    s.u = u_amp * s1 * s1;
    s.du = 2.0 * std::sqrt(eta) * s2;
    s.d2u = 4.0 * kPi * std::sqrt(eta) / b * c2;
    return s;
  };
  c.profile.pieces = {0.0, b, 1.0};
  c.omega = BondedSet1D({{b, 1.0}});
  return c;
}

inline int cell_count_of(double l) {
  if (!(l > 0.0 && l <= 1.0)) throw ValidationError("cell length must lie in (0,1]");
  const double n = 1.0 / l;
  const double r = std::round(n);
  if (std::abs(n - r) > 1e-9 * std::max(1.0, n)) throw ValidationError("1/l must be an integer (cell count)");
  return int(r);
}

// Periodic array of blisters: in every cell of length l a blister of length (1-theta)l is
// followed by a bonded interval of length theta l on which w = eta (x - center).
inline Construction1D periodic_array(const Params& p, double l) {
  p.validate();
  const int n = cell_count_of(l);
  l = 1.0 / n;
  const double b = 1.0 - p.theta, eta = p.eta, theta = p.theta;
  const double slope_u = 2.0 * std::sqrt(eta / b);
  Construction1D c;
  c.profile.eval = [=](double x) {
    const int k = std::min(n - 1, int(std::floor(x * n)));
    const double xi = x * n - k;  // unit-cell coordinate
    ProfileSample s;
    if (xi < b) {
      const double ph4 = 4.0 * kPi * xi / b, ph2 = 2.0 * kPi * xi / b;
      s.w = l * (eta * (1.0 - 1.0 / b) * xi + theta * eta / 2.0 + eta / (4.0 * kPi) * std::sin(ph4));
      s.dw = eta * (1.0 - 1.0 / b) + eta / b * std::cos(ph4);
      s.u = l * slope_u * b / (2.0 * kPi) * (1.0 - std::cos(ph2));
      s.du = slope_u * std::sin(ph2);
      s.d2u = slope_u * (2.0 * kPi / b) * std::cos(ph2) / l;
    } else {
      s.w = l * eta * (xi - (2.0 - theta) / 2.0);
      s.dw = eta;
    }
    return s;
  };
  std::vector<double> br;
  std::vector<Interval> iv;
  for (int k = 0; k < n; ++k) {
    br.push_back(k * l);
    br.push_back((k + b) * l);
    iv.push_back({(k + b) * l, (k + 1) * l});
  }
  br.push_back(1.0);
  c.profile.pieces = br;
  c.omega = BondedSet1D(iv);
  return c;
}

// Energy of the n-cell array from one cell: under x -> x/n the membrane term is unchanged,
// bending picks up n^2 and the substrate product 1/n.
inline EnergyBreakdown periodic_array_energy(const Params& p, int n, const QuadSpec& quad = {}) {
  if (n < 1) throw ValidationError("cell count must be >= 1");
  const auto one = periodic_array(p, 1.0);
  const auto e = energy_1d(one.profile, one.omega, p, quad);
  return EnergyBreakdown::make(e.membrane, e.bending * n * n, e.substrate / n);
}

// ---------------------------------------------------------------- closed forms

struct Constants1D {
  double K1 = 1.0, K2 = 1.0, K3 = 1.0;
  double c0 = 0.5;  // smallness constant in the one-period-fits condition
};

struct Bounds1D {
  double lower = 0.0;
  double upper_flat = 0.0;
  double upper_single = 0.0;
  double upper_periodic = 0.0;
  double l1_theta = 0.0;
  double l1_plain = 0.0;
  bool cond_1d = false;
};

inline Bounds1D bounds_1d(const Params& p, const Constants1D& k = {}) {
  p.validate();
  if (!(k.K1 > 0 && k.K2 > 0 && k.K3 > 0 && k.c0 > 0)) throw ValidationError("constants must be > 0");
  const double th = p.theta, eta = p.eta, as = p.alpha_s, am = p.alpha_m, h = p.h;
  Bounds1D b;
  b.lower = k.K1 * std::min(am * eta * eta * th * th,
                            std::pow(as, 2.0 / 3.0) * std::pow(eta, 5.0 / 3.0) * std::pow(th, 5.0 / 3.0) /
                                std::cbrt(1.0 - th)) *
            h;
  b.upper_flat = am * eta * eta * h;
  b.upper_single = (am * eta * eta * th + k.K2 * h * h * eta / (1.0 - th)) * h;
  b.upper_periodic = k.K3 * std::pow(th, 4.0 / 3.0) / std::pow(1.0 - th, 2.0 / 3.0) * std::pow(as, 2.0 / 3.0) *
                     std::pow(eta, 5.0 / 3.0) * h;
  b.l1_plain = h / (std::cbrt(eta) * std::cbrt(as));
  b.l1_theta = b.l1_plain / (std::pow(1.0 - th, 2.0 / 3.0) * std::pow(th, 2.0 / 3.0));
  b.cond_1d = b.l1_plain < k.c0 * std::pow(1.0 - th, 2.0 / 3.0) * std::pow(th, 2.0 / 3.0);
  return b;
}

// Closed-form energies of the periodic array at cell length l.
inline double periodic_bending_closed(const Params& p, double l) {
  return 8.0 * kPi * kPi * std::pow(p.h, 3) * p.eta / (std::pow(1.0 - p.theta, 2) * l * l);
}
inline double periodic_substrate_closed(const Params& p, double l) {
  return p.alpha_s * p.eta * p.eta * p.theta * p.theta * l / (2.0 * std::sqrt(3.0));
}
inline double periodic_energy_closed(const Params& p, double l) {
  return periodic_bending_closed(p, l) + periodic_substrate_closed(p, l);
}
inline double single_bending_closed(const Params& p) {
  return 8.0 * kPi * kPi * std::pow(p.h, 3) * p.eta / (1.0 - p.theta);
}

// Exact minimiser of the closed-form periodic energy over continuous l.
inline double l_star(const Params& p) {
  return std::cbrt(32.0 * std::sqrt(3.0) * kPi * kPi * std::pow(p.h, 3) /
                   (std::pow(1.0 - p.theta, 2) * p.alpha_s * p.eta * p.theta * p.theta));
}

// Integer cell count minimising the closed-form energy.
inline int optimal_cell_count(const Params& p) {
  const double guess = 1.0 / l_star(p);
  int best = 1;
  double best_e = periodic_energy_closed(p, 1.0);
  const int lo = std::max(1, int(std::floor(guess)) - 1), hi = std::max(1, int(std::ceil(guess)) + 1);
  for (int n = lo; n <= hi; ++n) {
    const double e = periodic_energy_closed(p, 1.0 / n);
    if (e < best_e) {
      best_e = e;
      best = n;
    }
  }
  return best;
}

}  // namespace blisterlab
