#pragma once

#include <complex>
#include <map>
#include <string>
#include <functional>
#include <mutex>
#include <vector>

#include <fftw3.h>

#include "core.hpp"

namespace blisterlab {

struct QuadSpec {
  int order = 16;   // Gauss points per smooth piece
  int grid2d = 32;  // panel count scale for 2D ridge/ball regions

  void validate() const {
    if (order < 4) throw ValidationError("quadrature order must be >= 4");
    if (grid2d < 16) throw ValidationError("grid2d must be >= 16");
  }
};

// ---------------------------------------------------------------- 1D profiles

struct ProfileSample {
  double w = 0.0, dw = 0.0, u = 0.0, du = 0.0, d2u = 0.0;
};

// A periodic piecewise-analytic deformation of the unit torus. `pieces` lists the
// breakpoints in [0,1] (first 0, last 1); `eval` is analytic strictly inside each piece.
struct Profile1D {
  std::function<ProfileSample(double)> eval;
  std::vector<double> pieces;

  ProfileSample at(double x) const { return eval(wrap01(x)); }
};

// Breakpoints of the profile restricted to [a,b] (b may exceed 1 for seam-crossing intervals).
inline std::vector<double> pieces_within(const Profile1D& p, double a, double b) {
  std::vector<double> out{a};
  const double k0 = std::floor(a);
  for (double k = k0; k <= std::floor(b) + 1.0; k += 1.0)
    for (double x : p.pieces) {
      const double y = x + k;
      if (y > a + kTorusTol && y < b - kTorusTol) out.push_back(y);
    }
  std::sort(out.begin(), out.end());
  out.push_back(b);
  return out;
}

inline void check_admissible_1d(const Profile1D& profile, const BondedSet1D& omega, int order, double tol = 1e-10) {
  for (const auto& iv : omega.intervals()) {
    auto br = pieces_within(profile, iv.a, iv.b);
    auto probe = [&](double x) {
      const double u = profile.at(x).u;
      if (std::abs(u) > tol)
        throw AdmissibilityError("u does not vanish on the bonded set (u=" + std::to_string(u) +
                                 " at x=" + std::to_string(x) + ")");
    };
    for (double x : br) probe(x);
    for (std::size_t k = 0; k + 1 < br.size(); ++k) for_each_gauss(br[k], br[k + 1], order, [&](double x, double) { probe(x); });
  }
}

inline EnergyBreakdown energy_1d(const Profile1D& profile, const BondedSet1D& omega, const Params& prm,
                                 const QuadSpec& quad = {}) {
  quad.validate();
  check_admissible_1d(profile, omega, quad.order);
  const double memb = quad_piecewise(
      [&](double x) {
        auto s = profile.at(x);
        const double r = s.dw + 0.5 * s.du * s.du - prm.eta;
        return r * r;
      },
      profile.pieces, quad.order);
  const double bend = quad_piecewise(
      [&](double x) {
        auto s = profile.at(x);
        return s.d2u * s.d2u;
      },
      profile.pieces, quad.order);
  double grad2 = 0.0, val2 = 0.0;
  for (const auto& iv : omega.intervals()) {
    auto br = pieces_within(profile, iv.a, iv.b);
    grad2 += quad_piecewise([&](double x) { return std::pow(profile.at(x).dw, 2); }, br, quad.order);
    val2 += quad_piecewise([&](double x) { return std::pow(profile.at(x).w, 2); }, br, quad.order);
  }
  return EnergyBreakdown::make(prm.alpha_m * prm.h * memb, prm.h * prm.h * prm.h * bend,
                               prm.alpha_s * std::sqrt(grad2) * std::sqrt(val2));
}

// Substrate summed component by component (used to compare with the global product).
inline double substrate_by_component_1d(const Profile1D& profile, const BondedSet1D& omega, const Params& prm,
                                        const QuadSpec& quad = {}) {
  double s = 0.0;
  for (const auto& iv : omega.intervals()) {
    auto br = pieces_within(profile, iv.a, iv.b);
    const double g = quad_piecewise([&](double x) { return std::pow(profile.at(x).dw, 2); }, br, quad.order);
    const double v = quad_piecewise([&](double x) { return std::pow(profile.at(x).w, 2); }, br, quad.order);
    s += std::sqrt(g) * std::sqrt(v);
  }
  return prm.alpha_s * s;
}

// Energy on the torus of length L for w_L(x) = L w(x/L), u_L(x) = L u(x/L), film thickness
// t = hL, written with the dimensional prefactors. Equals L times the unit-scale energy.
inline EnergyBreakdown energy_1d_dimensional(const Profile1D& unit, const BondedSet1D& omega, const Params& prm,
                                             double L, const QuadSpec& quad = {}) {
  const double t = prm.h * L;
  auto at = [&](double x) {
    auto s = unit.at(x / L);
    return ProfileSample{L * s.w, s.dw, L * s.u, s.du, s.d2u / L};
  };
  std::vector<double> br;
  for (double x : unit.pieces) br.push_back(L * x);
  const double memb = quad_piecewise(
      [&](double x) {
        auto s = at(x);
        const double r = s.dw + 0.5 * s.du * s.du - prm.eta;
        return r * r;
      },
      br, quad.order);
  const double bend = quad_piecewise([&](double x) { return std::pow(at(x).d2u, 2); }, br, quad.order);
  double grad2 = 0.0, val2 = 0.0;
  for (const auto& iv : omega.intervals()) {
    auto ubr = pieces_within(unit, iv.a, iv.b);
    for (double& x : ubr) x *= L;
    grad2 += quad_piecewise([&](double x) { return std::pow(at(x).dw, 2); }, ubr, quad.order);
    val2 += quad_piecewise([&](double x) { return std::pow(at(x).w, 2); }, ubr, quad.order);
  }
  return EnergyBreakdown::make(prm.alpha_m * t / L * memb, t * t * t / L * bend,
                               prm.alpha_s / L * std::sqrt(grad2) * std::sqrt(val2));
}

// ---------------------------------------------------------------- 2D fields

struct Sample2D {
  Vec2 w;
  Mat2 grad_w;  // row i = gradient of w_i
  double u = 0.0;
  Vec2 grad_u;
  Mat2 hess_u;
};

inline Mat2 membrane_strain(const Sample2D& s, double eta) {
  const Mat2& g = s.grad_w;
  const double shear = 0.5 * (g.b + g.c) + 0.5 * s.grad_u.x * s.grad_u.y;
  return {g.a + 0.5 * s.grad_u.x * s.grad_u.x - eta, shear, shear, g.d + 0.5 * s.grad_u.y * s.grad_u.y - eta};
}

inline double membrane_density(const Sample2D& s, double eta) { return membrane_strain(s, eta).frob2(); }
inline double bending_density(const Sample2D& s) { return s.hess_u.frob2(); }

using SampleSink = std::function<void(Vec2, const Sample2D&, double)>;

// One integration patch: the field is smooth on it and `visit` emits quadrature samples.
// Weights may be negative when a patch subtracts a region counted by a coarser patch.
struct Patch {
  bool bonded = false;
  bool membrane = true;  // contributes to membrane and bending integrals
  std::function<void(const QuadSpec&, const SampleSink&)> visit;
  std::string kind;  // label for per-region breakdowns
};

class Field2D {
 public:
  virtual ~Field2D() = default;
  virtual Sample2D eval(Vec2 p) const = 0;
  virtual std::vector<Patch> patches() const = 0;
  virtual int cells_per_side() const { return 1; }
};

// Tensor Gauss on a triangle through the collapsed map p = A + s(B-A) + s t (C-B).
template <class Fn>
void for_each_triangle_node(Vec2 A, Vec2 B, Vec2 C, int order, Fn&& fn) {
  const Vec2 e1 = B - A, e2 = C - B;
  const double jac = std::abs(e1.x * e2.y - e1.y * e2.x);
  for_each_gauss(0.0, 1.0, order + 1, [&](double s, double ws) {
    for_each_gauss(0.0, 1.0, order, [&](double t, double wt) { fn(A + e1 * s + e2 * (s * t), ws * wt * s * jac); });
  });
}

// Field-agnostic polygon patch (convex polygon, fan triangulation).
inline Patch polygon_patch(std::vector<Vec2> poly, std::function<Sample2D(Vec2)> eval, bool bonded,
                           bool membrane = true) {
  Patch p;
  p.bonded = bonded;
  p.membrane = membrane;
  p.visit = [poly = std::move(poly), eval = std::move(eval)](const QuadSpec& q, const SampleSink& sink) {
    for (std::size_t k = 1; k + 1 < poly.size(); ++k)
      for_each_triangle_node(poly[0], poly[k], poly[k + 1], q.order, [&](Vec2 x, double wt) { sink(x, eval(x), wt); });
  };
  return p;
}

struct Energy2DParts {
  double membrane_integral = 0.0;
  double bending_integral = 0.0;
  double grad_w_sq = 0.0;  // over the bonded set
  double w_sq = 0.0;
  double bonded_area = 0.0;
  // per patch kind, unscaled by the cell count: membrane and bending integrals
  std::map<std::string, std::pair<double, double>> by_kind;
};

inline void check_sample(const Patch& patch, Vec2 p, const Sample2D& s, double wt, double tol) {
  auto where = [&] { return "(" + std::to_string(p.x) + "," + std::to_string(p.y) + ")"; };
  if (!std::isfinite(s.u) || !std::isfinite(s.hess_u.frob2()) || !std::isfinite(s.grad_w.frob2()))
    throw NumericalError("non-finite field value at " + where());
  if (s.u < -tol) throw AdmissibilityError("u < 0 at " + where() + " (u=" + std::to_string(s.u) + ")");
  if (patch.bonded && wt > 0.0 && std::abs(s.u) > tol)
    throw AdmissibilityError("u does not vanish on the bonded set at " + where() + " (u=" + std::to_string(s.u) + ")");
}

// One pass over all patches; optionally verifies admissibility at every node on the way.
inline Energy2DParts integrate_field(const Field2D& field, double eta, const QuadSpec& quad, bool check = false,
                                     double tol = 1e-10) {
  Energy2DParts out;
  for (const auto& patch : field.patches()) {
    double pm = 0.0, pb = 0.0;
    patch.visit(quad, [&](Vec2 p, const Sample2D& s, double wt) {
      if (check) check_sample(patch, p, s, wt, tol);
      if (patch.membrane) {
        pm += wt * membrane_density(s, eta);
        pb += wt * bending_density(s);
      }
      if (patch.bonded) {
        out.grad_w_sq += wt * s.grad_w.frob2();
        out.w_sq += wt * (s.w.x * s.w.x + s.w.y * s.w.y);
        out.bonded_area += wt;
      }
    });
    out.membrane_integral += pm;
    out.bending_integral += pb;
    auto& k = out.by_kind[patch.kind];
    k.first += pm;
    k.second += pb;
  }
  const double cells = double(field.cells_per_side()) * double(field.cells_per_side());
  out.membrane_integral *= cells;
  out.bending_integral *= cells;
  out.grad_w_sq *= cells;
  out.w_sq *= cells;
  out.bonded_area *= cells;
  return out;
}

// Checks u = 0 at bonded quadrature nodes and u >= 0 everywhere sampled.
inline void check_admissible_2d(const Field2D& field, const QuadSpec& quad, double tol = 1e-10) {
  for (const auto& patch : field.patches())
    patch.visit(quad, [&](Vec2 p, const Sample2D& s, double wt) { check_sample(patch, p, s, wt, tol); });
}

inline EnergyBreakdown energy_from_parts(const Energy2DParts& parts, const Params& prm) {
  return EnergyBreakdown::make(prm.alpha_m * prm.h * parts.membrane_integral,
                               prm.h * prm.h * prm.h * parts.bending_integral,
                               prm.alpha_s * std::sqrt(std::max(0.0, parts.grad_w_sq)) *
                                   std::sqrt(std::max(0.0, parts.w_sq)));
}

inline EnergyBreakdown energy_2d(const Field2D& field, const BondedSet2D& omega, const Params& prm,
                                 const QuadSpec& quad = {}) {
  quad.validate();
  auto parts = integrate_field(field, prm.eta, quad, true);
  // The bonded patches must tile omega; a mismatch means the substrate integral covers the wrong set.
  if (!omega.rects.empty()) {
    const double m = measure(omega);
    if (std::abs(parts.bonded_area - m) > 1e-5 * m)
      throw GeometryError("bonded patches cover area " + std::to_string(parts.bonded_area) + " but the bonded set has " +
                          std::to_string(m));
  }
  return energy_from_parts(parts, prm);
}

// ---------------------------------------------------------------- H^{1/2} seminorm

inline bool is_power_of_two(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

// sum_{k != 0} |k| |fhat(k)|^2 with fhat(k) = int_0^1 e^{2 pi i k x} f dx, from N uniform samples.
inline double h_half_norm_sq(const std::vector<double>& samples) {
  const std::size_t n = samples.size();
  if (!is_power_of_two(n) || n < 2) throw ValidationError("sample count must be a power of two");
  for (double v : samples)
    if (!std::isfinite(v)) throw NumericalError("non-finite sample in h_half_norm_sq");
  std::vector<double> in(samples);
  std::vector<std::complex<double>> out(n / 2 + 1);
  static std::mutex plan_mu;  // FFTW planning is not thread-safe
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(plan_mu);
    plan = fftw_plan_dft_r2c_1d(int(n), in.data(), reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(plan_mu);
    fftw_destroy_plan(plan);
  }
  const double inv = 1.0 / double(n);
  double s = 0.0;
  for (std::size_t k = 1; k <= n / 2; ++k) {
    const double mag2 = std::norm(out[k]) * inv * inv;
    s += (k == n / 2 ? 1.0 : 2.0) * double(k) * mag2;
  }
  return s;
}

}  // namespace blisterlab
