#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <vector>

#include "chebyshev.hpp"
#include "core.hpp"
#include "energy.hpp"
#include "gamma.hpp"

namespace blisterlab {

// Width of a smoothed fold of length L. Near each end it follows
// f0(x) = tau sigma^{1/3} (x + sigma)^{2/3} - tau sigma; the half profile g is the even
// extension of f0 mollified at scale sigma/2 and shifted to vanish at 0, and the full
// profile is f(x) = g(x) g(L - x) / g(L).
class RidgeWidth {
 public:
  RidgeWidth(double tau, double sigma, double length) : tau_(tau), sigma_(sigma), len_(length), rho_(0.5 * sigma) {
    if (!(tau > 0.0 && sigma > 0.0 && length > 0.0)) throw ValidationError("ridge width needs tau, sigma, length > 0");
    shift_ = convolve(0.0, 0);
    const double w = rho_.radius();
    std::vector<double> edges{0.0, 0.25 * w, 0.5 * w, 0.75 * w, w};
    for (double x = 2.0 * w; x < length; x *= 1.5) edges.push_back(x);
    if (edges.back() < length) edges.push_back(length);
    while (edges.size() > 2 && edges[edges.size() - 2] >= length) edges.erase(edges.end() - 2);
    for (int n = 0; n < 4; ++n) g_[n] = PiecewiseChebyshev([&](double x) { return half(x, n); }, edges, 20);
    gL_ = g_[0](length);
    for (int i = 0; i <= 400; ++i) max_ = std::max(max_, eval(len_ * i / 400.0)[0]);
  }

  double tau() const { return tau_; }
  double sigma() const { return sigma_; }
  double length() const { return len_; }

  // f0 and its derivatives (x > -sigma)
  double f0(double x, int n = 0) const {
    const double b = x + sigma_, c = tau_ * std::cbrt(sigma_);
    switch (n) {
      case 0: return c * std::pow(b, 2.0 / 3.0) - tau_ * sigma_;
      case 1: return (2.0 / 3.0) * c / std::cbrt(b);
      case 2: return -(2.0 / 9.0) * c / (b * std::cbrt(b));
      default: return (8.0 / 27.0) * c / (b * b * std::cbrt(b));
    }
  }

  // half profile and derivatives at x in [0, L]
  double g(double x, int n = 0) const { return g_[n](std::clamp(x, 0.0, len_)); }

  // f, f', f'', f''' at x in [0, L]
  std::array<double, 4> eval(double x) const {
    std::array<double, 4> a{}, b{};
    for (int n = 0; n < 4; ++n) {
      a[n] = g(x, n);
      b[n] = (n % 2 ? -1.0 : 1.0) * g(len_ - x, n) / gL_;
    }
    return {a[0] * b[0], a[1] * b[0] + a[0] * b[1], a[2] * b[0] + 2 * a[1] * b[1] + a[0] * b[2],
            a[3] * b[0] + 3 * a[2] * b[1] + 3 * a[1] * b[2] + a[0] * b[3]};
  }

  double max_width() const { return max_; }

  // int_0^L f
  double area() const {
    std::vector<double> br{0.0};
    for (double x = sigma_; x < 0.5 * len_; x *= 2.0) br.push_back(x);
    const std::size_t k = br.size();
    for (std::size_t i = k; i-- > 1;) br.push_back(len_ - br[i]);
    br.push_back(len_);
    std::sort(br.begin(), br.end());
    br.erase(std::unique(br.begin(), br.end()), br.end());
    return quad_piecewise([&](double x) { return eval(x)[0]; }, br, 16);
  }

 private:
  double half(double x, int n) const { return convolve(x, n) - (n == 0 ? shift_ : 0.0); }

  // n-th derivative of the mollified even extension; the kink of |x| at 0 contributes the
  // delta terms for n >= 2.
  double convolve(double x, int n) const {
    const double w = rho_.radius();
    auto integrand = [&](double s) {
      const double z = x - s, az = std::abs(z), sg = z >= 0.0 ? 1.0 : -1.0;
      const double v = f0(az, n);
      return rho_(s) * ((n % 2) ? sg * v : v);
    };
    std::vector<double> br = linspace_breaks(-w, w, 4);
    if (x > -w && x < w) {
      br.push_back(x);
      std::sort(br.begin(), br.end());
    }
    double r = quad_piecewise(integrand, br, 24);
    if (n == 2) r += 2.0 * f0(0.0, 1) * rho_(x);
    if (n == 3) r += 2.0 * f0(0.0, 1) * rho_(x, 1);
    return r;
  }

  double tau_, sigma_, len_;
  Bump rho_;
  double shift_ = 0.0, gL_ = 1.0, max_ = 0.0;
  std::array<PiecewiseChebyshev, 4> g_;
};

// Piecewise-linear fold data in the fold's own frame: the fold runs along the x axis from
// a = (0,0) to c = (length, 0); du_dx is the shared tangential slope, alpha_left/right the
// normal slopes on y < 0 / y > 0.
struct FoldData {
  double length = 1.0;
  double du_dx = 0.0;
  double alpha_left = 0.0;
  double alpha_right = 0.0;
};

// Smoothed fold in its local frame, with the in-plane misfit already removed.
class Ridge {
 public:
  Ridge(const FoldData& fold, double sigma, double tau)
      : fold_(fold), gamma_(fold.alpha_left, fold.alpha_right), width_(tau, sigma, fold.length) {
    if (!(gamma_.phi() > 0.0)) throw ValidationError("fold has no angle");
    if (gamma_.phi() > 1.0) throw ValidationError("fold angle exceeds 1");
    if (!(sigma < fold.length / 8.0))
      throw GeometryError("ridge too thick: sigma must be below one eighth of the fold length");
  }

  const FoldData& fold() const { return fold_; }
  const GammaCurve& gamma() const { return gamma_; }
  const RidgeWidth& width() const { return width_; }
  double phi() const { return gamma_.phi(); }
  double sigma() const { return width_.sigma(); }

  // Local-frame ridge field at (x, t = y/f(x)), given f, f', f''.
  Sample2D reduced(double x, double t, const std::array<double, 4>& F) const {
    const auto g = gamma_.at(t);
    const double kap = gamma_.kappa(t), om = gamma_.omega(t), E = gamma_.defect();
    const double c = fold_.du_dx, a = -0.5 * c * c;
    const double f = F[0], f1 = F[1], f2 = F[2];
    const double e2 = g.g2 - t * g.d2, e3 = g.g3 - t * g.d3;
    const double P = f * f1, P1 = f1 * f1 + f * f2;
    Sample2D s;
    s.w.x = -P * om + 0.5 * (t + 1.0) * P * E - c * f * g.g3 + a * x;
    s.w.y = f * (g.g2 - t);
    s.u = f * g.g3 + c * x;
    s.grad_w.a = -P1 * om + t * f1 * f1 * kap + 0.5 * (t + 1.0) * P1 * E - 0.5 * t * f1 * f1 * E - c * f1 * e3 + a;
    s.grad_w.b = f1 * (0.5 * E - kap) - c * g.d3;
    s.grad_w.c = f1 * e2;
    s.grad_w.d = g.d2 - 1.0;
    s.grad_u = {f1 * e3 + c, g.d3};
    s.hess_u.a = f2 * e3 + t * t * f1 * f1 * g.dd3 / f;
    s.hess_u.b = s.hess_u.c = -f1 * t * g.dd3 / f;
    s.hess_u.d = g.dd3 / f;
    return s;
  }

  // Unsmoothed fold in the same reduced frame.
  Sample2D hat(double x, double y) const {
    const double c = fold_.du_dx, al = y < 0.0 ? fold_.alpha_left : fold_.alpha_right;
    Sample2D s;
    s.u = c * x + al * y;
    s.grad_u = {c, al};
    s.w = {-0.5 * c * c * x - c * al * y, -0.5 * al * al * y};
    s.grad_w = Mat2{-0.5 * c * c, -c * al, 0.0, -0.5 * al * al};
    return s;
  }

  // Whether (x,y) lies in the smoothing region; sets t and the width data.
  bool locate(double x, double y, double& t, std::array<double, 4>& F) const {
    if (!(x > 0.0 && x < fold_.length)) return false;
    F = width_.eval(x);
    if (!(F[0] > 0.0) || std::abs(y) >= F[0]) return false;
    t = y / F[0];
    return true;
  }

  // Ridge minus the unsmoothed fold (zero outside the smoothing region).
  Sample2D delta(double x, double y) const {
    double t;
    std::array<double, 4> F;
    if (!locate(x, y, t, F)) return {};
    return difference(reduced(x, t, F), hat(x, y));
  }

  static Sample2D difference(const Sample2D& p, const Sample2D& q) {
    Sample2D r;
    r.w = p.w - q.w;
    r.grad_w = p.grad_w - q.grad_w;
    r.u = p.u - q.u;
    r.grad_u = p.grad_u - q.grad_u;
    r.hess_u = p.hess_u - q.hess_u;
    return r;
  }

  // x-range where the slice {x} x (-f, f) is not swallowed by the ball of radius r at a.
  double entry(double r) const {
    double lo = 0.0, hi = r;
    for (int i = 0; i < 80; ++i) {
      const double mid = 0.5 * (lo + hi);
      const double f = width_.eval(mid)[0];
      (mid * mid + f * f < r * r ? lo : hi) = mid;
    }
    return hi;
  }
  double entry_far(double r) const {
    double lo = 0.0, hi = r;
    for (int i = 0; i < 80; ++i) {
      const double mid = 0.5 * (lo + hi);
      const double f = width_.eval(fold_.length - mid)[0];
      (mid * mid + f * f < r * r ? lo : hi) = mid;
    }
    return fold_.length - hi;
  }

  // Quadrature over {(x,t): t in [t_lo, t_hi]} of the smoothing region minus the balls of
  // radius r_a at a and r_c at c; fn(x, t, F, weight) with weight including the Jacobian f.
  template <class Fn>
  void for_each_node(double r_a, double r_c, double t_lo, double t_hi, int order, Fn&& fn) const {
    const double L = fold_.length;
    const double xa = entry(r_a), xc = entry_far(r_c);
    if (!(xa < xc)) return;
    std::vector<double> br;
    // refine toward each ball edge, then grow geometrically toward the middle
    auto graded = [&](double enter, double r, bool from_a) {
      auto put = [&](double dist) { br.push_back(from_a ? dist : L - dist); };
      put(enter);
      for (double q : {0.5, 0.8, 0.95}) put(enter + q * (r - enter));
      for (double dist = r; dist < 0.5 * L; dist *= 1.3) put(dist);
    };
    graded(xa, r_a, true);
    graded(L - xc, r_c, false);
    br.push_back(0.5 * L);
    std::sort(br.begin(), br.end());
    br.erase(std::remove_if(br.begin(), br.end(), [&](double x) { return x < xa || x > xc; }), br.end());
    br.erase(std::unique(br.begin(), br.end(), [](double p, double q) { return std::abs(p - q) < 1e-15; }), br.end());
    std::vector<double> tbr{-1.0, -2.0 / 3.0, -1.0 / 3.0, 0.0, 1.0 / 3.0, 0.5, 2.0 / 3.0, 1.0};
    for (std::size_t k = 0; k + 1 < br.size(); ++k) {
      for_each_gauss(br[k], br[k + 1], order, [&](double x, double wx) {
        const auto F = width_.eval(x);
        if (!(F[0] > 0.0)) return;
        // excluded |t| range at this x
        double cut = 0.0;
        if (x < r_a) cut = std::max(cut, std::sqrt(std::max(0.0, r_a * r_a - x * x)) / F[0]);
        if (L - x < r_c) cut = std::max(cut, std::sqrt(std::max(0.0, r_c * r_c - (L - x) * (L - x))) / F[0]);
        auto span = [&](double lo, double hi) {
          lo = std::max(lo, t_lo);
          hi = std::min(hi, t_hi);
          if (!(hi > lo)) return;
          for (std::size_t j = 0; j + 1 < tbr.size(); ++j) {
            const double a = std::max(lo, tbr[j]), b = std::min(hi, tbr[j + 1]);
            if (b > a) for_each_gauss(a, b, order, [&](double t, double wt) { fn(x, t, F, wx * wt * F[0]); });
          }
        };
        if (cut <= 0.0) {
          span(-1.0, 1.0);
        } else if (cut < 1.0) {
          span(-1.0, -cut);
          span(cut, 1.0);
        }
      });
    }
  }

 private:
  FoldData fold_;
  GammaCurve gamma_;
  RidgeWidth width_;
};

struct RidgeSpec {
  FoldData fold;
  double tau = 1.0;
  double sigma = 0.0;  // 0 selects the energy-balancing width h / (sqrt(alpha_m) phi)
};

inline double balanced_sigma(const Params& p, double phi) { return p.h / (std::sqrt(p.alpha_m) * phi); }

// Membrane + bending energy of one smoothed fold over its quadrilateral minus the balls of
// radius sigma at both ends.
inline EnergyBreakdown ridge_energy(const RidgeSpec& spec, const Params& p, const QuadSpec& quad = {}) {
  quad.validate();
  const double phi = std::max(std::abs(spec.fold.alpha_left), std::abs(spec.fold.alpha_right));
  const double sigma = spec.sigma > 0.0 ? spec.sigma : balanced_sigma(p, phi);
  Ridge ridge(spec.fold, sigma, spec.tau);
  double memb = 0.0, bend = 0.0;
  ridge.for_each_node(sigma, sigma, -1.0, 1.0, quad.order, [&](double x, double t, const auto& F, double wt) {
    const Sample2D s = ridge.reduced(x, t, F);
    memb += wt * membrane_density(s, 0.0);
    bend += wt * bending_density(s);
  });
  return EnergyBreakdown::make(p.alpha_m * p.h * memb, p.h * p.h * p.h * bend, 0.0);
}

}  // namespace blisterlab
