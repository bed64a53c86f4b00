#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "chebyshev.hpp"
#include "core.hpp"

namespace blisterlab {

// Unit-mass bump exp(-1/(1-s^2)) rescaled to the support (-radius, radius).
class Bump {
 public:
  explicit Bump(double radius = 1.0) : r_(radius) {
    if (!(radius > 0.0)) throw ValidationError("bump radius must be > 0");
    static const double z = quad_piecewise([](double s) { return base(s, 0); }, linspace_breaks(-1.0, 1.0, 32), 24);
    z_ = z;
  }

  double radius() const { return r_; }

  // n-th derivative, n = 0..3.
  double operator()(double x, int n = 0) const {
    const double s = x / r_;
    return base(s, n) / (z_ * std::pow(r_, n + 1));
  }

  // Derivatives of exp(g) with g = -1/(1-s^2), by the chain rule.
  static double base(double s, int n) {
    if (std::abs(s) >= 1.0) return 0.0;
    const double q = 1.0 - s * s;
    const double e = std::exp(-1.0 / q);
    if (n == 0) return e;
    const double g1 = -2.0 * s / (q * q);
    if (n == 1) return g1 * e;
    const double g2 = -2.0 / (q * q) - 8.0 * s * s / (q * q * q);
    if (n == 2) return (g2 + g1 * g1) * e;
    const double g3 = -24.0 * s / (q * q * q) - 48.0 * s * s * s / (q * q * q * q);
    return (g3 + 3.0 * g1 * g2 + g1 * g1 * g1) * e;
  }

 private:
  double r_;
  double z_ = 1.0;
};

// Cross-section curve of a smoothed fold, t in [-1,1]. Components 2 and 3 only (the first
// vanishes). Linear with slope (1 - a^2/2, a) near each end, a = alpha_left / alpha_right.
class GammaCurve {
 public:
  struct Point {
    double g2, g3, d2, d3, dd2, dd3;  // values, first and second derivatives
  };

  GammaCurve(double alpha_left, double alpha_right) : aL_(alpha_left), aR_(alpha_right), rho_(1.0 / 3.0) {
    if (!(std::abs(aL_) <= 1.0 && std::abs(aR_) <= 1.0)) throw ValidationError("fold slopes must lie in [-1,1]");
    jump_ = aR_ - aL_;
    const int deg = 22;
    H_ = PiecewiseChebyshev([&](double t) { return rho_(t); }, linspace_breaks(-third, third, 24), deg).antiderivative();
    Hint_ = H_.antiderivative();

    // bump amplitude from the consistency condition
    auto smooth_slope = [&](double t) { return aL_ + jump_ * cdf(t); };
    const double inner = quad_piecewise([&](double t) { return std::pow(smooth_slope(t), 2); },
                                        linspace_breaks(-third, third, 24), 24);
    const double slope_sq = (2.0 / 3.0) * (aL_ * aL_ + aR_ * aR_) + inner;
    const double dens = 0.5 * quad_piecewise([&](double s) { return std::pow(rho_(s, 1), 2); },
                                             linspace_breaks(-third, third, 24), 24);
    const double lam2 = (0.5 * aR_ * aR_ + 0.5 * aL_ * aL_ - 0.5 * slope_sq) / (2.0 * dens);
    if (lam2 < -1e-15 * std::max(1e-300, aL_ * aL_ + aR_ * aR_))
      throw NumericalError("consistency condition unsolvable: mollifier too narrow");
    lambda_ = std::sqrt(std::max(0.0, lam2));

    const auto mid = linspace_breaks(-third, 2.0 * third, 48);
    S_ = PiecewiseChebyshev([&](double t) { return std::pow(raw3(t)[1], 2); }, mid, deg).antiderivative();
    d2_at_left_ = 0.5 * aL_ * aL_ * third;  // delta2(-1/3) with delta2 = -aL^2 t / 2 on the left
    K_ = PiecewiseChebyshev([&](double t) { return kappa_direct(t); }, mid, deg);
    W_ = K_.antiderivative();
    d2_at_right_ = d2_at_left_ - 0.5 * S_(2.0 * third);
    kappa_right_ = (1.0 - 0.5 * aR_ * aR_) * (d2_at_right_ + 0.5 * aR_ * aR_ * 2.0 * third);
    E_ = W_(2.0 * third) + kappa_right_ / 3.0;
  }

  double alpha_left() const { return aL_; }
  double alpha_right() const { return aR_; }
  double lambda() const { return lambda_; }
  double phi() const { return std::max(std::abs(aL_), std::abs(aR_)); }
  // int_{-1}^{1} gamma' . (gamma - t gamma')
  double defect() const { return E_; }

  Point at(double t) const {
    auto g3 = raw3(t);
    Point p;
    p.g3 = g3[0];
    p.d3 = g3[1];
    p.dd3 = g3[2];
    p.g2 = t + delta2(t);
    p.d2 = 1.0 - 0.5 * p.d3 * p.d3;
    p.dd2 = -p.d3 * p.dd3;
    return p;
  }

  // gamma2 - t: deviation of the in-plane component from the identity.
  double delta2(double t) const {
    if (t <= -third) return -0.5 * aL_ * aL_ * t;
    if (t >= 2.0 * third) return d2_at_right_ - 0.5 * aR_ * aR_ * (t - 2.0 * third);
    return d2_at_left_ - 0.5 * S_(t);
  }

  // kappa = gamma' . (gamma - t gamma'), omega = int_{-1}^t kappa
  double kappa(double t) const {
    if (t <= -third) return 0.0;
    if (t >= 2.0 * third) return kappa_right_;
    return K_(t);
  }
  double omega(double t) const {
    if (t <= -third) return 0.0;
    if (t >= 2.0 * third) return W_(2.0 * third) + kappa_right_ * (t - 2.0 * third);
    return W_(t);
  }

  // Largest ratio of each listed deviation to its bound (max |a| or max a^2), sampled.
  double error_constant(int samples = 2001) const {
    const double p1 = phi(), p2 = p1 * p1;
    if (p1 == 0.0) return 0.0;
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
      const double t = -1.0 + 2.0 * i / (samples - 1.0);
      auto g = at(t);
      const double cL = 1.0 - 0.5 * aL_ * aL_, cR = 1.0 - 0.5 * aR_ * aR_;
      const double e2 = std::abs(g.g2 - cL * t) + std::abs(g.g2 - cR * t);
      const double e3 = std::abs(g.g3 - aL_ * t) + std::abs(g.g3 - aR_ * t);
      const double e2p = std::abs(g.d2 - cL) + std::abs(g.d2 - cR);
      const double e3p = std::abs(g.d3 - aL_) + std::abs(g.d3 - aR_);
      const double epp = std::hypot(g.dd2, g.dd3);
      const double n2 = std::abs(g.g2 - t * g.d2), n3 = std::abs(g.g3 - t * g.d3);
      worst = std::max({worst, e2 / p2, e3 / p1, e2p / p2, e3p / p1, epp / p1, n2 / p2, n3 / p1,
                        std::abs(omega(t)) / p2});
    }
    return worst;
  }

 private:
  static constexpr double third = 1.0 / 3.0;

  double cdf(double t) const {
    if (t <= -third) return 0.0;
    if (t >= third) return 1.0;
    return H_(t);
  }
  double cdf_int(double t) const {
    if (t <= -third) return 0.0;
    if (t >= third) return t;
    return Hint_(t);
  }

  // gamma3 and its first two derivatives
  std::array<double, 3> raw3(double t) const {
    std::array<double, 3> r{aL_ * t + jump_ * cdf_int(t), aL_ + jump_ * cdf(t), jump_ * rho_(t)};
    if (t > third && t < 2.0 * third) {
      const double s = 2.0 * t - 1.0;
      r[0] += lambda_ * rho_(s);
      r[1] += 2.0 * lambda_ * rho_(s, 1);
      r[2] += 4.0 * lambda_ * rho_(s, 2);
    }
    return r;
  }

  double kappa_direct(double t) const {
    auto g3 = raw3(t);
    const double d2 = d2_at_left_ - 0.5 * S_(t);
    const double dd2 = -0.5 * g3[1] * g3[1];
    return (1.0 + dd2) * (d2 - t * dd2) + g3[1] * (g3[0] - t * g3[1]);
  }

  double aL_, aR_, jump_ = 0.0;
  Bump rho_;
  double lambda_ = 0.0;
  PiecewiseChebyshev H_, Hint_, S_, K_, W_;
  double d2_at_left_ = 0.0, d2_at_right_ = 0.0, kappa_right_ = 0.0, E_ = 0.0;
};

}  // namespace blisterlab
