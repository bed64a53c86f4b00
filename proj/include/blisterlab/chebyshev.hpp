#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "core.hpp"

namespace blisterlab {

// Piecewise Chebyshev interpolant on given panel edges. Used where nested antiderivatives
// of smooth but sharply varying functions are needed at arbitrary points.
class PiecewiseChebyshev {
 public:
  PiecewiseChebyshev() = default;

  template <class F>
  PiecewiseChebyshev(F&& f, std::vector<double> edges, int degree) : edges_(std::move(edges)), deg_(degree) {
    if (edges_.size() < 2 || degree < 2) throw ValidationError("chebyshev fit needs >= 1 panel and degree >= 2");
    const int n = degree + 1;
    coef_.assign((edges_.size() - 1) * n, 0.0);
    std::vector<double> vals(n);
    for (std::size_t p = 0; p + 1 < edges_.size(); ++p) {
      const double a = edges_[p], b = edges_[p + 1];
      for (int j = 0; j < n; ++j) {
        const double xi = std::cos(kPi * (j + 0.5) / n);
        vals[j] = f(0.5 * (a + b) + 0.5 * (b - a) * xi);
      }
      for (int k = 0; k < n; ++k) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += vals[j] * std::cos(kPi * k * (j + 0.5) / n);
        coef_[p * n + k] = (k == 0 ? 1.0 : 2.0) * s / n;
      }
    }
  }

  static std::vector<double> uniform_edges(double a, double b, int panels) { return linspace_breaks(a, b, panels); }

  double lo() const { return edges_.front(); }
  double hi() const { return edges_.back(); }

  double operator()(double x) const {
    const std::size_t p = panel_of(x);
    const double a = edges_[p], b = edges_[p + 1];
    const double xi = std::clamp((2.0 * x - a - b) / (b - a), -1.0, 1.0);
    const int n = deg_ + 1;
    const double* c = &coef_[p * n];
    double b1 = 0.0, b2 = 0.0;
    for (int k = n - 1; k >= 1; --k) {
      const double t = 2.0 * xi * b1 - b2 + c[k];
      b2 = b1;
      b1 = t;
    }
    return xi * b1 - b2 + c[0];
  }

  // G(x) = int_lo^x f.
  PiecewiseChebyshev antiderivative() const {
    PiecewiseChebyshev out;
    out.edges_ = edges_;
    out.deg_ = deg_ + 1;
    const int n = deg_ + 1, m = n + 1;
    out.coef_.assign((edges_.size() - 1) * m, 0.0);
    double running = 0.0;
    for (std::size_t p = 0; p + 1 < edges_.size(); ++p) {
      const double half = 0.5 * (edges_[p + 1] - edges_[p]);
      auto a = [&](int k) { return (k < n) ? coef_[p * n + k] : 0.0; };
      double* C = &out.coef_[p * m];
      C[1] = half * (a(0) - 0.5 * a(2));
      for (int k = 2; k < m; ++k) C[k] = half * (a(k - 1) - a(k + 1)) / (2.0 * k);
      // value at xi = -1: sum C_k (-1)^k
      double at_left = 0.0;
      for (int k = 1; k < m; ++k) at_left += (k % 2 ? -C[k] : C[k]);
      C[0] = running - at_left;
      double at_right = 0.0;
      for (int k = 0; k < m; ++k) at_right += C[k];
      running = at_right;
    }
    return out;
  }

 private:
  std::size_t panel_of(double x) const {
    if (x <= edges_.front()) return 0;
    if (x >= edges_.back()) return edges_.size() - 2;
    auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
    return std::size_t(it - edges_.begin()) - 1;
  }

  std::vector<double> edges_;
  int deg_ = 0;
  std::vector<double> coef_;
};

}  // namespace blisterlab
