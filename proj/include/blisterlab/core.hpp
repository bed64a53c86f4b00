#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/special_functions/legendre.hpp>

namespace blisterlab {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTorusTol = 1e-12;

// Error taxonomy. The CLI maps ValidationError to exit 1 and NumericalError to exit 2.
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct GeometryError : ValidationError {
  using ValidationError::ValidationError;
};
struct AdmissibilityError : ValidationError {
  using ValidationError::ValidationError;
};
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------- parameters

struct Params {
  double h = 0.0;
  double eta = 0.0;
  double alpha_s = 0.0;
  double alpha_m = 1.0;
  double theta = 0.5;

  Params() = default;
  Params(double h_, double eta_, double alpha_s_, double alpha_m_, double theta_)
      : h(h_), eta(eta_), alpha_s(alpha_s_), alpha_m(alpha_m_), theta(theta_) {
    validate();
  }

  // allow_flat admits eta = 0 (the trivially flat problem used by the minimizer)
  void validate(bool allow_flat = false) const {
    auto bad = [](const char* what) { throw ValidationError(std::string("invalid parameter: ") + what); };
    if (!(std::isfinite(h) && h > 0.0)) bad("h must be > 0");
    if (!(std::isfinite(eta) && (eta > 0.0 || (allow_flat && eta == 0.0)))) bad("eta must be > 0");
    if (!(std::isfinite(alpha_s) && alpha_s > 0.0)) bad("alpha_s must be > 0");
    if (!(std::isfinite(alpha_m) && alpha_m > 0.0)) bad("alpha_m must be > 0");
    if (!(std::isfinite(theta) && theta > 0.0 && theta < 1.0)) bad("theta must lie in (0,1)");
    if (eta > 1.0) bad("eta must be <= 1");
    if (h > 1.0) bad("h must be <= 1");
  }

  Params with(const std::string& name, double v) const {
    Params p = *this;
    if (name == "h") p.h = v;
    else if (name == "eta") p.eta = v;
    else if (name == "alpha_s" || name == "alpha-s") p.alpha_s = v;
    else if (name == "alpha_m" || name == "alpha-m") p.alpha_m = v;
    else if (name == "theta") p.theta = v;
    else throw ValidationError("unknown parameter name: " + name);
    p.validate();
    return p;
  }

  double get(const std::string& name) const {
    if (name == "h") return h;
    if (name == "eta") return eta;
    if (name == "alpha_s" || name == "alpha-s") return alpha_s;
    if (name == "alpha_m" || name == "alpha-m") return alpha_m;
    if (name == "theta") return theta;
    throw ValidationError("unknown parameter name: " + name);
  }
};

struct EnergyBreakdown {
  double membrane = 0.0;
  double bending = 0.0;
  double substrate = 0.0;
  double total = 0.0;

  static EnergyBreakdown make(double m, double b, double s) {
    EnergyBreakdown e{m, b, s, 0.0};
    e.total = m + b + s;
    return e;
  }
};

// ---------------------------------------------------------------- small linear algebra

struct Vec2 {
  double x = 0.0, y = 0.0;
  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
};

// Row-major 2x2; for a vector field, row i holds the gradient of component i.
struct Mat2 {
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
  Mat2 operator+(const Mat2& o) const { return {a + o.a, b + o.b, c + o.c, d + o.d}; }
  Mat2 operator-(const Mat2& o) const { return {a - o.a, b - o.b, c - o.c, d - o.d}; }
  Mat2 operator*(double s) const { return {a * s, b * s, c * s, d * s}; }
  Mat2 operator*(const Mat2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
  Vec2 operator*(Vec2 v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
  Mat2 transpose() const { return {a, c, b, d}; }
  double frob2() const { return a * a + b * b + c * c + d * d; }
  static Mat2 outer(Vec2 u, Vec2 v) { return {u.x * v.x, u.x * v.y, u.y * v.x, u.y * v.y}; }
  static Mat2 identity() { return {1, 0, 0, 1}; }
};

// ---------------------------------------------------------------- quadrature

struct GaussRule {
  std::vector<double> x;  // nodes on [-1,1]
  std::vector<double> w;
};

// Gauss-Legendre nodes from Boost's Legendre zeros; cached per order.
inline const GaussRule& gauss_rule(int order) {
  if (order < 2) throw ValidationError("quadrature order must be >= 2");
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;
  GaussRule r;
  auto zeros = boost::math::legendre_p_zeros<double>(order);  // non-negative zeros, ascending
  std::vector<std::pair<double, double>> nw;
  for (double z : zeros) {
    double dp = boost::math::legendre_p_prime<double>(order, z);
    double wt = 2.0 / ((1.0 - z * z) * dp * dp);
    nw.emplace_back(z, wt);
    if (z != 0.0) nw.emplace_back(-z, wt);
  }
  std::sort(nw.begin(), nw.end());
  for (auto& [z, wt] : nw) {
    r.x.push_back(z);
    r.w.push_back(wt);
  }
  return cache.emplace(order, std::move(r)).first->second;
}

// Gauss rule mapped to [a,b]; calls fn(x, weight).
template <class Fn>
void for_each_gauss(double a, double b, int order, Fn&& fn) {
  const GaussRule& g = gauss_rule(order);
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  for (std::size_t i = 0; i < g.x.size(); ++i) fn(mid + half * g.x[i], half * g.w[i]);
}

template <class F>
double gauss_integrate(F&& f, double a, double b, int order) {
  double s = 0.0;
  for_each_gauss(a, b, order, [&](double x, double wt) { s += wt * f(x); });
  return s;
}

// Composite Gauss over consecutive breakpoints; the integrand is sampled only inside
// each smooth piece, never across a breakpoint.
template <class F>
double quad_piecewise(F&& f, const std::vector<double>& pieces, int order = 16) {
  if (pieces.size() < 2) throw ValidationError("quad_piecewise needs at least two breakpoints");
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < pieces.size(); ++k) {
    const double a = pieces[k], b = pieces[k + 1];
    if (!(b >= a)) throw ValidationError("breakpoints must be non-decreasing");
    if (b == a) continue;
    double s = 0.0;
    for_each_gauss(a, b, order, [&](double x, double wt) {
      const double v = f(x);
      if (!std::isfinite(v))
        throw NumericalError("non-finite integrand on piece " + std::to_string(k) + " [" + std::to_string(a) +
                             ", " + std::to_string(b) + "]");
      s += wt * v;
    });
    total += s;
  }
  return total;
}

// Uniform subdivision of [a,b] into n panels (breakpoint list).
inline std::vector<double> linspace_breaks(double a, double b, int n) {
  std::vector<double> v(n + 1);
  for (int i = 0; i <= n; ++i) v[i] = a + (b - a) * double(i) / double(n);
  v.back() = b;
  return v;
}

// ---------------------------------------------------------------- torus helpers

inline double wrap01(double x) {
  double r = x - std::floor(x);
  if (r >= 1.0 - kTorusTol) r = 0.0;
  return r;
}

inline double wrap_period(double x, double period) { return period * wrap01(x / period); }

// ---------------------------------------------------------------- bonded sets

struct Interval {
  double a = 0.0, b = 0.0;
  double length() const { return b - a; }
};

// Closed sub-intervals of the unit torus. Members are stored unwrapped with a in [0,1)
// and b possibly beyond 1 when the interval crosses the seam.
class BondedSet1D {
 public:
  BondedSet1D() = default;
  explicit BondedSet1D(std::vector<Interval> iv) : iv_(std::move(iv)) {
    for (auto& i : iv_) {
      if (!(i.b > i.a)) throw GeometryError("bonded interval must have positive length");
      if (i.b - i.a > 1.0 + kTorusTol) throw GeometryError("bonded interval longer than the torus");
      const double shift = std::floor(i.a);
      i.a -= shift;
      i.b -= shift;
    }
    std::sort(iv_.begin(), iv_.end(), [](const Interval& p, const Interval& q) { return p.a < q.a; });
    check_disjoint();
  }

  const std::vector<Interval>& intervals() const { return iv_; }
  bool empty() const { return iv_.empty(); }

  bool contains(double x, double tol = kTorusTol) const {
    const double y = wrap01(x);
    for (const auto& i : iv_) {
      for (double img : {y - 1.0, y, y + 1.0})
        if (img >= i.a - tol && img <= i.b + tol) return true;
    }
    return false;
  }

  BondedSet1D translated(double shift) const {
    std::vector<Interval> out;
    for (const auto& i : iv_) out.push_back({i.a + shift, i.b + shift});
    return BondedSet1D(out);
  }

  // Equispaced family: n intervals of length theta/n, the k-th starting at (k + offset)/n.
  static BondedSet1D equispaced(int n, double theta, double offset = 0.0) {
    if (n < 1) throw ValidationError("interval count must be >= 1");
    std::vector<Interval> v;
    for (int k = 0; k < n; ++k) {
      const double a = (k + offset) / n;
      v.push_back({a, a + theta / n});
    }
    return BondedSet1D(v);
  }

 private:
  void check_disjoint() const {
    for (std::size_t k = 0; k < iv_.size(); ++k) {
      const Interval& p = iv_[k];
      const Interval& q = iv_[(k + 1) % iv_.size()];
      if (iv_.size() == 1) {
        break;
      }
      const double next_a = (k + 1 < iv_.size()) ? q.a : q.a + 1.0;
      if (p.b > next_a + kTorusTol) throw GeometryError("bonded intervals overlap");
    }
  }
  std::vector<Interval> iv_;
};

struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;
  double area() const { return (x1 - x0) * (y1 - y0); }
};

// Bonded region of the 2D torus: disjoint axis-aligned rectangles, minus an explicitly
// measured set of lifted slivers (strips where a smoothed fold pulls the film off the
// substrate). `lifted_area` is that measured area; `cells_per_side` > 1 means the
// rectangles describe one periodic cell that repeats.
struct BondedSet2D {
  std::vector<Rect> rects;
  double lifted_area = 0.0;
  int cells_per_side = 1;
  std::function<bool(Vec2)> lifted;  // optional membership test for the slivers (cell coordinates)

  bool contains(Vec2 p) const {
    const double period = 1.0 / cells_per_side;
    Vec2 q{wrap_period(p.x, period), wrap_period(p.y, period)};
    for (const auto& r : rects) {
      for (double ox : {-period, 0.0, period})
        for (double oy : {-period, 0.0, period}) {
          Vec2 s{q.x + ox, q.y + oy};
          if (s.x >= r.x0 - kTorusTol && s.x <= r.x1 + kTorusTol && s.y >= r.y0 - kTorusTol &&
              s.y <= r.y1 + kTorusTol) {
            if (lifted && lifted(s)) return false;
            return true;
          }
        }
    }
    return false;
  }
};

inline double measure(const BondedSet1D& s) {
  double m = 0.0;
  for (const auto& i : s.intervals()) m += i.length();
  return m;
}

inline double measure(const BondedSet2D& s) {
  double cell = 0.0;
  for (std::size_t i = 0; i < s.rects.size(); ++i) {
    for (std::size_t j = i + 1; j < s.rects.size(); ++j) {
      const Rect &a = s.rects[i], &b = s.rects[j];
      const double ox = std::min(a.x1, b.x1) - std::max(a.x0, b.x0);
      const double oy = std::min(a.y1, b.y1) - std::max(a.y0, b.y0);
      if (ox > kTorusTol && oy > kTorusTol) throw GeometryError("bonded rectangles overlap");
    }
    cell += s.rects[i].area();
  }
  cell -= s.lifted_area;
  return cell * double(s.cells_per_side) * double(s.cells_per_side);
}

}  // namespace blisterlab
