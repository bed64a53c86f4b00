#pragma once

#include <array>
#include <cmath>
#include <memory>
#include <vector>

#include "core.hpp"
#include "energy.hpp"

namespace blisterlab {

// Apex offset of the corner folds: the only d in (0,1) making the inner triangle shear-free.
inline const double kCornerD = 3.0 - 2.0 * std::sqrt(2.0);

// Shear residual of the inner corner triangle as a function of the apex offset d.
inline double corner_shear_residual(double alpha, double d) {
  return alpha - alpha / d + std::sqrt(2.0 * alpha) * std::sqrt(2.0 * alpha / d);
}

// Lift of the effective strain in the debonded strips when the bonded square has side s in a cell of side l.
inline double strip_alpha(double eta, double l, double s) { return eta * l / (l - s); }

struct CornerValue {
  Vec2 w;
  Mat2 grad_w;
  double u = 0.0;
  Vec2 grad_u;
};

// Piecewise-linear zero-strain map on [-1,1]^2 with w = -alpha (x,y) and the strip slopes on
// the boundary; 16 triangles generated by the 8 symmetries from one fundamental pair.
class CornerMap {
 public:
  explicit CornerMap(double alpha) : alpha_(alpha), m_(std::sqrt(2.0 * alpha)) {
    if (!(alpha > 0.0)) throw ValidationError("corner strain must be > 0");
  }

  double alpha() const { return alpha_; }
  double slope() const { return m_; }
  static double apex() { return kCornerD; }

  CornerValue eval(Vec2 p) const {
    Mat2 Q = Mat2::identity();
    Vec2 q = p;
    if (q.x < 0.0) reflect(Q, q, Mat2{-1, 0, 0, 1});
    if (q.y > 0.0) reflect(Q, q, Mat2{1, 0, 0, -1});
    if (q.x > -q.y) reflect(Q, q, Mat2{0, -1, -1, 0});
    CornerValue f = fundamental(q);
    CornerValue out;
    const Mat2 Qt = Q.transpose();
    out.w = Qt * f.w;
    out.grad_w = Qt * f.grad_w * Q;
    out.u = f.u;
    out.grad_u = Qt * f.grad_u;
    return out;
  }

  // All 16 triangles (vertex triples) in normalized coordinates.
  static std::vector<std::array<Vec2, 3>> triangles() {
    const double d = kCornerD;
    const std::array<Vec2, 3> t1{Vec2{1, -1}, Vec2{0, -d}, Vec2{0, -1}};
    const std::array<Vec2, 3> t2{Vec2{0, -d}, Vec2{0, 0}, Vec2{1, -1}};
    std::vector<std::array<Vec2, 3>> out;
    for (const Mat2& Q : group())
      for (const auto& t : {t1, t2}) out.push_back({Q * t[0], Q * t[1], Q * t[2]});
    return out;
  }

  static std::vector<Mat2> group() {
    std::vector<Mat2> g;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c) {
          Mat2 Q = Mat2::identity();
          if (a) Q = Mat2{-1, 0, 0, 1} * Q;
          if (b) Q = Mat2{1, 0, 0, -1} * Q;
          if (c) Q = Mat2{0, -1, -1, 0} * Q;
          g.push_back(Q);
        }
    return g;
  }

 private:
  static void reflect(Mat2& Q, Vec2& q, const Mat2& S) {
    q = S * q;
    Q = S * Q;
  }

  // Fundamental triangle C(0,0), A(0,-1), B(1,-1), split at D(0,-d).
  CornerValue fundamental(Vec2 q) const {
    const double d = kCornerD, a = alpha_, m = m_;
    CornerValue v;
    if (q.y < -d - (1.0 - d) * q.x) {
      v.w = {-a * q.x, a};
      v.grad_w = Mat2{-a, 0, 0, 0};
      v.u = m * (1.0 - q.x);
      v.grad_u = {-m, 0};
    } else {
      const double k = a - a / d;
      v.w = {-a * q.x, k * q.x - (a / d) * q.y};
      v.grad_w = Mat2{-a, 0, k, -a / d};
      const double md = m / std::sqrt(d);
      v.u = m * std::sqrt(2.0) + m * q.x + md * q.y;
      v.grad_u = {m, md};
    }
    return v;
  }

  double alpha_, m_;
};

// Sharp fold segment in cell coordinates (endpoints may lie outside the cell).
struct FoldSegment {
  Vec2 a, c;
  int va = -1, vc = -1;      // vertex ids of the endpoints
  bool bonded_edge = false;  // runs along the edge of the bonded square
};

// One periodic cell of the piecewise-linear construction: bonded square [0,s]^2, two strips
// of slope sqrt(2 alpha) and the corner square built from the CornerMap.
class Step1Cell {
 public:
  Step1Cell(double eta, double l, double s) : eta_(eta), l_(l), s_(s), corner_(strip_alpha(eta, l, s)) {
    if (!(l > 0.0 && s > 0.0 && s < l)) throw ValidationError("bonded square must fit strictly inside the cell");
    r_ = 0.5 * (l - s);
    mid_ = 0.5 * (l + s);
    k_ = -eta * s / (l - s);
  }

  double l() const { return l_; }
  double s() const { return s_; }
  double eta() const { return eta_; }
  double alpha() const { return corner_.alpha(); }
  double corner_half() const { return r_; }
  Vec2 corner_center() const { return {mid_, mid_}; }
  const CornerMap& corner() const { return corner_; }

  Sample2D eval(Vec2 p) const {
    const double x = wrap_period(p.x, l_), y = wrap_period(p.y, l_);
    const double m = corner_.slope(), e = eta_, s = s_;
    Sample2D r;
    const bool xin = x <= s, yin = y <= s;
    if (xin && yin) {
      r.w = {e * (x - s / 2), e * (y - s / 2)};
      r.grad_w = Mat2{e, 0, 0, e};
    } else if (!xin && yin) {
      r.w = {e * s / 2 + k_ * (x - s), e * (y - s / 2)};
      r.grad_w = Mat2{k_, 0, 0, e};
      const bool rising = (x - s) < (l_ - x);
      r.u = m * std::min(x - s, l_ - x);
      r.grad_u = {rising ? m : -m, 0};
    } else if (xin && !yin) {
      r.w = {e * (x - s / 2), e * s / 2 + k_ * (y - s)};
      r.grad_w = Mat2{e, 0, 0, k_};
      const bool rising = (y - s) < (l_ - y);
      r.u = m * std::min(y - s, l_ - y);
      r.grad_u = {0, rising ? m : -m};
    } else {
      const Vec2 xi{(x - mid_) / r_, (y - mid_) / r_};
      auto c = corner_.eval(xi);
      r.w = c.w * r_ + Vec2{e * (x - mid_), e * (y - mid_)};
      r.grad_w = c.grad_w + Mat2{e, 0, 0, e};
      r.u = r_ * c.u;
      r.grad_u = c.grad_u;
    }
    return r;
  }

  // Convex pieces on which the map is linear; the first is the bonded square.
  std::vector<std::vector<Vec2>> pieces() const {
    const double s = s_, l = l_, m = mid_;
    std::vector<std::vector<Vec2>> out;
    out.push_back({{0, 0}, {s, 0}, {s, s}, {0, s}});
    out.push_back({{s, 0}, {m, 0}, {m, s}, {s, s}});
    out.push_back({{m, 0}, {l, 0}, {l, s}, {m, s}});
    out.push_back({{0, s}, {s, s}, {s, m}, {0, m}});
    out.push_back({{0, m}, {s, m}, {s, l}, {0, l}});
    for (const auto& t : CornerMap::triangles()) {
      std::vector<Vec2> tri;
      for (Vec2 v : t) tri.push_back(Vec2{m, m} + v * r_);
      out.push_back(tri);
    }
    return out;
  }

  // Vertex ids: 0 centre, 1-4 apex points (S, N, W, E), 5-8 corners of the corner square
  // (s,s), (l,s), (s,l), (l,l). Positions are unwrapped.
  std::vector<Vec2> vertices() const {
    const double d = kCornerD * r_, m = mid_, s = s_, l = l_;
    return {{m, m}, {m, m - d}, {m, m + d}, {m - d, m}, {m + d, m}, {s, s}, {l, s}, {s, l}, {l, l}};
  }

  std::vector<FoldSegment> folds() const {
    auto v = vertices();
    const Vec2 down{0, l_}, left{l_, 0};
    std::vector<FoldSegment> f;
    for (int p = 5; p <= 8; ++p) f.push_back({v[0], v[p], 0, p, false});
    for (int q = 1; q <= 4; ++q) f.push_back({v[0], v[q], 0, q, false});
    const int apex_corners[4][2] = {{5, 6}, {7, 8}, {5, 7}, {6, 8}};  // S, N, W, E
    for (int q = 1; q <= 4; ++q)
      for (int p : apex_corners[q - 1]) f.push_back({v[q], v[p], q, p, false});
    f.push_back({v[1], v[2] - down, 1, 2, false});  // vertical midline across the strip
    f.push_back({v[3], v[4] - left, 3, 4, false});  // horizontal midline
    f.push_back({v[7] - down, v[5], 7, 5, true});   // x = s
    f.push_back({v[8] - down, v[6], 8, 6, true});   // x = l
    f.push_back({v[6] - left, v[5], 6, 5, true});   // y = s
    f.push_back({v[8] - left, v[7], 8, 7, true});   // y = l
    return f;
  }

 private:
  double eta_, l_, s_;
  CornerMap corner_;
  double r_ = 0.0, mid_ = 0.0, k_ = 0.0;
};

// The piecewise-linear construction repeated over the unit torus.
class Step1Field : public Field2D {
 public:
  Step1Field(const Params& p, double l) : cell_(p.eta, l, std::sqrt(p.theta) * l) {
    const double n = 1.0 / l;
    cells_ = int(std::lround(n));
    if (std::abs(n - cells_) > 1e-9 * n) throw ValidationError("1/l must be an integer (cell count)");
  }
  const Step1Cell& cell() const { return cell_; }
  Sample2D eval(Vec2 p) const override { return cell_.eval(p); }
  std::vector<Patch> patches() const override {
    std::vector<Patch> out;
    auto pcs = cell_.pieces();
    for (std::size_t i = 0; i < pcs.size(); ++i) {
      // evaluate at a point pulled slightly toward the centroid so piece edges pick the right branch
      Vec2 cen{0, 0};
      for (Vec2 v : pcs[i]) cen = cen + v * (1.0 / pcs[i].size());
      out.push_back(polygon_patch(
          pcs[i], [this, cen](Vec2 x) { return cell_.eval(x + (cen - x) * 1e-9); }, i == 0, true));
    }
    return out;
  }
  int cells_per_side() const override { return cells_; }

 private:
  Step1Cell cell_;
  int cells_ = 1;
};

struct Construction2D {
  std::shared_ptr<const Field2D> field;
  BondedSet2D omega;
};

inline Construction2D cell_assembly(const Params& p, double l) {
  p.validate();
  auto f = std::make_shared<Step1Field>(p, l);
  BondedSet2D om;
  const double s = f->cell().s();
  om.rects = {{0, 0, s, s}};
  om.cells_per_side = f->cells_per_side();
  return {f, om};
}

}  // namespace blisterlab
