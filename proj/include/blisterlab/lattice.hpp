#pragma once
// Smoothed periodic lattice: the piecewise-linear cell with every fold replaced by a ridge,
// every fold junction capped by a ball on which the field is blended to a constant, and the
// bonded square enlarged so that the bonded area stays theta after the lifted slivers.

#include <boost/math/tools/roots.hpp>

#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "core.hpp"
#include "corner.hpp"
#include "energy.hpp"
#include "ridge.hpp"

namespace blisterlab {

struct LatticeOptions {
  double sigma_scale = 1.0;  // multiplies the energy-balancing ridge width
  double tau_scale = 1.0;    // multiplies tan(half the smallest angle between folds at a junction)
  bool check_geometry = true;
};

struct LatticeFold {
  Vec2 a, c, e, n;  // endpoints, unit tangent, unit normal (local y direction)
  double length = 0.0;
  int va = -1, vc = -1;
  bool bonded_edge = false;  // bonded side is always local y < 0
  FoldData data;
  double sigma = 0.0, tau = 0.0;
  std::shared_ptr<const Ridge> ridge;
};

struct Incidence {
  int fold = -1;
  Vec2 shift;  // fold + shift touches the vertex
  Vec2 out;    // unit direction leaving the vertex along the fold
};

struct LatticeVertex {
  Vec2 pos;
  double sigma = 0.0;  // blend radius; the cap is the ball of radius 2 sigma
  std::vector<Incidence> folds;
  double square_angle = std::numeric_limits<double>::quiet_NaN();  // start of the bonded quarter, if any
};

struct LatticeDiagnostics {
  double s_plain = 0.0, s_bonded = 0.0;
  double alpha = 0.0;
  double lifted_area = 0.0;  // per cell
  double sigma_min = 0.0, sigma_max = 0.0;
  double phi_min = 0.0, phi_max = 0.0;
  double tau_min = 0.0;
  double ball_clearance = 0.0;  // min over vertex pairs of dist - sum of cap radii
  double fold_clearance = 0.0;  // min over non-adjacent folds of dist - sum of max widths
};

namespace detail {

inline Sample2D to_global(const Sample2D& s, Vec2 e, Vec2 n) {
  const Mat2 R{e.x, n.x, e.y, n.y};
  const Mat2 Rt = R.transpose();
  Sample2D g;
  g.w = R * s.w;
  g.grad_w = R * s.grad_w * Rt;
  g.u = s.u;
  g.grad_u = R * s.grad_u;
  g.hess_u = R * s.hess_u * Rt;
  return g;
}

inline Sample2D add(const Sample2D& p, const Sample2D& q) {
  Sample2D r;
  r.w = p.w + q.w;
  r.grad_w = p.grad_w + q.grad_w;
  r.u = p.u + q.u;
  r.grad_u = p.grad_u + q.grad_u;
  r.hess_u = p.hess_u + q.hess_u;
  return r;
}

// Smooth step: 1 on [0,1], 0 on [2,inf); returns value, d/dr, d2/dr2.
inline std::array<double, 3> cap_profile(double r) {
  if (r <= 1.0) return {1.0, 0.0, 0.0};
  if (r >= 2.0) return {0.0, 0.0, 0.0};
  const double z = 2.0 - r;
  const double q = 1.0 / z - 1.0 / (1.0 - z);
  const double q1 = -1.0 / (z * z) - 1.0 / ((1.0 - z) * (1.0 - z));
  const double q2 = 2.0 / (z * z * z) - 2.0 / ((1.0 - z) * (1.0 - z) * (1.0 - z));
  const double S = q > 700.0 ? 0.0 : 1.0 / (1.0 + std::exp(q));
  const double S1 = -S * (1.0 - S) * q1;
  const double S2 = -S1 * (1.0 - 2.0 * S) * q1 - S * (1.0 - S) * q2;
  return {S, -S1, S2};
}

inline double segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 d = b - a;
  const double t = std::clamp((p - a).dot(d) / d.dot(d), 0.0, 1.0);
  return (p - (a + d * t)).norm();
}

inline double segments_distance(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  auto cross = [](Vec2 u, Vec2 v) { return u.x * v.y - u.y * v.x; };
  const double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a), d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
  if (((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0))) return 0.0;
  return std::min({segment_distance(a, c, d), segment_distance(b, c, d), segment_distance(c, a, b),
                   segment_distance(d, a, b)});
}

inline double angle_of(Vec2 v) { return std::atan2(v.y, v.x); }

inline double angular_gap(double p, double q) {
  double d = std::fmod(std::abs(p - q), 2.0 * std::numbers::pi);
  return std::min(d, 2.0 * std::numbers::pi - d);
}

}  // namespace detail

class LatticeField : public Field2D {
 public:
  LatticeField(const Params& p, double l, LatticeOptions opt = {}) : prm_(p), opt_(opt) {
    p.validate();
    const double n = 1.0 / l;
    cells_ = int(std::lround(n));
    if (std::abs(n - cells_) > 1e-9 * n) throw ValidationError("1/l must be an integer (cell count)");
    if (!(opt.sigma_scale > 0.0 && opt.tau_scale > 0.0)) throw ValidationError("lattice scales must be positive");
    diag_.s_plain = std::sqrt(p.theta) * l;
    const double s = enlarged_side(l);
    cell_ = std::make_unique<Step1Cell>(p.eta, l, s);
    build();
    if (opt_.check_geometry) check_geometry();
  }

  const Step1Cell& cell() const { return *cell_; }
  const std::vector<LatticeFold>& folds() const { return folds_; }
  const std::vector<LatticeVertex>& vertices() const { return verts_; }
  const LatticeDiagnostics& diagnostics() const { return diag_; }
  int cells_per_side() const override { return cells_; }

  BondedSet2D bonded_set() const {
    BondedSet2D om;
    const double s = cell_->s();
    om.rects = {{0, 0, s, s}};
    om.lifted_area = diag_.lifted_area;
    om.cells_per_side = cells_;
    om.lifted = [this](Vec2 q) { return lifted(q); };
    return om;
  }

  // Whether a cell-coordinate point of the bonded square lies in a lifted sliver.
  bool lifted(Vec2 q) const {
    const double l = cell_->l();
    for (const auto& f : folds_) {
      if (!f.bonded_edge) continue;
      for (int i = -1; i <= 1; ++i)
        for (int j = -1; j <= 1; ++j)
          if (in_sliver(f, q - Vec2{i * l, j * l})) return true;
    }
    return false;
  }

  Sample2D eval(Vec2 p) const override {
    const double l = cell_->l();
    const Vec2 q{wrap_period(p.x, l), wrap_period(p.y, l)};
    for (int i = -1; i <= 1; ++i)
      for (int j = -1; j <= 1; ++j) {
        const Vec2 k{i * l, j * l};
        for (std::size_t v = 0; v < verts_.size(); ++v)
          if ((q - k - verts_[v].pos).norm() < 2.0 * verts_[v].sigma) return blended(verts_[v], q - k);
      }
    Sample2D out = cell_->eval(q);
    for (const auto& f : folds_)
      for (int i = -2; i <= 2; ++i)
        for (int j = -2; j <= 2; ++j) {
          const Vec2 r = q - Vec2{i * l, j * l} - f.a;
          const double x = r.dot(f.e);
          if (x <= 0.0 || x >= f.length) continue;
          const Sample2D d = f.ridge->delta(x, r.dot(f.n));
          if (d.u != 0.0 || d.w.x != 0.0 || d.w.y != 0.0) out = detail::add(out, detail::to_global(d, f.e, f.n));
        }
    return out;
  }

  std::vector<Patch> patches() const override {
    std::vector<Patch> out;
    for (std::size_t k = 0; k < folds_.size(); ++k) out.push_back(ridge_patch(k));
    for (std::size_t v = 0; v < verts_.size(); ++v) out.push_back(cap_patch(v));
    out.push_back(polygon_patch(
        {{0, 0}, {cell_->s(), 0}, {cell_->s(), cell_->s()}, {0, cell_->s()}},
        [this](Vec2 x) { return cell_->eval(x); }, true, false));
    out.back().kind = "substrate";
    for (std::size_t k = 0; k < folds_.size(); ++k)
      if (folds_[k].bonded_edge) out.push_back(sliver_patch(k));
    for (std::size_t v = 0; v < verts_.size(); ++v)
      if (!std::isnan(verts_[v].square_angle)) out.push_back(quarter_patch(v));
    return out;
  }

 private:
  Params prm_;
  LatticeOptions opt_;
  int cells_ = 1;
  std::unique_ptr<Step1Cell> cell_;
  std::vector<LatticeFold> folds_;
  std::vector<LatticeVertex> verts_;
  LatticeDiagnostics diag_;

  // --- construction

  static std::vector<std::vector<Incidence>> incidences(const Step1Cell& cell, const std::vector<LatticeFold>& folds) {
    const double l = cell.l();
    auto vs = cell.vertices();
    std::vector<std::vector<Incidence>> inc(vs.size());
    auto lattice_shift = [&](Vec2 d) {
      return std::abs(d.x / l - std::round(d.x / l)) < 1e-9 && std::abs(d.y / l - std::round(d.y / l)) < 1e-9;
    };
    for (std::size_t v = 0; v < vs.size(); ++v)
      for (std::size_t k = 0; k < folds.size(); ++k) {
        const auto& f = folds[k];
        if (lattice_shift(vs[v] - f.a)) inc[v].push_back({int(k), vs[v] - f.a, f.e});
        if (lattice_shift(vs[v] - f.c)) inc[v].push_back({int(k), vs[v] - f.c, f.e * -1.0});
      }
    return inc;
  }

  // Sharp folds with their frame and slopes, bonded edges oriented with the bonded side at y < 0.
  static std::vector<LatticeFold> sharp_folds(const Step1Cell& cell) {
    std::vector<LatticeFold> out;
    for (const auto& seg : cell.folds()) {
      LatticeFold f;
      f.a = seg.a;
      f.c = seg.c;
      f.va = seg.va;
      f.vc = seg.vc;
      f.bonded_edge = seg.bonded_edge;
      for (int pass = 0; pass < 2; ++pass) {
        f.length = (f.c - f.a).norm();
        f.e = (f.c - f.a) * (1.0 / f.length);
        f.n = {-f.e.y, f.e.x};
        const Vec2 mid = (f.a + f.c) * 0.5;
        const double eps = 1e-6 * f.length;
        const Sample2D left = cell.eval(mid - f.n * eps), right = cell.eval(mid + f.n * eps);
        const double cl = left.grad_u.dot(f.e), cr = right.grad_u.dot(f.e);
        if (std::abs(cl - cr) > 1e-9 * (1.0 + std::abs(cl)))
          throw NumericalError("fold is not a crease of a continuous field");
        f.data = {f.length, 0.5 * (cl + cr), left.grad_u.dot(f.n), right.grad_u.dot(f.n)};
        if (!(f.bonded_edge && left.u != 0.0)) break;
        std::swap(f.a, f.c);
        std::swap(f.va, f.vc);
      }
      out.push_back(f);
    }
    return out;
  }

  static std::vector<double> taus(const Step1Cell& cell, const std::vector<LatticeFold>& folds, double scale) {
    auto inc = incidences(cell, folds);
    std::vector<double> tau(folds.size(), 1.0);
    for (const auto& at : inc)
      for (const auto& i : at) {
        double gap = std::numbers::pi;
        for (const auto& j : at)
          if (&i != &j) gap = std::min(gap, detail::angular_gap(detail::angle_of(i.out), detail::angle_of(j.out)));
        tau[i.fold] = std::min(tau[i.fold], std::tan(0.5 * gap));
      }
    for (double& t : tau) t *= scale;
    return tau;
  }

  double fold_sigma(const FoldData& d) const {
    const double phi = std::max(std::abs(d.alpha_left), std::abs(d.alpha_right));
    return opt_.sigma_scale * balanced_sigma(prm_, phi);
  }

  // Side of the bonded square such that its area minus the slivers is theta l^2.
  double enlarged_side(double l) {
    const double target = prm_.theta * l * l;
    auto lifted_total = [&](double s) {
      Step1Cell c(prm_.eta, l, s);
      auto fs = sharp_folds(c);
      auto tau = taus(c, fs, opt_.tau_scale);
      // the four bonded edges are congruent
      double area = 0.0;
      for (std::size_t k = 0; k < fs.size(); ++k)
        if (fs[k].bonded_edge) {
          area = RidgeWidth(tau[k], fold_sigma(fs[k].data), fs[k].length).area() / 3.0;
          break;
        }
      return 4.0 * area;
    };
    auto gap = [&](double s) { return s * s - lifted_total(s) - target; };
    const double lo = diag_.s_plain;
    double hi = std::sqrt(target + 2.0 * lifted_total(lo));
    for (int i = 0; gap(hi) <= 0.0; ++i) {
      hi = lo + 2.0 * (hi - lo);
      if (i > 20 || hi >= l) throw GeometryError("cannot enlarge the bonded square to keep the bonded fraction");
    }
    boost::uintmax_t iters = 100;
    auto r = boost::math::tools::toms748_solve(gap, lo, hi, boost::math::tools::eps_tolerance<double>(50), iters);
    return 0.5 * (r.first + r.second);
  }

  void build() {
    folds_ = sharp_folds(*cell_);
    auto tau = taus(*cell_, folds_, opt_.tau_scale);
    diag_.s_bonded = cell_->s();
    diag_.alpha = cell_->alpha();
    diag_.sigma_min = diag_.phi_min = diag_.tau_min = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < folds_.size(); ++k) {
      auto& f = folds_[k];
      f.tau = tau[k];
      f.sigma = fold_sigma(f.data);
      // congruent folds share one ridge
      for (std::size_t j = 0; j < k && !f.ridge; ++j) {
        const auto& g = folds_[j];
        if (g.tau == f.tau && g.sigma == f.sigma && g.data.length == f.data.length &&
            g.data.du_dx == f.data.du_dx && g.data.alpha_left == f.data.alpha_left &&
            g.data.alpha_right == f.data.alpha_right)
          f.ridge = g.ridge;
      }
      if (!f.ridge) f.ridge = std::make_shared<Ridge>(f.data, f.sigma, f.tau);
      if (f.bonded_edge) diag_.lifted_area += f.ridge->width().area() / 3.0;
      diag_.sigma_min = std::min(diag_.sigma_min, f.sigma);
      diag_.sigma_max = std::max(diag_.sigma_max, f.sigma);
      diag_.phi_min = std::min(diag_.phi_min, f.ridge->phi());
      diag_.phi_max = std::max(diag_.phi_max, f.ridge->phi());
      diag_.tau_min = std::min(diag_.tau_min, f.tau);
    }
    auto inc = incidences(*cell_, folds_);
    auto vs = cell_->vertices();
    const double s = cell_->s(), l = cell_->l();
    for (std::size_t v = 0; v < vs.size(); ++v) {
      LatticeVertex lv;
      lv.pos = vs[v];
      lv.folds = inc[v];
      for (const auto& i : lv.folds) lv.sigma = std::max(lv.sigma, folds_[i.fold].sigma);
      // the four corners of the corner square are corners of bonded squares
      const Vec2 p = vs[v];
      if (std::abs(p.y - s) < 1e-12 * l || std::abs(p.y - l) < 1e-12 * l) {
        const bool right = std::abs(p.x - l) < 1e-12 * l, top = std::abs(p.y - l) < 1e-12 * l;
        if (right || std::abs(p.x - s) < 1e-12 * l) {
          const double pi = std::numbers::pi;
          lv.square_angle = right ? (top ? 0.0 : 1.5 * pi) : (top ? 0.5 * pi : pi);
        }
      }
      verts_.push_back(lv);
    }
    // the membership mask must agree with the sliver area the bisection used
    diag_.lifted_area = 0.0;
    for (const auto& f : folds_)
      if (f.bonded_edge) diag_.lifted_area += f.ridge->width().area() / 3.0;
  }

  void check_geometry() {
    const double l = cell_->l();
    double ball = std::numeric_limits<double>::infinity(), fold = ball;
    for (std::size_t v = 0; v < verts_.size(); ++v)
      for (std::size_t w = 0; w < verts_.size(); ++w)
        for (int i = -1; i <= 1; ++i)
          for (int j = -1; j <= 1; ++j) {
            if (v == w && i == 0 && j == 0) continue;
            const double d = (verts_[v].pos - verts_[w].pos - Vec2{i * l, j * l}).norm();
            ball = std::min(ball, d - 2.0 * verts_[v].sigma - 2.0 * verts_[w].sigma);
          }
    auto touches = [&](const LatticeFold& f, Vec2 sh, const LatticeFold& g) {
      for (Vec2 p : {f.a + sh, f.c + sh})
        for (Vec2 q : {g.a, g.c})
          if ((p - q).norm() < 1e-9 * l) return true;
      return false;
    };
    for (std::size_t a = 0; a < folds_.size(); ++a)
      for (std::size_t b = 0; b < folds_.size(); ++b)
        for (int i = -2; i <= 2; ++i)
          for (int j = -2; j <= 2; ++j) {
            const Vec2 sh{i * l, j * l};
            if ((a == b && i == 0 && j == 0) || touches(folds_[a], sh, folds_[b])) continue;
            const double d = detail::segments_distance(folds_[a].a + sh, folds_[a].c + sh, folds_[b].a, folds_[b].c);
            fold = std::min(fold, d - folds_[a].ridge->width().max_width() - folds_[b].ridge->width().max_width());
          }
    // caps must also stay clear of folds that do not end at them
    for (const auto& v : verts_)
      for (std::size_t k = 0; k < folds_.size(); ++k)
        for (int i = -2; i <= 2; ++i)
          for (int j = -2; j <= 2; ++j) {
            const Vec2 sh{i * l, j * l};
            const auto& f = folds_[k];
            if ((f.a + sh - v.pos).norm() < 1e-9 * l || (f.c + sh - v.pos).norm() < 1e-9 * l) continue;
            const double d = detail::segment_distance(v.pos, f.a + sh, f.c + sh);
            ball = std::min(ball, d - 2.0 * v.sigma - f.ridge->width().max_width());
          }
    diag_.ball_clearance = ball;
    diag_.fold_clearance = fold;
    if (!(ball > 0.0)) throw GeometryError("junction caps overlap each other or a neighbouring ridge");
    if (!(fold > 0.0)) throw GeometryError("ridges of non-adjacent folds overlap");
  }

  // --- evaluation

  bool in_sliver(const LatticeFold& f, Vec2 q) const {
    const Vec2 r = q - f.a;
    const double x = r.dot(f.e), y = r.dot(f.n);
    if (!(x > 0.0 && x < f.length && y < 0.0)) return false;
    return -y < f.ridge->width().eval(x)[0] / 3.0;
  }

  Sample2D full(const LatticeFold& f, double x, double t, const std::array<double, 4>& F) const {
    const double y = t * F[0];
    const Vec2 p = f.a + f.e * x + f.n * y;
    const Sample2D d = Ridge::difference(f.ridge->reduced(x, t, F), f.ridge->hat(x, y));
    return detail::add(cell_->eval(p), detail::to_global(d, f.e, f.n));
  }

  Sample2D unblended(const LatticeVertex& v, Vec2 p) const {
    Sample2D out = cell_->eval(p);
    for (const auto& i : v.folds) {
      const auto& f = folds_[i.fold];
      const Vec2 r = p - i.shift - f.a;
      const Sample2D d = f.ridge->delta(r.dot(f.e), r.dot(f.n));
      out = detail::add(out, detail::to_global(d, f.e, f.n));
    }
    return out;
  }

  Sample2D blended(const LatticeVertex& v, Vec2 p) const {
    const Vec2 rel = p - v.pos;
    const double r = rel.norm();
    const Sample2D apex = cell_->eval(v.pos);
    const auto cp = detail::cap_profile(r / v.sigma);
    if (cp[0] == 1.0) {
      Sample2D s;
      s.w = apex.w;
      s.u = apex.u;
      return s;
    }
    const Sample2D t = unblended(v, p);
    if (cp[0] == 0.0) return t;
    const Vec2 nr = rel * (1.0 / r);
    const Vec2 grho = nr * (cp[1] / v.sigma);
    const Mat2 nn = Mat2::outer(nr, nr);
    const Mat2 hrho = nn * (cp[2] / (v.sigma * v.sigma)) + (Mat2::identity() - nn) * (cp[1] / (v.sigma * r));
    const double rho = cp[0], keep = 1.0 - rho;
    const Vec2 dw = apex.w - t.w;
    const double du = apex.u - t.u;
    Sample2D s;
    s.w = t.w + dw * rho;
    s.grad_w = t.grad_w * keep + Mat2::outer(dw, grho);
    s.u = t.u + du * rho;
    s.grad_u = t.grad_u * keep + grho * du;
    s.hess_u = t.hess_u * keep + hrho * du - Mat2::outer(grho, t.grad_u) - Mat2::outer(t.grad_u, grho);
    return s;
  }

  // --- quadrature

  Patch ridge_patch(std::size_t k) const {
    Patch p;
    p.kind = "ridge";
    p.visit = [this, k](const QuadSpec& q, const SampleSink& sink) {
      const auto& f = folds_[k];
      const double ra = 2.0 * verts_[f.va].sigma, rc = 2.0 * verts_[f.vc].sigma;
      f.ridge->for_each_node(ra, rc, -1.0, 1.0, q.order, [&](double x, double t, const auto& F, double wt) {
        sink(f.a + f.e * x + f.n * (t * F[0]), full(f, x, t, F), wt);
      });
    };
    return p;
  }

  // Angular breakpoints around a cap: uniform, refined where ridges leave the vertex.
  std::vector<double> cap_angles(const LatticeVertex& v, double from, double to, int panels) const {
    std::vector<double> br;
    for (int i = 0; i <= panels; ++i) br.push_back(from + (to - from) * i / panels);
    for (const auto& inc : v.folds) {
      const double psi = detail::angle_of(inc.out), om = std::atan(2.0 * folds_[inc.fold].tau / 3.0);
      for (double k : {-1.5, -1.0, -0.5, -0.2, 0.0, 0.2, 0.5, 1.0, 1.5})
        for (double turn : {-2.0, 0.0, 2.0}) {
          const double a = psi + k * om + turn * std::numbers::pi;
          if (a > from && a < to) br.push_back(a);
        }
    }
    std::sort(br.begin(), br.end());
    br.erase(std::unique(br.begin(), br.end(), [](double a, double b) { return b - a < 1e-12; }), br.end());
    return br;
  }

  template <class Fn>
  void polar_nodes(const LatticeVertex& v, double from, double to, int panels, int order, Fn&& fn) const {
    const auto ang = cap_angles(v, from, to, panels);
    const std::vector<double> rad{0.0, v.sigma, 1.25 * v.sigma, 1.5 * v.sigma, 1.75 * v.sigma, 2.0 * v.sigma};
    for (std::size_t a = 0; a + 1 < ang.size(); ++a)
      for_each_gauss(ang[a], ang[a + 1], order, [&](double phi, double wp) {
        const Vec2 dir{std::cos(phi), std::sin(phi)};
        for (std::size_t r = 0; r + 1 < rad.size(); ++r)
          for_each_gauss(rad[r], rad[r + 1], order, [&](double rr, double wr) { fn(v.pos + dir * rr, wp * wr * rr); });
      });
  }

  Patch cap_patch(std::size_t vi) const {
    Patch p;
    p.kind = "vertex";
    p.visit = [this, vi](const QuadSpec& q, const SampleSink& sink) {
      const auto& v = verts_[vi];
      polar_nodes(v, -std::numbers::pi, std::numbers::pi, q.grid2d / 2, q.order,
                  [&](Vec2 x, double wt) { sink(x, blended(v, x), wt); });
    };
    return p;
  }

  // Bonded-side half of a bonded-edge ridge outside the caps: swap the sharp field for the
  // smoothed one on the part that stays bonded (t <= -1/3).
  Patch sliver_patch(std::size_t k) const {
    Patch p;
    p.kind = "substrate";
    p.bonded = true;
    p.membrane = false;
    p.visit = [this, k](const QuadSpec& q, const SampleSink& sink) {
      const auto& f = folds_[k];
      const double ra = 2.0 * verts_[f.va].sigma, rc = 2.0 * verts_[f.vc].sigma;
      f.ridge->for_each_node(ra, rc, -1.0, 0.0, q.order, [&](double x, double t, const auto& F, double wt) {
        const Vec2 at = f.a + f.e * x + f.n * (t * F[0]);
        sink(at, cell_->eval(at), -wt);
        if (t < -1.0 / 3.0) sink(at, full(f, x, t, F), wt);
      });
    };
    return p;
  }

  // Quarter of a cap inside the bonded square: sharp field out, blended field in where bonded.
  Patch quarter_patch(std::size_t vi) const {
    Patch p;
    p.kind = "substrate";
    p.bonded = true;
    p.membrane = false;
    p.visit = [this, vi](const QuadSpec& q, const SampleSink& sink) {
      const auto& v = verts_[vi];
      const double l = cell_->l();
      polar_nodes(v, v.square_angle, v.square_angle + 0.5 * std::numbers::pi, q.grid2d / 2, q.order,
                  [&](Vec2 x, double wt) {
                    sink(x, cell_->eval(x), -wt);
                    const Vec2 c{wrap_period(x.x, l), wrap_period(x.y, l)};
                    if (!lifted(c)) sink(x, blended(v, x), wt);
                  });
    };
    return p;
  }
};

struct LatticeConstruction {
  std::shared_ptr<const LatticeField> field;
  BondedSet2D omega;
};

inline LatticeConstruction assemble_lattice(const Params& p, double l, LatticeOptions opt = {}) {
  auto f = std::make_shared<LatticeField>(p, l, opt);
  return {f, f->bonded_set()};
}

}  // namespace blisterlab
