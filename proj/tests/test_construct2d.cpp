#include "doctest.h"

#include <blisterlab/construct2d.hpp>
#include <blisterlab/scaling.hpp>

#include <random>

using namespace blisterlab;

namespace {
double strain_sq(const Sample2D& s) {
  // symmetric in-plane strain plus the von Karman term, misfit not subtracted
  const double exx = s.grad_w.a + 0.5 * s.grad_u.x * s.grad_u.x;
  const double eyy = s.grad_w.d + 0.5 * s.grad_u.y * s.grad_u.y;
  const double exy = 0.5 * (s.grad_w.b + s.grad_w.c) + 0.5 * s.grad_u.x * s.grad_u.y;
  return exx * exx + eyy * eyy + 2 * exy * exy;
}
}  // namespace

TEST_CASE("corner apex is the only zero of the shear identity") {
  const double alpha = 0.3;
  int roots = 0;
  double found = 0.0;
  const int n = 20000;
  for (int i = 1; i < n; ++i) {
    double a = double(i) / n, b = double(i + 1) / n;
    if (b >= 1.0) break;
    if (corner_shear_residual(alpha, a) * corner_shear_residual(alpha, b) > 0) continue;
    for (int k = 0; k < 200; ++k) {
      const double m = 0.5 * (a + b);
      (corner_shear_residual(alpha, a) * corner_shear_residual(alpha, m) <= 0 ? b : a) = m;
    }
    found = 0.5 * (a + b);
    ++roots;
  }
  CHECK(roots == 1);
  CHECK(found == doctest::Approx(0.17157287525381).epsilon(1e-10));
  CHECK(std::abs(corner_shear_residual(alpha, kCornerD)) < 1e-12);
}

TEST_CASE("corner map is strain free on every triangle") {
  CornerMap m(0.3);
  for (const auto& tri : CornerMap::triangles()) {
    const Vec2 c{(tri[0].x + tri[1].x + tri[2].x) / 3, (tri[0].y + tri[1].y + tri[2].y) / 3};
    auto v = m.eval(c);
    Sample2D s;
    s.grad_w = v.grad_w;
    s.grad_u = v.grad_u;
    CHECK(strain_sq(s) < 1e-24);
  }
  CHECK(m.slope() == doctest::Approx(std::sqrt(0.6)));
}

TEST_CASE("step-1 cell: zero membrane, continuity and strip slope") {
  const Params p(1e-3, 0.08, 0.1, 1.0, 0.25);
  Step1Field f(p, 0.125);
  const auto& cell = f.cell();
  // strip slope sqrt(2 eta (1 + sqrt(theta)/(1 - sqrt(theta))))
  const auto strip = cell.eval({0.8 * cell.l(), 0.2 * cell.s()});
  CHECK(std::abs(strip.grad_u.x) == doctest::Approx(0.565685424949238).epsilon(1e-12));

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0.0, cell.l());
  double worst_strain = 0.0, worst_jump = 0.0;
  for (int i = 0; i < 2000; ++i) {
    const Vec2 q{U(rng), U(rng)};
    const auto s = cell.eval(q);
    worst_strain = std::max(worst_strain, membrane_density(s, p.eta));
    const double d = 1e-9;
    const auto t = cell.eval({q.x + d, q.y - d});
    worst_jump = std::max({worst_jump, std::abs(t.u - s.u) / d, std::abs(t.w.x - s.w.x) / d,
                           std::abs(t.w.y - s.w.y) / d});
  }
  CHECK(worst_strain < 1e-24);
  CHECK(worst_jump < 5.0);  // Lipschitz, so no jumps across triangle edges

  auto con = cell_assembly(p, 0.125);
  auto e = energy_2d(*con.field, con.omega, p);
  CHECK(std::abs(e.membrane) < 1e-10);
  CHECK(e.bending == 0.0);
}

TEST_CASE("step-1 substrate per cell grows like the cube of the cell size") {
  const Params p(1e-3, 0.05, 0.2, 1.0, 0.25);
  std::vector<double> l, per_cell;
  for (int k = 2; k <= 5; ++k) {
    const double len = std::ldexp(1.0, -k);
    auto con = cell_assembly(p, len);
    l.push_back(len);
    per_cell.push_back(energy_2d(*con.field, con.omega, p).substrate * len * len);
  }
  CHECK(fit_power_law(l, per_cell).exponent == doctest::Approx(3.0).epsilon(0.05 / 3));
}

TEST_CASE("gamma curve without a fold is the straight line") {
  GammaCurve g(0.0, 0.0);
  CHECK(g.lambda() == 0.0);
  for (double t : {-1.0, -0.5, 0.0, 0.3, 1.0}) {
    auto pt = g.at(t);
    CHECK(std::abs(pt.g2 - t) < 1e-14);
    CHECK(std::abs(pt.g3) < 1e-14);
  }
}

TEST_CASE("gamma curve: speed condition, linear ends and endpoint values") {
  GammaCurve g(0.2, -0.2);
  double worst = 0.0;
  for (int i = 0; i <= 400; ++i) {
    const double t = -1.0 + i / 200.0;
    const auto p = g.at(t);
    worst = std::max(worst, std::abs(p.d2 + 0.5 * p.d3 * p.d3 - 1.0));
    if (t > -0.999 && t < 0.999) {
      const double e = 1e-6;
      CHECK(std::abs((g.at(t + e).g2 - g.at(t - e).g2) / (2 * e) - p.d2) < 1e-7);
    }
  }
  CHECK(worst < 1e-10);
  CHECK(g.at(-1.0).g3 == doctest::Approx(-0.2).epsilon(1e-12));
  CHECK(g.at(-0.8).g3 == doctest::Approx(0.2 * -0.8).epsilon(1e-12));
  CHECK(g.at(0.9).g3 == doctest::Approx(-0.2 * 0.9).epsilon(1e-12));
  CHECK(g.at(1.0).g2 - g.at(-1.0).g2 == doctest::Approx(1.96).epsilon(1e-10));
}

TEST_CASE("gamma defect vanishes at fourth order in the fold angle") {
  std::vector<double> phi, e;
  for (double a : {0.02, 0.04, 0.08, 0.16}) {
    GammaCurve g(a, -0.5 * a);
    phi.push_back(a);
    e.push_back(std::abs(g.defect()));
  }
  CHECK(fit_power_law(phi, e).exponent >= 3.8);
}

TEST_CASE("ridge width and boundary traces") {
  const Params p(1e-3, 0.01, 0.1, 1.0, 0.5);
  CHECK(balanced_sigma(p, 0.1) == doctest::Approx(1e-2));

  FoldData fold{1.0, 0.05, 0.1, -0.08};
  Ridge r(fold, 0.01, 0.5);
  double worst_trace = 0.0, worst_y = 0.0;
  for (double x : {0.05, 0.2, 0.5, 0.9}) {
    const double f = r.width().eval(x)[0];
    for (double side : {-1.0, 1.0}) {
      const auto d = r.delta(x, side * f * (1 - 1e-13));
      worst_trace = std::max({worst_trace, std::abs(d.u), std::abs(d.w.x), std::abs(d.w.y)});
    }
    for (double t : {-0.7, -0.1, 0.4, 0.95}) {
      double tt = 0.0;
      std::array<double, 4> F;
      REQUIRE(r.locate(x, t * f, tt, F));
      const auto s = r.reduced(x, tt, F);
      worst_y = std::max(worst_y, std::abs(s.grad_w.d + 0.5 * s.grad_u.y * s.grad_u.y));
    }
  }
  CHECK(worst_trace < 1e-10);
  CHECK(worst_y < 1e-10);
  CHECK_THROWS_AS(Ridge(fold, 0.2, 0.5), GeometryError);
}

TEST_CASE("lattice length and regime flags") {
  const auto b = bounds_2d(Params(1e-4, 0.01, 0.1, 1.0, 0.5));
  CHECK(b.l2 == doctest::Approx(1e-3).epsilon(1e-12));
  CHECK(snap_cell_length(0.0104) == doctest::Approx(1.0 / 96));
  const auto stiff = bounds_2d(Params(1e-8, 0.9, 1e-6, 1.0, 0.5));
  CHECK_FALSE(stiff.cond_lattice_pays);
  const auto thick = bounds_2d(Params(0.5, 1e-3, 1e-6, 1.0, 0.5));
  CHECK_FALSE(thick.cond_small_cell);
}

TEST_CASE("assembled lattice is admissible with the prescribed bonded fraction") {
  const Params p(1e-5, 0.01, 1e-7, 1.0, 0.25);
  const double l = snap_cell_length(lattice_length(p));
  auto con = assemble_lattice(p, l);
  const auto& d = con.field->diagnostics();
  CHECK(d.ball_clearance > 0.0);
  CHECK(d.fold_clearance > 0.0);
  CHECK(measure(con.omega) == doctest::Approx(p.theta).epsilon(1e-9));
  auto e = energy_2d(*con.field, con.omega, p);
  CHECK(e.total > 0.0);
  CHECK(e.bending > e.membrane);
  // the energy stays within the lattice bound up to a (large) constant
  CHECK(e.total < 1e8 * bounds_2d(p).upper_lattice);
}

TEST_CASE("lattice with ridges too wide for its folds is rejected") {
  const Params p(1e-5, 0.01, 1e-6, 1.0, 0.25);
  CHECK_THROWS_AS(assemble_lattice(p, snap_cell_length(lattice_length(p))), GeometryError);
}
