#include "doctest.h"

#include <random>

#include <blisterlab/construct1d.hpp>
#include <blisterlab/energy.hpp>

using namespace blisterlab;

namespace {
// Reference values from high-precision integration of the displacement formulas.
constexpr double kSingleBending = 1.5791367041742975e-05;   // h=0.01, eta=0.1, theta=0.5
constexpr double kPeriodicBending = 0.0031582734083485946;  // same params, l=0.1
constexpr double kPeriodicSubstrate = 7.216878364870322e-05;
constexpr double kSquareSubstrate = 5.773502691896258e-06;  // w = eta*(x,y) centred on [0,0.1]^2, eta=0.1

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

struct ConstantField : Field2D {
  Sample2D eval(Vec2) const override { return {}; }
  std::vector<Patch> patches() const override {
    return {polygon_patch({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, [this](Vec2 p) { return eval(p); }, false)};
  }
};

struct SquareField : Field2D {
  double s, eta;
  SquareField(double s_, double e_) : s(s_), eta(e_) {}
  Sample2D eval(Vec2 p) const override {
    Sample2D r;
    r.w = {eta * (p.x - s / 2), eta * (p.y - s / 2)};
    r.grad_w = Mat2{eta, 0, 0, eta};
    return r;
  }
  std::vector<Patch> patches() const override {
    return {polygon_patch({{0, 0}, {s, 0}, {s, s}, {0, s}}, [this](Vec2 p) { return eval(p); }, true, false)};
  }
};
}  // namespace

TEST_CASE("flat film energy is the misfit term alone") {
  Params p(0.01, 0.1, 1.0, 1.0, 0.5);
  auto c = flat_profile(0.5);
  auto e = energy_1d(c.profile, c.omega, p);
  CHECK(std::abs(e.membrane - 1e-4) < 1e-16);
  CHECK(e.bending == 0.0);
  CHECK(e.substrate == 0.0);
  ConstantField zero;
  auto e2 = energy_2d(zero, BondedSet2D{}, p);
  CHECK(std::abs(e2.membrane - 2e-4) < 1e-16);
}

TEST_CASE("single blister energy matches reference integration") {
  Params p(0.01, 0.1, 1.0, 1.0, 0.5);
  auto c = single_blister(p);
  auto e = energy_1d(c.profile, c.omega, p);
  CHECK(std::abs(e.membrane - 5e-5) < 1e-15);
  CHECK(rel(e.bending, kSingleBending) < 1e-10);
  CHECK(e.substrate == 0.0);
}

TEST_CASE("periodic array energy matches reference integration") {
  Params p(0.01, 0.1, 1.0, 1.0, 0.5);
  auto c = periodic_array(p, 0.1);
  auto e = energy_1d(c.profile, c.omega, p);
  CHECK(std::abs(e.membrane) < 1e-10);
  CHECK(rel(e.bending, kPeriodicBending) < 1e-10);
  CHECK(rel(e.substrate, kPeriodicSubstrate) < 1e-10);
  // the global product equals the per-component sum for equal components
  CHECK(rel(substrate_by_component_1d(c.profile, c.omega, p), e.substrate) < 1e-12);
}

TEST_CASE("inadmissible profile is rejected") {
  Params p(0.01, 0.1, 1.0, 1.0, 0.5);
  auto c = single_blister(p);
  BondedSet1D wrong({{0.1, 0.4}});
  CHECK_THROWS_AS(energy_1d(c.profile, wrong, p), AdmissibilityError);
}

TEST_CASE("energy is invariant under joint torus translation") {
  Params p(0.002, 0.05, 0.3, 1.0, 0.4);
  auto c = periodic_array(p, 1.0 / 3.0);
  auto e0 = energy_1d(c.profile, c.omega, p);
  const double shift = 0.137;
  Profile1D moved{[&](double x) { return c.profile.at(x - shift); }, {}};
  moved.pieces = {0.0};
  for (double x : c.profile.pieces) moved.pieces.push_back(wrap01(x + shift));
  moved.pieces.push_back(1.0);
  std::sort(moved.pieces.begin(), moved.pieces.end());
  auto e1 = energy_1d(moved, c.omega.translated(shift), p);
  CHECK(rel(e1.total, e0.total) < 1e-9);
  CHECK(rel(e1.substrate, e0.substrate) < 1e-9);
}

TEST_CASE("dimensional form at scale L equals L times unit energy") {
  Params p(0.003, 0.05, 0.5, 2.0, 0.4);
  auto c = periodic_array(p, 0.25);
  auto unit = energy_1d(c.profile, c.omega, p);
  for (double L : {0.5, 3.0, 17.0}) {
    auto dim = energy_1d_dimensional(c.profile, c.omega, p, L);
    CHECK(rel(dim.total, L * unit.total) < 1e-9);
  }
}

TEST_CASE("substrate is 2-homogeneous in w") {
  Params p(0.01, 0.1, 1.0, 1.0, 0.5);
  auto c = periodic_array(p, 0.2);
  Profile1D scaled{[&](double x) {
                     auto s = c.profile.at(x);
                     s.w *= 3.0;
                     s.dw *= 3.0;
                     return s;
                   },
                   c.profile.pieces};
  CHECK(rel(energy_1d(scaled, c.omega, p).substrate, 9.0 * energy_1d(c.profile, c.omega, p).substrate) < 1e-12);
}

TEST_CASE("square substrate matches closed-form polynomial integral") {
  Params p(0.01, 0.1, 1.0, 1.0, 0.5);
  SquareField f(0.1, 0.1);
  BondedSet2D om;
  om.rects = {{0, 0, 0.1, 0.1}};
  auto e = energy_2d(f, om, p);
  CHECK(rel(e.substrate, kSquareSubstrate) < 1e-12);
  om.rects = {{0, 0, 0.2, 0.1}};
  CHECK_THROWS_AS(energy_2d(f, om, p), GeometryError);
}

TEST_CASE("h_half_norm_sq on known modes") {
  const int n = 256;
  std::vector<double> c(n, 3.0), cosv(n), cos5(n);
  for (int i = 0; i < n; ++i) {
    cosv[i] = std::cos(2 * kPi * i / n);
    cos5[i] = std::cos(2 * kPi * 5 * i / n);
  }
  CHECK(std::abs(h_half_norm_sq(c)) < 1e-20);
  CHECK(std::abs(h_half_norm_sq(cosv) - 0.5) < 1e-13);
  CHECK(std::abs(h_half_norm_sq(cos5) - 2.5) < 1e-12);
  CHECK_THROWS_AS(h_half_norm_sq(std::vector<double>(100, 0.0)), ValidationError);
  std::vector<double> bad(8, 0.0);
  bad[3] = std::nan("");
  CHECK_THROWS_AS(h_half_norm_sq(bad), NumericalError);
}

TEST_CASE("interpolation inequality holds with one constant on random fields") {
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> g;
  const int n = 512;
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int kmax = 1 + trial % 60;
    std::vector<double> f(n, 0.0);
    std::vector<double> a(kmax + 1), b(kmax + 1);
    for (int k = 1; k <= kmax; ++k) {
      a[k] = g(rng) / std::pow(k, 0.5 * (trial % 4));
      b[k] = g(rng) / std::pow(k, 0.5 * (trial % 4));
    }
    double l2 = 0.0, d2 = 0.0;
    for (int k = 1; k <= kmax; ++k) {
      l2 += 0.5 * (a[k] * a[k] + b[k] * b[k]);
      d2 += 0.5 * std::pow(2 * kPi * k, 2) * (a[k] * a[k] + b[k] * b[k]);
    }
    for (int i = 0; i < n; ++i)
      for (int k = 1; k <= kmax; ++k) {
        const double ph = 2 * kPi * k * i / double(n);
        f[i] += a[k] * std::cos(ph) + b[k] * std::sin(ph);
      }
    worst = std::max(worst, h_half_norm_sq(f) / (std::sqrt(l2) * std::sqrt(d2)));
  }
  CHECK(worst <= 2 * kPi);
  MESSAGE("empirical interpolation constant " << worst);
}
