// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <blisterlab/blisterlab.hpp>
#include <blisterlab/cli.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

using namespace blisterlab;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, const std::function<Verdict()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!v.pass) ++failures;
  std::printf("%s  %2d  %-34s %s  [%.1fs]\n", v.pass ? "PASS" : "FAIL", id, title, v.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char b[96];
  std::snprintf(b, sizeof b, f, a);
  return b;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

std::vector<double> geometric(double a, double b, int n) { return log_axis(a, b, n); }

// 1 ---------------------------------------------------------------------------------------
Verdict zero_membrane() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> th(0.1, 0.9), le(-3.0, -0.5);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const Params p(1e-3, std::pow(10.0, le(rng)), 0.3, 1.0, th(rng));
    // the single blister relaxes only the blister; the bonded interval keeps w = 0 and
    // carries the misfit, so the identity is checked on [0, 1 - theta]
    auto s = single_blister(p);
    const double blister = p.alpha_m * p.h * quad_piecewise(
                                                 [&](double x) {
                                                   auto q = s.profile.at(x);
                                                   return std::pow(q.dw + 0.5 * q.du * q.du - p.eta, 2);
                                                 },
                                                 linspace_breaks(0.0, 1.0 - p.theta, 8), 24);
    worst = std::max(worst, std::abs(blister));
    auto a = periodic_array(p, 1.0 / 7);
    worst = std::max(worst, std::abs(energy_1d(a.profile, a.omega, p).membrane));
    auto c = cell_assembly(p, 0.25);
    worst = std::max(worst, std::abs(energy_2d(*c.field, c.omega, p).membrane));
  }
  return {worst < 1e-10, fmt("max |membrane| = %.2e over 20 draws", worst)};
}

// 2 ---------------------------------------------------------------------------------------
Verdict closed_forms() {
  double worst = 0.0;
  for (double theta : {0.2, 0.5, 0.8})
    for (double eta : {1e-3, 0.05}) {
      const Params p(2e-3, eta, 0.4, 1.0, theta);
      auto s = single_blister(p);
      worst = std::max(worst, rel(energy_1d(s.profile, s.omega, p).bending, single_bending_closed(p)));
      for (int n : {1, 4, 9}) {
        auto a = periodic_array(p, 1.0 / n);
        const auto e = energy_1d(a.profile, a.omega, p);
        worst = std::max(worst, rel(e.bending, periodic_bending_closed(p, 1.0 / n)));
        worst = std::max(worst, rel(e.substrate, periodic_substrate_closed(p, 1.0 / n)));
      }
    }
  return {worst < 1e-8, fmt("max relative deviation %.2e", worst)};
}

// 3 ---------------------------------------------------------------------------------------
Verdict scaling_1d() {
  const Params base(1e-5, 0.01, 0.1, 1.0, 0.5);
  struct Target {
    const char* vary;
    double from, to, exponent, tol;
  };
  std::ostringstream out;
  bool ok = true;
  for (const Target& t : {Target{"h", 1e-8, 1e-5, 1.0, 0.02}, Target{"eta", 1e-4, 1e-1, 5.0 / 3.0, 0.05},
                          Target{"alpha_s", 1e-3, 1.0, 2.0 / 3.0, 0.05}}) {
    SweepSpec s;
    s.family = Family::periodic1d;
    s.vary = t.vary;
    s.from = t.from;
    s.to = t.to;
    s.points = 10;
    s.base = base;
    auto rows = sweep(s);
    auto f = fit_exponent(rows, t.vary);
    const bool pass = std::abs(f.exponent - t.exponent) <= t.tol && f.excluded.empty();
    ok = ok && pass;
    out << t.vary << " " << fmt("%.4f", f.exponent) << (pass ? "" : "(!)") << "; ";
  }
  // theta enters through theta^{4/3} (1-theta)^{-2/3}
  std::vector<double> shape, energy;
  for (double th = 0.1; th < 0.91; th += 0.1) {
    Params p = base;
    p.h = 1e-7;
    p.theta = th;
    energy.push_back(periodic_array_energy(p, optimal_cell_count(p)).total);
    shape.push_back(std::pow(th, 4.0 / 3.0) / std::pow(1.0 - th, 2.0 / 3.0));
  }
  auto f = fit_power_law(shape, energy);
  const bool th_ok = std::abs(f.exponent - 1.0) < 0.02 && f.r2 >= 0.999;
  out << "theta-shape slope " << fmt("%.4f", f.exponent) << " R2 " << fmt("%.6f", f.r2);
  return {ok && th_ok, out.str()};
}

// 4 ---------------------------------------------------------------------------------------
Verdict corner_root() {
  const double alpha = 0.3;
  std::vector<double> roots;
  const int n = 100000;
  auto r = [&](double d) { return corner_shear_residual(alpha, d); };
  for (int i = 1; i < n - 1; ++i) {
    double a = double(i) / n, b = double(i + 1) / n;
    if (r(a) * r(b) > 0) continue;
    std::uintmax_t iterations = 200;
    auto root = boost::math::tools::toms748_solve(r, a, b, boost::math::tools::eps_tolerance<double>(52), iterations);
    roots.push_back(0.5 * (root.first + root.second));
  }
  const bool ok = roots.size() == 1 && std::abs(roots[0] - (3.0 - 2.0 * std::sqrt(2.0))) < 1e-10;
  return {ok, "roots found " + std::to_string(roots.size()) +
                  (roots.empty() ? std::string() : fmt(", |d - (3-2sqrt2)| = %.2e", std::abs(roots[0] - kCornerD)))};
}

// 5 ---------------------------------------------------------------------------------------
Verdict gamma_curve() {
  double speed = 0.0, consistency = 0.0;
  for (auto [aL, aR] : {std::pair{0.2, -0.2}, std::pair{0.3, 0.1}, std::pair{-0.15, 0.4}, std::pair{0.05, -0.25}}) {
    GammaCurve g(aL, aR);
    // pointwise on the derivatives the ridge uses, and the integrated components against
    // an independent quadrature of those derivatives
    for (int i = 0; i <= 400; ++i) {
      const double t = -1.0 + i / 200.0;
      const auto p = g.at(t);
      speed = std::max(speed, std::abs(p.d2 + 0.5 * p.d3 * p.d3 - 1.0));
      const auto br = linspace_breaks(-1.0, t, 4 + 2 * i);
      if (i > 0) {
        const double i2 = quad_piecewise([&](double s) { return g.at(s).d2; }, br, 20);
        const double i3 = quad_piecewise([&](double s) { return g.at(s).d3; }, br, 20);
        speed = std::max(speed, std::abs(p.g2 - g.at(-1.0).g2 - i2));
        speed = std::max(speed, std::abs(p.g3 - g.at(-1.0).g3 - i3));
      }
    }
    // both straight ends pass through the origin once gamma2 is integrated from the left end
    consistency = std::max(consistency, std::abs(g.at(1.0).g2 - (1.0 - 0.5 * aR * aR)));
    consistency = std::max(consistency, std::abs(g.at(1.0).g3 - aR));
  }
  std::vector<double> phi, defect;
  for (double a : geometric(0.01, 0.2, 6)) {
    GammaCurve g(a, -0.6 * a);
    phi.push_back(a);
    defect.push_back(std::abs(g.defect()));
  }
  const double order = fit_power_law(phi, defect).exponent;
  const bool ok = speed < 1e-10 && consistency < 1e-12 && order >= 3.8;
  std::ostringstream out;
  out << fmt("speed residual %.1e", speed) << fmt(", end mismatch %.1e", consistency)
      << fmt(", defect order %.3f", order);
  return {ok, out.str()};
}

// 6 ---------------------------------------------------------------------------------------
Verdict minimal_ridge() {
  std::vector<double> hs, eh, phis, ep;
  for (double h : geometric(1e-5, 1e-3, 5)) {
    const Params p(h, 0.01, 0.1, 1.0, 0.5);
    hs.push_back(h);
    eh.push_back(ridge_energy({FoldData{1.0, 0.0, 0.1, -0.1}, 1.0}, p).total);
  }
  for (double phi : geometric(0.02, 0.2, 5)) {
    const Params p(1e-4, 0.01, 0.1, 1.0, 0.5);
    phis.push_back(phi);
    ep.push_back(ridge_energy({FoldData{1.0, 0.0, phi, -phi}, 1.0}, p).total);
  }
  const double sh = fit_power_law(hs, eh).exponent, sp = fit_power_law(phis, ep).exponent;

  // traces on the edge of the smoothing region agree with the sharp fold
  Ridge r(FoldData{1.0, 0.04, 0.15, -0.1}, 0.01, 1.0);
  double trace = 0.0;
  for (int i = 1; i < 50; ++i) {
    const double x = i / 50.0, f = r.width().eval(x)[0];
    for (double side : {-1.0, 1.0}) {
      const auto d = r.delta(x, side * f * (1 - 1e-14));
      trace = std::max({trace, std::abs(d.w.x), std::abs(d.w.y), std::abs(d.u)});
    }
  }
  const bool ok = std::abs(sh - 8.0 / 3.0) <= 0.1 && std::abs(sp - 7.0 / 3.0) <= 0.15 && trace < 1e-10;
  std::ostringstream out;
  out << fmt("h slope %.4f", sh) << fmt(", phi slope %.4f", sp) << fmt(", trace mismatch %.1e", trace);
  return {ok, out.str()};
}

// 7 ---------------------------------------------------------------------------------------
Verdict lattice_scaling() {
  const Params base(1e-5, 0.01, 1e-7, 1.0, 0.25);
  struct Target {
    const char* vary;
    double from, to, exponent, tol;
  };
  std::ostringstream out;
  bool ok = true;
  for (const Target& t : {Target{"h", 3e-6, 3e-5, 1.0, 0.05}, Target{"eta", 2e-3, 2e-2, 27.0 / 16.0, 0.1},
                          Target{"alpha_s", 1e-8, 4e-7, 5.0 / 8.0, 0.05}}) {
    SweepSpec s;
    s.family = Family::lattice2d;
    s.vary = t.vary;
    s.from = t.from;
    s.to = t.to;
    s.points = 5;
    s.base = base;
    s.quad.grid2d = 32;
    s.workers = default_workers();
    auto rows = sweep(s);
    auto f = fit_exponent(rows, t.vary);
    const bool pass = std::abs(f.exponent - t.exponent) <= t.tol && f.excluded.empty();
    ok = ok && pass;
    out << t.vary << " " << fmt("%.4f", f.exponent) << (pass ? "" : "(!)") << "; ";
  }
  return {ok, out.str()};
}

// 8 ---------------------------------------------------------------------------------------
Verdict oracle() {
  const Params base(3e-3, 0.1, 1.0, 10.0, 0.5);
  const int n = 512, nmax = 16;
  double worst_gain = 0.0, worst_track = 1.0;
  std::vector<SweepRow> best_rows;
  std::vector<std::pair<Params, double>> all;
  std::ostringstream counts;
  for (double eta : geometric(0.003, 0.3, 5)) {
    Params p = base;
    p.eta = eta;
    auto b = best_over_blister_count(p, n, nmax, 0, {}, default_workers());
    for (int N = 1; N <= nmax; ++N) {
      const auto g = grid_equispaced(n, N, p.theta);
      Params q = p;
      q.theta = g.theta;
      double con = q.alpha_m * q.eta * q.eta * q.h;  // flat film fits any bonded set
      con = std::min(con, periodic_array_energy(q, N).total);
      if (N == 1) {
        auto s = single_blister(q);
        con = std::min(con, energy_1d(s.profile, s.omega, q).total);
      }
      worst_gain = std::max(worst_gain, con / b.totals[N - 1]);
      all.push_back({p, b.totals[N - 1]});
    }
    const double track = b.best_count * l_star(p);
    worst_track = std::abs(std::log(track)) > std::abs(std::log(worst_track)) ? track : worst_track;
    counts << b.best_count << " ";
    SweepRow row;
    row.params = p;
    row.energy = b.best.energy;
    best_rows.push_back(row);
  }
  auto cal = calibrate_constants({{"minimized", "eta", best_rows}});
  bool below = cal.c1.K1 > 0.0;
  for (const auto& [p, e] : all) below = below && e >= cal.c1.K1 * lower_1d_shape(p) * (1 - 1e-12);
  const bool ok = worst_gain <= 3.0 && worst_track >= 1.0 / 3.0 && worst_track <= 3.0 && below;
  std::ostringstream out;
  out << fmt("max construction/minimum %.3f", worst_gain) << fmt(", worst N*l* %.3f", worst_track)
      << ", N* = " << counts.str() << fmt(", K1 %.3g", cal.c1.K1);
  return {ok, out.str()};
}

// 9 ---------------------------------------------------------------------------------------
Verdict phase_diagram() {
  const Params ref(1e-5, 0.01, 1e-7, 1.0, 0.25);
  const int workers = default_workers();
  auto scan = scan_lattice_scale(ref, {100, 300, 1000, 3000}, 24, {}, workers);
  SweepSpec s;
  s.family = Family::lattice2d;
  s.vary = "h";
  s.from = 8e-10;
  s.to = 1.2e-7;
  s.points = 4;
  s.base = ref;
  s.lattice_scale = scan.best_scale;
  s.workers = workers;
  auto cal = calibrate_constants({{"lattice2d", "h", sweep(s)}}, 2.0, scan.best_scale);
  auto g = classify_phase(geometric(1e-8, 1e-4, 64), geometric(1e-12, 1.0, 64), Params(1e-8, 0.5, 0.5, 1.0, 0.25),
                          cal.c2);
  const int regions = count_regions(g);
  auto bc = extract_boundary(g, 'C', 'B');
  auto ba = extract_boundary(g, 'B', 'A');
  const bool ok = regions == 3 && bc.monotone && ba.monotone && bc.alpha_s.size() >= 4 && ba.alpha_s.size() >= 4 &&
                  std::abs(bc.slope - 2.0) <= 0.3 && std::abs(ba.slope - 2.0 / 17.0) <= 0.3;
  std::ostringstream out;
  out << "regions " << regions << fmt(", C|B slope %.3f", bc.slope) << fmt(", B|A slope %.3f", ba.slope)
      << fmt(", K6 %.1f", cal.c2.K6) << fmt(" at cell scale %.0f", scan.best_scale);
  return {ok, out.str()};
}

// 10 --------------------------------------------------------------------------------------
Verdict gradient() {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> th(0.2, 0.8), le(-3.0, -0.5);
  std::uniform_int_distribution<int> cells(1, 6);
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    const Params p(std::pow(10.0, le(rng) - 1.0), std::pow(10.0, le(rng)), 0.5, 2.0, th(rng));
    const auto g = grid_equispaced(128, cells(rng), p.theta);
    worst = std::max(worst, gradient_check(p, g.omega, g.n, 100 + i));
  }
  return {worst < 1e-5, fmt("max relative error %.2e", worst)};
}

// 11 --------------------------------------------------------------------------------------
Verdict reproducible() {
  const std::vector<std::vector<std::string>> runs = {
      {"sweep", "--family", "minimized", "--vary", "eta", "--from", "0.01", "--to", "0.1", "--points", "4", "--h", "3e-3",
       "--alpha-s", "1", "--alpha-m", "10", "--theta", "0.5", "--grid", "128", "--max-count", "4", "--seed", "3",
       "--workers", "1"},
      {"minimize", "--h", "3e-3", "--eta", "0.05", "--alpha-s", "1", "--alpha-m", "10", "--theta", "0.5", "--grid", "256",
       "--seed", "8", "--max-count", "4", "--workers", "1"},
      {"phase", "--grid", "32x32", "--h", "1e-8", "--k6", "140", "--workers", "1"},
      {"eval-1d", "--family", "periodic", "--h", "1e-3", "--eta", "0.01", "--alpha-s", "0.1", "--theta", "0.5"},
  };
  int same = 0;
  for (const auto& args : runs) {
    std::ostringstream a, b, e;
    const int ca = cli::run(args, a, e), cb = cli::run(args, b, e);
    if (ca == 0 && cb == 0 && a.str() == b.str() && !a.str().empty()) ++same;
  }
  return {same == int(runs.size()), std::to_string(same) + "/" + std::to_string(runs.size()) + " outputs identical"};
}

}  // namespace

int main() {
  criterion(1, "zero-membrane identities", zero_membrane);
  criterion(2, "closed-form agreement", closed_forms);
  criterion(3, "1D scaling exponents", scaling_1d);
  criterion(4, "corner apex root", corner_root);
  criterion(5, "gamma curve", gamma_curve);
  criterion(6, "minimal ridge", minimal_ridge);
  criterion(7, "2D lattice scaling", lattice_scaling);
  criterion(8, "minimizer oracle consistency", oracle);
  criterion(9, "phase diagram", phase_diagram);
  criterion(10, "gradient check", gradient);
  criterion(11, "reproducibility", reproducible);
  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
