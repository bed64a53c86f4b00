#pragma once
// Brute-force oracle: the 1D energy discretized on a uniform periodic grid and minimized by
// projected L-BFGS over (w, u) with u >= 0 and u pinned to zero on the bonded set.

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <random>
#include <vector>

#include "construct1d.hpp"
#include "core.hpp"
#include "parallel.hpp"

namespace blisterlab {

struct MinimizeOptions {
  int max_iterations = 20000;
  int memory = 10;
  double gradient_tolerance = 1e-6;  // on the scaled projected gradient
  double substrate_eps = 1e-14;      // regularizes the product of norms
  bool cold_start = false;           // noise only, no warm start
};

struct MinimizeResult {
  EnergyBreakdown energy;
  int iterations = 0;
  bool converged = false;
  double gradient_norm = 0.0;  // max |projected gradient| * max|x| / energy
  double tolerance = 0.0;
  int n = 0;
  std::vector<double> w, u;
  BondedSet1D omega;
};

// The discretized energy: staggered differences for w', u' at cell midpoints, the
// three-point u'' at nodes, trapezoidal sums on the periodic grid.
class DiscreteEnergy {
 public:
  DiscreteEnergy(const Params& p, const BondedSet1D& omega, int n, double eps = 1e-14)
      : p_(p), n_(n), dx_(1.0 / n), eps_(eps), pinned_(n, 0), edge_(n, 0), node_wt_(n, 0.0) {
    if (n < 64) throw ValidationError("grid must have at least 64 points");
    for (const auto& iv : omega.intervals())
      for (double e : {iv.a, iv.b})
        if (std::abs(e * n - std::round(e * n)) > 1e-7) throw ValidationError("bonded set is not resolvable on the grid");
    for (const auto& iv : omega.intervals()) {
      const long a = std::lround(iv.a * n), b = std::lround(iv.b * n);
      for (long k = a; k <= b; ++k) pinned_[idx(k)] = 1;
      for (long k = a; k < b; ++k) {
        edge_[idx(k)] = 1;
        node_wt_[idx(k)] += 0.5 * dx_;
        node_wt_[idx(k + 1)] += 0.5 * dx_;
      }
    }
  }

  int n() const { return n_; }
  bool pinned(int i) const { return pinned_[i]; }

  // Energy with the regularized substrate; fills the gradient over x = (w, u) if asked.
  double value(const std::vector<double>& x, std::vector<double>* grad = nullptr) const {
    const double* w = x.data();
    const double* u = x.data() + n_;
    const double am = p_.alpha_m * p_.h, hb = p_.h * p_.h * p_.h;
    std::vector<double> r(n_), du(n_), k(n_);
    double memb = 0.0, bend = 0.0, G = 0.0, V = 0.0;
    for (int i = 0; i < n_; ++i) {
      const int j = (i + 1) % n_, m = (i + n_ - 1) % n_;
      const double dw = (w[j] - w[i]) / dx_;
      du[i] = (u[j] - u[i]) / dx_;
      r[i] = dw + 0.5 * du[i] * du[i] - p_.eta;
      k[i] = (u[j] - 2.0 * u[i] + u[m]) / (dx_ * dx_);
      memb += r[i] * r[i] * dx_;
      bend += k[i] * k[i] * dx_;
      if (edge_[i]) G += dw * dw * dx_;
      V += node_wt_[i] * w[i] * w[i];
    }
    last_ = EnergyBreakdown::make(am * memb, hb * bend, p_.alpha_s * std::sqrt(G) * std::sqrt(V));
    const double sg = std::sqrt(G + eps_), sv = std::sqrt(V + eps_);
    const double f = am * memb + hb * bend + p_.alpha_s * (sg * sv - eps_);
    if (grad) {
      grad->assign(2 * n_, 0.0);
      double* gw = grad->data();
      double* gu = grad->data() + n_;
      const double cg = p_.alpha_s * 0.5 * sv / sg, cv = p_.alpha_s * 0.5 * sg / sv;
      for (int i = 0; i < n_; ++i) {
        const int j = (i + 1) % n_, m = (i + n_ - 1) % n_;
        gw[i] += 2.0 * am * (r[m] - r[i]);
        gu[i] += 2.0 * am * (r[m] * du[m] - r[i] * du[i]);
        gu[i] += 2.0 * hb * (k[m] - 2.0 * k[i] + k[j]) / (dx_ * dx_) * dx_;
        if (edge_[i]) {
          const double dw = (w[j] - w[i]) / dx_;
          gw[i] -= cg * 2.0 * dw;
          gw[j] += cg * 2.0 * dw;
        }
        gw[i] += cv * 2.0 * node_wt_[i] * w[i];
      }
    }
    return f;
  }

  // Unregularized breakdown of the last evaluated point.
  const EnergyBreakdown& breakdown() const { return last_; }

  void project(std::vector<double>& x) const {
    for (int i = 0; i < n_; ++i) {
      double& u = x[n_ + i];
      u = pinned_[i] ? 0.0 : std::max(0.0, u);
    }
  }

 private:
  int idx(long k) const { return int(((k % n_) + n_) % n_); }

  Params p_;
  int n_;
  double dx_, eps_;
  std::vector<char> pinned_, edge_;
  std::vector<double> node_wt_;
  mutable EnergyBreakdown last_;
};

namespace detail {

// Warm start: on each debonded run a cosine bump whose slopes absorb the mismatch over the
// whole torus, w integrated so the membrane strain vanishes; plus seeded noise on u.
inline std::vector<double> initial_point(const DiscreteEnergy& E, const Params& p, unsigned long seed, bool cold) {
  const int n = E.n();
  const double dx = 1.0 / n;
  std::vector<double> x(2 * n, 0.0);
  double* w = x.data();
  double* u = x.data() + n;
  int free_nodes = 0;
  for (int i = 0; i < n; ++i) free_nodes += !E.pinned(i);
  if (!cold && free_nodes > 0 && p.eta > 0.0) {
    const double absorb = double(n) / std::max(1, free_nodes);  // torus length / debonded length
    int i = 0;
    while (i < n && !E.pinned(i)) ++i;
    for (int step = 0; step < n;) {
      const int start = (i + step) % n;
      if (E.pinned(start)) {
        ++step;
        continue;
      }
      int len = 0;
      while (len < n && !E.pinned((start + len) % n)) ++len;
      const double L = (len + 1) * dx;  // between the two pinned nodes
      const double amp = 2.0 * std::sqrt(p.eta * absorb) * L / kPi;
      for (int k = 0; k < len; ++k) {
        const double s = std::sin(kPi * (k + 1) * dx / L);
        u[(start + k) % n] = amp * s * s;
      }
      step += len;
    }
    std::vector<double> inc(n);
    double mean = 0.0;
    for (int k = 0; k < n; ++k) {
      const double du = (u[(k + 1) % n] - u[k]) / dx;
      inc[k] = dx * (p.eta - 0.5 * du * du);
      mean += inc[k] / n;
    }
    for (int k = 1; k < n; ++k) w[k] = w[k - 1] + inc[k - 1] - mean;
    const double avg = std::accumulate(w, w + n, 0.0) / n;
    for (int k = 0; k < n; ++k) w[k] -= avg;
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> noise(-1.0, 1.0);
  // node noise whose difference quotients are at most sqrt(eta)/10
  const double amp = std::sqrt(p.eta) / 10.0 * dx;
  for (int k = 0; k < n; ++k) u[k] += amp * std::abs(noise(rng));
  E.project(x);
  return x;
}

}  // namespace detail

// Rotation that brings the first bonded interval to node 0 (so translating omega by whole
// grid cells gives the identical discrete problem).
inline int canonical_shift(const BondedSet1D& omega, int n) {
  if (omega.empty()) return 0;
  return int(std::lround(omega.intervals().front().a * n)) % n;
}

inline MinimizeResult minimize_profile(const Params& p, const BondedSet1D& omega, int n, unsigned long seed = 0,
                                       const MinimizeOptions& opt = {}) {
  p.validate(true);
  if (opt.max_iterations < 1 || opt.memory < 1 || !(opt.gradient_tolerance > 0.0))
    throw ValidationError("invalid minimizer options");
  const int shift = canonical_shift(omega, n);
  const BondedSet1D local = omega.empty() ? omega : omega.translated(-double(shift) / n);
  DiscreteEnergy E(p, local, n, opt.substrate_eps);
  std::vector<double> x = detail::initial_point(E, p, seed, opt.cold_start), g, xn, gn;
  double f = E.value(x, &g);

  auto projected = [&](const std::vector<double>& x, const std::vector<double>& g) {
    std::vector<double> pg = g;
    for (int i = 0; i < n; ++i)
      if (E.pinned(i) || (x[n + i] <= 0.0 && g[n + i] > 0.0)) pg[n + i] = 0.0;
    return pg;
  };
  auto inf_norm = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double a : v) m = std::max(m, std::abs(a));
    return m;
  };
  auto dot = [](const std::vector<double>& a, const std::vector<double>& b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
  };
  auto scaled_norm = [&](const std::vector<double>& pg, const std::vector<double>& x, double f) {
    const double xs = std::max(inf_norm(x), 1e-300);
    return f > 0.0 ? inf_norm(pg) * xs / f : inf_norm(pg);
  };

  MinimizeResult res;
  res.tolerance = opt.gradient_tolerance;
  std::deque<std::pair<std::vector<double>, std::vector<double>>> mem;
  std::vector<double> pg = projected(x, g);
  int it = 0;
  for (; it < opt.max_iterations; ++it) {
    res.gradient_norm = scaled_norm(pg, x, f);
    if (res.gradient_norm <= opt.gradient_tolerance) {
      res.converged = true;
      break;
    }
    // two-loop recursion on the projected gradient
    std::vector<double> d = pg;
    std::vector<double> a(mem.size());
    for (std::size_t k = mem.size(); k-- > 0;) {
      const auto& [s, y] = mem[k];
      a[k] = dot(s, d) / dot(y, s);
      for (std::size_t i = 0; i < d.size(); ++i) d[i] -= a[k] * y[i];
    }
    double gamma = 1.0;
    if (!mem.empty()) gamma = dot(mem.back().first, mem.back().second) / dot(mem.back().second, mem.back().second);
    for (double& v : d) v *= gamma;
    for (std::size_t k = 0; k < mem.size(); ++k) {
      const auto& [s, y] = mem[k];
      const double b = dot(y, d) / dot(y, s);
      for (std::size_t i = 0; i < d.size(); ++i) d[i] += (a[k] - b) * s[i];
    }
    for (double& v : d) v = -v;
    for (int i = 0; i < n; ++i)
      if (pg[n + i] == 0.0 && g[n + i] != 0.0) d[n + i] = 0.0;
    if (mem.empty() || !(dot(d, pg) < 0.0)) {
      mem.clear();
      const double scale = std::max(inf_norm(x), 1e-6) / std::max(inf_norm(pg), 1e-300);
      for (std::size_t i = 0; i < d.size(); ++i) d[i] = -pg[i] * scale * 1e-2;
    }
    // projected Armijo backtracking
    double t = 1.0, fn = f;
    bool ok = false;
    for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
      xn = x;
      for (std::size_t i = 0; i < x.size(); ++i) xn[i] += t * d[i];
      E.project(xn);
      double decrease = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) decrease += g[i] * (xn[i] - x[i]);
      fn = E.value(xn, &gn);
      if (fn <= f + 1e-4 * decrease && decrease < 0.0) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      if (mem.empty()) break;  // no descent even along the scaled gradient
      mem.clear();
      continue;
    }
    std::vector<double> s(x.size()), y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      s[i] = xn[i] - x[i];
      y[i] = gn[i] - g[i];
    }
    if (dot(s, y) > 1e-16 * std::sqrt(dot(s, s) * dot(y, y))) {
      mem.emplace_back(std::move(s), std::move(y));
      if (int(mem.size()) > opt.memory) mem.pop_front();
    }
    x.swap(xn);
    g.swap(gn);
    f = fn;
    pg = projected(x, g);
  }
  E.value(x);
  res.energy = E.breakdown();
  res.iterations = it;
  res.gradient_norm = scaled_norm(pg, x, f);
  res.converged = res.converged || res.gradient_norm <= opt.gradient_tolerance;
  res.n = n;
  res.w.assign(n, 0.0);
  res.u.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    res.w[(i + shift) % n] = x[i];
    res.u[(i + shift) % n] = x[n + i];
  }
  res.omega = omega;
  return res;
}

// Largest analytic-vs-central-difference gradient discrepancy at a random feasible point,
// relative to the largest gradient component.
inline double gradient_check(const Params& p, const BondedSet1D& omega, int n, unsigned long seed = 0) {
  p.validate(true);
  DiscreteEnergy E(p, omega, n);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  const double scale = std::sqrt(std::max(p.eta, 1e-6));
  std::vector<double> x(2 * n);
  for (int i = 0; i < n; ++i) {
    x[i] = 0.1 * scale * uni(rng);
    x[n + i] = E.pinned(i) ? 0.0 : 0.5 * scale * (1.5 + uni(rng)) / 10.0;
  }
  std::vector<double> g;
  E.value(x, &g);
  double gmax = 0.0, err = 0.0;
  for (double v : g) gmax = std::max(gmax, std::abs(v));
  for (int i = 0; i < 2 * n; ++i) {
    if (i >= n && E.pinned(i - n)) continue;
    const double h = 1e-6 * std::max(std::abs(x[i]), 1e-3 * scale);
    auto xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    const double fd = (E.value(xp) - E.value(xm)) / (2.0 * h);
    err = std::max(err, std::abs(fd - g[i]));
  }
  return gmax > 0.0 ? err / gmax : err;
}

// Equispaced bonded set on a grid of about n points with N cells: each cell of c nodes ends
// with a bonded run of round(theta c) nodes.
struct GridOmega {
  int n = 0;
  BondedSet1D omega;
  double theta = 0.0;  // realized bonded fraction
};

inline GridOmega grid_equispaced(int n, int cells, double theta) {
  if (cells < 1) throw ValidationError("blister count must be >= 1");
  const int c = std::max(4, int(std::lround(double(n) / cells)));
  const int bonded = std::clamp(int(std::lround(theta * c)), 1, c - 1);
  GridOmega g;
  g.n = c * cells;
  std::vector<Interval> iv;
  for (int k = 0; k < cells; ++k) iv.push_back({double(k * c + c - bonded) / g.n, double((k + 1) * c) / g.n});
  g.omega = BondedSet1D(iv);
  g.theta = double(bonded) / c;
  return g;
}

struct BlisterCountResult {
  int best_count = 1;
  MinimizeResult best;
  std::vector<double> totals;  // minimized total per blister count 1..Nmax
};

inline BlisterCountResult best_over_blister_count(const Params& p, int n, int max_count, unsigned long seed = 0,
                                                  const MinimizeOptions& opt = {}, int workers = 1) {
  if (max_count < 1) throw ValidationError("maximum blister count must be >= 1");
  auto runs = parallel_map<MinimizeResult>(std::size_t(max_count), workers, [&](std::size_t k) {
    const auto g = grid_equispaced(n, int(k) + 1, p.theta);
    return minimize_profile(p, g.omega, g.n, seed, opt);
  });
  BlisterCountResult out;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    out.totals.push_back(runs[k].energy.total);
    if (k == 0 || runs[k].energy.total < out.best.energy.total) {
      out.best = runs[k];
      out.best_count = int(k) + 1;
    }
  }
  return out;
}

}  // namespace blisterlab
