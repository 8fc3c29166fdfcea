// One PASS/FAIL line per acceptance criterion, followed by indented detail
// checks. Tolerances and time limits are fixed below. A check tagged `known`
// is a documented unattainable target: it still prints FAIL, but only
// unexpected failures make the exit status nonzero (use --strict to count all).

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "qgspectra/bootstrap.hpp"
#include "qgspectra/detpoly.hpp"
#include "qgspectra/lagrange.hpp"
#include "qgspectra/orbits.hpp"
#include "qgspectra/parallel.hpp"
#include "qgspectra/random.hpp"
#include "qgspectra/spectral_formulas.hpp"
#include "qgspectra/stats.hpp"

using namespace qgs;
using std::numbers::pi;

namespace {

struct Check {
  std::string text;
  bool pass = false;
  bool known = false;  // documented unattainable
};

struct Criterion {
  int id = 0;
  std::string title;
  double time_limit = 0.0;
  std::function<void(std::vector<Check>&)> body;
};

std::string fmt(const char* f, double a) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

std::string fmt(const char* f, double a, double b, double c) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

// ---- shared configurations

const double kTwoS0 = 0.3 + 0.7 / std::sqrt(2.0);
const double kTwoS1 = 0.3 - 0.7 / std::sqrt(2.0);
const double kTwoR = (std::sqrt(2.0) - 1.0) / (std::sqrt(2.0) + 1.0);

Graph two_bond_graph() {
  const std::array<double, 2> len{0.3, 0.7 / std::sqrt(2.0)};
  const std::array<double, 1> refl{kTwoR};
  return build_graph(linear_chain_spec(len, refl));
}

Graph chain_graph(const std::array<double, 3>& actions, double r2, double r3) {
  const std::array<double, 2> refl{r2, r3};
  return build_graph(linear_chain_spec(actions, refl));
}

Graph lasso_graph() {
  GraphSpec s;
  s.vertices = {0, 1, 2, 3};
  s.bonds = {{0, 1, 0.31, 0.0}, {1, 2, 0.27, 0.2}, {2, 0, 0.19, -0.5}, {2, 3, 0.4, 0.0}};
  s.scattering.dirichlet = {3};
  return build_graph(s);
}

Graph star_graph() {
  GraphSpec s;
  s.vertices = {0, 1, 2, 3};
  s.bonds = {{0, 1, 0.31, 0.0}, {0, 2, 0.47, 0.0}, {0, 3, 0.22, 0.0}};
  s.scattering.dirichlet = {1, 2, 3};
  return build_graph(s);
}

const std::array<double, 3> kFig7a{0.2, 0.6565, 0.1435};
const std::array<double, 3> kFig7b{0.1, 0.8565, 0.0435};
const std::array<double, 3> kFig9{0.1, 0.8999, 0.0001};

// ---- criteria

void c1_anchors(std::vector<Check>& out) {
  const TrigPoly p = spectral_function(two_bond_graph());
  const std::array<std::int64_t, 3> ns{1, 10, 100};
  const std::array<double, 3> ref{3.26507, 31.24664, 313.98697};
  const auto h = descend_hierarchy(p, 1, 100);
  const auto oracle = oracle_first_roots(p, 100);
  double wb = 0.0, wo = 0.0;
  for (int i = 0; i < 3; ++i) {
    const auto n = static_cast<std::size_t>(ns[i] - 1);
    wb = std::max(wb, std::abs(p.S0() * h.roots[n].k - ref[i]));
    wo = std::max(wo, std::abs(p.S0() * oracle[n] - ref[i]));
  }
  out.push_back({fmt("bootstrap: max |S0 k_n - anchor| = %.2e (tol 1e-4)", wb), wb < 1e-4});
  out.push_back({fmt("oracle:    max |S0 k_n - anchor| = %.2e (tol 1e-4)", wo), wo < 1e-4});
}

void c2_lagrange(std::vector<Check>& out) {
  const std::array<std::int64_t, 3> ns{1, 10, 100};
  const std::array<double, 3> ref{3.26502, 31.24650, 313.98681};
  double w = 0.0;
  for (int i = 0; i < 3; ++i) w = std::max(w, std::abs(two_bond_root(kTwoS0, kTwoS1, kTwoR, ns[i], 2).x - ref[i]));
  out.push_back({fmt("order-2 Lagrange: max |x_n - value| = %.2e (tol 1e-4)", w), w < 1e-4});
}

void c3_regimes(std::vector<Check>& out) {
  GridSpec grid;  // [-1, 1]^2, 64 x 64
  const auto a = regime_diagram("four-vertex-chain", four_vertex_chain_family(kFig7a), grid);
  const auto b = regime_diagram("four-vertex-chain", four_vertex_chain_family(kFig7b), grid);
  out.push_back({fmt("actions (0.2, 0.6565, 0.1435): max m = %.0f (expect 2)", a.max_m()), a.max_m() == 2});
  out.push_back({fmt("actions (0.1, 0.8565, 0.0435): max m = %.0f (expect 6)", b.max_m()), b.max_m() == 6});
}

void c4_depth(std::vector<Check>& out) {
  // r2 = r3 = r on a uniform diagonal grid; the first grid point of each m is that regime's representative
  std::map<int, double> first_r;
  for (int i = 0; i <= 400; ++i) {
    const double r = i / 400.0;
    const int m = irregularity_degree(four_vertex_chain(kFig9, r, r)).m;
    first_r.emplace(m, r);
  }
  std::vector<double> rs;
  for (const auto& [m, r] : first_r) rs.push_back(r);
  const auto pts = diagonal_sweep(kFig9, rs, 10000);
  int m_max = 0;
  bool all_m0 = true, all_irr = true;
  double worst_m0 = 1e300, worst_irr = 1e300, worst_large = 1e300;
  for (const auto& p : pts) {
    m_max = std::max(m_max, p.m);
    const double margin = p.bound - p.s_max;
    if (p.m == 0) {
      all_m0 = all_m0 && margin >= 0.0;
      worst_m0 = std::min(worst_m0, margin);
    } else {
      all_irr = all_irr && margin >= 0.0;
      worst_irr = std::min(worst_irr, margin);
    }
  }
  for (const auto& p : pts) {
    if (2 * p.m >= m_max) worst_large = std::min(worst_large, p.bound - p.s_max);
  }
  out.push_back({fmt("max m along the diagonal = %.0f over %.0f regimes (expect 27)", m_max,
                     static_cast<double>(pts.size())),
                 m_max == 27});
  out.push_back({fmt("s_max <= pi (m+1)/S0 for every m >= 1 regime: min margin %.4f", worst_irr), all_irr});
  out.push_back({fmt("s_max <= pi (m+1)/S0 in the m = 0 regime: min margin %.3g (mean spacing is pi/S0, so any "
                     "spread exceeds it)",
                     worst_m0),
                 all_m0, true});
  out.push_back({fmt("strictly positive margin for m >= m_max/2: min margin %.4f", worst_large), worst_large > 0.0});
}

void c5_cells(std::vector<Check>& out) {
  constexpr int kPolys = 1000, kCells = 1000;
  std::vector<int> bad(kPolys, 0);
  std::vector<double> worst(kPolys, 0.0);
  std::vector<TrigPoly> polys;
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < kPolys; ++t) {
    double alpha = u(rng);
    while (!(alpha > 0.0)) alpha = u(rng);
    const int terms = 1 + static_cast<int>(u(rng) * 6.0);
    const double S0 = 0.5 + 1.5 * u(rng);
    polys.push_back(random_trigpoly(rng, terms, alpha, S0));
  }
  parallel_for(polys.size(), [&](std::size_t t) {
    const TrigPoly& p = polys[t];
    const auto lvl = regular_separators(p, 1, kCells);
    const double first_lo = lvl.separators.front().k - p.mean_spacing();
    const auto roots = oracle_scan(p, first_lo, lvl.separators.back().k, 1000);
    double prev = first_lo;
    std::size_t idx = 0;
    for (const auto& s : lvl.separators) {
      int inside = 0;
      while (idx < roots.size() && roots[idx] <= s.k) {
        if (roots[idx] > prev) ++inside;
        ++idx;
      }
      if (inside != 1) ++bad[t];
      const double a = root_in_cell(p, prev, s.k).k;
      worst[t] = std::max(worst[t], std::abs(fixed_point_root(p, s.n) - a));
      prev = s.k;
    }
  });
  int cells_bad = 0;
  for (int b : bad) cells_bad += b;
  const double w = *std::max_element(worst.begin(), worst.end());
  out.push_back({fmt("cells without exactly one oracle root: %.0f of %.0f", cells_bad, 1.0 * kPolys * kCells),
                 cells_bad == 0});
  out.push_back({fmt("max |fixed_point_root - root_in_cell| = %.2e (tol 1e-12)", w), w < 1e-12});
}

void c6_hierarchy(std::vector<Check>& out) {
  struct Case {
    std::array<double, 3> actions;
    double r;
    int m;
  };
  for (const Case& c : {Case{kFig7a, 0.6, 1}, Case{kFig7a, 0.95, 2}, Case{kFig7b, 0.99, 6}}) {
    const TrigPoly p = four_vertex_chain(c.actions, c.r, c.r);
    const auto h = descend_hierarchy(p, 1, 1000);
    const auto oracle = oracle_first_roots(p, 1000);
    // count the oracle roots in (0, k_1000]; a degenerate pair appears twice in both lists
    const auto all = oracle_scan(p, 0.0, h.roots.back().k + 0.25 * p.mean_spacing(), 1000);
    const std::size_t count = std::count_if(all.begin(), all.end(), [&](double k) {
      return k > 1e-9 * p.mean_spacing() && k <= h.roots.back().k + 1e-10;
    });
    double w = 0.0;
    for (std::size_t i = 0; i < oracle.size(); ++i) w = std::max(w, std::abs(h.roots[i].k - oracle[i]));
    char buf[256];
    std::snprintf(buf, sizeof buf, "m = %d (expect %d): max |hierarchy - oracle| = %.2e (tol 1e-10), counts %zu / %zu",
                  h.m, c.m, w, h.roots.size(), count);
    out.push_back({buf, h.m == c.m && w < 1e-10 && h.roots.size() == count});
  }
}

void c7_traces(std::vector<Check>& out) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.1, 100.0);
  double w = 0.0, wp = 0.0;
  for (const Graph& g : {chain_graph(kFig7a, 0.4, -0.7), lasso_graph(), star_graph()}) {
    const OrbitCatalog cat = enumerate_orbits(g, 8);
    for (int i = 0; i < 20; ++i) {
      const double k = u(rng);
      for (int l = 1; l <= 8; ++l) {
        const Complex ref = matrix_trace_power(g, l, k);
        w = std::max(w, std::abs(cat.trace(l, k) - ref) / std::max(1.0, std::abs(ref)));
        // prime resummation of the trace: sum over nu l_P = l of l_P A_P^nu e^{i nu L_P k}
        Complex prime_sum = 0.0;
        for (const auto& pr : cat.primes) {
          if (l % pr.length() != 0) continue;
          const int nu = l / pr.length();
          prime_sum += static_cast<double>(pr.length()) * std::pow(pr.amplitude, nu) *
                       std::exp(Complex(0.0, nu * pr.action * k));
        }
        wp = std::max(wp, std::abs(prime_sum - cat.trace(l, k)));
      }
    }
  }
  out.push_back({fmt("orbit sum vs matrix trace, l <= 8, 3 graphs x 20 k: max rel diff %.2e (tol 1e-9)", w), w < 1e-9});
  out.push_back({fmt("trace by prime classes vs walk sum: max diff %.2e (tol 1e-12)", wp), wp < 1e-12});

  double we = 0.0;
  for (const Graph& g : {two_bond_graph(), chain_graph(kFig7a, 0.3, 0.2)}) {
    const RegularCells cells = regular_cells(g);
    const OrbitCatalog cat = enumerate_orbits(g, 10);
    for (std::int64_t n : {1, 2, 10, 100, 1000}) {
      for (int l = 1; l <= 10; ++l) {
        we = std::max(we, std::abs(root_by_prime_expansion(cells, cat, n, l).estimate -
                                   root_by_orbit_expansion(cells, cat, n, l).estimate));
      }
    }
  }
  out.push_back({fmt("prime-orbit root expansion vs walk expansion, cutoffs 1..10: max diff %.2e (tol 1e-12)", we),
                 we < 1e-12});
}

void c8_staircase(std::vector<Check>& out) {
  double w_int = 0.0, w_jump = 0.0, w_root = 0.0;
  for (const Graph& g : {two_bond_graph(), chain_graph(kFig7a, 0.95, 0.95)}) {
    const TrigPoly p = spectral_function(g);
    const Staircase N(g);
    const auto h = descend_hierarchy(p, 1, 200);
    const double d = 1e-7 * p.mean_spacing();
    for (std::size_t i = 0; i < h.roots.size(); ++i) {
      const auto& r = h.roots[i];
      if (i + 1 < h.roots.size()) {
        for (double f : {0.1, 0.3, 0.5, 0.7, 0.9}) {
          const double v = N(r.k + f * (h.roots[i + 1].k - r.k)).N;
          w_int = std::max(w_int, std::abs(v - std::round(v)));
        }
      }
      if (!r.degenerate) w_jump = std::max(w_jump, std::abs(N(r.k + d).N - N(r.k - d).N - 1.0));
      w_root = std::max(w_root, std::abs(root_by_staircase_integral(N, r.n, r.lo, r.hi) - r.k));
    }
  }
  out.push_back({fmt("N(k) distance from an integer between roots: max %.2e (tol 1e-9)", w_int), w_int < 1e-9});
  out.push_back({fmt("jump across each simple root: max |dN - 1| = %.2e (tol 1e-9)", w_jump), w_jump < 1e-9});
  out.push_back({fmt("staircase-integral vs bootstrap, 200 roots x 2 graphs: max diff %.2e (tol 1e-8)", w_root),
                 w_root < 1e-8});
}

void c9_convergence(std::vector<Check>& out) {
  const Graph g = two_bond_graph();
  const TrigPoly p = spectral_function(g);
  const RegularCells cells = regular_cells(g);
  const OrbitCatalog cat = enumerate_orbits(g, 12);
  const auto oracle = oracle_first_roots(p, 100);
  constexpr int kWindow = 4;
  for (std::int64_t n : {1, 10, 100}) {
    const double exact = oracle[static_cast<std::size_t>(n - 1)];
    const auto e = root_by_orbit_expansion(cells, cat, n, 12);
    std::vector<double> err;  // err[l] for l = 2..12
    for (int l = 2; l <= 12; ++l) err.push_back(std::abs(e.partials[l - 1] - exact));
    std::vector<double> win;
    for (std::size_t i = kWindow - 1; i < err.size(); ++i) {
      double s = 0.0;
      for (int j = 0; j < kWindow; ++j) s += err[i - j];
      win.push_back(s / kWindow);
    }
    bool decreasing = true;
    for (std::size_t i = 1; i < win.size(); ++i) decreasing = decreasing && win[i] < win[i - 1];
    out.push_back({fmt("n = %.0f: 4-window mean error %.2e -> %.2e, strictly decreasing over l_max 5..12", n,
                       win.front(), win.back()),
                   decreasing});
  }
  for (std::int64_t n : {1, 10, 100}) {
    const double k = oracle[static_cast<std::size_t>(n - 1)];
    const double rel = std::abs(regular_energy_expansion(cells, cat, n, 12).estimate - k * k) / (k * k);
    out.push_back({fmt("energy expansion n = %.0f, cutoff 12: rel err %.2e (tol 1e-3)", n, rel), rel < 1e-3,
                   n == 1});
  }

  // spacing distribution at the deepest regime, in units of pi
  const TrigPoly q = four_vertex_chain(kFig9, 1.0, 1.0);
  const auto h = descend_hierarchy(q, 1, 10000);
  std::vector<double> ks;
  for (const auto& r : h.roots) ks.push_back(r.k);
  const auto s = nn_spacings(ks, SpacingMode::raw, 1e-9 * q.mean_spacing());
  const auto hist = spacing_histogram(s, 3.0 * pi, 150);  // bin width 0.02 in s/pi
  const auto peak = std::max_element(hist.counts.begin(), hist.counts.end()) - hist.counts.begin();
  const double centre = 0.5 * (hist.edges[peak] + hist.edges[peak + 1]) / pi;
  out.push_back({fmt("m = %.0f histogram peak at s/pi = %.3f, expected %.3f (tol one bin, 0.02)", h.m, centre,
                     1.0 / 0.8999),
                 std::abs(centre - 1.0 / 0.8999) <= 0.02});
}

} // namespace

int main(int argc, char** argv) {
  bool strict = false;
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--strict") == 0) {
      strict = true;
    } else {
      only.push_back(std::atoi(argv[i]));
    }
  }

  const std::vector<Criterion> criteria{
      {1, "two-bond exact anchors", 1.0, c1_anchors},
      {2, "two-bond order-2 Lagrange values", 1.0, c2_lagrange},
      {3, "four-vertex chain regime diagrams", 30.0, c3_regimes},
      {4, "irregularity depth and spacing bound on the diagonal", 300.0, c4_depth},
      {5, "one root per cell, 1000 random regular polynomials", 300.0, c5_cells},
      {6, "separator hierarchy vs dense oracle", 60.0, c6_hierarchy},
      {7, "trace identity and prime resummation", 60.0, c7_traces},
      {8, "spectral staircase", 120.0, c8_staircase},
      {9, "expansion convergence and spacing distribution", 120.0, c9_convergence},
  };

  int unexpected = 0, failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    std::vector<Check> checks;
    const auto t0 = std::chrono::steady_clock::now();
    std::string error;
    try {
      c.body(checks);
    } catch (const std::exception& e) {
      error = e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.time_limit;
    bool pass = error.empty() && in_time;
    bool only_known = error.empty() && in_time;
    for (const auto& ch : checks) {
      pass = pass && ch.pass;
      if (!ch.pass && !ch.known) only_known = false;
    }
    if (!pass) {
      ++failed;
      if (strict || !only_known) ++unexpected;
    }
    std::printf("%s %d %s [%.2f s, limit %.0f s]%s\n", pass ? "PASS" : "FAIL", c.id, c.title.c_str(), secs,
                c.time_limit, !pass && only_known ? " (documented shortfall)" : "");
    for (const auto& ch : checks) {
      std::printf("     %s %s%s\n", ch.pass ? "ok  " : "FAIL", ch.text.c_str(),
                  !ch.pass && ch.known ? " [documented shortfall]" : "");
    }
    if (!error.empty()) std::printf("     FAIL exception: %s\n", error.c_str());
    std::fflush(stdout);
  }
  std::printf("%d criteria failed, %d unexpected\n", failed, unexpected);
  return unexpected == 0 ? 0 : 1;
}
