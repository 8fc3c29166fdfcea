#include "qgspectra/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qgspectra/bootstrap.hpp"
#include "qgspectra/error.hpp"
#include "qgspectra/graph.hpp"
#include "qgspectra/parallel.hpp"

namespace qgs {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 2) throw ValidationError("grid resolution must be at least 2 per axis");
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[i] = i == n - 1 ? hi : lo + (hi - lo) * i / (n - 1);
  return v;
}

} // namespace

SpacingSample nn_spacings(std::span<const double> roots, SpacingMode mode, double zero_tol) {
  if (roots.size() < 2) throw ValidationError("need at least 2 roots for spacings");
  SpacingSample s;
  s.mode = mode;
  s.roots.assign(roots.begin(), roots.end());
  for (std::size_t i = 1; i < roots.size(); ++i) {
    const double d = roots[i] - roots[i - 1];
    if (d < 0.0) throw ValidationError("unsorted input: roots must be nondecreasing");
    s.spacings.push_back(d);
  }
  double sum = 0.0;
  for (double d : s.spacings) sum += d;
  s.mean = sum / static_cast<double>(s.spacings.size());
  const double norm = mode == SpacingMode::unit_mean ? s.mean : 1.0;
  s.zero_tol = zero_tol / norm;
  bool any = false;
  for (double& d : s.spacings) {
    if (d < zero_tol) {
      ++s.zero_count;
    } else {
      s.s_min = any ? std::min(s.s_min, d / norm) : d / norm;
      s.s_max = any ? std::max(s.s_max, d / norm) : d / norm;
      any = true;
    }
    d /= norm;
  }
  return s;
}

Histogram spacing_histogram(const SpacingSample& sample, double upper, int bins) {
  if (bins < 1 || !(upper > 0.0)) throw ValidationError("histogram needs bins >= 1 and upper > 0");
  Histogram h;
  h.edges = linspace(0.0, upper, bins + 1);
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  std::size_t total = 0;
  for (double d : sample.spacings) {
    if (d < sample.zero_tol) continue;
    ++total;
    if (d > upper) {
      ++h.above;
      continue;
    }
    auto bin = static_cast<std::size_t>(d / upper * bins);
    if (bin >= h.counts.size()) bin = h.counts.size() - 1;
    ++h.counts[bin];
  }
  const double width = upper / bins;
  for (std::size_t c : h.counts) h.density.push_back(total ? static_cast<double>(c) / (total * width) : 0.0);
  return h;
}

BoundReport spacing_bound_check(const SpacingSample& sample, int m, double S0) {
  BoundReport r;
  const double norm = sample.mode == SpacingMode::unit_mean ? sample.mean : 1.0;
  r.bound = kPi * (m + 1) / S0 / norm;
  r.s_max = sample.s_max;
  r.margin = r.bound - r.s_max;
  r.pass = r.s_max <= r.bound;
  return r;
}

double wigner_reference(double s, Ensemble ensemble) {
  if (s < 0.0) throw ValidationError("negative s");
  if (ensemble == Ensemble::GOE) return 0.5 * kPi * s * std::exp(-0.25 * kPi * s * s);
  return 32.0 / (kPi * kPi) * s * s * std::exp(-4.0 * s * s / kPi);
}

int RegimeDiagram::max_m() const { return m.empty() ? 0 : *std::max_element(m.begin(), m.end()); }

RegimeDiagram regime_diagram(const std::string& name, const Family& family, const GridSpec& grid) {
  if (grid.n1 < 32 || grid.n2 < 32) throw ValidationError("grid resolution must be at least 32x32");
  RegimeDiagram d;
  d.family = name;
  d.p1 = linspace(grid.lo1, grid.hi1, grid.n1);
  d.p2 = linspace(grid.lo2, grid.hi2, grid.n2);
  d.m.assign(d.p1.size() * d.p2.size(), 0);
  parallel_for(d.m.size(), [&](std::size_t idx) {
    const double a = d.p1[idx / d.p2.size()];
    const double b = d.p2[idx % d.p2.size()];
    TrigPoly p = [&] {
      try {
        return family(a, b);
      } catch (const std::exception& e) {
        std::ostringstream os;
        os << "family construction failure at (" << a << ", " << b << "): " << e.what();
        throw ValidationError(os.str());
      }
    }();
    d.m[idx] = irregularity_degree(p).m;
  });
  return d;
}

TrigPoly four_vertex_chain(const std::array<double, 3>& actions, double r2, double r3) {
  const std::array<double, 2> refl{r2, r3};
  return spectral_function(build_graph(linear_chain_spec(actions, refl)));
}

Family four_vertex_chain_family(const std::array<double, 3>& actions) {
  return [actions](double r2, double r3) { return four_vertex_chain(actions, r2, r3); };
}

std::vector<SweepPoint> diagonal_sweep(const std::array<double, 3>& actions, std::span<const double> rs,
                                       std::size_t roots) {
  std::vector<SweepPoint> out;
  for (double r : rs) {
    const TrigPoly p = four_vertex_chain(actions, r, r);
    const auto h = descend_hierarchy(p, 1, static_cast<std::int64_t>(roots));
    std::vector<double> ks;
    for (const auto& root : h.roots) ks.push_back(root.k);
    const auto sample = nn_spacings(ks, SpacingMode::raw, 1e-9 * p.mean_spacing());
    SweepPoint sp;
    sp.r = r;
    sp.m = h.m;
    sp.s_min = sample.s_min;
    sp.s_max = sample.s_max;
    sp.bound = kPi * (h.m + 1) / p.S0();
    sp.zero_count = sample.zero_count;
    out.push_back(sp);
  }
  return out;
}

} // namespace qgs
