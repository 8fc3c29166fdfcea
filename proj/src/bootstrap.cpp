#include "qgspectra/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "qgspectra/parallel.hpp"

namespace qgs {

namespace {

constexpr double kPi = std::numbers::pi;
// Roots at or below this fraction of a mean spacing count as k <= 0.
constexpr double kNonPositiveRel = 1e-9;

bool opposite(double a, double b) { return (a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0); }

double ulp(double x) {
  const double ax = std::abs(x);
  return std::nextafter(ax, std::numeric_limits<double>::infinity()) - ax;
}

double polish(const TrigPoly& p, double a, double b, double fa, double fb) {
  // Bisection until the bracket is small, then Illinois regula falsi.
  const double scale = std::max({std::abs(a), std::abs(b), p.mean_spacing()});
  while (b - a > 1e-6 * scale) {
    const double c = 0.5 * (a + b);
    const double fc = p(c);
    if (fc == 0.0) return c;
    if (opposite(fa, fc)) {
      b = c;
      fb = fc;
    } else {
      a = c;
      fa = fc;
    }
  }
  double wa = fa, wb = fb;  // Illinois-weighted values
  int side = 0;
  int slow = 0;
  for (int it = 0; it < 200; ++it) {
    const double width = b - a;
    if (width <= ulp(std::max(std::abs(a), std::abs(b)))) break;
    double c = (wa * b - wb * a) / (wa - wb);
    if (slow >= 2 || !(c > a && c < b)) {
      c = 0.5 * (a + b);
      slow = 0;
    }
    const double fc = p(c);
    if (fc == 0.0) return c;
    if (opposite(fa, fc)) {
      b = c;
      fb = wb = fc;
      if (side == 1) wa *= 0.5;
      side = 1;
    } else {
      a = c;
      fa = wa = fc;
      if (side == -1) wb *= 0.5;
      side = -1;
    }
    slow = (b - a > 0.5 * width) ? slow + 1 : 0;
  }
  return std::abs(fa) <= std::abs(fb) ? a : b;
}

double periodic_point(const TrigPoly& p, std::int64_t nu) {
  return (kPi / p.S0()) * (static_cast<double>(nu) + p.effective_gamma0());
}

struct LevelRun {
  std::int64_t first = 0;  // label of roots[0]
  std::vector<CellRoot> roots;
};

std::string contract_message(const CellContractError& e, int level, std::int64_t label) {
  std::ostringstream os;
  os.precision(17);
  os << "cell contract violation at level " << level << ", cell label " << label << ": no sign change on ["
     << e.lo << ", " << e.hi << "], f = (" << e.f_lo << ", " << e.f_hi << ")";
  return os.str();
}

CellRoot solve_labeled(const TrigPoly& p, double lo, double hi, int level, std::int64_t label) {
  try {
    return root_in_cell(p, lo, hi);
  } catch (const CellContractError& e) {
    throw CellContractError(contract_message(e, level, label), level, label, e.lo, e.hi, e.f_lo, e.f_hi);
  }
}

// Roots of every level for top-level labels [A, B]. Level l covers labels
// [A + (m - l), B]; the root labeled j at level l lies between the level-(l+1)
// roots labeled j - 1 and j.
std::vector<LevelRun> run_hierarchy(const std::vector<TrigPoly>& polys, int m, std::int64_t A, std::int64_t B) {
  std::vector<LevelRun> runs(m + 1);
  {
    const TrigPoly& top = polys[m];
    auto& run = runs[m];
    run.first = A;
    run.roots.resize(static_cast<std::size_t>(B - A + 1));
    parallel_for(run.roots.size(), [&](std::size_t i) {
      const std::int64_t nu = A + static_cast<std::int64_t>(i);
      run.roots[i] = solve_labeled(top, periodic_point(top, nu - 1), periodic_point(top, nu), m, nu);
    });
  }
  for (int l = m - 1; l >= 0; --l) {
    const auto& prev = runs[l + 1];
    auto& run = runs[l];
    run.first = prev.first + 1;
    run.roots.resize(prev.roots.size() - 1);
    parallel_for(run.roots.size(), [&](std::size_t i) {
      run.roots[i] = solve_labeled(polys[l], prev.roots[i].k, prev.roots[i + 1].k, l,
                                   run.first + static_cast<std::int64_t>(i));
    });
  }
  return runs;
}

std::int64_t first_positive_label(const LevelRun& run, double k_eps, int level) {
  for (std::size_t i = 0; i < run.roots.size(); ++i) {
    if (run.roots[i].k > k_eps) return run.first + static_cast<std::int64_t>(i);
  }
  throw NumericalError("hierarchy window around k = 0 has no positive root at level " + std::to_string(level));
}

} // namespace

CellRoot root_in_cell(const TrigPoly& p, double lo, double hi) {
  const double flo = p(lo);
  const double fhi = p(hi);
  if (!(lo <= hi)) throw CellContractError("cell contract violation: lo > hi", p.level(), -1, lo, hi, flo, fhi);
  if (flo == 0.0) return {lo, true, 0.0};
  if (fhi == 0.0) return {hi, true, 0.0};
  if (opposite(flo, fhi)) {
    const double k = polish(p, lo, hi, flo, fhi);
    return {k, false, std::abs(p(k))};
  }
  const double tol = std::max(kDegeneracyTol, p.evaluation_noise(std::max(std::abs(lo), std::abs(hi))));
  if (std::min(std::abs(flo), std::abs(fhi)) < tol) {
    return std::abs(flo) <= std::abs(fhi) ? CellRoot{lo, true, std::abs(flo)} : CellRoot{hi, true, std::abs(fhi)};
  }
  std::ostringstream os;
  os.precision(17);
  os << "cell contract violation: no sign change on [" << lo << ", " << hi << "], f = (" << flo << ", " << fhi
     << ")";
  throw CellContractError(os.str(), p.level(), -1, lo, hi, flo, fhi);
}

std::int64_t regular_mu(const TrigPoly& p) {
  if (!is_regular(p)) throw ValidationError("p not regular: characteristic sum >= 1");
  const double g = p.effective_gamma0();
  const double k_eps = kNonPositiveRel * p.mean_spacing();
  // First cell (nu - 1, nu) whose upper end is positive.
  std::int64_t nu = static_cast<std::int64_t>(std::floor(-g)) + 1;
  while (periodic_point(p, nu) <= 0.0) ++nu;
  for (int tries = 0; tries < 3; ++tries, ++nu) {
    const CellRoot r = root_in_cell(p, periodic_point(p, nu - 1), periodic_point(p, nu));
    if (r.k > k_eps) return nu - 2;
  }
  throw NumericalError("regular_mu: no positive root in the first cells");
}

SeparatorLevel regular_separators(const TrigPoly& p, std::int64_t n_lo, std::int64_t n_hi) {
  SeparatorLevel out;
  out.level = p.level();
  out.mu = regular_mu(p);
  for (std::int64_t n = n_lo; n <= n_hi; ++n) out.separators.push_back({n, periodic_point(p, n + out.mu + 1)});
  return out;
}

double fixed_point_root(const TrigPoly& p, std::int64_t n) {
  const double alpha = characteristic_sum(p);
  if (!(alpha < 1.0 - kRegularityMargin)) throw ValidationError("p not regular: characteristic sum >= 1");
  const std::int64_t np = n + regular_mu(p);
  const double sign = (np % 2 == 0) ? 1.0 : -1.0;
  // base = pi (g + n') as hi + lo: the leading cosine is taken as cos(xi)
  // exactly, so any rounding in base would shift the root one-for-one.
  const double g = p.effective_gamma0();
  const double npd = static_cast<double>(np);
  const double gs = g + npd;
  const double gb = gs - npd;
  const double gs_lo = (npd - (gs - gb)) + (g - gb);
  constexpr double kPiLo = 1.2246467991473532e-16;
  const double base = kPi * gs;
  const double base_lo = std::fma(kPi, gs, -base) + kPi * gs_lo + kPiLo * gs;
  const double S0 = p.S0();
  // k(xi) = (xi + base) / S0 as k_hi + k_lo. Evaluating Phi at the rounded
  // k_hi alone makes h a staircase, and where h' is close to 1 its crossing
  // with the diagonal moves by many ulps.
  struct KSplit {
    double hi, lo;
  };
  auto k_split = [&](double xi) {
    const double x = xi + base;
    const double xb = x - base;
    const double x_lo = (base - (x - xb)) + (xi - xb) + base_lo;
    const double k_hi = x / S0;
    const double k_lo = (std::fma(-k_hi, S0, x) + x_lo) / S0;
    return KSplit{k_hi, k_lo};
  };
  auto k_of = [&](double xi) {
    const KSplit k = k_split(xi);
    return k.hi + k.lo;
  };
  auto h = [&](double xi) {
    const KSplit k = k_split(xi);
    const double phi = p.characteristic(k.hi) + k.lo * p.characteristic_derivative(k.hi);
    return std::acos(std::clamp(sign * phi, -1.0, 1.0));
  };
  const int cap = 10 * static_cast<int>(std::ceil(1.0 / (1.0 - alpha)));
  const double tol = 4.0 * std::numeric_limits<double>::epsilon();
  double xi = 0.5 * kPi;
  double last_step = std::numeric_limits<double>::infinity();
  int stalled = 0;
  for (int it = 0; it < cap; ++it) {
    const double x1 = h(xi);
    const double x2 = h(x1);
    const double denom = x2 - 2.0 * x1 + xi;
    double next = x2;
    if (std::abs(denom) > 1e-300) {
      const double acc = xi - (x1 - xi) * (x1 - xi) / denom;
      if (acc >= 0.0 && acc <= kPi) next = acc;
    }
    const double step = std::abs(next - xi);
    xi = next;
    // below tol, or three steps near the noise floor without progress
    stalled = (step < last_step || step > 1e-12) ? 0 : stalled + 1;
    last_step = std::min(last_step, step);
    if (step <= tol || stalled >= 3) {
      for (int polish = 0; polish < 3; ++polish) xi = h(xi);
      return k_of(xi);
    }
  }
  throw NumericalError("fixed_point_root: no convergence within " + std::to_string(cap) +
                       " iterations (alpha = " + std::to_string(alpha) + ")");
}

SeparatorHierarchy descend_hierarchy(const TrigPoly& p, std::int64_t n_lo, std::int64_t n_hi) {
  if (n_lo < 1 || n_hi < n_lo) throw ValidationError("index range must satisfy 1 <= n_lo <= n_hi");
  const Irregularity irr = irregularity_degree(TrigPoly(p.S0(), p.gamma0(), p.terms(), 0, p.scale()));
  const int m = std::max(0, irr.m - p.level());
  std::vector<TrigPoly> polys;
  for (int l = 0; l <= m; ++l) polys.push_back(differentiate(p, l));
  if (!is_regular(polys[m])) throw NumericalError("top hierarchy level is not regular");

  const double k_eps = kNonPositiveRel * p.mean_spacing();
  const std::int64_t W = 2 * m + 3;
  const auto near = run_hierarchy(polys, m, -W, W);
  std::vector<std::int64_t> j1(m + 1);
  for (int l = 0; l <= m; ++l) j1[l] = first_positive_label(near[l], k_eps, l);

  const std::int64_t j_lo = j1[0] + n_lo - 1;
  const std::int64_t j_hi = j1[0] + n_hi - 1;
  const std::int64_t A = j_lo - m - 2;
  const std::int64_t B = j_hi + 2;
  const auto runs = run_hierarchy(polys, m, A, B);

  SeparatorHierarchy out;
  out.m = m;
  for (int l = m; l >= 0; --l) {
    SeparatorLevel lev;
    lev.level = l;
    lev.mu = j1[l] - 2;
    if (l == m) {
      for (std::int64_t nu = A - 1; nu <= B; ++nu) lev.separators.push_back({nu - j1[l] + 1, periodic_point(polys[m], nu)});
    } else {
      const auto& up = runs[l + 1];
      for (std::size_t i = 0; i < up.roots.size(); ++i) {
        const std::int64_t label = up.first + static_cast<std::int64_t>(i);
        lev.separators.push_back({label - j1[l] + 1, up.roots[i].k});
      }
    }
    out.levels.push_back(std::move(lev));
  }

  const auto& r0 = runs[0];
  const auto& r1 = m > 0 ? runs[1] : runs[0];
  for (std::int64_t j = j_lo; j <= j_hi; ++j) {
    const auto i = static_cast<std::size_t>(j - r0.first);
    const CellRoot& c = r0.roots[i];
    SpectralRoot s;
    s.n = j - j1[0] + 1;
    s.k = c.k;
    s.degenerate = c.degenerate;
    s.residual = c.residual;
    if (m > 0) {
      s.lo = r1.roots[static_cast<std::size_t>(j - 1 - r1.first)].k;
      s.hi = r1.roots[static_cast<std::size_t>(j - r1.first)].k;
    } else {
      s.lo = periodic_point(polys[0], j - 1);
      s.hi = periodic_point(polys[0], j);
    }
    out.roots.push_back(s);
  }
  return out;
}

std::vector<double> oracle_scan(const TrigPoly& p, double k_lo, double k_hi, int samples_per_mean_spacing) {
  if (samples_per_mean_spacing < 100) throw ValidationError("samples_per_mean_spacing must be >= 100");
  if (!(k_hi > k_lo)) return {};
  const double step = p.mean_spacing() / samples_per_mean_spacing;
  const auto n = static_cast<std::size_t>(std::ceil((k_hi - k_lo) / step));
  auto grid = [&](std::size_t i) { return i == n ? k_hi : k_lo + static_cast<double>(i) * step; };

  std::vector<double> f(n + 1);
  parallel_for(n + 1, [&](std::size_t i) { f[i] = p(grid(i)); });

  std::vector<std::size_t> zeros, changes;
  for (std::size_t i = 0; i <= n; ++i) {
    if (f[i] == 0.0) zeros.push_back(i);
    if (i < n && opposite(f[i], f[i + 1])) changes.push_back(i);
  }
  std::vector<double> roots(changes.size());
  parallel_for(changes.size(), [&](std::size_t c) {
    const std::size_t i = changes[c];
    double a = grid(i), b = grid(i + 1), fa = f[i];
    for (;;) {
      const double mid = 0.5 * (a + b);
      if (!(mid > a && mid < b)) break;
      const double fm = p(mid);
      if (fm == 0.0) {
        a = b = mid;
        break;
      }
      if (opposite(fa, fm)) {
        b = mid;
      } else {
        a = mid;
        fa = fm;
      }
    }
    roots[c] = 0.5 * (a + b);
  });
  for (std::size_t i : zeros) roots.push_back(grid(i));
  std::sort(roots.begin(), roots.end());
  return roots;
}

std::vector<double> oracle_first_roots(const TrigPoly& p, std::size_t count, int samples_per_mean_spacing) {
  const double k_eps = kNonPositiveRel * p.mean_spacing();
  double K = (static_cast<double>(count) + 8.0) * p.mean_spacing();
  for (int attempt = 0; attempt < 32; ++attempt) {
    auto roots = oracle_scan(p, 0.0, K, samples_per_mean_spacing);
    std::erase_if(roots, [k_eps](double k) { return k <= k_eps; });
    if (roots.size() >= count) {
      roots.resize(count);
      return roots;
    }
    K *= 1.5;
  }
  throw NumericalError("oracle_first_roots: too few roots found");
}

} // namespace qgs
