#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qgspectra/detpoly.hpp"
#include "qgspectra/error.hpp"

namespace qgs {

/// A cell [lo, hi] without a sign change whose endpoints are not near-zero.
class CellContractError : public NumericalError {
public:
  CellContractError(const std::string& msg, int level, std::int64_t cell, double lo, double hi, double f_lo,
                    double f_hi)
      : NumericalError(msg), level(level), cell(cell), lo(lo), hi(hi), f_lo(f_lo), f_hi(f_hi) {}
  int level;
  std::int64_t cell;
  double lo, hi, f_lo, f_hi;
};

struct CellRoot {
  double k = 0.0;
  bool degenerate = false;  // root coincides with a cell endpoint
  double residual = 0.0;    // |p(k)|
};

constexpr double kDegeneracyTol = 1e-11;

/// The unique root of p in [lo, hi]: bisection to 1e-6 relative width, then an
/// Illinois-safeguarded secant inside the bracket down to a few ulp. Endpoints
/// with |p| below max(1e-11, rounding noise) and no sign change are returned
/// as degenerate roots. Otherwise a missing sign change throws CellContractError.
CellRoot root_in_cell(const TrigPoly& p, double lo, double hi);

struct Separator {
  std::int64_t n = 0;
  double k = 0.0;
};

struct SeparatorLevel {
  int level = 0;
  std::int64_t mu = 0;
  /// Separator n is the upper end of the cell holding root n of this level.
  std::vector<Separator> separators;
};

struct SpectralRoot {
  std::int64_t n = 0;
  double k = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  bool degenerate = false;
  double residual = 0.0;
};

struct SeparatorHierarchy {
  int m = 0;
  /// Levels m, m-1, ..., 0.
  std::vector<SeparatorLevel> levels;
  /// Roots of the level-0 polynomial with index in the requested range.
  std::vector<SpectralRoot> roots;
};

/// mu such that root n of a regular p lies in ((pi/S0)(n + g + mu), (pi/S0)(n + g + mu + 1)),
/// g = effective gamma0, counting roots k > 0 from n = 1.
std::int64_t regular_mu(const TrigPoly& p);

/// Periodic separators k_n = (pi/S0)(n + g + mu + 1) for n in [n_lo, n_hi].
SeparatorLevel regular_separators(const TrigPoly& p, std::int64_t n_lo, std::int64_t n_hi);

/// Root n of a regular p by the contraction xi <- arccos((-1)^n' phi(xi)) with
/// Aitken acceleration, where x = S0 k - pi g - pi n' and n' = n + mu.
double fixed_point_root(const TrigPoly& p, std::int64_t n);

/// Roots n_lo..n_hi (n >= 1) of p via the separator hierarchy.
SeparatorHierarchy descend_hierarchy(const TrigPoly& p, std::int64_t n_lo, std::int64_t n_hi);

/// Dense sign-change scan with bisection refinement. Independent reference:
/// uses neither cells nor derivatives. Exact zeros on the grid are reported once.
std::vector<double> oracle_scan(const TrigPoly& p, double k_lo, double k_hi, int samples_per_mean_spacing = 1000);

/// First `count` positive roots by oracle_scan, growing the window as needed.
std::vector<double> oracle_first_roots(const TrigPoly& p, std::size_t count, int samples_per_mean_spacing = 1000);

} // namespace qgs
