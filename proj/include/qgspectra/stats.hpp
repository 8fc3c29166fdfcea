#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "qgspectra/detpoly.hpp"

namespace qgs {

enum class SpacingMode { raw, unit_mean };

struct SpacingSample {
  std::vector<double> roots;
  std::vector<double> spacings;  // s_n = k_n - k_{n-1}, zeros included
  SpacingMode mode = SpacingMode::raw;
  double mean = 0.0;             // empirical mean spacing before normalization
  double s_min = 0.0;            // over nonzero spacings
  double s_max = 0.0;
  std::size_t zero_count = 0;    // spacings below the degeneracy tolerance
  double zero_tol = 0.0;         // that tolerance, in the sample's units
};

/// Spacings of sorted roots. Spacings below `zero_tol` (absolute, raw units)
/// count as degenerate. Throws ValidationError on unsorted input.
SpacingSample nn_spacings(std::span<const double> roots, SpacingMode mode = SpacingMode::raw,
                          double zero_tol = 1e-9);

struct Histogram {
  std::vector<double> edges;         // bins + 1 edges
  std::vector<std::size_t> counts;
  std::vector<double> density;       // counts / (total * width)
  std::size_t above = 0;             // nonzero spacings beyond the last edge
};

/// Uniform bins over [0, upper]; degenerate spacings are excluded.
Histogram spacing_histogram(const SpacingSample& sample, double upper, int bins = 100);

struct BoundReport {
  bool pass = false;
  double s_max = 0.0;
  double bound = 0.0;   // pi (m + 1) / S0, in the sample's units
  double margin = 0.0;  // bound - s_max
};

/// s_max <= pi (m + 1) / S0. Unit-mean samples compare against the bound divided by the mean.
BoundReport spacing_bound_check(const SpacingSample& sample, int m, double S0);

enum class Ensemble { GOE, GUE };

/// Wigner surmise densities for unit mean spacing.
double wigner_reference(double s, Ensemble ensemble);

/// (p1, p2) -> spectral function of a two-parameter family.
using Family = std::function<TrigPoly(double, double)>;

struct GridSpec {
  double lo1 = -1.0, hi1 = 1.0;
  double lo2 = -1.0, hi2 = 1.0;
  int n1 = 64, n2 = 64;  // inclusive endpoints
};

struct RegimeDiagram {
  std::string family;
  std::vector<double> p1, p2;
  std::vector<int> m;  // m[i * p2.size() + j] at (p1[i], p2[j])

  int at(std::size_t i, std::size_t j) const { return m[i * p2.size() + j]; }
  int max_m() const;
};

RegimeDiagram regime_diagram(const std::string& name, const Family& family, const GridSpec& grid);

/// Linear chain with bond lengths `actions` and interior reflections (r2, r3),
/// reduced through determinant expansion.
TrigPoly four_vertex_chain(const std::array<double, 3>& actions, double r2, double r3);
Family four_vertex_chain_family(const std::array<double, 3>& actions);

struct SweepPoint {
  double r = 0.0;
  int m = 0;
  double s_min = 0.0;
  double s_max = 0.0;
  double bound = 0.0;
  std::size_t zero_count = 0;
};

/// r2 = r3 = r for each r, first `roots` roots by the separator hierarchy.
std::vector<SweepPoint> diagonal_sweep(const std::array<double, 3>& actions, std::span<const double> rs,
                                       std::size_t roots);

} // namespace qgs
