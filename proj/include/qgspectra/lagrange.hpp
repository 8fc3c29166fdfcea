#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "qgspectra/taylor.hpp"

namespace qgs {

/// Root of x = a + w phi(x) by Lagrange inversion.
struct LagrangeProblem {
  double a = 0.0;
  double w = 0.0;
  /// phi evaluated on a series argument; used both for Taylor coefficients at a
  /// (argument a + h) and for pointwise validity sampling (order-0 argument).
  std::function<Series(const Series&)> phi;
  int order = 2;
  /// Half-width of the sampled window around a.
  double radius = 1.5707963267948966;
};

struct LagrangeResult {
  double x = 0.0;
  std::vector<double> partials;  // partials[v - 1] = estimate through term v
};

/// x* = a + sum_{v <= order} (w^v / v) [h^(v-1)] phi(a + h)^v. Requires the
/// sampled self-mapping check |w phi(x)| < radius at 100 points of [a - radius, a + radius].
LagrangeResult lagrange_root(const LagrangeProblem& p);

/// S0 k_n for Delta_R = sin(S0 k) - r sin(S1 k): the solution of
/// x = pi n + (-1)^n arcsin(r sin(rho x)), rho = S1 / S0.
LagrangeResult two_bond_root(double S0, double S1, double r, std::int64_t n, int order);

/// Closed-form second-order truncation of two_bond_root.
double two_bond_order2(double S0, double S1, double r, std::int64_t n);

} // namespace qgs
