#pragma once

#include <random>
#include <vector>

#include "qgspectra/detpoly.hpp"

namespace qgs {

/// Random level-0 polynomial with `terms` Phi terms whose amplitudes sum to `alpha`.
inline TrigPoly random_trigpoly(std::mt19937_64& rng, int terms, double alpha, double S0 = 1.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> w(static_cast<std::size_t>(terms));
  double sum = 0.0;
  for (double& x : w) sum += (x = 0.05 + u(rng));
  std::vector<TrigTerm> out;
  for (double x : w) out.push_back({alpha * x / sum, 0.98 * S0 * u(rng), 2.0 * u(rng)});
  return TrigPoly(S0, u(rng), std::move(out));
}

} // namespace qgs
