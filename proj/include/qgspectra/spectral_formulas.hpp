#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "qgspectra/detpoly.hpp"
#include "qgspectra/graph.hpp"
#include "qgspectra/orbits.hpp"

namespace qgs {

struct StaircaseEval {
  double k = 0.0;
  double N = 0.0;
  double Nbar = 0.0;
  std::vector<double> sigma;  // eigenphases of S(k) in [0, 2 pi)
};

/// Spectral counting function from the eigenphases of S(k):
///   N(k) = S0 k / pi + c + sum_j (pi - sigma_j) / (2 pi),
/// where an eigenphase within 1e-12 of zero contributes its midpoint value 0.
/// The constant c is fixed once so that N vanishes just above k = 0.
class Staircase {
public:
  explicit Staircase(Graph graph);

  StaircaseEval operator()(double k) const;
  double constant() const noexcept { return c_; }
  const Graph& graph() const noexcept { return graph_; }

private:
  double raw(double k, std::vector<double>* sigma) const;

  Graph graph_;
  double c_ = 0.0;
};

StaircaseEval staircase(const Graph& graph, double k);

/// k_n = n hi - (n - 1) lo - integral_lo^hi N(k) dk over the level-0 cell
/// (lo, hi) = (k^_{n-1}, k^_n). Midpoint panels (64 per mean spacing), with
/// panels that contain a step refined by bisection.
double root_by_staircase_integral(const Staircase& N, std::int64_t n, double lo, double hi);

struct ExpansionResult {
  std::int64_t n = 0;
  double estimate = 0.0;
  int l_max = 0;
  std::vector<double> partials;  // partials[l - 1]: estimate with lengths <= l
  double reference = 0.0;        // oracle value when known, else NaN
};

/// Regular-graph data shared by the expansions: S0, gamma0, mu and the
/// midpoint k_bar_n = pi (n + mu + 1/2 + gamma0) / S0.
struct RegularCells {
  double S0 = 0.0;
  double gamma0 = 0.0;
  std::int64_t mu = 0;

  double separator(std::int64_t n) const;  // upper end of cell n
  double midpoint(std::int64_t n) const;
};

/// Throws ValidationError("graph not regular") unless the spectral function has alpha < 1.
RegularCells regular_cells(const Graph& graph);

/// k_n = k_bar_n - (2/pi) Im sum_{l <= l_max} (1/l) sum_{walks} A e^{i L k_bar_n} sin(pi L / (2 S0)) / L.
ExpansionResult root_by_orbit_expansion(const Graph& graph, std::int64_t n, int l_max);
ExpansionResult root_by_orbit_expansion(const RegularCells& cells, const OrbitCatalog& catalog, std::int64_t n,
                                        int l_max);

/// The same series regrouped over prime orbits P and repetitions nu with nu l_P <= l_max:
///   k_bar_n - (2/pi) Im sum A_P^nu e^{i nu L_P k_bar_n} sin(nu pi L_P / (2 S0)) / (nu^2 L_P).
ExpansionResult root_by_prime_expansion(const Graph& graph, std::int64_t n, int l_max);
ExpansionResult root_by_prime_expansion(const RegularCells& cells, const OrbitCatalog& catalog, std::int64_t n,
                                        int l_max);

struct EnergyAssumptions {
  double kappa2 = 0.0;         // estimated from the first 50 roots
  double max_imag_amplitude = 0.0;
};

/// Checks kappa2 = 1/2 (tolerance 0.05) and real prime amplitudes; throws
/// ValidationError naming the violated assumption.
EnergyAssumptions check_energy_assumptions(const Graph& graph, const OrbitCatalog& catalog);

/// Three-term energy expansion with omega_p = pi S_p / S0, primes and
/// repetitions summed while nu l_P <= cutoff. partials are per symbolic length.
ExpansionResult regular_energy_expansion(const Graph& graph, std::int64_t n, int cutoff);
ExpansionResult regular_energy_expansion(const RegularCells& cells, const OrbitCatalog& catalog, std::int64_t n,
                                         int cutoff);

using RealFunction = std::function<double(double)>;

/// f(k_n) = n f(k^_n) - (n-1) f(k^_{n-1}) - int f' Nbar dk
///          - (1/pi) Im sum_l (1/l) sum_{walks} A G_n(L),
/// with G_n(x) = int_cell f'(k) e^{i x k} dk by adaptive Gauss-Kronrod quadrature.
ExpansionResult function_of_root(const Graph& graph, std::int64_t n, const RealFunction& f,
                                 const RealFunction& fprime, int l_max);

} // namespace qgs
