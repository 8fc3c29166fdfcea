#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "qgspectra/graph.hpp"

namespace qgs {

/// Closed walk I_0 -> I_1 -> ... -> I_{l-1} -> I_0 on directed bonds.
struct Orbit {
  std::vector<int> word;
  Complex amplitude;  // prod_j t(I_j, I_{j+1}), cyclically
  double action = 0.0;  // sum_j beta_{I_j} L_{I_j}

  int length() const noexcept { return static_cast<int>(word.size()); }
};

/// A primitive orbit class, stored by its lexicographically least rotation.
struct PrimeOrbit {
  std::vector<int> word;
  Complex amplitude;
  double action = 0.0;

  int length() const noexcept { return static_cast<int>(word.size()); }
};

struct PrimeDecomposition {
  PrimeOrbit prime;
  int nu = 1;
};

/// All closed walks up to l_max, one entry per starting bond (the trace
/// convention), plus the prime classes among them.
struct OrbitCatalog {
  int l_max = 0;
  std::vector<std::vector<Orbit>> by_length;  // by_length[l], l = 0..l_max; entry 0 unused
  std::vector<PrimeOrbit> primes;              // sorted by (length, word)

  std::size_t count() const;
  /// sum over walks of length l of A exp(i L k).
  Complex trace(int l, double k) const;
};

constexpr std::size_t kDefaultOrbitCap = 10'000'000;

/// Exact number of closed walks with nonzero amplitude, lengths 1..l_max.
double estimate_orbit_count(const Graph& graph, int l_max);

OrbitCatalog enumerate_orbits(const Graph& graph, int l_max, std::size_t cap = kDefaultOrbitCap);

/// enumerate_orbits backed by a file cache in `cache_dir` keyed by graph digest
/// and l_max. An empty directory string disables caching.
OrbitCatalog enumerate_orbits_cached(const Graph& graph, int l_max, const std::string& cache_dir,
                                     std::size_t cap = kDefaultOrbitCap);

/// Digest of everything that determines the orbit catalog of a graph.
std::string graph_digest(const Graph& graph);

/// Smallest period p of the word with word = (prefix of length p)^nu. The
/// prime amplitude is the product of t along one period, so A = A_P^nu.
PrimeDecomposition prime_decompose(const Graph& graph, const Orbit& orbit);

/// Lexicographically least rotation.
std::vector<int> canonical_rotation(const std::vector<int>& word);

/// Tr S(k)^l by matrix power, checked against the orbit sum; a mismatch above
/// 1e-9 throws NumericalError.
Complex trace_power(const Graph& graph, int l, double k);
Complex trace_power(const Graph& graph, const OrbitCatalog& catalog, int l, double k);

/// Tr S(k)^l by repeated matrix multiplication only.
Complex matrix_trace_power(const Graph& graph, int l, double k);

} // namespace qgs
