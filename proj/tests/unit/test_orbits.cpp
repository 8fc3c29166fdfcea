#include "doctest.h"

#include <array>
#include <cmath>
#include <filesystem>
#include <random>

#include "qgspectra/error.hpp"
#include "qgspectra/orbits.hpp"

using namespace qgs;

namespace {

Graph chain() {
  const std::array<double, 3> len{0.2, 0.6565, 0.1435};
  const std::array<double, 2> refl{0.4, -0.7};
  return build_graph(linear_chain_spec(len, refl));
}

Graph lasso() {
  GraphSpec s;
  s.vertices = {0, 1, 2, 3};
  s.bonds = {{0, 1, 0.31, 0.0}, {1, 2, 0.27, 0.2}, {2, 0, 0.19, -0.5}, {2, 3, 0.4, 0.0}};
  s.scattering.dirichlet = {3};
  return build_graph(s);
}

Graph star() {
  GraphSpec s;
  s.vertices = {0, 1, 2, 3};
  s.bonds = {{0, 1, 0.31, 0.0}, {0, 2, 0.47, 0.0}, {0, 3, 0.22, 0.0}};
  s.scattering.dirichlet = {1, 2, 3};
  return build_graph(s);
}

// Tr S^l by plain complex matrix multiplication written out here.
Complex naive_trace(const Graph& g, int l, double k) {
  const int n = g.num_directed();
  std::vector<Complex> S(n * n), P(n * n, 0.0), tmp(n * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) S[i * n + j] = g.transitions()(i, j) * std::polar(1.0, g.directed_actions()[i] * k);
    P[i * n + i] = 1.0;
  }
  for (int step = 0; step < l; ++step) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        Complex acc = 0.0;
        for (int q = 0; q < n; ++q) acc += P[i * n + q] * S[q * n + j];
        tmp[i * n + j] = acc;
      }
    }
    P.swap(tmp);
  }
  Complex tr = 0.0;
  for (int i = 0; i < n; ++i) tr += P[i * n + i];
  return tr;
}

} // namespace

TEST_CASE("orbit sums reproduce Tr S^l") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.1, 50.0);
  for (const Graph& g : {chain(), lasso(), star()}) {
    const OrbitCatalog cat = enumerate_orbits(g, 8);
    CHECK(static_cast<double>(cat.count()) == estimate_orbit_count(g, 8));
    for (int i = 0; i < 10; ++i) {
      const double k = u(rng);
      for (int l = 1; l <= 8; ++l) {
        const Complex ref = naive_trace(g, l, k);
        CHECK(std::abs(cat.trace(l, k) - ref) < 1e-10);
        CHECK(std::abs(matrix_trace_power(g, l, k) - ref) < 1e-10);
        CHECK(std::abs(trace_power(g, cat, l, k) - ref) < 1e-10);
      }
    }
  }
}

TEST_CASE("prime classes satisfy the necklace identity") {
  const Graph g = lasso();
  const OrbitCatalog cat = enumerate_orbits(g, 9);
  std::vector<std::size_t> primes_by_len(10, 0);
  for (const auto& p : cat.primes) ++primes_by_len[p.length()];
  for (int l = 1; l <= 9; ++l) {
    std::size_t total = 0;
    for (int d = 1; d <= l; ++d) {
      if (l % d == 0) total += static_cast<std::size_t>(d) * primes_by_len[d];
    }
    CHECK(total == cat.by_length[l].size());
  }
}

TEST_CASE("prime decomposition of repeated words") {
  const Graph g = chain();
  const OrbitCatalog cat = enumerate_orbits(g, 6);
  for (const auto& o : cat.by_length[6]) {
    const auto d = prime_decompose(g, o);
    CHECK(d.prime.length() * d.nu == 6);
    CHECK(std::abs(std::pow(d.prime.amplitude, d.nu) - o.amplitude) < 1e-13);
    CHECK(d.prime.action * d.nu == doctest::Approx(o.action));
    CHECK(d.prime.word == canonical_rotation(d.prime.word));
  }
  CHECK(canonical_rotation({3, 1, 2, 1, 0}) == std::vector<int>{0, 3, 1, 2, 1});
}

TEST_CASE("orbit cache round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "qgs_orbit_cache_test";
  std::filesystem::remove_all(dir);
  const Graph g = lasso();
  const OrbitCatalog a = enumerate_orbits_cached(g, 6, dir.string());
  CHECK(std::distance(std::filesystem::directory_iterator(dir), std::filesystem::directory_iterator{}) == 1);
  const OrbitCatalog b = enumerate_orbits_cached(g, 6, dir.string());
  CHECK(a.count() == b.count());
  CHECK(a.primes.size() == b.primes.size());
  CHECK(std::abs(a.trace(5, 3.3) - b.trace(5, 3.3)) < 1e-13);
  std::filesystem::remove_all(dir);
}

TEST_CASE("orbit cap") {
  CHECK_THROWS_WITH(enumerate_orbits(lasso(), 12, 100), doctest::Contains("orbit cap exceeded"));
}
