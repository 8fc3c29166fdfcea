#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "qgspectra/bootstrap.hpp"
#include "qgspectra/error.hpp"
#include "qgspectra/random.hpp"
#include "qgspectra/stats.hpp"

using namespace qgs;
using std::numbers::pi;

TEST_CASE("pure cosine has its roots at the known points") {
  const TrigPoly p(2.0, 0.3, {});
  const auto roots = oracle_scan(p, 0.0, 20.0);
  REQUIRE(!roots.empty());
  for (std::size_t i = 0; i < roots.size(); ++i) {
    // cos(2k - 0.3 pi) = 0
    const double x = 2.0 * roots[i] - 0.3 * pi;
    CHECK(std::abs(std::cos(x)) < 1e-14);
  }
  const auto h = descend_hierarchy(p, 1, 10);
  CHECK(h.m == 0);
  for (std::size_t i = 0; i < h.roots.size(); ++i) CHECK(h.roots[i].k == doctest::Approx(roots[i]).epsilon(1e-14));
}

TEST_CASE("regular separators bracket exactly one root") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 30; ++t) {
    const TrigPoly p = random_trigpoly(rng, 1 + t % 5, 0.02 + 0.03 * t);
    const auto lvl = regular_separators(p, 1, 200);
    const auto roots = oracle_scan(p, lvl.separators.front().k, lvl.separators.back().k, 400);
    REQUIRE(roots.size() == lvl.separators.size() - 1);
    for (std::size_t c = 1; c < lvl.separators.size(); ++c) {
      CHECK(roots[c - 1] > lvl.separators[c - 1].k);
      CHECK(roots[c - 1] < lvl.separators[c].k);
      const double a = root_in_cell(p, lvl.separators[c - 1].k, lvl.separators[c].k).k;
      CHECK(std::abs(a - roots[c - 1]) < 1e-12);
      CHECK(std::abs(fixed_point_root(p, lvl.separators[c].n) - a) < 1e-12);
    }
  }
}

TEST_CASE("first root lies in the first cell") {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 20; ++t) {
    const TrigPoly p = random_trigpoly(rng, 3, 0.9);
    const auto first = oracle_first_roots(p, 3);
    const auto h = descend_hierarchy(p, 1, 3);
    for (int i = 0; i < 3; ++i) CHECK(h.roots[i].k == doctest::Approx(first[i]).epsilon(1e-13));
    CHECK(first[0] > 0.0);
  }
}

TEST_CASE("two-bond anchors") {
  const double S0 = 0.3 + 0.7 / std::sqrt(2.0), S1 = 0.3 - 0.7 / std::sqrt(2.0);
  const double r = (std::sqrt(2.0) - 1) / (std::sqrt(2.0) + 1);
  // sin(S0 k) - r sin(S1 k) = cos(S0 k - pi/2) - r cos(|S1| k + pi/2)
  const TrigPoly p(S0, 0.5, {{r, std::abs(S1), -0.5}});
  for (double k = 0.2; k < 5.0; k += 0.3) {
    CHECK(p(k) == doctest::Approx(std::sin(S0 * k) - r * std::sin(S1 * k)).epsilon(1e-13));
  }
  const auto h = descend_hierarchy(p, 1, 100);
  CHECK(S0 * h.roots[0].k == doctest::Approx(3.26507).epsilon(3e-6));
  CHECK(S0 * h.roots[9].k == doctest::Approx(31.24664).epsilon(3e-7));
  CHECK(S0 * h.roots[99].k == doctest::Approx(313.98697).epsilon(3e-8));
}

TEST_CASE("hierarchy matches the oracle for irregular chains") {
  for (auto [r, actions] : {std::pair{0.6, std::array{0.2, 0.6565, 0.1435}}, std::pair{0.95, std::array{0.2, 0.6565, 0.1435}},
                            std::pair{0.99, std::array{0.1, 0.8565, 0.0435}}}) {
    const TrigPoly p = four_vertex_chain(actions, r, r);
    const auto h = descend_hierarchy(p, 1, 300);
    CHECK(h.m >= 1);
    CHECK(static_cast<int>(h.levels.size()) == h.m + 1);
    const auto oracle = oracle_first_roots(p, 300);
    REQUIRE(h.roots.size() == oracle.size());
    for (std::size_t i = 0; i < oracle.size(); ++i) CHECK(std::abs(h.roots[i].k - oracle[i]) < 1e-10);
  }
}

TEST_CASE("window in the middle of the spectrum") {
  const TrigPoly p = four_vertex_chain({0.2, 0.6565, 0.1435}, 0.95, 0.95);
  const auto all = descend_hierarchy(p, 1, 600);
  const auto mid = descend_hierarchy(p, 500, 520);
  REQUIRE(mid.roots.size() == 21);
  for (const auto& r : mid.roots) CHECK(r.k == doctest::Approx(all.roots[r.n - 1].k).epsilon(1e-14));
}

TEST_CASE("contract errors") {
  const TrigPoly p(1.0, 0.0, {{0.5, 0.5, 0.0}});
  CHECK_THROWS_AS(root_in_cell(p, 0.1, 0.2), CellContractError);
  CHECK_THROWS_AS(oracle_scan(p, 0.0, 10.0, 50), ValidationError);
  const TrigPoly q(1.0, 0.0, {{1.5, 0.5, 0.0}});
  CHECK_THROWS_AS(fixed_point_root(q, 3), ValidationError);
  CHECK_THROWS_AS(descend_hierarchy(p, 5, 2), ValidationError);
}

TEST_CASE("degenerate roots at full reflection are reported once per label") {
  const TrigPoly p = four_vertex_chain({0.1, 0.8999, 0.0001}, 1.0, 1.0);
  const auto h = descend_hierarchy(p, 1, 2000);
  REQUIRE(h.roots.size() == 2000);
  for (std::size_t i = 1; i < h.roots.size(); ++i) CHECK(h.roots[i].k >= h.roots[i - 1].k);
  for (const auto& r : h.roots) CHECK(std::abs(p(r.k)) < 1e-9);
}
