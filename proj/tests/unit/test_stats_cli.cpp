#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <numbers>
#include <sstream>

#include "json.hpp"

#include "qgspectra/cli.hpp"
#include "qgspectra/error.hpp"
#include "qgspectra/io.hpp"
#include "qgspectra/stats.hpp"

using namespace qgs;
using std::numbers::pi;

TEST_CASE("spacings and histogram") {
  const std::vector<double> roots{1.0, 2.0, 2.0, 4.0, 4.5};
  const auto s = nn_spacings(roots);
  CHECK(s.spacings == std::vector<double>{1.0, 0.0, 2.0, 0.5});
  CHECK(s.zero_count == 1);
  CHECK(s.s_min == 0.5);
  CHECK(s.s_max == 2.0);
  CHECK(s.mean == doctest::Approx(0.875));

  const auto u = nn_spacings(roots, SpacingMode::unit_mean);
  CHECK(u.s_max == doctest::Approx(2.0 / 0.875));

  const auto h = spacing_histogram(s, 1.5, 3);
  CHECK(h.counts == std::vector<std::size_t>{0, 1, 1});
  CHECK(h.above == 1);
  CHECK(h.density[1] == doctest::Approx(1.0 / (3 * 0.5)));

  const std::vector<double> bad{1.0, 0.5};
  CHECK_THROWS_WITH_AS(nn_spacings(bad), doctest::Contains("unsorted input"), ValidationError);
}

TEST_CASE("bound check") {
  const std::vector<double> roots{0.0, 1.0, 4.5};
  const auto s = nn_spacings(roots);
  const auto ok = spacing_bound_check(s, 0, 1.0);
  CHECK(ok.bound == doctest::Approx(pi));
  CHECK_FALSE(ok.pass);
  CHECK(spacing_bound_check(s, 1, 1.0).pass);
}

TEST_CASE("wigner surmise is normalized with unit mean") {
  for (auto e : {Ensemble::GOE, Ensemble::GUE}) {
    double norm = 0.0, mean = 0.0;
    const double h = 1e-4;
    for (double s = 0.5 * h; s < 10.0; s += h) {
      norm += wigner_reference(s, e) * h;
      mean += s * wigner_reference(s, e) * h;
    }
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(mean == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("regime diagram grid") {
  GridSpec small;
  small.n1 = small.n2 = 8;
  const Family fam = four_vertex_chain_family({0.2, 0.6565, 0.1435});
  CHECK_THROWS_AS(regime_diagram("four-vertex-chain", fam, small), ValidationError);
  GridSpec g;
  g.n1 = g.n2 = 32;
  const auto d = regime_diagram("four-vertex-chain", fam, g);
  CHECK(d.p1.front() == -1.0);
  CHECK(d.p1.back() == 1.0);
  CHECK(d.at(16, 16) == 0);  // near r2 = r3 = 0
  CHECK(d.max_m() == 2);
  // symmetric under r -> -r of both reflections
  for (std::size_t i = 0; i < 32; ++i) {
    for (std::size_t j = 0; j < 32; ++j) CHECK(d.at(i, j) == d.at(31 - i, 31 - j));
  }
}

TEST_CASE("diagonal sweep spacings") {
  const std::vector<double> rs{0.3, 0.8, 0.97};
  const auto pts = diagonal_sweep({0.1, 0.8565, 0.0435}, rs, 500);
  REQUIRE(pts.size() == 3);
  // regular: |S0 k_n - pi(n + c)| <= asin(alpha), so spacings stay within pi +- 2 asin(alpha)
  const double alpha = 0.3 + 0.3 + 0.09;
  CHECK(pts[0].m == 0);
  CHECK(pts[0].s_max <= pi + 2 * std::asin(alpha));
  CHECK(pts[0].s_min >= pi - 2 * std::asin(alpha));
  CHECK(pts[0].s_max > pi);  // the mean is pi, so the linear estimate cannot hold at m = 0
  for (std::size_t i = 1; i < pts.size(); ++i) {
    CHECK(pts[i].m >= 1);
    CHECK(pts[i].s_max <= pts[i].bound);
  }
  CHECK(pts[0].m <= pts[2].m);
}

namespace {

int run(const std::vector<std::string>& args, std::string* out_text = nullptr) {
  std::ostringstream out, err;
  const int rc = cli::dispatch(args, out, err);
  if (out_text) *out_text = out.str();
  return rc;
}

} // namespace

TEST_CASE("cli writes csv and manifest") {
  const auto dir = std::filesystem::temp_directory_path() / "qgs_cli_test";
  std::filesystem::create_directories(dir);
  const std::string data = QGS_DATA_DIR;
  const std::string csv = (dir / "solve.csv").string();
  REQUIRE(run({"solve", "--graph", data + "/two_bond.yaml", "--n", "1..5", "--out", csv}) == 0);
  const std::string text = read_file(csv);
  CHECK(text.rfind("n,k_n,E_n,method,level_m,residual,degenerate\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 6);
  const auto man = nlohmann::json::parse(read_file(csv + ".manifest.json"));
  CHECK(man["command"] == "solve");
  CHECK(man["schema_version"] == kSchemaVersion);
  CHECK(man["inputs"].size() == 1);

  // identical reruns give identical bytes
  const std::string csv2 = (dir / "solve2.csv").string();
  REQUIRE(run({"solve", "--graph", data + "/two_bond.yaml", "--n", "1..5", "--out", csv2}) == 0);
  CHECK(read_file(csv2) == text);

  std::string cls;
  REQUIRE(run({"classify", "--graph", data + "/four_vertex_chain.yaml"}, &cls) == 0);
  CHECK(nlohmann::json::parse(cls)["m"] == 2);

  CHECK(run({"solve", "--graph", data + "/two_bond.yaml", "--n", "x", "--out", csv}) == 2);
  CHECK(run({"solve", "--out", csv}) == 2);
  CHECK(run({"bogus"}) == 2);
  CHECK(run({"classify", "--graph", data + "/missing.yaml"}) == 2);
  std::filesystem::remove_all(dir);
}
