#include "qgspectra/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "qgspectra/bootstrap.hpp"
#include "qgspectra/detpoly.hpp"
#include "qgspectra/error.hpp"
#include "qgspectra/graph_config.hpp"
#include "qgspectra/io.hpp"
#include "qgspectra/lagrange.hpp"
#include "qgspectra/orbits.hpp"
#include "qgspectra/parallel.hpp"
#include "qgspectra/random.hpp"
#include "qgspectra/spectral_formulas.hpp"
#include "qgspectra/stats.hpp"

namespace qgs::cli {

namespace {

using nlohmann::json;
constexpr double kPi = std::numbers::pi;

struct IndexRange {
  std::int64_t lo = 1;
  std::int64_t hi = 1;
};

IndexRange parse_range(const std::string& text) {
  IndexRange r;
  try {
    const auto dots = text.find("..");
    std::size_t pos = 0;
    if (dots == std::string::npos) {
      r.lo = r.hi = std::stoll(text, &pos);
      if (pos != text.size()) throw std::invalid_argument(text);
    } else {
      r.lo = std::stoll(text.substr(0, dots), &pos);
      if (pos != dots) throw std::invalid_argument(text);
      const std::string tail = text.substr(dots + 2);
      r.hi = std::stoll(tail, &pos);
      if (pos != tail.size()) throw std::invalid_argument(text);
    }
  } catch (const std::logic_error&) {
    throw ValidationError("schema violation: index range must look like a..b, got '" + text + "'");
  }
  if (r.lo < 1 || r.hi < r.lo) throw ValidationError("index range must satisfy 1 <= a <= b");
  return r;
}

std::pair<double, double> parse_real_range(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) throw ValidationError("schema violation: k range must look like lo..hi");
  try {
    return {std::stod(text.substr(0, dots)), std::stod(text.substr(dots + 2))};
  } catch (const std::logic_error&) {
    throw ValidationError("schema violation: k range must look like lo..hi, got '" + text + "'");
  }
}

std::array<double, 3> parse_actions(const std::string& text) {
  std::array<double, 3> a{};
  std::stringstream ss(text);
  std::string item;
  std::size_t i = 0;
  while (std::getline(ss, item, ',')) {
    if (i >= 3) throw ValidationError("schema violation: --actions needs exactly three values");
    try {
      a[i++] = std::stod(item);
    } catch (const std::logic_error&) {
      throw ValidationError("schema violation: --actions value '" + item + "' is not a number");
    }
  }
  if (i != 3) throw ValidationError("schema violation: --actions needs exactly three values");
  for (double x : a) {
    if (!(x > 0.0)) throw ValidationError("non-positive length: actions must be positive");
  }
  return a;
}

std::string fmt(double x) { return format_double(x); }

struct Input {
  std::string graph_path;
  std::string trigpoly_path;
  std::string dump_path;
  std::optional<Graph> graph;

  void add(CLI::App* app, bool with_dump = true) {
    app->add_option("--graph", graph_path, "graph config (YAML)");
    app->add_option("--trigpoly", trigpoly_path, "reduced spectral function (JSON)");
    if (with_dump) app->add_option("--dump-trigpoly", dump_path, "write the reduced spectral function as JSON");
  }

  TrigPoly load() {
    if (graph_path.empty() == trigpoly_path.empty()) {
      throw ValidationError("schema violation: exactly one of --graph or --trigpoly is required");
    }
    std::optional<TrigPoly> p;
    if (!graph_path.empty()) {
      graph = build_graph(load_graph_spec(graph_path));
      p = spectral_function(*graph);
    } else {
      p = load_trigpoly(trigpoly_path);
    }
    if (!dump_path.empty()) save_trigpoly(*p, dump_path);
    return *p;
  }

  const Graph& require_graph() {
    if (graph_path.empty()) throw ValidationError("schema violation: this command needs --graph");
    if (!graph) graph = build_graph(load_graph_spec(graph_path));
    return *graph;
  }

  std::vector<std::string> paths() const {
    std::vector<std::string> v;
    if (!graph_path.empty()) v.push_back(graph_path);
    if (!trigpoly_path.empty()) v.push_back(trigpoly_path);
    return v;
  }
};

struct Manifest {
  std::string command;
  std::vector<std::string> inputs;
  json params = json::object();
  std::vector<std::string> outputs;
};

void write_output(Manifest& man, const std::string& path, const std::string& contents) {
  write_file(path, contents);
  man.outputs.push_back(path);
}

void write_manifest(const Manifest& man, const std::string& out_path, double seconds) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = man.command;
  j["inputs"] = json::array();
  for (const auto& p : man.inputs) j["inputs"].push_back({{"path", p}, {"fnv1a64", fnv1a_hex(read_file(p))}});
  j["params"] = man.params;
  j["version"] = QGSPECTRA_VERSION;
  j["wall_time_s"] = seconds;
  j["outputs"] = json::array();
  for (const auto& p : man.outputs) j["outputs"].push_back({{"path", p}, {"fnv1a64", fnv1a_hex(read_file(p))}});
  write_file(out_path + ".manifest.json", j.dump(2) + "\n");
}

// --- subcommands ---

std::string run_solve(Input& in, const std::string& range_text, const std::string& method, Manifest& man) {
  const TrigPoly p = in.load();
  const IndexRange range = parse_range(range_text);
  man.params["n"] = range_text;
  man.params["method"] = method;
  std::ostringstream os;
  os << "n,k_n,E_n,method,level_m,residual,degenerate\n";
  auto row = [&](std::int64_t n, double k, int m, double residual, bool degenerate) {
    os << n << ',' << fmt(k) << ',' << fmt(k * k) << ',' << method << ',' << m << ',' << fmt(residual) << ','
       << (degenerate ? 1 : 0) << '\n';
  };
  if (method == "bootstrap") {
    const auto h = descend_hierarchy(p, range.lo, range.hi);
    for (const auto& r : h.roots) row(r.n, r.k, h.m, r.residual, r.degenerate);
  } else if (method == "oracle") {
    const int m = irregularity_degree(p).m;
    const auto roots = oracle_first_roots(p, static_cast<std::size_t>(range.hi));
    for (std::int64_t n = range.lo; n <= range.hi; ++n) {
      const double k = roots[static_cast<std::size_t>(n - 1)];
      row(n, k, m, std::abs(p(k)), false);
    }
  } else if (method == "fixed-point") {
    if (!is_regular(p)) throw ValidationError("p not regular: fixed-point method needs alpha < 1");
    for (std::int64_t n = range.lo; n <= range.hi; ++n) {
      const double k = fixed_point_root(p, n);
      row(n, k, 0, std::abs(p(k)), false);
    }
  } else {
    throw ValidationError("schema violation: unknown method '" + method + "'");
  }
  return os.str();
}

std::string run_expand(Input& in, const std::string& range_text, int lmax, const std::string& formula,
                       Manifest& man) {
  const Graph& g = in.require_graph();
  const IndexRange range = parse_range(range_text);
  man.params["n"] = range_text;
  man.params["lmax"] = lmax;
  man.params["formula"] = formula;
  const TrigPoly p = spectral_function(g);
  const auto h = descend_hierarchy(p, range.lo, range.hi);

  std::ostringstream os;
  if (formula == "staircase") {
    os << "n,estimate,reference\n";
    const Staircase N(g);
    for (const auto& r : h.roots) {
      os << r.n << ',' << fmt(root_by_staircase_integral(N, r.n, r.lo, r.hi)) << ',' << fmt(r.k) << '\n';
    }
    return os.str();
  }
  if (lmax < 1) throw ValidationError("--lmax must be >= 1");
  const OrbitCatalog cat = enumerate_orbits_cached(g, lmax, std::getenv("QGSPECTRA_CACHE_DIR") ? std::getenv("QGSPECTRA_CACHE_DIR") : "");
  const RegularCells cells = regular_cells(g);
  if (formula == "energy") check_energy_assumptions(g, cat);
  os << "n,estimate,reference";
  for (int l = 1; l <= lmax; ++l) os << ",partial_" << l;
  os << '\n';
  for (const auto& r : h.roots) {
    ExpansionResult e;
    double ref = r.k;
    if (formula == "orbit") {
      e = root_by_orbit_expansion(cells, cat, r.n, lmax);
    } else if (formula == "prime") {
      e = root_by_prime_expansion(cells, cat, r.n, lmax);
    } else if (formula == "energy") {
      e = regular_energy_expansion(cells, cat, r.n, lmax);
      ref = r.k * r.k;
    } else {
      throw ValidationError("schema violation: unknown formula '" + formula + "'");
    }
    os << r.n << ',' << fmt(e.estimate) << ',' << fmt(ref);
    for (double v : e.partials) os << ',' << fmt(v);
    os << '\n';
  }
  return os.str();
}

std::string run_lagrange(double s0, double s1, double r, const std::string& range_text, int order, Manifest& man) {
  const IndexRange range = parse_range(range_text);
  man.params["s0"] = s0;
  man.params["s1"] = s1;
  man.params["r"] = r;
  man.params["n"] = range_text;
  man.params["order"] = order;
  std::ostringstream os;
  os << "n,x_n,k_n";
  for (int v = 1; v <= order; ++v) os << ",partial_" << v;
  os << '\n';
  for (std::int64_t n = range.lo; n <= range.hi; ++n) {
    const auto res = two_bond_root(s0, s1, r, n, order);
    os << n << ',' << fmt(res.x) << ',' << fmt(res.x / s0);
    for (double v : res.partials) os << ',' << fmt(v);
    os << '\n';
  }
  return os.str();
}

std::string run_orbits(Input& in, int lmax, Manifest& man) {
  const Graph& g = in.require_graph();
  man.params["lmax"] = lmax;
  const char* cache = std::getenv("QGSPECTRA_CACHE_DIR");
  const OrbitCatalog cat = enumerate_orbits_cached(g, lmax, cache ? cache : "");
  std::ostringstream os;
  os << "canonical_word,l,l_P,nu,re_A,im_A,L0\n";
  for (int l = 1; l <= lmax; ++l) {
    for (const auto& o : cat.by_length[l]) {
      const auto d = prime_decompose(g, o);
      const auto word = canonical_rotation(o.word);
      for (std::size_t i = 0; i < word.size(); ++i) os << (i ? "-" : "") << word[i];
      os << ',' << l << ',' << d.prime.length() << ',' << d.nu << ',' << fmt(o.amplitude.real()) << ','
         << fmt(o.amplitude.imag()) << ',' << fmt(o.action) << '\n';
    }
  }
  return os.str();
}

std::string run_stats(Input& in, std::size_t count, const std::string& out_path, Manifest& man, std::ostream& out) {
  const TrigPoly p = in.load();
  man.params["roots"] = count;
  if (count < 2) throw ValidationError("--roots must be at least 2");
  const auto h = descend_hierarchy(p, 1, static_cast<std::int64_t>(count));
  std::vector<double> ks;
  for (const auto& r : h.roots) ks.push_back(r.k);
  const auto sample = nn_spacings(ks, SpacingMode::raw, 1e-9 * p.mean_spacing());
  const auto bound = spacing_bound_check(sample, h.m, p.S0());
  const auto hist = spacing_histogram(sample, bound.bound, 100);

  std::ostringstream hs;
  hs << "bin_lo,bin_hi,count,density,s_over_pi,goe,gue\n";
  for (std::size_t i = 0; i < hist.counts.size(); ++i) {
    const double mid = 0.5 * (hist.edges[i] + hist.edges[i + 1]);
    const double unit = mid / sample.mean;
    hs << fmt(hist.edges[i]) << ',' << fmt(hist.edges[i + 1]) << ',' << hist.counts[i] << ','
       << fmt(hist.density[i]) << ',' << fmt(mid / kPi) << ',' << fmt(wigner_reference(unit, Ensemble::GOE) / sample.mean)
       << ',' << fmt(wigner_reference(unit, Ensemble::GUE) / sample.mean) << '\n';
  }
  write_output(man, out_path + ".hist.csv", hs.str());

  out << "m = " << h.m << ", s_max = " << fmt(bound.s_max) << ", bound = " << fmt(bound.bound)
      << ", margin = " << fmt(bound.margin) << ", zero spacings = " << sample.zero_count
      << (bound.pass ? ", bound holds" : ", BOUND VIOLATED") << '\n';

  std::ostringstream os;
  os << "n,k_n,s_n\n";
  for (std::size_t i = 0; i < ks.size(); ++i) {
    os << i + 1 << ',' << fmt(ks[i]) << ',' << (i == 0 ? std::string() : fmt(sample.spacings[i - 1])) << '\n';
  }
  return os.str();
}

std::string run_diagram(const std::string& family, const std::string& actions_text, int grid, Manifest& man) {
  if (family != "four-vertex-chain") throw ValidationError("schema violation: unknown family '" + family + "'");
  const auto actions = parse_actions(actions_text);
  man.params["family"] = family;
  man.params["actions"] = actions_text;
  man.params["grid"] = grid;
  GridSpec spec;
  spec.n1 = spec.n2 = grid;
  const auto d = regime_diagram(family, four_vertex_chain_family(actions), spec);
  std::ostringstream os;
  os << "r2,r3,m\n";
  for (std::size_t i = 0; i < d.p1.size(); ++i) {
    for (std::size_t j = 0; j < d.p2.size(); ++j) os << fmt(d.p1[i]) << ',' << fmt(d.p2[j]) << ',' << d.at(i, j) << '\n';
  }
  return os.str();
}

void run_classify(Input& in, std::ostream& out) {
  const TrigPoly p = in.load();
  const auto irr = irregularity_degree(p);
  json j;
  j["S0"] = p.S0();
  j["gamma0"] = p.gamma0();
  j["N_Gamma"] = p.terms().size();
  j["alpha"] = characteristic_sum(p);
  j["m"] = irr.m;
  j["m_bound"] = irr.bound;
  out << j.dump(2) << '\n';
}

std::string run_oracle(Input& in, const std::string& krange, int samples, Manifest& man) {
  const TrigPoly p = in.load();
  const auto [lo, hi] = parse_real_range(krange);
  man.params["k"] = krange;
  man.params["samples"] = samples;
  const auto roots = oracle_scan(p, lo, hi, samples);
  std::ostringstream os;
  os << "i,k,residual\n";
  for (std::size_t i = 0; i < roots.size(); ++i) os << i + 1 << ',' << fmt(roots[i]) << ',' << fmt(std::abs(p(roots[i]))) << '\n';
  return os.str();
}

int run_selftest(std::uint64_t seed, std::ostream& out) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int failures = 0;
  auto report = [&](const std::string& name, bool ok, const std::string& detail) {
    out << (ok ? "PASS " : "FAIL ") << name << ": " << detail << '\n';
    if (!ok) ++failures;
  };

  {
    int bad_cells = 0;
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
      const TrigPoly p = random_trigpoly(rng, 1 + static_cast<int>(u(rng) * 4), 0.05 + 0.9 * u(rng));
      const auto sep = regular_separators(p, 0, 100);
      const auto roots = oracle_scan(p, sep.separators.front().k, sep.separators.back().k, 200);
      std::size_t idx = 0;
      for (std::size_t c = 1; c < sep.separators.size(); ++c) {
        std::size_t inside = 0;
        while (idx < roots.size() && roots[idx] <= sep.separators[c].k) {
          ++inside;
          ++idx;
        }
        if (inside != 1) ++bad_cells;
        const auto n = sep.separators[c].n;
        const double a = root_in_cell(p, sep.separators[c - 1].k, sep.separators[c].k).k;
        worst = std::max(worst, std::abs(a - fixed_point_root(p, n)));
      }
    }
    report("one-root-per-cell", bad_cells == 0, std::to_string(bad_cells) + " bad cells in 20 random polys");
    std::ostringstream d;
    d << "max |fixed point - bracketed| = " << worst;
    report("fixed-point-agreement", worst < 1e-12, d.str());
  }
  {
    double worst = 0.0;
    for (int t = 0; t < 10; ++t) {
      const std::array<double, 3> len{0.2 + u(rng), 0.2 + u(rng), 0.2 + u(rng)};
      const std::array<double, 2> refl{2.0 * u(rng) - 1.0, 2.0 * u(rng) - 1.0};
      const Graph g = build_graph(linear_chain_spec(len, refl));
      const ExpPoly e = expand_determinant(g);
      for (int i = 0; i < 20; ++i) {
        const double k = 0.01 + 100.0 * u(rng);
        worst = std::max(worst, std::abs(e(k) - numeric_determinant(g, k)));
      }
    }
    std::ostringstream d;
    d << "max |expansion - numeric det| = " << worst;
    report("determinant-expansion", worst < 1e-9, d.str());
  }
  {
    const std::array<double, 3> len{0.3 + u(rng), 0.3 + u(rng), 0.3 + u(rng)};
    const std::array<double, 2> refl{u(rng), -u(rng)};
    const Graph g = build_graph(linear_chain_spec(len, refl));
    const OrbitCatalog cat = enumerate_orbits(g, 6);
    double worst = 0.0;
    for (int l = 1; l <= 6; ++l) {
      const double k = 0.1 + 10.0 * u(rng);
      worst = std::max(worst, std::abs(matrix_trace_power(g, l, k) - cat.trace(l, k)));
    }
    std::ostringstream d;
    d << "max |Tr S^l - orbit sum| = " << worst;
    report("trace-identity", worst < 1e-9, d.str());
  }
  out << (failures == 0 ? "selftest passed" : "selftest FAILED") << " (seed " << seed << ")\n";
  return failures == 0 ? 0 : 1;
}

} // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"qgspectra: exact spectra of scaling quantum graphs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", QGSPECTRA_VERSION);
  unsigned threads = 0;
  app.add_option("--threads", threads, "worker threads (default: all cores)");

  Input in;
  std::string out_path, range = "1..10", method = "bootstrap", formula = "orbit", krange, family = "four-vertex-chain",
                        actions;
  int lmax = 8, order = 2, grid = 64, samples = 1000;
  double s0 = 0.0, s1 = 0.0, r = 0.0;
  std::size_t roots = 10000;
  std::uint64_t seed = 1;

  auto* solve = app.add_subcommand("solve", "roots k_n by index");
  in.add(solve);
  solve->add_option("--n", range, "index range a..b");
  solve->add_option("--method", method, "bootstrap | oracle | fixed-point");
  solve->add_option("--out", out_path, "CSV output")->required();

  auto* expand = app.add_subcommand("expand", "explicit spectral formulas");
  in.add(expand, false);
  expand->add_option("--n", range, "index range a..b");
  expand->add_option("--lmax", lmax, "symbolic-length cutoff");
  expand->add_option("--formula", formula, "staircase | orbit | prime | energy");
  expand->add_option("--out", out_path, "CSV output")->required();

  auto* lag = app.add_subcommand("lagrange", "Lagrange inversion for the two-bond spectral equation");
  lag->add_option("--s0", s0)->required();
  lag->add_option("--s1", s1)->required();
  lag->add_option("--r", r)->required();
  lag->add_option("--n", range, "index range a..b");
  lag->add_option("--order", order);
  lag->add_option("--out", out_path, "CSV output")->required();

  auto* orb = app.add_subcommand("orbits", "periodic-orbit catalog");
  orb->add_option("--graph", in.graph_path)->required();
  orb->add_option("--lmax", lmax);
  orb->add_option("--out", out_path, "CSV output")->required();

  auto* st = app.add_subcommand("stats", "nearest-neighbour spacings");
  in.add(st);
  st->add_option("--roots", roots);
  st->add_option("--out", out_path, "CSV output")->required();

  auto* dia = app.add_subcommand("diagram", "irregularity regime diagram");
  dia->add_option("--family", family);
  dia->add_option("--actions", actions, "a,b,c")->required();
  dia->add_option("--grid", grid);
  dia->add_option("--out", out_path, "CSV output")->required();

  auto* cls = app.add_subcommand("classify", "print S0, gamma0, alpha, m");
  in.add(cls);

  auto* ora = app.add_subcommand("oracle", "dense sign-change scan");
  in.add(ora);
  ora->add_option("--k", krange, "k range lo..hi")->required();
  ora->add_option("--samples", samples, "samples per mean spacing");
  ora->add_option("--out", out_path, "CSV output")->required();

  auto* self = app.add_subcommand("selftest", "randomized property checks");
  self->add_option("--seed", seed);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << QGSPECTRA_VERSION << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  const auto start = std::chrono::steady_clock::now();
  try {
    if (threads > 0) set_thread_count(threads);
    Manifest man;
    man.command = app.get_subcommands().front()->get_name();
    man.inputs = in.paths();
    std::string csv;
    if (*solve) {
      csv = run_solve(in, range, method, man);
    } else if (*expand) {
      csv = run_expand(in, range, lmax, formula, man);
    } else if (*lag) {
      csv = run_lagrange(s0, s1, r, range, order, man);
    } else if (*orb) {
      csv = run_orbits(in, lmax, man);
    } else if (*st) {
      csv = run_stats(in, roots, out_path, man, out);
    } else if (*dia) {
      csv = run_diagram(family, actions, grid, man);
    } else if (*cls) {
      run_classify(in, out);
      return 0;
    } else if (*ora) {
      csv = run_oracle(in, krange, samples, man);
    } else if (*self) {
      return run_selftest(seed, out);
    }
    write_output(man, out_path, csv);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(man, out_path, secs);
    return 0;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int dispatch(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return dispatch(args, std::cout, std::cerr);
}

} // namespace qgs::cli
