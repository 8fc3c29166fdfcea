#include "qgspectra/orbits.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "qgspectra/error.hpp"
#include "qgspectra/io.hpp"
#include "qgspectra/parallel.hpp"

namespace qgs {

namespace {

constexpr char kCacheMagic[] = "qgspectra-orbits";
constexpr int kCacheVersion = 1;

std::vector<std::vector<int>> successors(const Graph& g) {
  const auto& t = g.transitions();
  std::vector<std::vector<int>> succ(g.num_directed());
  for (int i = 0; i < g.num_directed(); ++i) {
    for (int j = 0; j < g.num_directed(); ++j) {
      if (t(i, j) != Complex(0.0)) succ[i].push_back(j);
    }
  }
  return succ;
}

void build_primes(const Graph& graph, OrbitCatalog& cat) {
  std::map<std::vector<int>, PrimeOrbit> seen;
  for (int l = 1; l <= cat.l_max; ++l) {
    for (const auto& o : cat.by_length[l]) {
      const auto d = prime_decompose(graph, o);
      if (d.nu == 1) seen.try_emplace(d.prime.word, d.prime);
    }
  }
  cat.primes.clear();
  for (auto& [w, p] : seen) cat.primes.push_back(std::move(p));
  std::stable_sort(cat.primes.begin(), cat.primes.end(),
                   [](const PrimeOrbit& a, const PrimeOrbit& b) { return a.length() < b.length(); });
}

void save_cache(const OrbitCatalog& cat, const std::string& path) {
  std::ostringstream os;
  os << kCacheMagic << ' ' << kCacheVersion << ' ' << cat.l_max << ' ' << cat.count() << '\n';
  for (int l = 1; l <= cat.l_max; ++l) {
    for (const auto& o : cat.by_length[l]) {
      os << l << ' ' << format_double(o.amplitude.real()) << ' ' << format_double(o.amplitude.imag()) << ' '
         << format_double(o.action);
      for (int w : o.word) os << ' ' << w;
      os << '\n';
    }
  }
  const std::string tmp = path + ".tmp";
  write_file(tmp, os.str());
  std::filesystem::rename(tmp, path);
}

bool load_cache(const Graph& graph, const std::string& path, int l_max, OrbitCatalog& cat) {
  std::ifstream in(path);
  if (!in) return false;
  std::string magic;
  int version = 0, lm = 0;
  std::size_t count = 0;
  if (!(in >> magic >> version >> lm >> count) || magic != kCacheMagic || version != kCacheVersion || lm != l_max) {
    return false;
  }
  cat.l_max = l_max;
  cat.by_length.assign(l_max + 1, {});
  for (std::size_t i = 0; i < count; ++i) {
    int l = 0;
    double re = 0, im = 0;
    Orbit o;
    if (!(in >> l >> re >> im >> o.action) || l < 1 || l > l_max) return false;
    o.amplitude = {re, im};
    o.word.resize(l);
    for (int& w : o.word) {
      if (!(in >> w)) return false;
    }
    cat.by_length[l].push_back(std::move(o));
  }
  build_primes(graph, cat);
  return true;
}

} // namespace

std::size_t OrbitCatalog::count() const {
  std::size_t n = 0;
  for (const auto& v : by_length) n += v.size();
  return n;
}

Complex OrbitCatalog::trace(int l, double k) const {
  if (l < 1 || l > l_max) throw ValidationError("orbit length outside catalog range");
  Complex sum = 0.0;
  for (const auto& o : by_length[l]) sum += o.amplitude * std::polar(1.0, o.action * k);
  return sum;
}

double estimate_orbit_count(const Graph& graph, int l_max) {
  const int n = graph.num_directed();
  Eigen::MatrixXd adj = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) adj(i, j) = graph.transitions()(i, j) != Complex(0.0) ? 1.0 : 0.0;
  }
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(n, n);
  double total = 0.0;
  for (int l = 1; l <= l_max; ++l) {
    power = power * adj;
    total += power.trace();
  }
  return total;
}

OrbitCatalog enumerate_orbits(const Graph& graph, int l_max, std::size_t cap) {
  if (l_max < 1) throw ValidationError("l_max must be >= 1");
  const double estimate = estimate_orbit_count(graph, l_max);
  if (estimate > static_cast<double>(cap)) {
    std::ostringstream os;
    os << "orbit cap exceeded: " << estimate << " closed walks up to length " << l_max << " (cap " << cap << ")";
    throw ValidationError(os.str());
  }
  const auto succ = successors(graph);
  const auto& t = graph.transitions();
  const auto& phi = graph.directed_actions();
  const int n = graph.num_directed();

  // Depth-first walks from each start; one pass yields every closing length.
  std::vector<std::vector<std::vector<Orbit>>> per_start(n, std::vector<std::vector<Orbit>>(l_max + 1));
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t s) {
    const int start = static_cast<int>(s);
    std::vector<int> path{start};
    std::vector<Complex> amp{1.0};
    std::vector<double> act{phi[start]};
    std::vector<std::size_t> next{0};
    auto& out = per_start[s];
    while (!path.empty()) {
      const int cur = path.back();
      if (next.back() == 0) {
        const Complex close = t(cur, start);
        if (close != Complex(0.0)) {
          out[path.size()].push_back({path, amp.back() * close, act.back()});
        }
      }
      if (static_cast<int>(path.size()) < l_max && next.back() < succ[cur].size()) {
        const int nb = succ[cur][next.back()++];
        path.push_back(nb);
        amp.push_back(amp.back() * t(cur, nb));
        act.push_back(act.back() + phi[nb]);
        next.push_back(0);
      } else {
        path.pop_back();
        amp.pop_back();
        act.pop_back();
        next.pop_back();
      }
    }
  });

  OrbitCatalog cat;
  cat.l_max = l_max;
  cat.by_length.assign(l_max + 1, {});
  for (int l = 1; l <= l_max; ++l) {
    for (int s = 0; s < n; ++s) {
      auto& src = per_start[s][l];
      std::move(src.begin(), src.end(), std::back_inserter(cat.by_length[l]));
    }
  }
  build_primes(graph, cat);
  return cat;
}

std::string graph_digest(const Graph& graph) {
  std::ostringstream os;
  const auto& t = graph.transitions();
  for (Eigen::Index i = 0; i < t.rows(); ++i) {
    for (Eigen::Index j = 0; j < t.cols(); ++j) {
      os << format_double(t(i, j).real()) << ',' << format_double(t(i, j).imag()) << ';';
    }
  }
  for (double a : graph.directed_actions()) os << format_double(a) << ';';
  return fnv1a_hex(os.str());
}

OrbitCatalog enumerate_orbits_cached(const Graph& graph, int l_max, const std::string& cache_dir,
                                     std::size_t cap) {
  if (cache_dir.empty()) return enumerate_orbits(graph, l_max, cap);
  std::filesystem::create_directories(cache_dir);
  const std::string path =
      (std::filesystem::path(cache_dir) / ("orbits-" + graph_digest(graph) + "-l" + std::to_string(l_max) + ".txt"))
          .string();
  OrbitCatalog cat;
  if (load_cache(graph, path, l_max, cat)) return cat;
  cat = enumerate_orbits(graph, l_max, cap);
  save_cache(cat, path);
  return cat;
}

std::vector<int> canonical_rotation(const std::vector<int>& word) {
  std::vector<int> best = word;
  std::vector<int> rot(word.size());
  for (std::size_t s = 1; s < word.size(); ++s) {
    std::rotate_copy(word.begin(), word.begin() + static_cast<std::ptrdiff_t>(s), word.end(), rot.begin());
    if (rot < best) best = rot;
  }
  return best;
}

PrimeDecomposition prime_decompose(const Graph& graph, const Orbit& orbit) {
  const auto& w = orbit.word;
  const std::size_t l = w.size();
  if (l == 0) throw ValidationError("empty orbit word");
  // Prefix function; the smallest period of w is l - pi[l-1] when it divides l.
  std::vector<std::size_t> pi(l, 0);
  for (std::size_t i = 1; i < l; ++i) {
    std::size_t k = pi[i - 1];
    while (k > 0 && w[i] != w[k]) k = pi[k - 1];
    if (w[i] == w[k]) ++k;
    pi[i] = k;
  }
  std::size_t period = l - pi[l - 1];
  if (l % period != 0) period = l;
  const int nu = static_cast<int>(l / period);

  PrimeDecomposition d;
  d.nu = nu;
  const std::vector<int> base(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(period));
  d.prime.word = canonical_rotation(base);
  const auto& t = graph.transitions();
  d.prime.amplitude = 1.0;
  d.prime.action = 0.0;
  for (std::size_t j = 0; j < period; ++j) {
    d.prime.amplitude *= t(base[j], base[(j + 1) % period]);
    d.prime.action += graph.directed_actions()[base[j]];
  }
  return d;
}

Complex matrix_trace_power(const Graph& graph, int l, double k) {
  if (l < 1) throw ValidationError("l must be >= 1");
  const ComplexMatrix s = s_matrix(graph, k);
  ComplexMatrix p = s;
  for (int i = 1; i < l; ++i) p = p * s;
  return p.trace();
}

Complex trace_power(const Graph& graph, const OrbitCatalog& catalog, int l, double k) {
  const Complex m = matrix_trace_power(graph, l, k);
  const Complex o = catalog.trace(l, k);
  if (std::abs(m - o) > 1e-9 * std::max(1.0, std::abs(m))) {
    std::ostringstream os;
    os.precision(17);
    os << "trace consistency failure at l = " << l << ", k = " << k << ": matrix " << m << " vs orbit sum " << o;
    throw NumericalError(os.str());
  }
  return m;
}

Complex trace_power(const Graph& graph, int l, double k) {
  return trace_power(graph, enumerate_orbits(graph, l), l, k);
}

} // namespace qgs
