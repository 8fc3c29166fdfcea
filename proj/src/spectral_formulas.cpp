#include "qgspectra/spectral_formulas.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qgspectra/bootstrap.hpp"
#include "qgspectra/error.hpp"

namespace qgs {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kEigenphaseAtRoot = 1e-12;
constexpr int kPanelsPerSpacing = 64;

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

double gk_integrate(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, 1e-13);
}

ExpansionResult make_result(std::int64_t n, int l_max) {
  ExpansionResult r;
  r.n = n;
  r.l_max = l_max;
  r.reference = nan();
  return r;
}

} // namespace

Staircase::Staircase(Graph graph) : graph_(std::move(graph)) {
  c_ = -raw(1e-6 * kPi / graph_.S0(), nullptr);
}

double Staircase::raw(double k, std::vector<double>* sigma) const {
  const ComplexMatrix s = s_matrix(graph_, k);
  Eigen::ComplexEigenSolver<ComplexMatrix> es(s, false);
  if (es.info() != Eigen::Success) throw NumericalError("eigenphase solver failure at k = " + std::to_string(k));
  double fluct = 0.0;
  for (Eigen::Index j = 0; j < es.eigenvalues().size(); ++j) {
    double ph = std::arg(es.eigenvalues()(j));
    if (ph < 0.0) ph += kTwoPi;
    if (ph >= kTwoPi) ph -= kTwoPi;
    if (sigma) sigma->push_back(ph);
    if (ph < kEigenphaseAtRoot || kTwoPi - ph < kEigenphaseAtRoot) continue;  // midpoint of the jump
    fluct += (kPi - ph) / kTwoPi;
  }
  return graph_.S0() * k / kPi + fluct;
}

StaircaseEval Staircase::operator()(double k) const {
  StaircaseEval e;
  e.k = k;
  e.N = raw(k, &e.sigma) + c_;
  e.Nbar = graph_.S0() * k / kPi + c_;
  return e;
}

StaircaseEval staircase(const Graph& graph, double k) { return Staircase(graph)(k); }

double root_by_staircase_integral(const Staircase& N, std::int64_t n, double lo, double hi) {
  if (!(hi > lo)) throw ValidationError("cell must satisfy lo < hi");
  const double spacing = kPi / N.graph().S0();
  const auto panels = static_cast<std::size_t>(std::max(1.0, std::ceil(kPanelsPerSpacing * (hi - lo) / spacing)));
  auto count = [&](double k) { return std::llround(N(k).N); };
  std::vector<double> edge(panels + 1);
  std::vector<long long> val(panels + 1);
  for (std::size_t i = 0; i <= panels; ++i) {
    edge[i] = i == panels ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(panels);
    val[i] = count(edge[i]);
  }
  if (val.front() != n - 1 || val.back() != n) {
    std::ostringstream os;
    os << "quadrature nonconvergence: staircase at cell " << n << " ends is (" << val.front() << ", " << val.back()
       << "), expected (" << n - 1 << ", " << n << ")";
    throw NumericalError(os.str());
  }
  // k_n = n hi - (n-1) lo - int N dk, written as hi - int (N - (n-1)) dk.
  const double base = static_cast<double>(n - 1);
  double integral = 0.0;
  for (std::size_t i = 0; i < panels; ++i) {
    double a = edge[i], b = edge[i + 1];
    long long va = val[i], vb = val[i + 1];
    if (va == vb) {
      integral += (static_cast<double>(va) - base) * (b - a);
      continue;
    }
    // Step inside the panel: halve, keeping the half that still holds the step.
    const double floor_width = 1e-13 * std::max(std::abs(b), spacing);
    while (b - a > floor_width) {
      const double mid = 0.5 * (a + b);
      const long long vm = count(mid);
      if (vm == va) {
        integral += (static_cast<double>(va) - base) * (mid - a);
        a = mid;
      } else if (vm == vb) {
        integral += (static_cast<double>(vb) - base) * (b - mid);
        b = mid;
      } else {
        throw NumericalError("quadrature nonconvergence: staircase is not monotone inside cell " + std::to_string(n));
      }
    }
    integral += (0.5 * static_cast<double>(va + vb) - base) * (b - a);
  }
  return hi - integral;
}

double RegularCells::separator(std::int64_t n) const {
  return kPi / S0 * (static_cast<double>(n + mu + 1) + gamma0);
}

double RegularCells::midpoint(std::int64_t n) const {
  return kPi / S0 * (static_cast<double>(n + mu) + 0.5 + gamma0);
}

RegularCells regular_cells(const Graph& graph) {
  const TrigPoly p = spectral_function(graph);
  if (!is_regular(p)) {
    std::ostringstream os;
    os << "graph not regular: alpha = " << characteristic_sum(p) << " >= 1";
    throw ValidationError(os.str());
  }
  return {p.S0(), p.gamma0(), regular_mu(p)};
}

ExpansionResult root_by_orbit_expansion(const RegularCells& cells, const OrbitCatalog& catalog, std::int64_t n,
                                        int l_max) {
  if (l_max > catalog.l_max) throw ValidationError("orbit catalog shorter than l_max");
  ExpansionResult r = make_result(n, l_max);
  const double kbar = cells.midpoint(n);
  Complex total = 0.0;
  r.estimate = kbar;
  for (int l = 1; l <= l_max; ++l) {
    Complex sum = 0.0;
    for (const auto& o : catalog.by_length[l]) {
      sum += o.amplitude * std::polar(1.0, o.action * kbar) * std::sin(kPi * o.action / (2.0 * cells.S0)) / o.action;
    }
    total += sum / static_cast<double>(l);
    r.estimate = kbar - 2.0 / kPi * total.imag();
    r.partials.push_back(r.estimate);
  }
  return r;
}

ExpansionResult root_by_orbit_expansion(const Graph& graph, std::int64_t n, int l_max) {
  return root_by_orbit_expansion(regular_cells(graph), enumerate_orbits(graph, l_max), n, l_max);
}

ExpansionResult root_by_prime_expansion(const RegularCells& cells, const OrbitCatalog& catalog, std::int64_t n,
                                        int l_max) {
  if (l_max > catalog.l_max) throw ValidationError("orbit catalog shorter than l_max");
  ExpansionResult r = make_result(n, l_max);
  const double kbar = cells.midpoint(n);
  std::vector<Complex> bucket(l_max + 1, 0.0);
  for (const auto& p : catalog.primes) {
    Complex apow = 1.0;
    for (int nu = 1; nu * p.length() <= l_max; ++nu) {
      apow *= p.amplitude;
      const double act = nu * p.action;
      bucket[nu * p.length()] += apow * std::polar(1.0, act * kbar) * std::sin(kPi * act / (2.0 * cells.S0)) /
                                 (static_cast<double>(nu) * static_cast<double>(nu) * p.action);
    }
  }
  Complex total = 0.0;
  for (int l = 1; l <= l_max; ++l) {
    total += bucket[l];
    r.estimate = kbar - 2.0 / kPi * total.imag();
    r.partials.push_back(r.estimate);
  }
  if (l_max == 0) r.estimate = kbar;
  return r;
}

ExpansionResult root_by_prime_expansion(const Graph& graph, std::int64_t n, int l_max) {
  return root_by_prime_expansion(regular_cells(graph), enumerate_orbits(graph, l_max), n, l_max);
}

EnergyAssumptions check_energy_assumptions(const Graph& graph, const OrbitCatalog& catalog) {
  const TrigPoly p = spectral_function(graph);
  if (!is_regular(p)) throw ValidationError("graph not regular: energy expansion needs alpha < 1");
  EnergyAssumptions a;
  const auto roots = oracle_first_roots(p, 50);
  double offset = 0.0;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    offset += p.S0() * roots[i] / kPi - static_cast<double>(i + 1);
  }
  a.kappa2 = 0.5 + offset / static_cast<double>(roots.size());
  for (const auto& pr : catalog.primes) a.max_imag_amplitude = std::max(a.max_imag_amplitude, std::abs(pr.amplitude.imag()));
  if (std::abs(a.kappa2 - 0.5) > 0.05) {
    std::ostringstream os;
    os << "assumption violated: kappa2 = " << a.kappa2 << " differs from 1/2 by more than 0.05";
    throw ValidationError(os.str());
  }
  if (a.max_imag_amplitude > 1e-12) {
    std::ostringstream os;
    os << "assumption violated: prime amplitudes are not real (max |Im A_p| = " << a.max_imag_amplitude << ")";
    throw ValidationError(os.str());
  }
  return a;
}

ExpansionResult regular_energy_expansion(const RegularCells& cells, const OrbitCatalog& catalog, std::int64_t n,
                                         int cutoff) {
  if (cutoff > catalog.l_max) throw ValidationError("orbit catalog shorter than cutoff");
  ExpansionResult r = make_result(n, cutoff);
  const double S0 = cells.S0;
  const double dn = static_cast<double>(n);
  const double lead = kPi * kPi / (S0 * S0) * (dn * dn + 1.0 / 12.0);
  std::vector<double> bucket(cutoff + 1, 0.0);
  for (const auto& p : catalog.primes) {
    const double omega = kPi * p.action / S0;
    double apow = 1.0;
    for (int nu = 1; nu * p.length() <= cutoff; ++nu) {
      apow *= p.amplitude.real();
      const double v = static_cast<double>(nu);
      const double half = 0.5 * omega * v;
      const Complex phase = std::polar(1.0, dn * omega * v);
      const double second = (apow / (omega * v * v) * std::sin(half) * phase).imag();
      const double third =
          (apow / (v * v * v * omega * omega) * (std::sin(half) - half * std::cos(half)) * phase).real();
      bucket[nu * p.length()] += -4.0 * kPi * dn / (S0 * S0) * second - 4.0 * kPi / (S0 * S0) * third;
    }
  }
  double total = lead;
  r.estimate = lead;
  for (int l = 1; l <= cutoff; ++l) {
    total += bucket[l];
    r.estimate = total;
    r.partials.push_back(total);
  }
  return r;
}

ExpansionResult regular_energy_expansion(const Graph& graph, std::int64_t n, int cutoff) {
  const OrbitCatalog catalog = enumerate_orbits(graph, cutoff);
  check_energy_assumptions(graph, catalog);
  return regular_energy_expansion(regular_cells(graph), catalog, n, cutoff);
}

ExpansionResult function_of_root(const Graph& graph, std::int64_t n, const RealFunction& f,
                                 const RealFunction& fprime, int l_max) {
  if (!f || !fprime) throw ValidationError("f and f' must be provided");
  const RegularCells cells = regular_cells(graph);
  const OrbitCatalog catalog = enumerate_orbits(graph, l_max);
  const double lo = cells.separator(n - 1);
  const double hi = cells.separator(n);
  const double c = -(static_cast<double>(cells.mu) + 1.0 + cells.gamma0);
  const double dn = static_cast<double>(n);

  const double boundary = dn * f(hi) - (dn - 1.0) * f(lo);
  const double smooth = gk_integrate([&](double k) { return fprime(k) * (cells.S0 * k / kPi + c); }, lo, hi);

  ExpansionResult r = make_result(n, l_max);
  double total = 0.0;
  for (int l = 1; l <= l_max; ++l) {
    // G_n depends on the walk only through its action; group equal actions.
    std::map<double, Complex> by_action;
    for (const auto& o : catalog.by_length[l]) by_action[o.action] += o.amplitude;
    Complex sum = 0.0;
    for (const auto& [x, amp] : by_action) {
      const double re = gk_integrate([&](double k) { return fprime(k) * std::cos(x * k); }, lo, hi);
      const double im = gk_integrate([&](double k) { return fprime(k) * std::sin(x * k); }, lo, hi);
      sum += amp * Complex(re, im);
    }
    total += sum.imag() / static_cast<double>(l);
    r.partials.push_back(boundary - smooth - total / kPi);
  }
  r.estimate = r.partials.empty() ? boundary - smooth : r.partials.back();
  return r;
}

} // namespace qgs
