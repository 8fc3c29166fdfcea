#include "qgspectra/detpoly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "qgspectra/error.hpp"

namespace qgs {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMergeRel = 1e-9;
constexpr double kPairTol = 1e-9;

double wrap_phase(double x) {
  x = std::fmod(x, 2.0 * kPi);
  if (x >= kPi) x -= 2.0 * kPi;
  if (x < -kPi) x += 2.0 * kPi;
  return x;
}

double frac(double x) {
  double f = x - std::floor(x);
  return f >= 1.0 ? 0.0 : f;
}

} // namespace

ExpPoly::ExpPoly(std::vector<ExpTerm> terms, double merge_tol, double drop_tol) {
  std::sort(terms.begin(), terms.end(), [](const ExpTerm& a, const ExpTerm& b) { return a.freq < b.freq; });
  for (const auto& t : terms) {
    if (!terms_.empty() && t.freq - terms_.back().freq < merge_tol) {
      terms_.back().coeff += t.coeff;
    } else {
      terms_.push_back(t);
    }
  }
  std::erase_if(terms_, [drop_tol](const ExpTerm& t) { return std::abs(t.coeff) < drop_tol; });
}

Complex ExpPoly::operator()(double k) const {
  Complex sum = 0.0;
  for (const auto& t : terms_) sum += t.coeff * std::polar(1.0, t.freq * k);
  return sum;
}

Complex eval_exp(const ExpPoly& p, double k) { return p(k); }

ExpPoly expand_determinant(const Graph& graph, int cap) {
  const int n = graph.num_directed();
  if (n > cap) {
    throw ValidationError("graph exceeds expansion cap: 2N_B = " + std::to_string(n) + " > " + std::to_string(cap));
  }
  const auto& t = graph.transitions();
  const auto& phi = graph.directed_actions();
  std::vector<unsigned> succ(n, 0), pred(n, 0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (t(i, j) != Complex(0.0)) {
        succ[i] |= 1u << j;
        pred[j] |= 1u << i;
      }
    }
  }

  std::vector<ExpTerm> terms;
  const unsigned full = n == 32 ? ~0u : (1u << n) - 1u;
  std::vector<int> idx;
  for (unsigned mask = 0;; ++mask) {
    bool viable = true;
    idx.clear();
    for (int i = 0; i < n && viable; ++i) {
      if (!(mask >> i & 1u)) continue;
      // A principal minor vanishes if some row or column of T_AA is zero.
      viable = (succ[i] & mask) && (pred[i] & mask);
      idx.push_back(i);
    }
    if (viable) {
      Complex det = 1.0;
      double freq = 0.0;
      if (!idx.empty()) {
        const auto m = static_cast<Eigen::Index>(idx.size());
        ComplexMatrix sub(m, m);
        for (Eigen::Index a = 0; a < m; ++a) {
          for (Eigen::Index b = 0; b < m; ++b) sub(a, b) = t(idx[a], idx[b]);
          freq += phi[idx[a]];
        }
        det = sub.partialPivLu().determinant();
      }
      if (idx.size() % 2 == 1) det = -det;
      if (std::abs(det) > 0.0) terms.push_back({det, freq});
    }
    if (mask == full) break;
  }
  return ExpPoly(std::move(terms), kMergeRel * graph.S0());
}

Complex numeric_determinant(const Graph& graph, double k) {
  const ComplexMatrix s = s_matrix(graph, k);
  return (ComplexMatrix::Identity(s.rows(), s.cols()) - s).partialPivLu().determinant();
}

TrigPoly::TrigPoly(double S0, double gamma0, std::vector<TrigTerm> terms, int level, double scale)
    : S0_(S0), gamma0_(gamma0), scale_(scale), level_(level), terms_(std::move(terms)) {
  if (!(S0_ > 0.0) || !std::isfinite(S0_)) throw ValidationError("S0 must be positive");
  if (level_ < 0) throw ValidationError("derivative level must be nonnegative");
  if (!std::isfinite(gamma0_)) throw ValidationError("gamma0 must be finite");
  for (const auto& t : terms_) {
    if (!std::isfinite(t.a) || !std::isfinite(t.S) || !std::isfinite(t.gamma)) {
      throw ValidationError("trig term must be finite");
    }
    if (t.S < 0.0 || !(t.S < S0_)) {
      std::ostringstream os;
      os << "frequency bound violated: need 0 <= S_i < S0, got S_i = " << t.S << ", S0 = " << S0_;
      throw ValidationError(os.str());
    }
  }
  const double shift = 0.5 * kPi * level_;
  lead_phase_ = wrap_phase(-kPi * gamma0_ + shift);
  for (const auto& t : terms_) {
    eff_.push_back(t.a * std::pow(t.S / S0_, level_));
    phase_.push_back(wrap_phase(-kPi * t.gamma + shift));
  }
}

double TrigPoly::mean_spacing() const noexcept { return kPi / S0_; }

namespace {

// S k + phase as t + d, with d the rounding error of the product and the sum.
// cos(t + d) = cos t - d sin t to first order; d is below one ulp of t, so the
// result is accurate to a few eps even when S k is large.
struct Angle {
  double t;
  double d;
};

Angle angle(double S, double k, double phase) {
  const double p = S * k;
  const double pe = std::fma(S, k, -p);
  const double t = p + phase;
  const double bp = t - p;
  const double te = (p - (t - bp)) + (phase - bp);
  return {t, pe + te};
}

double cos_at(double S, double k, double phase) {
  const Angle a = angle(S, k, phase);
  return std::cos(a.t) - a.d * std::sin(a.t);
}

double sin_at(double S, double k, double phase) {
  const Angle a = angle(S, k, phase);
  return std::sin(a.t) + a.d * std::cos(a.t);
}

} // namespace

double TrigPoly::operator()(double k) const {
  double v = cos_at(S0_, k, lead_phase_);
  for (std::size_t i = 0; i < terms_.size(); ++i) v -= eff_[i] * cos_at(terms_[i].S, k, phase_[i]);
  return v;
}

double TrigPoly::characteristic(double k) const {
  double v = 0.0;
  for (std::size_t i = 0; i < terms_.size(); ++i) v += eff_[i] * cos_at(terms_[i].S, k, phase_[i]);
  return v;
}

double TrigPoly::characteristic_derivative(double k) const {
  double v = 0.0;
  for (std::size_t i = 0; i < terms_.size(); ++i) v -= eff_[i] * terms_[i].S * sin_at(terms_[i].S, k, phase_[i]);
  return v;
}

double TrigPoly::derivative(double k) const {
  double v = -S0_ * sin_at(S0_, k, lead_phase_);
  for (std::size_t i = 0; i < terms_.size(); ++i) v += eff_[i] * terms_[i].S * sin_at(terms_[i].S, k, phase_[i]);
  return v;
}

double TrigPoly::evaluation_noise(double k) const {
  double amp = 1.0;
  for (double e : eff_) amp += std::abs(e);
  // compensated arguments leave the rounding of the stored phases, which grows
  // only through the second-order term of the correction
  const double eps = std::numeric_limits<double>::epsilon();
  return 8.0 * eps * amp * (1.0 + eps * S0_ * std::abs(k));
}

double eval(const TrigPoly& p, double k) { return p(k); }

TrigPoly to_real_form(const ExpPoly& p) {
  const auto& terms = p.terms();
  if (terms.empty()) throw ValidationError("zero polynomial: nothing to reduce");
  const double fmin = terms.front().freq;
  const double fmax = terms.back().freq;
  if (!(fmax > fmin)) throw ValidationError("modulus asymmetry: single-frequency polynomial has no real form");
  const double S0 = 0.5 * (fmax - fmin);
  const double mid = 0.5 * (fmax + fmin);
  const double freq_tol = kMergeRel * S0 * 10.0;

  const Complex c_lo = terms.front().coeff;
  const Complex c_hi = terms.back().coeff;
  if (std::abs(std::abs(c_hi) - std::abs(c_lo)) > kPairTol * std::abs(c_hi)) {
    std::ostringstream os;
    os << "modulus asymmetry: |c_max| = " << std::abs(c_hi) << " vs |c_min| = " << std::abs(c_lo);
    throw ValidationError(os.str());
  }
  // Rotate so the lowest coefficient is real positive, then gamma0 follows
  // from the phase of the highest: c_hi / c_lo = exp(-2 pi i gamma0).
  const Complex rot = std::conj(c_lo) / std::abs(c_lo);
  const double gamma0 = frac(-std::arg(c_hi * rot) / (2.0 * kPi));
  const Complex unit = std::polar(1.0, kPi * gamma0) * rot;

  struct Shifted {
    double s;
    Complex u;
  };
  std::vector<Shifted> u;
  for (const auto& t : terms) u.push_back({t.freq - mid, t.coeff * unit});
  const double top = std::abs(u.back().u);
  const double scale = 2.0 * top;

  std::vector<TrigTerm> out;
  std::size_t lo = 0, hi = u.size() - 1;
  while (lo <= hi) {
    const auto& a = u[lo];
    const auto& b = u[hi];
    if (std::abs(a.s + b.s) > freq_tol) {
      std::ostringstream os;
      os << "modulus asymmetry: frequency " << (a.s + mid) << " has no mirror partner about S0";
      throw ValidationError(os.str());
    }
    if (std::abs(a.u - std::conj(b.u)) > kPairTol * top) {
      std::ostringstream os;
      os << "modulus asymmetry: coefficients at offsets +-" << std::abs(b.s)
         << " are not complex conjugates (mismatch " << std::abs(a.u - std::conj(b.u)) / top << ")";
      throw ValidationError(os.str());
    }
    if (lo == hi) {
      // Self-paired constant term.
      const double u0 = b.u.real();
      const double amp = std::abs(u0) / scale;
      if (amp >= 1e-12) out.push_back({amp, 0.0, u0 < 0.0 ? 0.0 : 1.0});
      break;
    }
    if (lo > 0) {
      const double amp = std::abs(b.u) / top;
      if (amp >= 1e-12) {
        double g = std::fmod(1.0 - std::arg(b.u) / kPi, 2.0);
        if (g < 0.0) g += 2.0;
        out.push_back({amp, b.s, g});
      }
    }
    ++lo;
    if (hi == 0) break;
    --hi;
  }
  std::sort(out.begin(), out.end(), [](const TrigTerm& x, const TrigTerm& y) { return x.S > y.S; });
  return TrigPoly(S0, gamma0, std::move(out), 0, scale);
}

double gamma0_from_scattering(const Graph& graph) {
  const ComplexMatrix& t = graph.transitions();
  const Complex d = (-t).determinant();
  return frac(-std::arg(d) / (2.0 * kPi));
}

TrigPoly spectral_function(const Graph& graph, int cap) {
  const ExpPoly e = expand_determinant(graph, cap);
  if (e.terms().front().freq > kMergeRel * graph.S0()) {
    throw NumericalError("determinant expansion lost its constant term");
  }
  TrigPoly p = to_real_form(e);
  if (std::abs(p.S0() - graph.S0()) > kMergeRel * graph.S0() * 10.0) {
    std::ostringstream os;
    os << "expansion leading frequency " << 2.0 * p.S0() << " disagrees with 2 S0 = " << 2.0 * graph.S0();
    throw NumericalError(os.str());
  }
  const double g = gamma0_from_scattering(graph);
  double diff = std::abs(g - p.gamma0());
  diff = std::min(diff, 1.0 - diff);
  if (diff > 1e-9) {
    std::ostringstream os;
    os << "gamma0 mismatch: expansion gives " << p.gamma0() << ", det(-T) gives " << g;
    throw NumericalError(os.str());
  }
  return TrigPoly(graph.S0(), p.gamma0(), p.terms(), 0, p.scale());
}

double characteristic_sum(const TrigPoly& p) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.terms().size(); ++i) s += std::abs(p.effective_amplitude(i));
  return s;
}

bool is_regular(const TrigPoly& p) { return characteristic_sum(p) < 1.0 - kRegularityMargin; }

TrigPoly differentiate(const TrigPoly& p, int l) {
  if (l < 0) throw ValidationError("derivative order must be nonnegative");
  return TrigPoly(p.S0(), p.gamma0(), p.terms(), p.level() + l, p.scale());
}

Irregularity irregularity_degree(const TrigPoly& p) {
  std::vector<std::pair<double, double>> ae;  // (|a|, eps)
  double alpha = 0.0;
  double eps_max = 0.0;
  for (std::size_t i = 0; i < p.terms().size(); ++i) {
    const double a = std::abs(p.terms()[i].a);
    if (a == 0.0) continue;
    ae.emplace_back(a, p.epsilon(i));
    alpha += a;
    eps_max = std::max(eps_max, p.epsilon(i));
  }
  if (alpha < 1.0 - kRegularityMargin) return {0, 0};
  if (eps_max >= 1.0 - 1e-12) {
    throw ValidationError("no finite m: a term with eps_i = 1 and alpha >= 1 cannot be bootstrapped");
  }
  // The a-priori bound can be far above the true m when the largest eps
  // belongs to a small amplitude, so only the search itself is capped.
  // alpha inside the margin but just below 1 gives x < 0; l = 1 still suffices
  const double x = std::max(0.0, std::log(alpha) / -std::log(eps_max));
  const int bound = x < kMaxIrregularity ? static_cast<int>(std::floor(x)) + 1 : kMaxIrregularity + 1;
  for (int l = 1; l <= std::min(bound, kMaxIrregularity); ++l) {
    double s = 0.0;
    for (const auto& [a, e] : ae) s += a * std::pow(e, l);
    if (s < 1.0 - kRegularityMargin) return {l, bound};
  }
  throw ValidationError("no finite m: irregularity degree exceeds supported maximum " +
                        std::to_string(kMaxIrregularity));
}

} // namespace qgs
