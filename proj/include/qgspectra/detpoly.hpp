#pragma once

#include <vector>

#include "qgspectra/graph.hpp"

namespace qgs {

struct ExpTerm {
  Complex coeff;
  double freq = 0.0;
};

/// Finite exponential sum  sum_j c_j exp(i S_j k)  with strictly increasing frequencies.
class ExpPoly {
public:
  ExpPoly() = default;
  /// Sorts, merges frequencies closer than `merge_tol` and drops |c| < `drop_tol`.
  ExpPoly(std::vector<ExpTerm> terms, double merge_tol, double drop_tol = 1e-12);

  const std::vector<ExpTerm>& terms() const noexcept { return terms_; }
  bool empty() const noexcept { return terms_.empty(); }
  Complex operator()(double k) const;

private:
  std::vector<ExpTerm> terms_;
};

Complex eval_exp(const ExpPoly& p, double k);

constexpr int kDefaultExpansionCap = 16;

/// Exact expansion of det(1 - S(k)) into an exponential sum. Every subset A of
/// directed bonds contributes (-1)^|A| det(T_AA) exp(i k sum_{I in A} beta_I L_I).
/// Throws ValidationError when 2 N_B exceeds `cap`.
ExpPoly expand_determinant(const Graph& graph, int cap = kDefaultExpansionCap);

/// det(1 - S(k)) by dense LU, the numeric reference for expand_determinant.
Complex numeric_determinant(const Graph& graph, double k);

/// One Phi term  a cos(S k - pi gamma)  stored at level 0.
struct TrigTerm {
  double a = 0.0;
  double S = 0.0;
  double gamma = 0.0;
};

/// Real reduced spectral function at derivative level l:
///   cos(S0 k - pi gamma0 + pi l/2) - sum_i a_i eps_i^l cos(S_i k - pi gamma_i + pi l/2),
/// with eps_i = S_i / S0. Level l equals the l-th k-derivative of level 0
/// divided by S0^l. `scale` records |Delta| / |Delta_R| of the source determinant.
class TrigPoly {
public:
  TrigPoly(double S0, double gamma0, std::vector<TrigTerm> terms, int level = 0, double scale = 1.0);

  double S0() const noexcept { return S0_; }
  double gamma0() const noexcept { return gamma0_; }
  double scale() const noexcept { return scale_; }
  int level() const noexcept { return level_; }
  const std::vector<TrigTerm>& terms() const noexcept { return terms_; }

  double epsilon(std::size_t i) const { return terms_[i].S / S0_; }
  /// a_i eps_i^level.
  double effective_amplitude(std::size_t i) const { return eff_[i]; }
  /// gamma0 - level/2, the phase entering the leading cosine.
  double effective_gamma0() const noexcept { return gamma0_ - 0.5 * level_; }
  double mean_spacing() const noexcept;

  double operator()(double k) const;
  /// The cosine sum alone, operator()(k) = cos(S0 k - pi g) - characteristic(k).
  double characteristic(double k) const;
  double characteristic_derivative(double k) const;
  /// d/dk of operator(); equals S0 times the next level.
  double derivative(double k) const;
  /// Upper bound on the absolute rounding error of operator() at k.
  double evaluation_noise(double k) const;

private:
  double S0_;
  double gamma0_;
  double scale_;
  int level_;
  std::vector<TrigTerm> terms_;
  std::vector<double> eff_;
  std::vector<double> phase_;  // reduced phase of each term at this level
  double lead_phase_;
};

double eval(const TrigPoly& p, double k);

/// Reduces an exponential sum to the real form, up to the constant phase of its
/// lowest-frequency coefficient. Throws ValidationError ("modulus asymmetry")
/// when the sum is not a phase times a real function.
TrigPoly to_real_form(const ExpPoly& p);

/// expand_determinant + to_real_form, with gamma0 cross-checked against det T.
TrigPoly spectral_function(const Graph& graph, int cap = kDefaultExpansionCap);

/// gamma0 from det(-T): exp(2 i Theta0) = det(-S(k)). Value in [0, 1).
double gamma0_from_scattering(const Graph& graph);

/// alpha = sum_i |a_i eps_i^l| at the polynomial's level.
double characteristic_sum(const TrigPoly& p);
bool is_regular(const TrigPoly& p);

/// Raises the level by l (l >= 0).
TrigPoly differentiate(const TrigPoly& p, int l);

struct Irregularity {
  int m = 0;
  int bound = 0;
};

constexpr int kMaxIrregularity = 4096;
/// Sums within this margin of 1 count as 1: rounding in the expansion can put
/// a marginal graph (alpha = 1 exactly) on either side.
constexpr double kRegularityMargin = 1e-12;

/// Smallest l >= level with characteristic sum below one, relative to level 0,
/// plus the a-priori bound floor(ln alpha / -ln eps_max) + 1.
Irregularity irregularity_degree(const TrigPoly& p);

} // namespace qgs
