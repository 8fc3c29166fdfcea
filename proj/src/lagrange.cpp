#include "qgspectra/lagrange.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "qgspectra/error.hpp"

namespace qgs {

namespace {

constexpr int kValiditySamples = 100;

std::function<Series(const Series&)> two_bond_phi(double rho, double r, std::int64_t n) {
  const double sign = (n % 2 == 0) ? 1.0 : -1.0;
  return [=](const Series& x) { return sign * asin(r * sin(rho * x)); };
}

void check_two_bond(double S0, double S1, double r) {
  if (!(S0 > 0.0)) throw ValidationError("S0 must be positive");
  if (!(std::abs(S1 / S0) < 1.0)) throw ValidationError("|S1/S0| >= 1");
  if (!(std::abs(r) < 1.0)) throw ValidationError("|r| >= 1");
}

} // namespace

LagrangeResult lagrange_root(const LagrangeProblem& p) {
  if (!p.phi) throw ValidationError("phi not provided");
  if (p.order < 1) throw ValidationError("order must be >= 1");
  LagrangeResult res;
  res.x = p.a;
  if (p.w == 0.0) {
    res.partials.assign(static_cast<std::size_t>(p.order), p.a);
    return res;
  }
  for (int i = 0; i < kValiditySamples; ++i) {
    const double x = p.a - p.radius + 2.0 * p.radius * i / (kValiditySamples - 1);
    const double v = std::abs(p.w * p.phi(Series(0, x))[0]);
    if (!(v < p.radius)) {
      std::ostringstream os;
      os << "validity violation: |w phi(x)| = " << v << " >= " << p.radius << " at x = " << x;
      throw ValidationError(os.str());
    }
  }
  const auto order = static_cast<std::size_t>(p.order);
  const Series phi = p.phi(Series::variable(order - 1, p.a));
  Series power(order - 1, 1.0);
  double wv = 1.0;
  for (std::size_t v = 1; v <= order; ++v) {
    power = power * phi;
    wv *= p.w;
    res.x += wv / static_cast<double>(v) * power[v - 1];
    res.partials.push_back(res.x);
  }
  return res;
}

LagrangeResult two_bond_root(double S0, double S1, double r, std::int64_t n, int order) {
  check_two_bond(S0, S1, r);
  LagrangeProblem p;
  p.a = std::numbers::pi * static_cast<double>(n);
  p.w = 1.0;
  p.phi = two_bond_phi(S1 / S0, r, n);
  p.order = order;
  return lagrange_root(p);
}

double two_bond_order2(double S0, double S1, double r, std::int64_t n) {
  check_two_bond(S0, S1, r);
  const double rho = S1 / S0;
  const double a = std::numbers::pi * static_cast<double>(n);
  const double s = std::sin(rho * a);
  const double sign = (n % 2 == 0) ? 1.0 : -1.0;
  return a + std::asin(r * s) * (sign + r * rho * std::cos(rho * a) / std::sqrt(1.0 - r * r * s * s));
}

} // namespace qgs
