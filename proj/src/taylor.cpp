#include "qgspectra/taylor.hpp"

#include <cmath>
#include <utility>

#include "qgspectra/error.hpp"

namespace qgs {

namespace {

void same_order(const Series& a, const Series& b) {
  if (a.order() != b.order()) throw ValidationError("series order mismatch");
}

// Coupled recurrences for sin(u) and cos(u): s' = c u', c' = -s u'.
std::pair<Series, Series> sincos(const Series& u) {
  const std::size_t n = u.order();
  Series s(n, std::sin(u[0])), c(n, std::cos(u[0]));
  for (std::size_t k = 1; k <= n; ++k) {
    double ss = 0.0, cc = 0.0;
    for (std::size_t j = 1; j <= k; ++j) {
      ss += static_cast<double>(j) * u[j] * c[k - j];
      cc -= static_cast<double>(j) * u[j] * s[k - j];
    }
    s[k] = ss / static_cast<double>(k);
    c[k] = cc / static_cast<double>(k);
  }
  return {s, c};
}

} // namespace

Series::Series(std::size_t order, double c0) : c_(order + 1, 0.0) { c_[0] = c0; }

Series Series::variable(std::size_t order, double at) {
  Series s(order, at);
  if (order >= 1) s[1] = 1.0;
  return s;
}

Series& Series::operator+=(const Series& o) {
  same_order(*this, o);
  for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
  return *this;
}

Series& Series::operator-=(const Series& o) {
  same_order(*this, o);
  for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
  return *this;
}

Series& Series::operator*=(double s) {
  for (double& x : c_) x *= s;
  return *this;
}

Series operator+(Series a, const Series& b) { return a += b; }
Series operator-(Series a, const Series& b) { return a -= b; }
Series operator*(Series a, double s) { return a *= s; }
Series operator*(double s, Series a) { return a *= s; }

Series operator*(const Series& a, const Series& b) {
  same_order(a, b);
  Series r(a.order());
  for (std::size_t i = 0; i <= a.order(); ++i) {
    for (std::size_t j = 0; i + j <= a.order(); ++j) r[i + j] += a[i] * b[j];
  }
  return r;
}

Series operator/(const Series& a, const Series& b) {
  same_order(a, b);
  if (b[0] == 0.0) throw ValidationError("series division by a series with zero constant term");
  Series q(a.order());
  for (std::size_t k = 0; k <= a.order(); ++k) {
    double v = a[k];
    for (std::size_t j = 1; j <= k; ++j) v -= b[j] * q[k - j];
    q[k] = v / b[0];
  }
  return q;
}

Series pow(const Series& u, unsigned n) {
  Series r(u.order(), 1.0);
  Series base = u;
  while (n > 0) {
    if (n & 1u) r = r * base;
    n >>= 1;
    if (n > 0) base = base * base;
  }
  return r;
}

Series sqrt(const Series& u) {
  if (!(u[0] > 0.0)) throw ValidationError("series sqrt needs a positive constant term");
  Series y(u.order(), std::sqrt(u[0]));
  for (std::size_t k = 1; k <= u.order(); ++k) {
    double v = u[k];
    for (std::size_t j = 1; j < k; ++j) v -= y[j] * y[k - j];
    y[k] = v / (2.0 * y[0]);
  }
  return y;
}

Series exp(const Series& u) {
  Series e(u.order(), std::exp(u[0]));
  for (std::size_t k = 1; k <= u.order(); ++k) {
    double v = 0.0;
    for (std::size_t j = 1; j <= k; ++j) v += static_cast<double>(j) * u[j] * e[k - j];
    e[k] = v / static_cast<double>(k);
  }
  return e;
}

Series sin(const Series& u) { return sincos(u).first; }
Series cos(const Series& u) { return sincos(u).second; }

Series asin(const Series& u) {
  if (!(std::abs(u[0]) < 1.0)) throw ValidationError("series asin needs |u(0)| < 1");
  const std::size_t n = u.order();
  // y' = u' / sqrt(1 - u^2)
  Series du(n);
  for (std::size_t k = 0; k < n; ++k) du[k] = static_cast<double>(k + 1) * u[k + 1];
  const Series dy = du / sqrt(Series(n, 1.0) - u * u);
  Series y(n, std::asin(u[0]));
  for (std::size_t k = 1; k <= n; ++k) y[k] = dy[k - 1] / static_cast<double>(k);
  return y;
}

} // namespace qgs
