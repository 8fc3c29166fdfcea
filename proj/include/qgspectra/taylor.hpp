#pragma once

#include <cstddef>
#include <vector>

namespace qgs {

/// Truncated power series sum_k c_k h^k, k = 0..order.
class Series {
public:
  explicit Series(std::size_t order, double c0 = 0.0);
  static Series variable(std::size_t order, double at);  // at + h

  std::size_t order() const noexcept { return c_.size() - 1; }
  double operator[](std::size_t k) const { return c_[k]; }
  double& operator[](std::size_t k) { return c_[k]; }
  const std::vector<double>& coeffs() const noexcept { return c_; }

  Series& operator+=(const Series& o);
  Series& operator-=(const Series& o);
  Series& operator*=(double s);

private:
  std::vector<double> c_;
};

Series operator+(Series a, const Series& b);
Series operator-(Series a, const Series& b);
Series operator*(Series a, double s);
Series operator*(double s, Series a);
Series operator*(const Series& a, const Series& b);
Series operator/(const Series& a, const Series& b);

Series pow(const Series& u, unsigned n);
Series sqrt(const Series& u);
Series exp(const Series& u);
Series sin(const Series& u);
Series cos(const Series& u);
Series asin(const Series& u);

} // namespace qgs
