#pragma once

#include <map>
#include <utility>

#include "psiomega/mesh.hpp"

namespace psiomega {

/// Bivariate polynomial with exact term-wise differentiation.
class Polynomial2 {
 public:
  Polynomial2() = default;
  static Polynomial2 constant(double c);
  static Polynomial2 x();
  static Polynomial2 y();

  double operator()(double x, double y) const;
  double operator()(const Point& p) const { return (*this)(p.x, p.y); }

  Polynomial2 dx() const;
  Polynomial2 dy() const;
  Polynomial2 laplacian() const;
  /// p(y, x)
  Polynomial2 swap_xy() const;
  int degree() const;

  friend Polynomial2 operator+(const Polynomial2& a, const Polynomial2& b);
  friend Polynomial2 operator-(const Polynomial2& a, const Polynomial2& b);
  friend Polynomial2 operator*(const Polynomial2& a, const Polynomial2& b);
  friend Polynomial2 operator*(double s, const Polynomial2& a);
  friend Polynomial2 operator-(const Polynomial2& a) { return -1.0 * a; }

  const std::map<std::pair<int, int>, double>& terms() const noexcept { return terms_; }

 private:
  void add_term(int i, int j, double c);
  // (power of x, power of y) -> coefficient
  std::map<std::pair<int, int>, double> terms_;
};

}  // namespace psiomega
