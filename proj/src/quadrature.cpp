#include <cmath>
#include <stdexcept>
#include <string>

#include "psiomega/fem.hpp"

namespace psiomega {

QuadratureRule quadrature_rule(int degree) {
  if (degree < 0 || degree > 5) {
    throw std::invalid_argument("no built-in quadrature of degree " + std::to_string(degree) +
                                " (supported up to 5)");
  }
  QuadratureRule q;
  if (degree <= 1) {
    q.points = {{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}};
    q.weights = {1.0};
    q.degree = 1;
  } else if (degree == 2) {
    q.points = {{2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0},
                {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0},
                {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0}};
    q.weights = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    q.degree = 2;
  } else {
    // Radon's 7-point rule.
    const double s15 = std::sqrt(15.0);
    const double a1 = (9.0 + 2.0 * s15) / 21.0;
    const double b1 = (6.0 - s15) / 21.0;
    const double a2 = (9.0 - 2.0 * s15) / 21.0;
    const double b2 = (6.0 + s15) / 21.0;
    const double w1 = (155.0 - s15) / 1200.0;
    const double w2 = (155.0 + s15) / 1200.0;
    q.points = {{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0},
                {a1, b1, b1}, {b1, a1, b1}, {b1, b1, a1},
                {a2, b2, b2}, {b2, a2, b2}, {b2, b2, a2}};
    q.weights = {9.0 / 40.0, w1, w1, w1, w2, w2, w2};
    q.degree = 5;
  }
  return q;
}

}  // namespace psiomega
