#include <algorithm>

#include "psiomega/polynomial.hpp"

namespace psiomega {

Polynomial2 Polynomial2::constant(double c) {
  Polynomial2 p;
  p.add_term(0, 0, c);
  return p;
}

Polynomial2 Polynomial2::x() {
  Polynomial2 p;
  p.add_term(1, 0, 1.0);
  return p;
}

Polynomial2 Polynomial2::y() {
  Polynomial2 p;
  p.add_term(0, 1, 1.0);
  return p;
}

void Polynomial2::add_term(int i, int j, double c) {
  if (c == 0.0) return;
  auto [it, inserted] = terms_.try_emplace({i, j}, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

double Polynomial2::operator()(double x, double y) const {
  double s = 0.0;
  for (const auto& [e, c] : terms_) {
    double t = c;
    for (int i = 0; i < e.first; ++i) t *= x;
    for (int j = 0; j < e.second; ++j) t *= y;
    s += t;
  }
  return s;
}

Polynomial2 Polynomial2::dx() const {
  Polynomial2 p;
  for (const auto& [e, c] : terms_) {
    if (e.first > 0) p.add_term(e.first - 1, e.second, c * e.first);
  }
  return p;
}

Polynomial2 Polynomial2::dy() const {
  Polynomial2 p;
  for (const auto& [e, c] : terms_) {
    if (e.second > 0) p.add_term(e.first, e.second - 1, c * e.second);
  }
  return p;
}

Polynomial2 Polynomial2::laplacian() const { return dx().dx() + dy().dy(); }

Polynomial2 Polynomial2::swap_xy() const {
  Polynomial2 p;
  for (const auto& [e, c] : terms_) p.add_term(e.second, e.first, c);
  return p;
}

int Polynomial2::degree() const {
  int d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, e.first + e.second);
  return d;
}

Polynomial2 operator+(const Polynomial2& a, const Polynomial2& b) {
  Polynomial2 p = a;
  for (const auto& [e, c] : b.terms_) p.add_term(e.first, e.second, c);
  return p;
}

Polynomial2 operator-(const Polynomial2& a, const Polynomial2& b) { return a + (-1.0) * b; }

Polynomial2 operator*(const Polynomial2& a, const Polynomial2& b) {
  Polynomial2 p;
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) p.add_term(ea.first + eb.first, ea.second + eb.second, ca * cb);
  }
  return p;
}

Polynomial2 operator*(double s, const Polynomial2& a) {
  Polynomial2 p;
  for (const auto& [e, c] : a.terms_) p.add_term(e.first, e.second, s * c);
  return p;
}

}  // namespace psiomega
