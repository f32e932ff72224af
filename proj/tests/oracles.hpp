#pragma once

// Dense reference computations used only by the tests.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "psiomega/fem.hpp"

namespace oracle {

using Dense = std::vector<std::vector<double>>;

inline Dense to_dense(const psiomega::SparseMatrix& a) {
  Dense d(a.rows(), std::vector<double>(a.rows(), 0.0));
  for (psiomega::Index i = 0; i < a.rows(); ++i)
    for (psiomega::Index p = a.row_ptr()[i]; p < a.row_ptr()[i + 1]; ++p) d[i][a.col()[p]] = a.values()[p];
  return d;
}

/// Gaussian elimination with partial pivoting.
inline std::vector<double> gauss_solve(Dense a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    if (a[piv][c] == 0.0) throw std::runtime_error("singular");
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      if (f == 0.0) continue;
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
    x[i] = s / a[i][i];
  }
  return x;
}

/// Element stiffness from barycentric gradients.
inline void element_stiffness(const psiomega::Point p[3], double k[3][3]) {
  const double area2 = (p[1].x - p[0].x) * (p[2].y - p[0].y) - (p[2].x - p[0].x) * (p[1].y - p[0].y);
  double gx[3], gy[3];
  for (int i = 0; i < 3; ++i) {
    const auto& b = p[(i + 1) % 3];
    const auto& c = p[(i + 2) % 3];
    gx[i] = (b.y - c.y) / area2;
    gy[i] = (c.x - b.x) / area2;
  }
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) k[i][j] = 0.5 * area2 * (gx[i] * gx[j] + gy[i] * gy[j]);
}

inline double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Coupled k = 0 system: unknowns omega on all vertices, psi on interior ones.
//   M omega - K[:, I] psi = 0        (all test functions)
//   K[I, :] omega         = b_I      (interior test functions)
inline std::pair<std::vector<double>, std::vector<double>> coupled_k0(const psiomega::TriangleMesh& m,
                                                                      const psiomega::VectorFunction& f) {
  const auto k = to_dense(psiomega::assemble_stiffness(m));
  const auto mm = to_dense(psiomega::assemble_mass(m));
  const auto b = psiomega::assemble_load_curl(m, f, psiomega::quadrature_rule(5));
  std::vector<psiomega::Index> interior;
  for (psiomega::Index v = 0; v < m.vertex_count(); ++v)
    if (!m.is_boundary_vertex(v)) interior.push_back(v);
  const std::size_t nv = m.vertex_count(), ni = interior.size();
  Dense a(nv + ni, std::vector<double>(nv + ni, 0.0));
  std::vector<double> rhs(nv + ni, 0.0);
  for (std::size_t i = 0; i < nv; ++i) {
    for (std::size_t j = 0; j < nv; ++j) a[i][j] = mm[i][j];
    for (std::size_t j = 0; j < ni; ++j) a[i][nv + j] = -k[i][interior[j]];
  }
  for (std::size_t i = 0; i < ni; ++i) {
    for (std::size_t j = 0; j < nv; ++j) a[nv + i][j] = k[interior[i]][j];
    rhs[nv + i] = b[interior[i]];
  }
  const auto x = gauss_solve(a, rhs);
  std::vector<double> omega(x.begin(), x.begin() + nv), psi(nv, 0.0);
  for (std::size_t j = 0; j < ni; ++j) psi[interior[j]] = x[nv + j];
  return {omega, psi};
}

}  // namespace oracle
