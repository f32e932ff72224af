#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "psiomega/errors.hpp"
#include "psiomega/fem.hpp"

namespace psiomega {

SparseMatrix::SparseMatrix(Index rows, std::vector<Index> row_ptr, std::vector<Index> col,
                           std::vector<double> val)
    : rows_(rows), row_ptr_(std::move(row_ptr)), col_(std::move(col)), val_(std::move(val)) {
  if (row_ptr_.size() != static_cast<std::size_t>(rows_) + 1 || col_.size() != val_.size() ||
      static_cast<std::size_t>(row_ptr_.back()) != col_.size()) {
    throw std::invalid_argument("inconsistent CSR arrays");
  }
}

double SparseMatrix::at(Index i, Index j) const {
  const auto begin = col_.begin() + row_ptr_[i];
  const auto end = col_.begin() + row_ptr_[i + 1];
  const auto it = std::lower_bound(begin, end, j);
  return (it != end && *it == j) ? val_[it - col_.begin()] : 0.0;
}

std::vector<double> SparseMatrix::diagonal() const {
  std::vector<double> d(rows_);
  for (Index i = 0; i < rows_; ++i) d[i] = at(i, i);
  return d;
}

bool SparseMatrix::is_symmetric() const {
  for (Index i = 0; i < rows_; ++i) {
    for (Index p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
      if (at(col_[p], i) != val_[p]) return false;
    }
  }
  return true;
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != static_cast<std::size_t>(rows_) || y.size() != x.size()) {
    throw std::invalid_argument("matrix-vector dimension mismatch");
  }
  kernels::spmv(view(), x, y);
}

std::vector<double> SparseMatrix::multiply(std::span<const double> x) const {
  std::vector<double> y(rows_);
  multiply(x, y);
  return y;
}

double SparseMatrix::quadratic_form(std::span<const double> x) const {
  const std::vector<double> y = multiply(x);
  return kernels::dot(x, y);
}

// ---------------------------------------------------------------------------

namespace {

// P1 pattern: diagonal plus one entry per mesh edge in each direction.
SparseMatrix p1_pattern(const TriangleMesh& m) {
  const Index nv = m.vertex_count();
  std::vector<Index> row_ptr(static_cast<std::size_t>(nv) + 1, 0);
  for (Index v = 0; v < nv; ++v) row_ptr[v + 1] = 1;
  for (const Edge& e : m.edges()) {
    ++row_ptr[e[0] + 1];
    ++row_ptr[e[1] + 1];
  }
  for (Index v = 0; v < nv; ++v) row_ptr[v + 1] += row_ptr[v];
  std::vector<Index> col(row_ptr.back());
  std::vector<Index> fill(row_ptr.begin(), row_ptr.end() - 1);
  for (Index v = 0; v < nv; ++v) col[fill[v]++] = v;
  for (const Edge& e : m.edges()) {
    col[fill[e[0]]++] = e[1];
    col[fill[e[1]]++] = e[0];
  }
  for (Index v = 0; v < nv; ++v) std::sort(col.begin() + row_ptr[v], col.begin() + row_ptr[v + 1]);
  std::vector<double> val(col.size(), 0.0);
  return SparseMatrix(nv, std::move(row_ptr), std::move(col), std::move(val));
}

struct ElementGeometry {
  double area;
  // Edge vectors opposite each vertex: e_i = p_{i+2} - p_{i+1}.
  std::array<Vec2, 3> opposite;
  // Gradients of the three barycentric hats.
  std::array<Vec2, 3> grad;
};

ElementGeometry element_geometry(const TriangleMesh& m, Index t) {
  const Triangle& tri = m.triangle(t);
  const std::array<Point, 3> p{m.vertex(tri[0]), m.vertex(tri[1]), m.vertex(tri[2])};
  ElementGeometry g{};
  g.area = m.signed_area(t);
  if (!(g.area > 0.0)) throw ValidationError("degenerate triangle " + std::to_string(t));
  for (int i = 0; i < 3; ++i) {
    const Point& a = p[(i + 1) % 3];
    const Point& b = p[(i + 2) % 3];
    g.opposite[i] = {b.x - a.x, b.y - a.y};
    g.grad[i] = {-g.opposite[i].y / (2.0 * g.area), g.opposite[i].x / (2.0 * g.area)};
  }
  return g;
}

template <class ElementMatrix>
SparseMatrix assemble(const TriangleMesh& m, ElementMatrix&& element) {
  SparseMatrix pattern = p1_pattern(m);
  const auto row_ptr = pattern.row_ptr();
  const auto col = pattern.col();
  std::vector<double> val(pattern.nonzeros(), 0.0);
  for (Index t = 0; t < m.triangle_count(); ++t) {
    const std::array<std::array<double, 3>, 3> ke = element(t);
    const Triangle& tri = m.triangle(t);
    for (int i = 0; i < 3; ++i) {
      const auto begin = col.begin() + row_ptr[tri[i]];
      const auto end = col.begin() + row_ptr[tri[i] + 1];
      for (int j = 0; j < 3; ++j) {
        const auto it = std::lower_bound(begin, end, tri[j]);
        val[it - col.begin()] += ke[i][j];
      }
    }
  }
  return SparseMatrix(pattern.rows(), std::vector<Index>(row_ptr.begin(), row_ptr.end()),
                      std::vector<Index>(col.begin(), col.end()), std::move(val));
}

}  // namespace

SparseMatrix assemble_stiffness(const TriangleMesh& m) {
  return assemble(m, [&m](Index t) {
    const ElementGeometry g = element_geometry(m, t);
    std::array<std::array<double, 3>, 3> ke{};
    const double scale = 1.0 / (4.0 * g.area);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        ke[i][j] = scale * (g.opposite[i].x * g.opposite[j].x + g.opposite[i].y * g.opposite[j].y);
      }
    }
    return ke;
  });
}

SparseMatrix assemble_mass(const TriangleMesh& m) {
  return assemble(m, [&m](Index t) {
    const double a = m.signed_area(t);
    if (!(a > 0.0)) throw ValidationError("degenerate triangle " + std::to_string(t));
    std::array<std::array<double, 3>, 3> me{};
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) me[i][j] = (i == j ? 2.0 : 1.0) * a / 12.0;
    }
    return me;
  });
}

std::vector<double> assemble_load_curl(const TriangleMesh& m, const VectorFunction& f,
                                       const QuadratureRule& q) {
  std::vector<double> load(m.vertex_count(), 0.0);
  for (Index t = 0; t < m.triangle_count(); ++t) {
    const ElementGeometry g = element_geometry(m, t);
    const Triangle& tri = m.triangle(t);
    const Point& p0 = m.vertex(tri[0]);
    const Point& p1 = m.vertex(tri[1]);
    const Point& p2 = m.vertex(tri[2]);
    // The gradients are constant on K, so only the mean of f is needed.
    Vec2 mean{};
    for (std::size_t qp = 0; qp < q.weights.size(); ++qp) {
      const auto& l = q.points[qp];
      const Point x{l[0] * p0.x + l[1] * p1.x + l[2] * p2.x, l[0] * p0.y + l[1] * p1.y + l[2] * p2.y};
      const Vec2 fx = f(x);
      mean.x += q.weights[qp] * fx.x;
      mean.y += q.weights[qp] * fx.y;
    }
    for (int i = 0; i < 3; ++i) {
      load[tri[i]] += g.area * (mean.x * g.grad[i].y - mean.y * g.grad[i].x);
    }
  }
  return load;
}

std::vector<double> assemble_load(const TriangleMesh& m, const ScalarFunction& f,
                                  const QuadratureRule& q) {
  std::vector<double> load(m.vertex_count(), 0.0);
  for (Index t = 0; t < m.triangle_count(); ++t) {
    const Triangle& tri = m.triangle(t);
    const double area = m.signed_area(t);
    const Point& p0 = m.vertex(tri[0]);
    const Point& p1 = m.vertex(tri[1]);
    const Point& p2 = m.vertex(tri[2]);
    for (std::size_t qp = 0; qp < q.weights.size(); ++qp) {
      const auto& l = q.points[qp];
      const Point x{l[0] * p0.x + l[1] * p1.x + l[2] * p2.x, l[0] * p0.y + l[1] * p1.y + l[2] * p2.y};
      const double w = area * q.weights[qp] * f(x);
      for (int i = 0; i < 3; ++i) load[tri[i]] += w * l[i];
    }
  }
  return load;
}

// ---------------------------------------------------------------------------

std::vector<double> InteriorSystem::restrict_vector(std::span<const double> full) const {
  if (full.size() != to_interior.size()) throw std::invalid_argument("vector length does not match mesh");
  std::vector<double> r(interior.size());
  for (std::size_t i = 0; i < interior.size(); ++i) r[i] = full[interior[i]];
  return r;
}

std::vector<double> InteriorSystem::expand(std::span<const double> reduced) const {
  if (reduced.size() != interior.size()) throw std::invalid_argument("vector length does not match system");
  std::vector<double> full(to_interior.size(), 0.0);
  for (std::size_t i = 0; i < interior.size(); ++i) full[interior[i]] = reduced[i];
  return full;
}

InteriorSystem dirichlet_restrict(const SparseMatrix& a, const TriangleMesh& m) {
  if (a.rows() != m.vertex_count()) throw std::invalid_argument("matrix does not match mesh");
  InteriorSystem s;
  s.to_interior.assign(m.vertex_count(), -1);
  for (Index v = 0; v < m.vertex_count(); ++v) {
    if (!m.is_boundary_vertex(v)) {
      s.to_interior[v] = static_cast<Index>(s.interior.size());
      s.interior.push_back(v);
    }
  }
  const Index n = static_cast<Index>(s.interior.size());
  std::vector<Index> row_ptr(static_cast<std::size_t>(n) + 1, 0);
  std::vector<Index> col;
  std::vector<double> val;
  const auto rp = a.row_ptr();
  const auto ac = a.col();
  const auto av = a.values();
  for (Index i = 0; i < n; ++i) {
    const Index v = s.interior[i];
    for (Index p = rp[v]; p < rp[v + 1]; ++p) {
      const Index j = s.to_interior[ac[p]];
      if (j < 0) continue;
      col.push_back(j);
      val.push_back(av[p]);
    }
    row_ptr[i + 1] = static_cast<Index>(col.size());
  }
  s.matrix = SparseMatrix(n, std::move(row_ptr), std::move(col), std::move(val));
  return s;
}

// ---------------------------------------------------------------------------

SolveStats pcg(const SparseMatrix& a, std::span<const double> b, std::span<double> x,
               const Preconditioner& precond, const SolveOptions& options) {
  const std::size_t n = static_cast<std::size_t>(a.rows());
  if (b.size() != n || x.size() != n) throw std::invalid_argument("CG dimension mismatch");
  for (double v : b) {
    if (!std::isfinite(v)) throw SolverError("right-hand side has non-finite entries");
  }
  SolveStats stats;
  if (n == 0) return stats;
  const double bnorm = std::sqrt(kernels::dot(b, b));
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    return stats;
  }
  const int max_it = options.max_iterations > 0
                         ? options.max_iterations
                         : static_cast<int>(10.0 * std::sqrt(static_cast<double>(n))) + 1000;
  const double target = options.tol * bnorm;
  const kernels::CsrView av = a.view();

  std::vector<double> r(n), z(n), p(n), ap(n);
  // A restart recomputes the true residual; recurrence drift is corrected
  // this way instead of trusting the updated residual at exit.
  for (int restart = 0; restart < 3; ++restart) {
    kernels::residual(av, x, b, r);
    double rnorm = std::sqrt(kernels::dot(r, r));
    stats.relative_residual = rnorm / bnorm;
    if (rnorm <= target) return stats;
    precond(r, z);
    std::copy(z.begin(), z.end(), p.begin());
    double rz = kernels::dot(r, z);
    while (stats.iterations < max_it) {
      kernels::spmv(av, p, ap);
      const double pap = kernels::dot(p, ap);
      if (!(pap > 0.0) || !std::isfinite(pap)) {
        throw SolverError("matrix is not positive definite along the search direction",
                          rnorm / bnorm, stats.iterations);
      }
      const double alpha = rz / pap;
      kernels::axpy(alpha, p, x);
      kernels::axpy(-alpha, ap, r);
      ++stats.iterations;
      rnorm = std::sqrt(kernels::dot(r, r));
      if (!std::isfinite(rnorm)) throw SolverError("CG produced non-finite values", rnorm, stats.iterations);
      if (rnorm <= target) break;
      precond(r, z);
      const double rz_next = kernels::dot(r, z);
      kernels::xpay(z, rz_next / rz, p);
      rz = rz_next;
    }
    kernels::residual(av, x, b, r);
    stats.relative_residual = std::sqrt(kernels::dot(r, r)) / bnorm;
    if (stats.relative_residual <= options.tol) return stats;
    if (stats.iterations >= max_it) break;
  }
  throw SolverError("CG did not converge after " + std::to_string(stats.iterations) +
                        " iterations (relative residual " + std::to_string(stats.relative_residual) + ")",
                    stats.relative_residual, stats.iterations);
}

std::vector<double> solve_spd(const SparseMatrix& a, std::span<const double> b,
                              const SolveOptions& options, SolveStats* stats) {
  std::vector<double> inv_diag = a.diagonal();
  for (double& d : inv_diag) {
    if (!(d > 0.0)) throw SolverError("matrix has a nonpositive diagonal entry");
    d = 1.0 / d;
  }
  std::vector<double> x(a.rows(), 0.0);
  const SolveStats s = pcg(
      a, b, x, [&inv_diag](std::span<const double> r, std::span<double> z) { kernels::mul(inv_diag, r, z); },
      options);
  if (stats != nullptr) *stats = s;
  return x;
}

double norm_l2(std::span<const double> v, const SparseMatrix& mass) {
  if (v.size() != static_cast<std::size_t>(mass.rows())) throw std::invalid_argument("field does not match mass matrix");
  return std::sqrt(std::max(0.0, mass.quadratic_form(v)));
}

double seminorm_h1(std::span<const double> v, const SparseMatrix& stiffness) {
  if (v.size() != static_cast<std::size_t>(stiffness.rows())) {
    throw std::invalid_argument("field does not match stiffness matrix");
  }
  return std::sqrt(std::max(0.0, stiffness.quadratic_form(v)));
}

double dual_norm_hm1(std::span<const double> b, const SparseMatrix& restricted_stiffness,
                     const SolveOptions& options) {
  const std::vector<double> x = solve_spd(restricted_stiffness, b, options);
  return std::sqrt(std::max(0.0, kernels::dot(b, x)));
}

}  // namespace psiomega
