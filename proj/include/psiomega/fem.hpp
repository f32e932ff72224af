#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "psiomega/field.hpp"
#include "psiomega/kernels.hpp"
#include "psiomega/mesh.hpp"

namespace psiomega {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

using ScalarFunction = std::function<double(const Point&)>;
using VectorFunction = std::function<Vec2(const Point&)>;

/// Square CSR matrix with sorted column indices. Symmetric matrices are
/// stored in full.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(Index rows, std::vector<Index> row_ptr, std::vector<Index> col,
               std::vector<double> val);

  Index rows() const noexcept { return rows_; }
  std::size_t nonzeros() const noexcept { return val_.size(); }
  std::span<const Index> row_ptr() const noexcept { return row_ptr_; }
  std::span<const Index> col() const noexcept { return col_; }
  std::span<const double> values() const noexcept { return val_; }
  kernels::CsrView view() const noexcept {
    return {static_cast<std::size_t>(rows_), row_ptr_.data(), col_.data(), val_.data()};
  }

  /// Entry (i, j); zero outside the pattern.
  double at(Index i, Index j) const;
  std::vector<double> diagonal() const;
  bool is_symmetric() const;

  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> multiply(std::span<const double> x) const;
  /// x^T A x
  double quadratic_form(std::span<const double> x) const;

 private:
  Index rows_ = 0;
  std::vector<Index> row_ptr_{0};
  std::vector<Index> col_;
  std::vector<double> val_;
};

/// Symmetric rule on the reference triangle, barycentric points, weights
/// normalized to sum to one (multiply by the element area).
struct QuadratureRule {
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
  int degree = 0;
};

/// Smallest built-in rule exact for polynomials of the requested degree
/// (1, 2 or 5; the 7-point degree-5 rule is the default for loads).
QuadratureRule quadrature_rule(int degree = 5);

SparseMatrix assemble_stiffness(const TriangleMesh& m);
SparseMatrix assemble_mass(const TriangleMesh& m);

/// Entry i is (f, rot phi_i) = sum_K int_K f1 d(phi_i)/dy - f2 d(phi_i)/dx.
std::vector<double> assemble_load_curl(const TriangleMesh& m, const VectorFunction& f,
                                       const QuadratureRule& q);

/// Entry i is int phi_i f.
std::vector<double> assemble_load(const TriangleMesh& m, const ScalarFunction& f,
                                  const QuadratureRule& q);

/// A matrix restricted to the interior (non-boundary) vertices of a mesh.
struct InteriorSystem {
  SparseMatrix matrix;
  std::vector<Index> interior;     // restricted index -> mesh vertex
  std::vector<Index> to_interior;  // mesh vertex -> restricted index, -1 on the boundary

  Index dimension() const noexcept { return matrix.rows(); }
  std::vector<double> restrict_vector(std::span<const double> full) const;
  /// Full-length vector with the interior entries set and zero boundary.
  std::vector<double> expand(std::span<const double> reduced) const;
};

InteriorSystem dirichlet_restrict(const SparseMatrix& a, const TriangleMesh& m);

struct SolveStats {
  int iterations = 0;
  double relative_residual = 0.0;
};

struct SolveOptions {
  double tol = 1e-10;
  // 0 selects 10*sqrt(n) + 1000.
  int max_iterations = 0;
};

/// Applies z = M^{-1} r.
using Preconditioner = std::function<void(std::span<const double> r, std::span<double> z)>;

/// Preconditioned conjugate gradients on x (initial guess on entry). Stops
/// when ||b - A x|| <= tol ||b||. Throws SolverError on non-convergence or
/// non-finite data.
SolveStats pcg(const SparseMatrix& a, std::span<const double> b, std::span<double> x,
               const Preconditioner& precond, const SolveOptions& options);

/// Jacobi-preconditioned CG from a zero initial guess.
std::vector<double> solve_spd(const SparseMatrix& a, std::span<const double> b,
                              const SolveOptions& options = {}, SolveStats* stats = nullptr);

double norm_l2(std::span<const double> v, const SparseMatrix& mass);
double seminorm_h1(std::span<const double> v, const SparseMatrix& stiffness);

/// sqrt(b^T A0^{-1} b): the discrete dual norm of a functional given by its
/// values on interior hats.
double dual_norm_hm1(std::span<const double> b, const SparseMatrix& restricted_stiffness,
                     const SolveOptions& options = {});

}  // namespace psiomega
