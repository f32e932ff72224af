#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "psiomega/errors.hpp"
#include "psiomega/multigrid.hpp"

namespace psiomega {

struct Discretization::Level {
  SparseMatrix stiffness;
  SparseMatrix mass;
  InteriorSystem interior;
  // Jacobi weight folded into the inverse diagonal.
  std::vector<double> smoother;
  std::vector<double> inv_diag;
  // Interior prolongation from level k-1 and its transpose (k >= 1).
  SparseMatrix prolongation;
  SparseMatrix restriction;
};

struct Discretization::CoarseSolver {
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt;
  Index dimension = 0;
};

namespace {

SparseMatrix transpose(const SparseMatrix& a, Index cols) {
  const auto rp = a.row_ptr();
  const auto ci = a.col();
  const auto v = a.values();
  std::vector<Index> row_ptr(static_cast<std::size_t>(cols) + 1, 0);
  for (Index c : ci) ++row_ptr[c + 1];
  for (Index i = 0; i < cols; ++i) row_ptr[i + 1] += row_ptr[i];
  std::vector<Index> col(ci.size());
  std::vector<double> val(ci.size());
  std::vector<Index> fill(row_ptr.begin(), row_ptr.end() - 1);
  for (Index r = 0; r < a.rows(); ++r) {
    for (Index p = rp[r]; p < rp[r + 1]; ++p) {
      const Index dst = fill[ci[p]]++;
      col[dst] = r;
      val[dst] = v[p];
    }
  }
  return SparseMatrix(cols, std::move(row_ptr), std::move(col), std::move(val));
}

// Rows: interior vertices of level k. Columns: interior vertices of level k-1.
// Boundary parents carry the homogeneous Dirichlet value and are dropped.
SparseMatrix interior_prolongation(const MeshHierarchy& h, int k, const InteriorSystem& fine,
                                   const InteriorSystem& coarse) {
  const auto origin = h.vertex_origin(k);
  std::vector<Index> row_ptr{0};
  std::vector<Index> col;
  std::vector<double> val;
  for (Index v : fine.interior) {
    const VertexOrigin& o = origin[v];
    if (o.is_copy()) {
      col.push_back(coarse.to_interior[o.first]);
      val.push_back(1.0);
    } else {
      Index a = coarse.to_interior[o.first];
      Index b = coarse.to_interior[o.second];
      if (a > b) std::swap(a, b);
      if (a >= 0) {
        col.push_back(a);
        val.push_back(0.5);
      }
      if (b >= 0) {
        col.push_back(b);
        val.push_back(0.5);
      }
    }
    row_ptr.push_back(static_cast<Index>(col.size()));
  }
  return SparseMatrix(static_cast<Index>(fine.interior.size()), std::move(row_ptr), std::move(col),
                      std::move(val));
}

// Largest eigenvalue of D^{-1} A by power iteration from a fixed start.
double jacobi_spectral_radius(const SparseMatrix& a, std::span<const double> inv_diag) {
  const std::size_t n = static_cast<std::size_t>(a.rows());
  if (n == 0) return 1.0;
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = 1.0 + 0.5 * std::sin(static_cast<double>(i) * 1.618);
  double lambda = 1.0;
  for (int it = 0; it < 40; ++it) {
    const double xn = std::sqrt(kernels::dot(x, x));
    for (double& v : x) v /= xn;
    kernels::spmv(a.view(), x, y);
    kernels::mul(inv_diag, y, y);
    lambda = std::sqrt(kernels::dot(y, y));
    std::swap(x, y);
  }
  return lambda;
}

}  // namespace

Discretization::Discretization(MeshHierarchy h, const MultilevelOptions& options)
    : hierarchy_(std::move(h)), options_(options) {
  levels_.resize(static_cast<std::size_t>(hierarchy_.finest_level()) + 1);
  for (int k = 0; k <= hierarchy_.finest_level(); ++k) {
    Level& level = levels_[k];
    const TriangleMesh& m = hierarchy_.mesh(k);
    level.stiffness = assemble_stiffness(m);
    level.mass = assemble_mass(m);
    level.interior = dirichlet_restrict(level.stiffness, m);
    level.inv_diag = level.interior.matrix.diagonal();
    for (double& d : level.inv_diag) {
      if (!(d > 0.0)) throw SolverError("stiffness matrix has a nonpositive diagonal entry");
      d = 1.0 / d;
    }
    if (k > 0) {
      level.prolongation = interior_prolongation(hierarchy_, k, level.interior, levels_[k - 1].interior);
      level.restriction = transpose(level.prolongation, levels_[k - 1].interior.dimension());
      const double rho = 1.05 * jacobi_spectral_radius(level.interior.matrix, level.inv_diag);
      level.smoother = level.inv_diag;
      for (double& d : level.smoother) d *= 4.0 / (3.0 * rho);
    }
  }

  if (options_.preconditioner == PreconditionerKind::multigrid) {
    coarse_ = std::make_unique<CoarseSolver>();
    const SparseMatrix& a = levels_[0].interior.matrix;
    coarse_->dimension = a.rows();
    if (a.rows() > 0) {
      std::vector<Eigen::Triplet<double>> triplets;
      triplets.reserve(a.nonzeros());
      for (Index i = 0; i < a.rows(); ++i) {
        for (Index p = a.row_ptr()[i]; p < a.row_ptr()[i + 1]; ++p) {
          triplets.emplace_back(i, a.col()[p], a.values()[p]);
        }
      }
      Eigen::SparseMatrix<double> e(a.rows(), a.rows());
      e.setFromTriplets(triplets.begin(), triplets.end());
      coarse_->llt.compute(e);
      if (coarse_->llt.info() != Eigen::Success) {
        throw SolverError("coarse stiffness matrix is not positive definite");
      }
    }
  }
}

Discretization::~Discretization() = default;
Discretization::Discretization(Discretization&&) noexcept = default;
Discretization& Discretization::operator=(Discretization&&) noexcept = default;

const SparseMatrix& Discretization::stiffness(int k) const { return levels_.at(k).stiffness; }
const SparseMatrix& Discretization::mass(int k) const { return levels_.at(k).mass; }
const InteriorSystem& Discretization::interior(int k) const { return levels_.at(k).interior; }

void Discretization::vcycle(int k, std::span<const double> rhs, std::span<double> out) const {
  if (!coarse_) throw std::logic_error("multigrid preconditioner was not set up");
  if (k == 0) {
    if (coarse_->dimension == 0) return;
    const Eigen::Map<const Eigen::VectorXd> b(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
    Eigen::Map<Eigen::VectorXd>(out.data(), static_cast<Eigen::Index>(out.size())) = coarse_->llt.solve(b);
    return;
  }
  const Level& level = levels_[k];
  const kernels::CsrView a = level.interior.matrix.view();
  const std::size_t n = rhs.size();
  std::vector<double> r(n), t(n);

  kernels::mul(level.smoother, rhs, out);
  for (int s = 1; s < options_.smoothing_steps; ++s) {
    kernels::residual(a, out, rhs, r);
    kernels::mul(level.smoother, r, t);
    kernels::axpy(1.0, t, out);
  }

  kernels::residual(a, out, rhs, r);
  const std::size_t nc = static_cast<std::size_t>(level.restriction.rows());
  std::vector<double> rc(nc), ec(nc);
  kernels::spmv(level.restriction.view(), r, rc);
  vcycle(k - 1, rc, ec);
  kernels::spmv(level.prolongation.view(), ec, t);
  kernels::axpy(1.0, t, out);

  for (int s = 0; s < options_.smoothing_steps; ++s) {
    kernels::residual(a, out, rhs, r);
    kernels::mul(level.smoother, r, t);
    kernels::axpy(1.0, t, out);
  }
}

std::vector<double> Discretization::solve_interior(int k, std::span<const double> rhs,
                                                   SolveStats* stats) const {
  const Level& level = levels_.at(k);
  if (rhs.size() != static_cast<std::size_t>(level.interior.dimension())) {
    throw std::invalid_argument("right-hand side does not match level " + std::to_string(k));
  }
  std::vector<double> x(rhs.size(), 0.0);
  SolveStats s;
  if (options_.preconditioner == PreconditionerKind::multigrid) {
    s = pcg(level.interior.matrix, rhs, x,
            [this, k](std::span<const double> r, std::span<double> z) { vcycle(k, r, z); },
            options_.solve);
  } else {
    s = pcg(level.interior.matrix, rhs, x,
            [&level](std::span<const double> r, std::span<double> z) { kernels::mul(level.inv_diag, r, z); },
            options_.solve);
  }
  if (stats != nullptr) *stats = s;
  return x;
}

std::vector<double> Discretization::harmonic_extension(int k, std::span<const double> boundary,
                                                       SolveStats* stats) const {
  const Level& level = levels_.at(k);
  const InteriorSystem& in = level.interior;
  if (boundary.size() != in.to_interior.size()) {
    throw std::invalid_argument("boundary data does not match level " + std::to_string(k));
  }
  std::vector<double> g(boundary.begin(), boundary.end());
  for (Index v : in.interior) g[v] = 0.0;
  const std::vector<double> ag = level.stiffness.multiply(g);
  std::vector<double> rhs(in.interior.size());
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = -ag[in.interior[i]];
  const std::vector<double> x = solve_interior(k, rhs, stats);
  for (std::size_t i = 0; i < x.size(); ++i) g[in.interior[i]] = x[i];
  return g;
}

double Discretization::dual_norm(int k, std::span<const double> interior_load) const {
  const std::vector<double> x = solve_interior(k, interior_load);
  return std::sqrt(std::max(0.0, kernels::dot(interior_load, x)));
}

std::vector<double> Discretization::interior_residual_load(int k, std::span<const double> v) const {
  const Level& level = levels_.at(k);
  return level.interior.restrict_vector(level.stiffness.multiply(v));
}

}  // namespace psiomega
