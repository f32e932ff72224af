#pragma once

#include <memory>
#include <span>
#include <vector>

#include "psiomega/fem.hpp"
#include "psiomega/mesh.hpp"

namespace psiomega {

enum class PreconditionerKind { jacobi, multigrid };

struct MultilevelOptions {
  SolveOptions solve;
  PreconditionerKind preconditioner = PreconditionerKind::multigrid;
  // Damped Jacobi sweeps before and after each coarse correction.
  int smoothing_steps = 2;
};

/// P1 stiffness and mass matrices of every level of a hierarchy, together
/// with a solver for homogeneous Dirichlet problems on any level.
///
/// The default solver is CG preconditioned by one symmetric V-cycle over the
/// nested levels: damped Jacobi smoothing, interior-restricted prolongation
/// and a sparse Cholesky factor on level 0. Solves are const and may run
/// concurrently.
class Discretization {
 public:
  explicit Discretization(MeshHierarchy h, const MultilevelOptions& options = {});
  ~Discretization();
  Discretization(Discretization&&) noexcept;
  Discretization& operator=(Discretization&&) noexcept;

  const MeshHierarchy& hierarchy() const noexcept { return hierarchy_; }
  int finest_level() const noexcept { return hierarchy_.finest_level(); }
  const TriangleMesh& mesh(int k) const { return hierarchy_.mesh(k); }
  const SparseMatrix& stiffness(int k) const;
  const SparseMatrix& mass(int k) const;
  const InteriorSystem& interior(int k) const;
  const MultilevelOptions& options() const noexcept { return options_; }

  /// Solves A0_k x = rhs with A0_k the interior-restricted stiffness of level k.
  std::vector<double> solve_interior(int k, std::span<const double> rhs,
                                     SolveStats* stats = nullptr) const;

  /// Field on level k equal to `boundary` at boundary vertices and discretely
  /// harmonic inside. Interior entries of `boundary` are ignored.
  std::vector<double> harmonic_extension(int k, std::span<const double> boundary,
                                         SolveStats* stats = nullptr) const;

  /// sqrt(b^T A0_k^{-1} b) for a functional b given on the interior hats of level k.
  double dual_norm(int k, std::span<const double> interior_load) const;

  /// Values (grad v, grad chi_i) on the interior hats of level k of a full-length field v.
  std::vector<double> interior_residual_load(int k, std::span<const double> v) const;

  /// Applies one V-cycle from level k (the multigrid preconditioner).
  void vcycle(int k, std::span<const double> rhs, std::span<double> out) const;

 private:
  struct Level;
  struct CoarseSolver;

  MeshHierarchy hierarchy_;
  MultilevelOptions options_;
  std::vector<Level> levels_;
  std::unique_ptr<CoarseSolver> coarse_;
};

}  // namespace psiomega
