#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <vector>

#include "psiomega/field.hpp"
#include "psiomega/multigrid.hpp"

namespace psiomega {

/// Piecewise-linear boundary data: one value per boundary vertex of the
/// coarse mesh, in boundary loop order.
struct BoundaryTrace {
  std::vector<double> values;
};

/// Trace equal to 1 at boundary vertex `vertex` of the coarse mesh and 0 at
/// every other boundary vertex.
BoundaryTrace hat_trace(const TriangleMesh& coarse, Index vertex);

/// Z_k(trace): the level-k field that interpolates the trace linearly along
/// every coarse boundary edge and is discretely harmonic inside.
ScalarField lift_discrete_harmonic(const Discretization& d, const BoundaryTrace& trace, int k,
                                   SolveStats* stats = nullptr);

/// Lifts of all coarse boundary hats on one level and their L2 Gram matrix.
struct HarmonicBasis {
  int level = 0;
  std::vector<Index> vertices;  // coarse boundary vertices, loop order
  std::vector<ScalarField> lifts;
  Eigen::MatrixXd gram_mass;
  int max_iterations = 0;  // largest CG count over the lift solves

  std::size_t size() const noexcept { return lifts.size(); }
  /// sum_S c_S Z_k(lambda_S) as a level-k nodal vector.
  std::vector<double> combine(std::span<const double> coefficients) const;
};

/// Lift solves run in parallel over the boundary vertices.
HarmonicBasis build_basis(const Discretization& d, int k);

/// eta_{S,k}: the H1_0(T_k) part of the level-0 discrete harmonic h_S, i.e.
/// the solution of (grad eta, grad chi) = (grad h_S, grad chi) for every
/// interior hat chi of level k. Identically zero for k = 0.
ScalarField nonharmonic_part(const Discretization& d, Index vertex, int k);

/// ||Delta Z_k(trace)||_{-1} / ||Z_k(trace)||_0 with the dual norm evaluated
/// on level kref > k.
double stability_ratio(const Discretization& d, const BoundaryTrace& trace, int k, int kref);

struct StabilityScan {
  int level = 0;
  int kref = 0;
  double rho_max = 0.0;
  BoundaryTrace worst_trace;
  double gram_min_eigenvalue = 0.0;
  // N_ST = b_S^T A0_kref^{-1} b_T for the residual loads b_S of the lifts.
  Eigen::MatrixXd residual_gram;
};

/// Supremum of the stability ratio over the whole level-k harmonic space:
/// square root of the largest eigenvalue of N c = mu G c.
StabilityScan stability_scan(const Discretization& d, const HarmonicBasis& basis, int kref);

/// Smallest k <= kref - 2 whose scan satisfies rho_max <= 1/delta, or
/// nullopt when no scanned level qualifies.
std::optional<int> estimate_K(const Discretization& d, double delta, int kref);

/// Same threshold applied to scans already computed, ordered by level.
std::optional<int> estimate_K(std::span<const StabilityScan> scans, double delta);

}  // namespace psiomega
