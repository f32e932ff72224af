#pragma once

#include <vector>

#include "psiomega/fem.hpp"
#include "psiomega/field.hpp"
#include "psiomega/harmonic.hpp"
#include "psiomega/multigrid.hpp"

namespace psiomega {

struct StokesConfig {
  int k = 0;
  SolveOptions solver;
  int quad_degree = 5;
};

struct StokesDiagnostics {
  SolveStats omega0;
  SolveStats psi;
  int lift_iterations = 0;
  // ||G c - r|| / ||r|| of the harmonic correction.
  double gram_residual = 0.0;
  double seconds_omega0 = 0.0;
  double seconds_basis = 0.0;
  double seconds_psi = 0.0;
};

/// psi and omega0 live on T_0 and vanish on the boundary; the harmonic
/// coefficients weight the level-k lifts; omega is the composite vorticity
/// on T_k.
struct StokesSolution {
  int k = 0;
  ScalarField psi;
  ScalarField omega0;
  std::vector<double> harmonic_coefficients;
  ScalarField omega;
  StokesDiagnostics diagnostics;
};

/// Interior vorticity: (grad omega0, grad xi) = (f, rot xi) on H1_0(T_0).
ScalarField solve_omega0(const TriangleMesh& coarse, const VectorFunction& f, const QuadratureRule& q,
                         const SolveOptions& options = {}, SolveStats* stats = nullptr);

/// Harmonic correction: G c = r with r_S = -(omega0, Z_k(lambda_S)) on level k.
std::vector<double> solve_omega_delta(const HarmonicBasis& basis, const Discretization& d,
                                      const ScalarField& omega0_fine, double* relative_residual = nullptr);

/// Stream function: (grad psi, grad xi) = (omega, xi) on H1_0(T_0) with the
/// right-hand side integrated exactly on the level of `omega`.
ScalarField solve_psi(const Discretization& d, const ScalarField& omega, const SolveOptions& options = {},
                      SolveStats* stats = nullptr);

/// The three uncoupled solves. k = 0 reproduces the classical unstabilized scheme.
StokesSolution solve_stokes(const StokesConfig& cfg, const Discretization& d, const VectorFunction& f);

/// Same, reusing a basis already built on level cfg.k.
StokesSolution solve_stokes(const StokesConfig& cfg, const Discretization& d, const HarmonicBasis& basis,
                            const VectorFunction& f);

struct BoundarySample {
  double s = 0.0;
  double omega = 0.0;
};

/// Composite vorticity at the coarse boundary vertices against arc length
/// from the loop start; the first sample is repeated at the full perimeter.
std::vector<BoundarySample> boundary_vorticity_trace(const StokesSolution& sol, const TriangleMesh& coarse);

}  // namespace psiomega
