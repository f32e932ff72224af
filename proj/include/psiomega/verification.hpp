#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "psiomega/fem.hpp"
#include "psiomega/multigrid.hpp"
#include "psiomega/polynomial.hpp"
#include "psiomega/stokes.hpp"

namespace psiomega {

/// Closed-form Stokes solution on the unit square: forcing (f1, f2), stream
/// function, vorticity and rot f = d(f2)/dx - d(f1)/dy.
struct AnalyticCase {
  std::string name;
  Polynomial2 f1;
  Polynomial2 f2;
  Polynomial2 psi;
  Polynomial2 omega;
  Polynomial2 rot_f;

  VectorFunction forcing() const;
  ScalarFunction psi_exact() const;
  ScalarFunction omega_exact() const;
};

/// The Bercovier-Engelman benchmark. The default forcing carries +(x - 1/2)
/// in f2 so that the linear part of f is the gradient of (x-1/2)(y-1/2);
/// literal applies f2(x,y) = -f1(y,x) to the whole of f1 instead.
AnalyticCase bercovier_engelman(bool literal = false);

/// Case with f = grad p, psi = omega = 0.
AnalyticCase gradient_case(const Polynomial2& p);

struct ErrorBundle {
  double omega_l2 = 0.0;
  // NaN when no reference level was requested.
  double omega_M = 0.0;
  double psi_l2 = 0.0;
  double psi_h1 = 0.0;
  // Set when the exact field is zero and the absolute norm is reported.
  bool omega_absolute = false;
  bool psi_absolute = false;
  std::optional<int> kref;
};

/// Errors against nodal interpolants of the exact fields: omega on T_k,
/// psi on T_0. The M-norm surrogate adds the discrete dual norm, on level
/// kref, of the Laplacian defect.
ErrorBundle relative_errors(const StokesSolution& sol, const AnalyticCase& c, const Discretization& d,
                            std::optional<int> kref = std::nullopt);

struct VorticityExtremum {
  double min = 0.0;
  double max = 0.0;
  Point argmax;
  double boundary_min = 0.0;
  double boundary_max = 0.0;
};

VorticityExtremum extremum_of_vorticity(const StokesSolution& sol, const Discretization& d);

/// Least-squares slope of log(error) against log(h).
double fit_order(std::span<const std::pair<double, double>> points);

struct FamilyMember {
  std::string id;
  TriangleMesh mesh;
};

struct ConvergenceRecord {
  std::string mesh_id;
  double h = 0.0;
  double sigma = 0.0;
  int k = 0;
  Index n_vertices = 0;
  ErrorBundle errors;
  double omega_max_boundary = 0.0;
  double seconds = 0.0;
};

struct ConvergenceOrders {
  int k = 0;
  double omega_l2 = 0.0;
  double omega_M = 0.0;  // NaN without M-norm data
  double psi_l2 = 0.0;
  double psi_h1 = 0.0;
};

struct StudyOptions {
  MultilevelOptions solver;
  int quad_degree = 5;
  // Level offset above k for the M-norm surrogate; nullopt skips it.
  std::optional<int> kref_offset = 1;
  // Fixed M-norm level for every k; takes precedence over the offset.
  std::optional<int> kref_level;
};

struct ConvergenceStudy {
  std::vector<ConvergenceRecord> records;  // by decreasing h
  ConvergenceOrders orders;
};

ConvergenceStudy convergence_study(std::span<const FamilyMember> family, int k, const AnalyticCase& c,
                                   const StudyOptions& options = {});

}  // namespace psiomega
