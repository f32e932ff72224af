#include <cmath>
#include <stdexcept>
#include <string>

#include "parallel.hpp"
#include "psiomega/errors.hpp"
#include "psiomega/harmonic.hpp"

namespace psiomega {

BoundaryTrace hat_trace(const TriangleMesh& coarse, Index vertex) {
  if (vertex < 0 || vertex >= coarse.vertex_count() || !coarse.is_boundary_vertex(vertex)) {
    throw std::invalid_argument("vertex " + std::to_string(vertex) + " is not a boundary vertex");
  }
  BoundaryTrace t{std::vector<double>(coarse.boundary_vertex_count(), 0.0)};
  t.values[coarse.boundary_position(vertex)] = 1.0;
  return t;
}

ScalarField lift_discrete_harmonic(const Discretization& d, const BoundaryTrace& trace, int k,
                                   SolveStats* stats) {
  const TriangleMesh& coarse = d.mesh(0);
  if (trace.values.size() != static_cast<std::size_t>(coarse.boundary_vertex_count())) {
    throw std::invalid_argument("trace length does not match the coarse boundary");
  }
  ScalarField boundary{0, std::vector<double>(coarse.vertex_count(), 0.0)};
  const auto loop = coarse.boundary_vertices();
  for (std::size_t i = 0; i < loop.size(); ++i) boundary.values[loop[i]] = trace.values[i];
  // Prolongation interpolates linearly along each coarse boundary edge.
  const ScalarField fine = prolongate_to(boundary, d.hierarchy(), k);
  return {k, d.harmonic_extension(k, fine.values, stats)};
}

std::vector<double> HarmonicBasis::combine(std::span<const double> coefficients) const {
  if (coefficients.size() != lifts.size()) throw std::invalid_argument("coefficient count mismatch");
  std::vector<double> out(lifts.empty() ? 0 : lifts.front().values.size(), 0.0);
  for (std::size_t s = 0; s < lifts.size(); ++s) kernels::axpy(coefficients[s], lifts[s].values, out);
  return out;
}

HarmonicBasis build_basis(const Discretization& d, int k) {
  const TriangleMesh& coarse = d.mesh(0);
  HarmonicBasis basis;
  basis.level = k;
  basis.vertices.assign(coarse.boundary_vertices().begin(), coarse.boundary_vertices().end());
  const std::size_t n = basis.vertices.size();
  basis.lifts.resize(n);
  std::vector<int> iterations(n, 0);
  std::vector<std::vector<double>> mass_lifts(n);
  detail::parallel_for(n, [&](std::size_t s) {
    SolveStats stats;
    try {
      basis.lifts[s] = lift_discrete_harmonic(d, hat_trace(coarse, basis.vertices[s]), k, &stats);
    } catch (const SolverError& e) {
      throw SolverError("lift of boundary vertex " + std::to_string(basis.vertices[s]) + ": " + e.what(),
                        e.residual(), e.iterations());
    }
    iterations[s] = stats.iterations;
    mass_lifts[s] = d.mass(k).multiply(basis.lifts[s].values);
  });
  for (int it : iterations) basis.max_iterations = std::max(basis.max_iterations, it);

  basis.gram_mass.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t t = s; t < n; ++t) {
      const double g = kernels::dot(basis.lifts[s].values, mass_lifts[t]);
      basis.gram_mass(s, t) = g;
      basis.gram_mass(t, s) = g;
    }
  }
  return basis;
}

ScalarField nonharmonic_part(const Discretization& d, Index vertex, int k) {
  const TriangleMesh& coarse = d.mesh(0);
  if (k < 0 || k > d.finest_level()) throw std::invalid_argument("level out of range");
  if (k == 0) {
    (void)hat_trace(coarse, vertex);
    return {0, std::vector<double>(coarse.vertex_count(), 0.0)};
  }
  const ScalarField h0 = lift_discrete_harmonic(d, hat_trace(coarse, vertex), 0);
  const ScalarField hk = prolongate_to(h0, d.hierarchy(), k);
  const std::vector<double> load = d.interior_residual_load(k, hk.values);
  return {k, d.interior(k).expand(d.solve_interior(k, load))};
}

namespace {

void check_reference_level(const Discretization& d, int k, int kref) {
  if (kref <= k) {
    throw std::invalid_argument("reference level " + std::to_string(kref) +
                                " must lie above level " + std::to_string(k));
  }
  if (kref > d.finest_level()) {
    throw std::invalid_argument("reference level " + std::to_string(kref) + " is not in the hierarchy");
  }
}

}  // namespace

double stability_ratio(const Discretization& d, const BoundaryTrace& trace, int k, int kref) {
  check_reference_level(d, k, kref);
  const ScalarField z = lift_discrete_harmonic(d, trace, k);
  const double denominator = norm_l2(z.values, d.mass(k));
  if (denominator == 0.0) return 0.0;
  const ScalarField fine = prolongate_to(z, d.hierarchy(), kref);
  const std::vector<double> load = d.interior_residual_load(kref, fine.values);
  return d.dual_norm(kref, load) / denominator;
}

StabilityScan stability_scan(const Discretization& d, const HarmonicBasis& basis, int kref) {
  const int k = basis.level;
  check_reference_level(d, k, kref);
  const std::size_t n = basis.size();
  std::vector<std::vector<double>> loads(n), potentials(n);
  detail::parallel_for(n, [&](std::size_t s) {
    const ScalarField fine = prolongate_to(basis.lifts[s], d.hierarchy(), kref);
    loads[s] = d.interior_residual_load(kref, fine.values);
    potentials[s] = d.solve_interior(kref, loads[s]);
  });

  StabilityScan scan;
  scan.level = k;
  scan.kref = kref;
  const auto dim = static_cast<Eigen::Index>(n);
  scan.residual_gram.resize(dim, dim);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t t = s; t < n; ++t) {
      const double v = 0.5 * (kernels::dot(loads[s], potentials[t]) + kernels::dot(loads[t], potentials[s]));
      scan.residual_gram(s, t) = v;
      scan.residual_gram(t, s) = v;
    }
  }

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> gram_eig(basis.gram_mass, Eigen::EigenvaluesOnly);
  scan.gram_min_eigenvalue = gram_eig.eigenvalues().minCoeff();
  if (!(scan.gram_min_eigenvalue > 1e-14 * gram_eig.eigenvalues().maxCoeff())) {
    throw SolverError("harmonic Gram matrix is numerically singular (smallest eigenvalue " +
                          std::to_string(scan.gram_min_eigenvalue) + ")",
                      scan.gram_min_eigenvalue);
  }
  const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(scan.residual_gram, basis.gram_mass);
  if (eig.info() != Eigen::Success) throw SolverError("generalized eigenproblem failed");
  // Eigenvalues come sorted ascending.
  const double mu = eig.eigenvalues()(dim - 1);
  scan.rho_max = std::sqrt(std::max(0.0, mu));
  Eigen::VectorXd c = eig.eigenvectors().col(dim - 1);
  Eigen::Index arg = 0;
  c.cwiseAbs().maxCoeff(&arg);
  c /= c(arg);
  scan.worst_trace.values.assign(c.data(), c.data() + c.size());
  return scan;
}

std::optional<int> estimate_K(std::span<const StabilityScan> scans, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  for (const StabilityScan& s : scans) {
    if (s.rho_max * delta <= 1.0) return s.level;
  }
  return std::nullopt;
}

std::optional<int> estimate_K(const Discretization& d, double delta, int kref) {
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  for (int k = 0; k <= kref - 2; ++k) {
    const StabilityScan scan = stability_scan(d, build_basis(d, k), kref);
    if (scan.rho_max * delta <= 1.0) return k;
  }
  return std::nullopt;
}

}  // namespace psiomega
