#include <Eigen/Cholesky>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

#include "psiomega/errors.hpp"
#include "psiomega/stokes.hpp"

namespace psiomega {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

ScalarField solve_omega0(const TriangleMesh& coarse, const VectorFunction& f, const QuadratureRule& q,
                         const SolveOptions& options, SolveStats* stats) {
  const std::vector<double> load = assemble_load_curl(coarse, f, q);
  const InteriorSystem sys = dirichlet_restrict(assemble_stiffness(coarse), coarse);
  const std::vector<double> x = solve_spd(sys.matrix, sys.restrict_vector(load), options, stats);
  return {0, sys.expand(x)};
}

std::vector<double> solve_omega_delta(const HarmonicBasis& basis, const Discretization& d,
                                      const ScalarField& omega0_fine, double* relative_residual) {
  if (omega0_fine.level != basis.level) throw std::invalid_argument("omega0 must be given on the basis level");
  const std::vector<double> m_omega = d.mass(basis.level).multiply(omega0_fine.values);
  const auto n = static_cast<Eigen::Index>(basis.size());
  Eigen::VectorXd r(n);
  for (Eigen::Index s = 0; s < n; ++s) r(s) = -kernels::dot(basis.lifts[s].values, m_omega);

  const Eigen::LLT<Eigen::MatrixXd> llt(basis.gram_mass);
  if (llt.info() != Eigen::Success) throw SolverError("harmonic Gram matrix is not positive definite");
  const Eigen::VectorXd c = llt.solve(r);
  if (relative_residual != nullptr) {
    const double rn = r.norm();
    *relative_residual = rn == 0.0 ? 0.0 : (basis.gram_mass * c - r).norm() / rn;
  }
  return {c.data(), c.data() + c.size()};
}

ScalarField solve_psi(const Discretization& d, const ScalarField& omega, const SolveOptions& options,
                      SolveStats* stats) {
  // (omega, xi_i) for coarse hats xi_i = P^k e_i: apply the transposed
  // prolongations to M_k omega.
  std::vector<double> load = d.mass(omega.level).multiply(omega.values);
  for (int level = omega.level; level > 0; --level) load = prolongation_transpose(load, d.hierarchy(), level);
  const InteriorSystem& sys = d.interior(0);
  const std::vector<double> x = solve_spd(sys.matrix, sys.restrict_vector(load), options, stats);
  return {0, sys.expand(x)};
}

StokesSolution solve_stokes(const StokesConfig& cfg, const Discretization& d, const VectorFunction& f) {
  const auto start = std::chrono::steady_clock::now();
  const HarmonicBasis basis = build_basis(d, cfg.k);
  const double seconds = seconds_since(start);
  StokesSolution sol = solve_stokes(cfg, d, basis, f);
  sol.diagnostics.seconds_basis = seconds;
  return sol;
}

StokesSolution solve_stokes(const StokesConfig& cfg, const Discretization& d, const HarmonicBasis& basis,
                            const VectorFunction& f) {
  if (cfg.k < 0 || cfg.k > d.finest_level()) {
    throw std::invalid_argument("refinement level " + std::to_string(cfg.k) + " is not in the hierarchy");
  }
  if (basis.level != cfg.k) throw std::invalid_argument("harmonic basis level does not match k");
  StokesSolution sol;
  sol.k = cfg.k;
  sol.diagnostics.lift_iterations = basis.max_iterations;

  auto t0 = std::chrono::steady_clock::now();
  sol.omega0 = solve_omega0(d.mesh(0), f, quadrature_rule(cfg.quad_degree), cfg.solver, &sol.diagnostics.omega0);
  sol.diagnostics.seconds_omega0 = seconds_since(t0);

  const ScalarField omega0_fine = prolongate_to(sol.omega0, d.hierarchy(), cfg.k);
  sol.harmonic_coefficients = solve_omega_delta(basis, d, omega0_fine, &sol.diagnostics.gram_residual);
  sol.omega = {cfg.k, basis.combine(sol.harmonic_coefficients)};
  kernels::axpy(1.0, omega0_fine.values, sol.omega.values);

  t0 = std::chrono::steady_clock::now();
  sol.psi = solve_psi(d, sol.omega, cfg.solver, &sol.diagnostics.psi);
  sol.diagnostics.seconds_psi = seconds_since(t0);
  return sol;
}

std::vector<BoundarySample> boundary_vorticity_trace(const StokesSolution& sol, const TriangleMesh& coarse) {
  if (sol.harmonic_coefficients.size() != static_cast<std::size_t>(coarse.boundary_vertex_count())) {
    throw std::invalid_argument("solution does not match the coarse mesh");
  }
  const std::vector<double> s = boundary_arc_lengths(coarse);
  std::vector<BoundarySample> out;
  out.reserve(s.size() + 1);
  // Coarse vertices keep their index on every level.
  const auto loop = coarse.boundary_vertices();
  for (std::size_t i = 0; i < s.size(); ++i) out.push_back({s[i], sol.omega.values[loop[i]]});
  const auto& last = coarse.boundary_edges().back();
  const double perimeter = s.back() + std::hypot(coarse.vertex(last[1]).x - coarse.vertex(last[0]).x,
                                                 coarse.vertex(last[1]).y - coarse.vertex(last[0]).y);
  out.push_back({perimeter, out.front().omega});
  return out;
}

}  // namespace psiomega
