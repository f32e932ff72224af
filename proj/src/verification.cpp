#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "psiomega/verification.hpp"

namespace psiomega {

VectorFunction AnalyticCase::forcing() const {
  return [f1 = f1, f2 = f2](const Point& p) { return Vec2{f1(p), f2(p)}; };
}

ScalarFunction AnalyticCase::psi_exact() const {
  return [p = psi](const Point& x) { return p(x); };
}

ScalarFunction AnalyticCase::omega_exact() const {
  return [w = omega](const Point& x) { return w(x); };
}

AnalyticCase bercovier_engelman(bool literal) {
  const Polynomial2 x = Polynomial2::x();
  const Polynomial2 y = Polynomial2::y();
  const auto c = Polynomial2::constant;
  const Polynomial2 bx = x * x * (x - c(1.0)) * (x - c(1.0));
  const Polynomial2 by = bx.swap_xy();

  const Polynomial2 main = 256.0 * (bx * (12.0 * y - c(6.0)) +
                                    y * (y - c(1.0)) * (2.0 * y - c(1.0)) * (12.0 * x * x - 12.0 * x + c(2.0)));
  AnalyticCase e;
  e.name = literal ? "bercovier-engelman-literal" : "bercovier-engelman";
  e.f1 = main + (y - c(0.5));
  e.f2 = literal ? -(e.f1.swap_xy()) : -(main.swap_xy()) + (x - c(0.5));
  e.psi = -128.0 * (by * bx);
  e.omega = 256.0 * (by * (6.0 * x * x - 6.0 * x + c(1.0)) + bx * (6.0 * y * y - 6.0 * y + c(1.0)));
  e.rot_f = e.f2.dx() - e.f1.dy();
  return e;
}

AnalyticCase gradient_case(const Polynomial2& p) {
  AnalyticCase e;
  e.name = "gradient";
  e.f1 = p.dx();
  e.f2 = p.dy();
  e.rot_f = e.f2.dx() - e.f1.dy();
  return e;
}

namespace {

double ratio_or_absolute(double err, double ref, bool& absolute) {
  absolute = !(ref > 0.0);
  return absolute ? err : err / ref;
}

}  // namespace

ErrorBundle relative_errors(const StokesSolution& sol, const AnalyticCase& c, const Discretization& d,
                            std::optional<int> kref) {
  const int k = sol.k;
  const TriangleMesh& fine = d.mesh(k);
  const TriangleMesh& coarse = d.mesh(0);
  const std::vector<double> omega_i = interpolate(fine, c.omega_exact());
  const std::vector<double> psi_i = interpolate(coarse, c.psi_exact());

  std::vector<double> e_omega = sol.omega.values;
  kernels::axpy(-1.0, omega_i, e_omega);
  std::vector<double> e_psi = sol.psi.values;
  kernels::axpy(-1.0, psi_i, e_psi);

  ErrorBundle out;
  out.kref = kref;
  const double omega_ref = norm_l2(omega_i, d.mass(k));
  out.omega_l2 = ratio_or_absolute(norm_l2(e_omega, d.mass(k)), omega_ref, out.omega_absolute);
  bool psi_abs_h1 = false;
  out.psi_l2 = ratio_or_absolute(norm_l2(e_psi, d.mass(0)), norm_l2(psi_i, d.mass(0)), out.psi_absolute);
  out.psi_h1 = ratio_or_absolute(seminorm_h1(e_psi, d.stiffness(0)), seminorm_h1(psi_i, d.stiffness(0)), psi_abs_h1);

  if (kref) {
    if (*kref <= k || *kref > d.finest_level()) throw std::invalid_argument("M-norm reference level out of range");
    const auto m_norm = [&](const std::vector<double>& v) {
      const ScalarField up = prolongate_to(ScalarField{k, v}, d.hierarchy(), *kref);
      const double dual = d.dual_norm(*kref, d.interior_residual_load(*kref, up.values));
      const double l2 = norm_l2(v, d.mass(k));
      return std::sqrt(l2 * l2 + dual * dual);
    };
    bool unused = false;
    out.omega_M = ratio_or_absolute(m_norm(e_omega), m_norm(omega_i), unused);
  } else {
    out.omega_M = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

VorticityExtremum extremum_of_vorticity(const StokesSolution& sol, const Discretization& d) {
  const TriangleMesh& fine = d.mesh(sol.k);
  const auto& w = sol.omega.values;
  const auto [lo, hi] = std::minmax_element(w.begin(), w.end());
  VorticityExtremum e;
  e.min = *lo;
  e.max = *hi;
  e.argmax = fine.vertex(static_cast<Index>(hi - w.begin()));
  e.boundary_min = std::numeric_limits<double>::infinity();
  e.boundary_max = -std::numeric_limits<double>::infinity();
  for (Index v : d.mesh(0).boundary_vertices()) {
    e.boundary_min = std::min(e.boundary_min, w[v]);
    e.boundary_max = std::max(e.boundary_max, w[v]);
  }
  return e;
}

double fit_order(std::span<const std::pair<double, double>> points) {
  if (points.size() < 2) throw std::invalid_argument("order fit needs at least two points");
  double sx = 0.0, sy = 0.0;
  for (const auto& [h, e] : points) {
    if (!(h > 0.0) || !(e > 0.0)) throw std::invalid_argument("order fit needs positive h and errors");
    sx += std::log(h);
    sy += std::log(e);
  }
  const double n = static_cast<double>(points.size());
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [h, e] : points) {
    sxx += (std::log(h) - mx) * (std::log(h) - mx);
    sxy += (std::log(h) - mx) * (std::log(e) - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("order fit needs distinct mesh sizes");
  return sxy / sxx;
}

ConvergenceStudy convergence_study(std::span<const FamilyMember> family, int k, const AnalyticCase& c,
                                   const StudyOptions& options) {
  if (family.size() < 3) throw std::invalid_argument("need >= 3 meshes for a convergence study");
  if (k < 0) throw std::invalid_argument("k must be nonnegative");
  std::vector<std::size_t> order(family.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> h(family.size());
  for (std::size_t i = 0; i < family.size(); ++i) h[i] = family[i].mesh.max_diameter();
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return h[a] > h[b]; });
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (!(h[order[i]] < h[order[i - 1]])) throw std::invalid_argument("family mesh sizes must be distinct");
  }

  ConvergenceStudy study;
  StokesConfig cfg;
  cfg.k = k;
  cfg.solver = options.solver.solve;
  cfg.quad_degree = options.quad_degree;
  std::optional<int> kref = options.kref_offset ? std::optional<int>(k + *options.kref_offset) : std::nullopt;
  if (options.kref_level) {
    if (*options.kref_level <= k) throw std::invalid_argument("kref must exceed k");
    kref = options.kref_level;
  }
  for (std::size_t idx : order) {
    const auto start = std::chrono::steady_clock::now();
    const FamilyMember& member = family[idx];
    Discretization d(build_hierarchy(member.mesh, kref.value_or(k)), options.solver);
    const StokesSolution sol = solve_stokes(cfg, d, c.forcing());
    ConvergenceRecord r;
    r.mesh_id = member.id;
    r.h = h[idx];
    r.sigma = sigma_regularity(member.mesh);
    r.k = k;
    r.n_vertices = member.mesh.vertex_count();
    r.errors = relative_errors(sol, c, d, kref);
    r.omega_max_boundary = extremum_of_vorticity(sol, d).boundary_max;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    study.records.push_back(std::move(r));
  }

  const auto fit = [&](auto field) {
    std::vector<std::pair<double, double>> pts;
    for (const ConvergenceRecord& r : study.records) pts.emplace_back(r.h, field(r.errors));
    for (const auto& p : pts) {
      if (!(p.second > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    }
    return fit_order(pts);
  };
  study.orders.k = k;
  study.orders.omega_l2 = fit([](const ErrorBundle& e) { return e.omega_l2; });
  study.orders.omega_M = fit([](const ErrorBundle& e) { return e.omega_M; });
  study.orders.psi_l2 = fit([](const ErrorBundle& e) { return e.psi_l2; });
  study.orders.psi_h1 = fit([](const ErrorBundle& e) { return e.psi_h1; });
  return study;
}

}  // namespace psiomega
