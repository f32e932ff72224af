#include <doctest.h>

#include <cmath>
#include <random>

#include "psiomega/verification.hpp"

using namespace psiomega;

namespace {

// Central differences of order h^2; h chosen so truncation ~1e-8.
double fd_laplacian(const ScalarFunction& f, const Point& p, double h = 1e-3) {
  return (f({p.x + h, p.y}) + f({p.x - h, p.y}) + f({p.x, p.y + h}) + f({p.x, p.y - h}) - 4 * f(p)) / (h * h);
}

}  // namespace

TEST_CASE("Bercovier-Engelman fields satisfy the PDE exactly") {
  const AnalyticCase c = bercovier_engelman();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng), y = u(rng);
    CHECK(std::abs(c.omega(x, y) + c.psi.laplacian()(x, y)) <= 1e-10);
    CHECK(std::abs(-c.omega.laplacian()(x, y) - c.rot_f(x, y)) <= 1e-10);
    CHECK(std::abs(c.rot_f(x, y) - (c.f2.dx()(x, y) - c.f1.dy()(x, y))) <= 1e-10);
  }
  CHECK(c.omega(0.5, 0.0) == 16.0);
  CHECK(c.psi(0.5, 0.5) == -0.5);
  CHECK(c.psi.degree() == 8);
  CHECK(c.f1.degree() == 5);
}

TEST_CASE("polynomial derivatives against finite differences") {
  const AnalyticCase c = bercovier_engelman();
  const ScalarFunction psi = c.psi_exact();
  for (const Point p : {Point{0.3, 0.7}, Point{0.5, 0.1}, Point{0.9, 0.45}}) {
    CHECK(fd_laplacian(psi, p) == doctest::Approx(c.psi.laplacian()(p)).epsilon(1e-5));
    // Velocity rot psi = (dpsi/dy, -dpsi/dx); -Laplace(u) + grad p = f.
    const double h = 1e-4;
    const auto dpsi_dy = [&](const Point& q) { return (psi({q.x, q.y + h}) - psi({q.x, q.y - h})) / (2 * h); };
    CHECK((dpsi_dy({p.x + 1e-6, p.y}) - dpsi_dy({p.x - 1e-6, p.y})) / 2e-6 ==
          doctest::Approx(c.psi.dy().dx()(p)).epsilon(1e-4).scale(1.0));
  }
  // f = -Laplace(rot psi) + grad((x - 1/2)(y - 1/2)).
  const Polynomial2 half = Polynomial2::constant(0.5);
  const Polynomial2 p = (Polynomial2::x() - half) * (Polynomial2::y() - half);
  const Polynomial2 f1 = -1.0 * c.psi.dy().laplacian() + p.dx();
  const Polynomial2 f2 = c.psi.dx().laplacian() + p.dy();
  for (const Point q : {Point{0.2, 0.3}, Point{0.8, 0.6}}) {
    CHECK(f1(q) == doctest::Approx(c.f1(q)).epsilon(1e-12));
    CHECK(f2(q) == doctest::Approx(c.f2(q)).epsilon(1e-12));
  }
}

TEST_CASE("literal forcing breaks the vorticity equation by a constant") {
  const AnalyticCase lit = bercovier_engelman(true);
  for (const Point q : {Point{0.2, 0.3}, Point{0.8, 0.6}}) {
    const double rot = lit.f2.dx()(q) - lit.f1.dy()(q);
    CHECK(-lit.omega.laplacian()(q) - rot == doctest::Approx(2.0));
    CHECK(lit.f2(q) == doctest::Approx(-lit.f1(q.y, q.x)));
  }
}

TEST_CASE("fit_order") {
  std::vector<std::pair<double, double>> pts;
  for (double h : {0.1, 0.05, 0.025}) pts.emplace_back(h, 3.0 * h * h);
  CHECK(fit_order(pts) == doctest::Approx(2.0));
  pts = {{0.2, 0.5}, {0.1, 0.35}, {0.05, 0.25}};
  const double s = fit_order(pts);
  CHECK(s > 0.4);
  CHECK(s < 0.6);
  CHECK_THROWS_AS(fit_order(std::vector<std::pair<double, double>>{{0.1, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(fit_order(std::vector<std::pair<double, double>>{{0.1, 1.0}, {0.05, 0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(fit_order(std::vector<std::pair<double, double>>{{0.1, 1.0}, {0.1, 2.0}}), std::invalid_argument);
}

TEST_CASE("relative errors") {
  const AnalyticCase c = bercovier_engelman();
  const Discretization d(build_hierarchy(build_structured_unit_square(8), 2));
  StokesConfig cfg;
  cfg.k = 1;
  const StokesSolution sol = solve_stokes(cfg, d, c.forcing());
  const ErrorBundle e = relative_errors(sol, c, d, 2);
  CHECK(e.omega_l2 > 0);
  CHECK(e.omega_l2 < 0.2);
  CHECK(e.omega_M >= e.omega_l2 * 0.5);
  CHECK(e.kref == 2);
  CHECK_FALSE(e.omega_absolute);
  const ErrorBundle nom = relative_errors(sol, c, d);
  CHECK(std::isnan(nom.omega_M));
  CHECK(nom.omega_l2 == e.omega_l2);
  CHECK_THROWS_AS(relative_errors(sol, c, d, 1), std::invalid_argument);

  const AnalyticCase g = gradient_case(Polynomial2::x() * Polynomial2::x());
  const StokesSolution zero = solve_stokes(cfg, d, g.forcing());
  const ErrorBundle ez = relative_errors(zero, g, d);
  CHECK(ez.omega_absolute);
  CHECK(ez.psi_absolute);
  CHECK(ez.omega_l2 <= 1e-10);

  const VorticityExtremum x = extremum_of_vorticity(sol, d);
  CHECK(x.max >= x.boundary_max);
  CHECK(x.min <= x.boundary_min);
  CHECK(x.boundary_max == doctest::Approx(16.0).epsilon(0.1));
}

TEST_CASE("convergence study checks its family") {
  const AnalyticCase c = bercovier_engelman();
  std::vector<FamilyMember> two{{"a", build_structured_unit_square(2)}, {"b", build_structured_unit_square(4)}};
  CHECK_THROWS_WITH_AS(convergence_study(two, 0, c), doctest::Contains("need >= 3 meshes"), std::invalid_argument);
  std::vector<FamilyMember> dup{{"a", build_structured_unit_square(2)},
                                {"b", build_structured_unit_square(4)},
                                {"c", build_structured_unit_square(4)}};
  CHECK_THROWS_AS(convergence_study(dup, 0, c), std::invalid_argument);

  std::vector<FamilyMember> fam{{"s8", build_structured_unit_square(8)},
                                {"s4", build_structured_unit_square(4)},
                                {"s16", build_structured_unit_square(16)}};
  const ConvergenceStudy st = convergence_study(fam, 1, c);
  REQUIRE(st.records.size() == 3);
  CHECK(st.records[0].mesh_id == "s4");
  CHECK(st.records[2].mesh_id == "s16");
  CHECK(st.records[1].n_vertices == 81);
  CHECK(st.records[0].errors.kref == 2);
  CHECK(st.orders.k == 1);
  CHECK(st.orders.psi_l2 > 1.0);
  StudyOptions fixed;
  fixed.kref_level = 3;
  CHECK(convergence_study(fam, 1, c, fixed).records[0].errors.kref == 3);
  fixed.kref_level = 1;
  CHECK_THROWS_AS(convergence_study(fam, 1, c, fixed), std::invalid_argument);
}
