#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "psiomega/errors.hpp"
#include "psiomega/fem.hpp"
#include "psiomega/multigrid.hpp"

using namespace psiomega;

TEST_CASE("quadrature rules integrate monomials exactly") {
  // Reference triangle (0,0),(1,0),(0,1): int x^a y^b = a! b! / (a+b+2)!.
  const auto fact = [](int n) {
    double f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
  };
  for (int deg : {1, 2, 5}) {
    const QuadratureRule q = quadrature_rule(deg);
    double wsum = 0;
    for (double w : q.weights) wsum += w;
    CHECK(wsum == doctest::Approx(1.0).epsilon(1e-15));
    for (int a = 0; a <= deg; ++a)
      for (int b = 0; a + b <= deg; ++b) {
        double s = 0;
        for (std::size_t i = 0; i < q.points.size(); ++i)
          s += 0.5 * q.weights[i] * std::pow(q.points[i][1], a) * std::pow(q.points[i][2], b);
        CHECK(s == doctest::Approx(fact(a) * fact(b) / fact(a + b + 2)).epsilon(1e-14));
      }
  }
  CHECK(quadrature_rule(3).degree >= 3);
  CHECK_THROWS_AS(quadrature_rule(6), std::invalid_argument);
  CHECK(quadrature_rule(0).degree == 1);
  CHECK_THROWS_AS(quadrature_rule(-1), std::invalid_argument);
}

TEST_CASE("stiffness matches element oracle and has zero row sums") {
  const TriangleMesh m = build_perturbed_unit_square(5, 21);
  const SparseMatrix a = assemble_stiffness(m);
  oracle::Dense ref(m.vertex_count(), std::vector<double>(m.vertex_count(), 0.0));
  for (const Triangle& t : m.triangles()) {
    const Point p[3] = {m.vertex(t[0]), m.vertex(t[1]), m.vertex(t[2])};
    double k[3][3];
    oracle::element_stiffness(p, k);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) ref[t[i]][t[j]] += k[i][j];
  }
  const auto d = oracle::to_dense(a);
  for (Index i = 0; i < a.rows(); ++i) {
    double row = 0;
    for (Index j = 0; j < a.rows(); ++j) {
      CHECK(d[i][j] == doctest::Approx(ref[i][j]).epsilon(1e-12));
      row += d[i][j];
    }
    CHECK(std::abs(row) <= 1e-12);
  }
  CHECK(a.is_symmetric());
}

TEST_CASE("structured stiffness has the five-point diagonal") {
  const TriangleMesh m = build_structured_unit_square(2);
  const SparseMatrix a = assemble_stiffness(m);
  CHECK(a.at(4, 4) == doctest::Approx(4.0));
  CHECK(a.at(4, 1) == doctest::Approx(-1.0));
  CHECK(a.at(4, 0) == doctest::Approx(0.0));
}

TEST_CASE("mass matrix") {
  const TriangleMesh m = build_perturbed_unit_square(6, 2);
  const SparseMatrix mm = assemble_mass(m);
  std::vector<double> one(m.vertex_count(), 1.0);
  CHECK(mm.quadratic_form(one) == doctest::Approx(1.0).epsilon(1e-13));
  // Exact for linear functions: int x^2 over the unit square is 1/3.
  const auto x = interpolate(m, [](const Point& p) { return p.x; });
  CHECK(mm.quadratic_form(x) == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
  CHECK(norm_l2(one, mm) == doctest::Approx(1.0));
}

TEST_CASE("curl load of a gradient vanishes on interior hats") {
  const TriangleMesh m = build_perturbed_unit_square(7, 5);
  // f = grad(x^2 y + sin-free polynomial) so f . rot(phi) integrates to a boundary term only.
  const VectorFunction f = [](const Point& p) { return Vec2{2 * p.x * p.y + 1, p.x * p.x - 2}; };
  const auto b = assemble_load_curl(m, f, quadrature_rule(5));
  for (Index v = 0; v < m.vertex_count(); ++v)
    if (!m.is_boundary_vertex(v)) CHECK(std::abs(b[v]) <= 1e-13);
}

TEST_CASE("curl load against rot f for a smooth field") {
  // (f, rot phi) = (rot f, phi) for interior hats; rot f = d f2/dx - d f1/dy.
  const TriangleMesh m = build_structured_unit_square(6);
  const VectorFunction f = [](const Point& p) { return Vec2{p.y * p.y, p.x}; };
  const auto b = assemble_load_curl(m, f, quadrature_rule(5));
  const auto c = assemble_load(m, [](const Point& p) { return 1.0 - 2.0 * p.y; }, quadrature_rule(5));
  for (Index v = 0; v < m.vertex_count(); ++v)
    if (!m.is_boundary_vertex(v)) CHECK(b[v] == doctest::Approx(c[v]).epsilon(1e-12));
}

TEST_CASE("CG against dense elimination") {
  const TriangleMesh m = build_perturbed_unit_square(6, 17);
  const InteriorSystem sys = dirichlet_restrict(assemble_stiffness(m), m);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> b(sys.dimension());
  for (double& x : b) x = u(rng);
  SolveStats st;
  const auto x = solve_spd(sys.matrix, b, {}, &st);
  const auto ref = oracle::gauss_solve(oracle::to_dense(sys.matrix), b);
  CHECK(oracle::max_abs_diff(x, ref) <= 1e-9 * oracle::max_abs(ref));
  CHECK(st.relative_residual <= 1e-10);
  CHECK(st.iterations > 0);
}

TEST_CASE("CG edge cases") {
  const TriangleMesh m = build_structured_unit_square(4);
  const InteriorSystem sys = dirichlet_restrict(assemble_stiffness(m), m);
  std::vector<double> zero(sys.dimension(), 0.0);
  SolveStats st;
  CHECK(oracle::max_abs(solve_spd(sys.matrix, zero, {}, &st)) == 0.0);
  CHECK(st.iterations == 0);
  std::vector<double> bad(sys.dimension(), 1.0);
  bad[0] = std::nan("");
  CHECK_THROWS_AS(solve_spd(sys.matrix, bad), SolverError);
  SolveOptions tight;
  tight.max_iterations = 1;
  std::vector<double> ones(sys.dimension(), 1.0);
  CHECK_THROWS_AS(solve_spd(sys.matrix, ones, tight), SolverError);
}

TEST_CASE("Poisson manufactured solution converges at second order in L2") {
  const auto u = [](const Point& p) { return std::sin(M_PI * p.x) * std::sin(M_PI * p.y); };
  const auto rhs = [](const Point& p) { return 2 * M_PI * M_PI * std::sin(M_PI * p.x) * std::sin(M_PI * p.y); };
  std::vector<double> hs, errs;
  for (int n : {8, 16, 32}) {
    const TriangleMesh m = build_structured_unit_square(n);
    const InteriorSystem sys = dirichlet_restrict(assemble_stiffness(m), m);
    const auto b = assemble_load(m, rhs, quadrature_rule(5));
    const auto x = sys.expand(solve_spd(sys.matrix, sys.restrict_vector(b)));
    auto e = interpolate(m, u);
    for (std::size_t i = 0; i < e.size(); ++i) e[i] -= x[i];
    hs.push_back(1.0 / n);
    errs.push_back(norm_l2(e, assemble_mass(m)));
  }
  for (int i = 0; i < 2; ++i) {
    const double order = std::log(errs[i] / errs[i + 1]) / std::log(hs[i] / hs[i + 1]);
    CHECK(order == doctest::Approx(2.0).epsilon(0.05));
  }
}

TEST_CASE("discrete dual norm of A0 v is the energy seminorm of v") {
  const TriangleMesh m = build_perturbed_unit_square(9, 4);
  const SparseMatrix a = assemble_stiffness(m);
  const InteriorSystem sys = dirichlet_restrict(a, m);
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> v(sys.dimension());
    for (double& x : v) x = u(rng);
    const auto b = sys.matrix.multiply(v);
    SolveOptions tight;
    tight.tol = 1e-13;
    const double dual = dual_norm_hm1(b, sys.matrix, tight);
    CHECK(dual == doctest::Approx(seminorm_h1(sys.expand(v), a)).epsilon(1e-10));
  }
}

TEST_CASE("multigrid-preconditioned level solves") {
  const Discretization d(build_hierarchy(build_perturbed_unit_square(4, 6), 3));
  MultilevelOptions jac_opts;
  jac_opts.preconditioner = PreconditionerKind::jacobi;
  const Discretization dj(build_hierarchy(build_perturbed_unit_square(4, 6), 3), jac_opts);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int k = 0; k <= 3; ++k) {
    const InteriorSystem& sys = d.interior(k);
    std::vector<double> b(sys.dimension());
    for (double& x : b) x = u(rng);
    SolveStats s_mg, s_j;
    const auto x = d.solve_interior(k, b, &s_mg);
    const auto y = dj.solve_interior(k, b, &s_j);
    CHECK(oracle::max_abs_diff(x, y) <= 1e-8 * oracle::max_abs(x));
    auto r = sys.matrix.multiply(x);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
    CHECK(oracle::max_abs(r) <= 1e-9 * oracle::max_abs(b) * std::sqrt(double(b.size())));
    if (k == 3) CHECK(s_mg.iterations < s_j.iterations);
  }
  // The level-k stiffness is the Galerkin product with the prolongation:
  // quadratic forms of prolongated fields agree.
  std::vector<double> c(d.mesh(1).vertex_count());
  for (double& x : c) x = u(rng);
  const auto f = prolongate({1, c}, d.hierarchy()).values;
  CHECK(d.stiffness(2).quadratic_form(f) == doctest::Approx(d.stiffness(1).quadratic_form(c)).epsilon(1e-12));
  CHECK(d.mass(2).quadratic_form(f) == doctest::Approx(d.mass(1).quadratic_form(c)).epsilon(1e-12));
}

TEST_CASE("harmonic extension of linear data is exact") {
  const Discretization d(build_hierarchy(build_perturbed_unit_square(5, 1), 2));
  for (int k = 0; k <= 2; ++k) {
    const auto lin = interpolate(d.mesh(k), [](const Point& p) { return 1.0 + p.x - 2.0 * p.y; });
    auto g = lin;
    for (Index v = 0; v < d.mesh(k).vertex_count(); ++v)
      if (!d.mesh(k).is_boundary_vertex(v)) g[v] = 123.0;
    CHECK(oracle::max_abs_diff(d.harmonic_extension(k, g), lin) <= 1e-9);
  }
}
