#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <limits>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "psiomega/commands.hpp"
#include "psiomega/errors.hpp"
#include "psiomega/harmonic.hpp"
#include "psiomega/report.hpp"
#include "psiomega/stokes.hpp"
#include "psiomega/verification.hpp"

namespace psiomega::cli {

namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// NaN and infinities become null.
Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

MultilevelOptions solver_options(const RunConfig& cfg) {
  MultilevelOptions o;
  o.solve.tol = cfg.tol;
  return o;
}

void check_common(const RunConfig& cfg) {
  if (!(cfg.tol > 0.0 && cfg.tol < 1.0)) throw std::invalid_argument("--tol must lie in (0, 1)");
  quadrature_rule(cfg.quad_degree);
  for (int k : cfg.k) {
    if (k < 0) throw std::invalid_argument("k must be nonnegative");
  }
}

NamedMesh single_mesh(const RunConfig& cfg) {
  std::vector<NamedMesh> meshes = make_meshes(cfg);
  if (meshes.size() != 1) throw std::invalid_argument("this command takes exactly one mesh");
  return std::move(meshes.front());
}

int single_k(const RunConfig& cfg) {
  if (cfg.k.size() != 1) throw std::invalid_argument("this command takes a single --k");
  return cfg.k.front();
}

Json mesh_summary(const RunConfig& cfg, const NamedMesh& m) {
  Json j;
  j["id"] = m.id;
  j["vertices"] = m.mesh.vertex_count();
  j["triangles"] = m.mesh.triangle_count();
  j["boundary_vertices"] = m.mesh.boundary_vertex_count();
  j["h"] = m.mesh.max_diameter();
  j["sigma"] = sigma_regularity(m.mesh);
  j["seed"] = cfg.mesh_kind == MeshKind::perturbed ? Json(cfg.seed) : Json(nullptr);
  return j;
}

void write_json(const fs::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

Index default_vertex(const TriangleMesh& m) {
  // Boundary vertex closest to the middle of the bottom side.
  Index best = m.boundary_vertices().front();
  double best_d = std::numeric_limits<double>::infinity();
  for (Index v : m.boundary_vertices()) {
    const Point& p = m.vertex(v);
    const double d = std::hypot(p.x - 0.5, p.y);
    if (d < best_d) {
      best_d = d;
      best = v;
    }
  }
  return best;
}

}  // namespace

std::vector<NamedMesh> make_meshes(const RunConfig& cfg) {
  std::vector<NamedMesh> out;
  switch (cfg.mesh_kind) {
    case MeshKind::file:
      for (const std::string& f : cfg.mesh_files) out.push_back({fs::path(f).stem().string(), load_mesh(f)});
      break;
    case MeshKind::structured:
      for (int n : cfg.sizes) out.push_back({"structured-" + std::to_string(n), build_structured_unit_square(n)});
      break;
    case MeshKind::perturbed:
      for (int n : cfg.sizes) {
        out.push_back({"perturbed-" + std::to_string(n) + "-s" + std::to_string(cfg.seed),
                       build_perturbed_unit_square(n, cfg.seed)});
      }
      break;
  }
  if (out.empty()) throw std::invalid_argument("no mesh given (use --mesh, --structured or --perturbed)");
  return out;
}

int cmd_solve(const RunConfig& cfg, std::ostream& log) {
  check_common(cfg);
  const NamedMesh m = single_mesh(cfg);
  const int k = single_k(cfg);
  if (cfg.kref && *cfg.kref <= k) throw std::invalid_argument("--kref must exceed k");
  const AnalyticCase c = bercovier_engelman(cfg.literal_forcing);

  const auto start = std::chrono::steady_clock::now();
  Discretization d(build_hierarchy(m.mesh, cfg.kref.value_or(k)), solver_options(cfg));
  StokesConfig sc;
  sc.k = k;
  sc.solver.tol = cfg.tol;
  sc.quad_degree = cfg.quad_degree;
  const StokesSolution sol = solve_stokes(sc, d, c.forcing());
  const ErrorBundle err = relative_errors(sol, c, d, cfg.kref);
  const VorticityExtremum ext = extremum_of_vorticity(sol, d);
  const double total = seconds_since(start);

  fs::create_directories(cfg.out);
  Json j;
  j["command"] = "solve";
  j["case"] = c.name;
  j["mesh"] = mesh_summary(cfg, m);
  j["k"] = k;
  j["kref"] = cfg.kref ? Json(*cfg.kref) : Json(nullptr);
  j["stabilized"] = k > 0;
  j["tol"] = cfg.tol;
  j["quad_degree"] = cfg.quad_degree;
  j["literal_forcing"] = cfg.literal_forcing;
  j["harmonic_basis_size"] = sol.harmonic_coefficients.size();
  j["omega"] = {{"min", ext.min},
                {"max", ext.max},
                {"argmax", {ext.argmax.x, ext.argmax.y}},
                {"boundary_min", ext.boundary_min},
                {"boundary_max", ext.boundary_max}};
  const auto [psi_min, psi_max] = std::minmax_element(sol.psi.values.begin(), sol.psi.values.end());
  j["psi"] = {{"min", *psi_min}, {"max", *psi_max}};
  j["errors"] = {{"omega_l2", number(err.omega_l2)},
                 {"omega_M", number(err.omega_M)},
                 {"psi_l2", number(err.psi_l2)},
                 {"psi_h1", number(err.psi_h1)},
                 {"omega_absolute", err.omega_absolute},
                 {"psi_absolute", err.psi_absolute}};
  const StokesDiagnostics& dg = sol.diagnostics;
  j["residuals"] = {{"omega0", dg.omega0.relative_residual},
                    {"omega0_iterations", dg.omega0.iterations},
                    {"gram", dg.gram_residual},
                    {"lift_iterations_max", dg.lift_iterations},
                    {"psi", dg.psi.relative_residual},
                    {"psi_iterations", dg.psi.iterations}};
  if (cfg.record_timings) {
    j["timings"] = {{"omega0", dg.seconds_omega0},
                    {"basis", dg.seconds_basis},
                    {"psi", dg.seconds_psi},
                    {"total", total}};
  }
  write_json(cfg.out / "solution.json", j);
  write_vtk(cfg.out / "psi.vtk", d.mesh(0), sol.psi.values, "psi");
  write_vtk(cfg.out / "omega.vtk", d.mesh(k), sol.omega.values, "omega");

  std::vector<std::vector<std::string>> rows;
  for (const BoundarySample& b : boundary_vorticity_trace(sol, d.mesh(0))) {
    rows.push_back({format_number(b.s), format_number(b.omega)});
  }
  const std::vector<std::string> header{"s", "omega"};
  write_csv(cfg.out / "boundary_vorticity.csv", header, rows);

  log << "solve: " << m.id << " k=" << k << " boundary max " << ext.boundary_max << " omega L2 err "
      << err.omega_l2 << " (" << total << " s)\n";
  return 0;
}

int cmd_convergence(const RunConfig& cfg, std::ostream& log) {
  check_common(cfg);
  std::vector<NamedMesh> meshes = make_meshes(cfg);
  if (meshes.size() < 3) throw std::invalid_argument("need >= 3 meshes for a convergence study");
  std::vector<FamilyMember> family;
  for (NamedMesh& m : meshes) family.push_back({m.id, std::move(m.mesh)});
  const AnalyticCase c = bercovier_engelman(cfg.literal_forcing);
  StudyOptions so;
  so.solver = solver_options(cfg);
  so.quad_degree = cfg.quad_degree;
  so.kref_level = cfg.kref;

  std::vector<std::vector<std::string>> rows;
  Json orders = Json::array();
  for (int k : cfg.k) {
    const ConvergenceStudy study = convergence_study(family, k, c, so);
    for (const ConvergenceRecord& r : study.records) {
      const ErrorBundle& e = r.errors;
      rows.push_back({r.mesh_id, format_number(r.h), format_number(r.sigma), std::to_string(r.k),
                      std::to_string(r.n_vertices), format_number(e.omega_l2), format_number(e.omega_M),
                      format_number(e.psi_l2), format_number(e.psi_h1), format_number(r.omega_max_boundary),
                      format_number(cfg.record_timings ? r.seconds : 0.0)});
      log << "convergence: " << r.mesh_id << " k=" << k << " omega L2 err " << e.omega_l2 << " ("
          << r.seconds << " s)\n";
    }
    const ConvergenceOrders& o = study.orders;
    orders.push_back({{"k", k},
                      {"omega_l2_order", number(o.omega_l2)},
                      {"omega_M_order", number(o.omega_M)},
                      {"psi_l2_order", number(o.psi_l2)},
                      {"psi_h1_order", number(o.psi_h1)}});
  }

  fs::create_directories(cfg.out);
  const std::vector<std::string> header{"mesh_id",    "h",          "sigma",       "k",
                                        "n_vertices", "err_omega_l2", "err_omega_M", "err_psi_l2",
                                        "err_psi_h1", "omega_max_boundary", "seconds"};
  write_csv(cfg.out / "convergence.csv", header, rows);
  Json j;
  j["case"] = c.name;
  j["seed"] = cfg.mesh_kind == MeshKind::perturbed ? Json(cfg.seed) : Json(nullptr);
  Json ids = Json::array();
  for (const FamilyMember& m : family) ids.push_back(m.id);
  j["family"] = ids;
  j["kref"] = cfg.kref ? Json(*cfg.kref) : Json("k+1");
  j["orders"] = orders;
  write_json(cfg.out / "orders.json", j);
  return 0;
}

int cmd_harmonics(const RunConfig& cfg, std::ostream& log) {
  check_common(cfg);
  const NamedMesh m = single_mesh(cfg);
  if (cfg.kmin < 0 || cfg.kmax < cfg.kmin) throw std::invalid_argument("need 0 <= kmin <= kmax");
  const Index s = cfg.vertex.value_or(default_vertex(m.mesh));
  const BoundaryTrace trace = hat_trace(m.mesh, s);
  Discretization d(build_hierarchy(m.mesh, cfg.kmax), solver_options(cfg));

  fs::create_directories(cfg.out);
  std::vector<std::vector<std::string>> rows;
  const std::string tag = "S" + std::to_string(s);
  for (int k = cfg.kmin; k <= cfg.kmax; ++k) {
    const ScalarField lift = lift_discrete_harmonic(d, trace, k);
    const ScalarField eta = nonharmonic_part(d, s, k);
    const std::string suffix = tag + "_k" + std::to_string(k) + ".vtk";
    write_vtk(cfg.out / ("lift_" + suffix), d.mesh(k), lift.values, "lift");
    write_vtk(cfg.out / ("eta_" + suffix), d.mesh(k), eta.values, "eta");
    const auto [lo, hi] = std::minmax_element(eta.values.begin(), eta.values.end());
    const double energy = d.stiffness(k).quadratic_form(eta.values);
    rows.push_back({std::to_string(k), format_number(*lo), format_number(*hi), format_number(energy)});
    log << "harmonics: k=" << k << " eta in [" << *lo << ", " << *hi << "]\n";
  }
  const std::vector<std::string> header{"k", "min", "max", "energy"};
  write_csv(cfg.out / "eta_stats.csv", header, rows);
  return 0;
}

int cmd_stability(const RunConfig& cfg, std::ostream& log) {
  check_common(cfg);
  const NamedMesh m = single_mesh(cfg);
  if (cfg.kmin < 0 || cfg.kmax < cfg.kmin) throw std::invalid_argument("need 0 <= kmin <= kmax");
  const int kref = cfg.kref.value_or(cfg.kmax + 2);
  if (kref <= cfg.kmax) throw std::invalid_argument("--kref must exceed kmax");
  if (!(cfg.delta > 0.0)) throw std::invalid_argument("--delta must be positive");
  Discretization d(build_hierarchy(m.mesh, kref), solver_options(cfg));

  std::vector<StabilityScan> scans;
  std::vector<std::vector<std::string>> rows;
  for (int k = cfg.kmin; k <= cfg.kmax; ++k) {
    const auto start = std::chrono::steady_clock::now();
    scans.push_back(stability_scan(d, build_basis(d, k), kref));
    rows.push_back({std::to_string(k), format_number(scans.back().rho_max)});
    log << "stability: k=" << k << " rho_max " << scans.back().rho_max << " (" << seconds_since(start) << " s)\n";
  }
  // Only levels at least two below the reference count towards K.
  std::vector<StabilityScan> eligible;
  for (const StabilityScan& s : scans) {
    if (s.level <= kref - 2) eligible.push_back(s);
  }
  const std::optional<int> K = estimate_K(eligible, cfg.delta);

  fs::create_directories(cfg.out);
  const std::vector<std::string> header{"k", "rho_max"};
  write_csv(cfg.out / "stability.csv", header, rows);
  Json j;
  j["mesh"] = mesh_summary(cfg, m);
  j["delta"] = cfg.delta;
  j["kref"] = kref;
  j["threshold"] = 1.0 / cfg.delta;
  j["K"] = K ? Json(*K) : Json(nullptr);
  j["reached"] = K.has_value();
  write_json(cfg.out / "K_estimate.json", j);
  return 0;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stabilized stream function / vorticity solver for 2D Stokes flow", "psiomega"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::vector<int> structured;
  std::vector<int> perturbed;

  const auto add_common = [&](CLI::App* sub, bool k_list) {
    auto* mesh_opt = sub->add_option("--mesh", cfg.mesh_files, "Mesh file(s): 'nv nt' header, vertices, triangles")
                         ->delimiter(',');
    auto* s_opt = sub->add_option("--structured", structured, "Structured unit-square grid(s) n x n")
                      ->delimiter(',')
                      ->check(CLI::PositiveNumber);
    auto* p_opt = sub->add_option("--perturbed", perturbed, "Perturbed unit-square grid(s) n x n")
                      ->delimiter(',')
                      ->check(CLI::PositiveNumber);
    mesh_opt->excludes(s_opt)->excludes(p_opt);
    s_opt->excludes(p_opt);
    sub->add_option("--seed", cfg.seed, "Seed of the perturbed meshes");
    auto* k_opt = sub->add_option("--k", cfg.k, k_list ? "Refinement level(s), comma separated"
                                                        : "Refinement level of the harmonic space");
    if (k_list) k_opt->delimiter(',');
    sub->add_option("--kref", cfg.kref, "Reference level for dual norms");
    sub->add_option("--tol", cfg.tol, "Relative residual tolerance of the CG solves");
    sub->add_option("--quad-degree", cfg.quad_degree, "Quadrature degree of the load (1..5)");
    sub->add_option("--out", cfg.out, "Output directory");
    sub->add_flag("--paper-literal-forcing", cfg.literal_forcing,
                  "Use f2(x,y) = -f1(y,x) on the whole forcing");
    sub->add_flag("--record-timings", cfg.record_timings, "Write wall-clock times into the outputs");
  };

  CLI::App* solve = app.add_subcommand("solve", "Solve the Bercovier-Engelman problem on one mesh");
  add_common(solve, false);
  CLI::App* conv = app.add_subcommand("convergence", "Error study over a mesh family");
  add_common(conv, true);
  CLI::App* harm = app.add_subcommand("harmonics", "Lifts and non-harmonic parts of one boundary hat");
  add_common(harm, false);
  harm->add_option("--vertex", cfg.vertex, "Coarse boundary vertex (default: closest to (0.5, 0))");
  harm->add_option("--kmin", cfg.kmin, "First level");
  harm->add_option("--kmax", cfg.kmax, "Last level");
  CLI::App* stab = app.add_subcommand("stability", "Stability ratio scan over the harmonic spaces");
  add_common(stab, false);
  stab->add_option("--delta", cfg.delta, "Target: rho_max <= 1/delta");
  stab->add_option("--kmin", cfg.kmin, "First scanned level");
  stab->add_option("--kmax", cfg.kmax, "Last scanned level");

  std::vector<const char*> argv{"psiomega"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return 0;
    }
    err << "error: " << e.what() << "\n";
    return 1;
  }

  if (!cfg.mesh_files.empty()) {
    cfg.mesh_kind = MeshKind::file;
  } else if (!perturbed.empty()) {
    cfg.mesh_kind = MeshKind::perturbed;
    cfg.sizes = perturbed;
  } else {
    cfg.mesh_kind = MeshKind::structured;
    cfg.sizes = structured;
  }

  try {
    if (solve->parsed()) return cmd_solve(cfg, err);
    if (conv->parsed()) return cmd_convergence(cfg, err);
    if (harm->parsed()) return cmd_harmonics(cfg, err);
    return cmd_stability(cfg, err);
  } catch (const SolverError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace psiomega::cli
