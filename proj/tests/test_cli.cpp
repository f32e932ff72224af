#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "psiomega/commands.hpp"

namespace fs = std::filesystem;
using psiomega::cli::run;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("psiomega_test_" + name)) {
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int call(std::vector<std::string> args, std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  if (err_text) *err_text = err.str();
  return code;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> v;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

// POINT_DATA values of a legacy VTK file written by this package.
std::vector<double> vtk_values(const fs::path& p) {
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line) && line != "LOOKUP_TABLE default") {
  }
  std::vector<double> v;
  for (double x; in >> x;) v.push_back(x);
  return v;
}

}  // namespace

TEST_CASE("solve writes every output and reruns identically") {
  TempDir a("solve_a"), b("solve_b");
  REQUIRE(call({"solve", "--structured", "16", "--k", "2", "--out", a.path.string()}) == 0);
  REQUIRE(call({"solve", "--structured", "16", "--k", "2", "--out", b.path.string()}) == 0);
  for (const char* f : {"solution.json", "psi.vtk", "omega.vtk", "boundary_vorticity.csv"}) {
    CHECK(fs::exists(a.path / f));
    CHECK(slurp(a.path / f) == slurp(b.path / f));
  }
  const auto j = nlohmann::json::parse(slurp(a.path / "solution.json"));
  CHECK(j["stabilized"] == true);
  CHECK(j["k"] == 2);
  CHECK(j["omega"].contains("boundary_max"));
  CHECK(j["omega"]["boundary_max"].get<double>() == doctest::Approx(16.0).epsilon(0.02));
  CHECK(j["errors"]["omega_M"].is_null());
  CHECK_FALSE(j.contains("timings"));
  const auto csv = lines(slurp(a.path / "boundary_vorticity.csv"));
  CHECK(csv.front() == "s,omega");
  CHECK(csv.size() == 66);
  const auto psi = vtk_values(a.path / "psi.vtk");
  CHECK(psi.size() == 289);
  CHECK(vtk_values(a.path / "omega.vtk").size() == 65u * 65u);
}

TEST_CASE("k = 0 is reported as unstabilized") {
  TempDir a("solve_k0");
  REQUIRE(call({"solve", "--perturbed", "8", "--seed", "5", "--k", "0", "--kref", "1", "--record-timings", "--out",
                a.path.string()}) == 0);
  const auto j = nlohmann::json::parse(slurp(a.path / "solution.json"));
  CHECK(j["stabilized"] == false);
  CHECK(j["mesh"]["seed"] == 5);
  CHECK(j["errors"]["omega_M"].is_number());
  CHECK(j.contains("timings"));
}

TEST_CASE("convergence outputs") {
  TempDir a("conv");
  REQUIRE(call({"convergence", "--structured", "4,8,16", "--k", "0,1", "--out", a.path.string()}) == 0);
  const auto csv = lines(slurp(a.path / "convergence.csv"));
  CHECK(csv.front() ==
        "mesh_id,h,sigma,k,n_vertices,err_omega_l2,err_omega_M,err_psi_l2,err_psi_h1,omega_max_boundary,seconds");
  CHECK(csv.size() == 7);
  const auto j = nlohmann::json::parse(slurp(a.path / "orders.json"));
  REQUIRE(j["orders"].size() == 2);
  CHECK(j["orders"][1]["k"] == 1);
  for (const char* key : {"omega_l2_order", "omega_M_order", "psi_l2_order", "psi_h1_order"})
    CHECK(j["orders"][0].contains(key));

  std::string err;
  CHECK(call({"convergence", "--structured", "8", "--k", "0", "--out", a.path.string()}, &err) == 1);
  CHECK(err.find("need >= 3 meshes") != std::string::npos);
}

TEST_CASE("harmonics outputs") {
  TempDir a("harm");
  REQUIRE(call({"harmonics", "--structured", "4", "--vertex", "2", "--kmax", "2", "--out", a.path.string()}) == 0);
  const auto csv = lines(slurp(a.path / "eta_stats.csv"));
  REQUIRE(csv.size() == 4);
  CHECK(csv[0] == "k,min,max,energy");
  CHECK(csv[1] == "0,0,0,0");
  for (int k = 0; k <= 2; ++k) {
    CHECK(fs::exists(a.path / ("eta_S2_k" + std::to_string(k) + ".vtk")));
    CHECK(fs::exists(a.path / ("lift_S2_k" + std::to_string(k) + ".vtk")));
  }
  // Coarse vertices keep their indices: the k=2 lift is the hat trace there.
  const auto lift = vtk_values(a.path / "lift_S2_k2.vtk");
  const auto coarse = psiomega::build_structured_unit_square(4);
  for (psiomega::Index v : coarse.boundary_vertices()) CHECK(lift[v] == (v == 2 ? 1.0 : 0.0));

  CHECK(call({"harmonics", "--structured", "4", "--vertex", "6", "--out", a.path.string()}) == 1);
}

TEST_CASE("stability outputs and the not-reached marker") {
  TempDir a("stab");
  REQUIRE(call({"stability", "--structured", "2", "--kmax", "1", "--kref", "3", "--delta", "1e6", "--out",
                a.path.string()}) == 0);
  const auto csv = lines(slurp(a.path / "stability.csv"));
  REQUIRE(csv.size() == 3);
  CHECK(csv[0] == "k,rho_max");
  const auto j = nlohmann::json::parse(slurp(a.path / "K_estimate.json"));
  CHECK(j["K"].is_null());
  CHECK(j["reached"] == false);
  CHECK(j["delta"] == 1e6);
  REQUIRE(call({"stability", "--structured", "2", "--kmax", "1", "--kref", "3", "--delta", "1e-6", "--out",
                a.path.string()}) == 0);
  CHECK(nlohmann::json::parse(slurp(a.path / "K_estimate.json"))["K"] == 0);
  CHECK(call({"stability", "--structured", "2", "--kmax", "3", "--kref", "3"}) == 1);
}

TEST_CASE("usage errors exit with status 1") {
  CHECK(call({}) == 1);
  CHECK(call({"solve"}) == 1);
  CHECK(call({"solve", "--structured", "4", "--bogus"}) == 1);
  CHECK(call({"solve", "--structured", "4", "--perturbed", "4"}) == 1);
  CHECK(call({"solve", "--structured", "4", "--k", "-1"}) == 1);
  CHECK(call({"solve", "--structured", "4", "--quad-degree", "9"}) == 1);
  CHECK(call({"solve", "--mesh", "/nonexistent/mesh.txt"}) == 1);
  CHECK(call({"solve", "--structured", "4", "--k", "1", "--kref", "1"}) == 1);
  CHECK(call({"--help"}) == 0);
}

TEST_CASE("solver failure exits with status 2") {
  TempDir a("fail");
  // A tolerance this small cannot be met in double precision.
  CHECK(call({"solve", "--structured", "8", "--tol", "1e-300", "--out", a.path.string()}) == 2);
}

TEST_CASE("mesh files") {
  TempDir a("meshfile");
  fs::create_directories(a.path);
  const auto m = psiomega::build_perturbed_unit_square(6, 2);
  psiomega::save_mesh(m, a.path / "square.txt");
  REQUIRE(call({"solve", "--mesh", (a.path / "square.txt").string(), "--k", "1", "--out", a.path.string()}) == 0);
  const auto j = nlohmann::json::parse(slurp(a.path / "solution.json"));
  CHECK(j["mesh"]["id"] == "square");
  CHECK(j["mesh"]["vertices"] == 49);
}
