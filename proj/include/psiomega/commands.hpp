#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "psiomega/mesh.hpp"

namespace psiomega::cli {

enum class MeshKind { file, structured, perturbed };

struct RunConfig {
  std::string command;
  MeshKind mesh_kind = MeshKind::structured;
  // One entry per mesh; convergence takes several, the other commands one.
  std::vector<std::string> mesh_files;
  std::vector<int> sizes;
  std::uint64_t seed = 1;
  std::vector<int> k{0};
  std::optional<int> kref;
  double delta = 1.0;
  double tol = 1e-10;
  int quad_degree = 5;
  std::filesystem::path out = ".";
  bool literal_forcing = false;
  std::optional<Index> vertex;
  int kmin = 0;
  int kmax = 4;
  bool record_timings = false;
};

struct NamedMesh {
  std::string id;
  TriangleMesh mesh;
};

/// Meshes described by the config, in the order given.
std::vector<NamedMesh> make_meshes(const RunConfig& cfg);

int cmd_solve(const RunConfig& cfg, std::ostream& log);
int cmd_convergence(const RunConfig& cfg, std::ostream& log);
int cmd_harmonics(const RunConfig& cfg, std::ostream& log);
int cmd_stability(const RunConfig& cfg, std::ostream& log);

/// Parses arguments (without the program name), dispatches and maps
/// failures to exit codes: 0 success, 1 usage or input error, 2 numerical failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace psiomega::cli
