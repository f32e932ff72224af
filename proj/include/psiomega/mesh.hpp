#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "psiomega/field.hpp"
#include "psiomega/kernels.hpp"

namespace psiomega {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

using Triangle = std::array<Index, 3>;
using Edge = std::array<Index, 2>;

struct MeshOptions {
  int level = 0;
  // Clockwise triangles are flipped instead of rejected.
  bool repair_orientation = true;
  // Vertex where the boundary loop starts. Defaults to the boundary vertex
  // closest to the origin (lowest index on ties).
  std::optional<Index> boundary_start;
};

/// Conforming P1 triangulation of a simply connected polygon.
///
/// Construction validates the input: every triangle has positive area,
/// every edge is shared by at most two consistently oriented triangles, the
/// boundary is a single counterclockwise loop and V - E + T = 1. Edges are
/// numbered by ascending (min vertex, max vertex) key. Immutable afterwards.
class TriangleMesh {
 public:
  TriangleMesh(std::vector<Point> vertices, std::vector<Triangle> triangles,
               const MeshOptions& options = {});

  int level() const noexcept { return level_; }
  Index vertex_count() const noexcept { return static_cast<Index>(vertices_.size()); }
  Index triangle_count() const noexcept { return static_cast<Index>(triangles_.size()); }
  Index edge_count() const noexcept { return static_cast<Index>(edges_.size()); }
  Index boundary_vertex_count() const noexcept {
    return static_cast<Index>(boundary_vertices_.size());
  }

  std::span<const Point> vertices() const noexcept { return vertices_; }
  std::span<const Triangle> triangles() const noexcept { return triangles_; }
  std::span<const Edge> edges() const noexcept { return edges_; }
  /// Edge ids of local vertex pairs (0,1), (1,2), (2,0) of each triangle.
  std::span<const std::array<Index, 3>> triangle_edges() const noexcept { return triangle_edges_; }
  /// Boundary loop, counterclockwise, starting at the chosen start vertex.
  std::span<const Index> boundary_vertices() const noexcept { return boundary_vertices_; }
  /// Directed boundary edges in loop order: boundary_edges()[i] goes from
  /// boundary_vertices()[i] to the next loop vertex.
  std::span<const Edge> boundary_edges() const noexcept { return boundary_edges_; }

  bool is_boundary_vertex(Index v) const { return boundary_position_[v] >= 0; }
  /// Position of v in the boundary loop, or -1 for interior vertices.
  Index boundary_position(Index v) const { return boundary_position_[v]; }

  const Point& vertex(Index v) const { return vertices_[v]; }
  const Triangle& triangle(Index t) const { return triangles_[t]; }

  double signed_area(Index t) const;
  double total_area() const;
  /// Longest edge over all triangles.
  double max_diameter() const;

 private:
  std::vector<Point> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<Edge> edges_;
  std::vector<std::array<Index, 3>> triangle_edges_;
  std::vector<Index> boundary_vertices_;
  std::vector<Edge> boundary_edges_;
  std::vector<Index> boundary_position_;
  int level_ = 0;
};

/// How a vertex of level k+1 arises from level k: a copy of vertex `first`
/// (first == second) or the midpoint of edge (first, second).
struct VertexOrigin {
  Index first = 0;
  Index second = 0;
  bool is_copy() const noexcept { return first == second; }
};

/// Nested meshes T_0, T_1, ..., each obtained by splitting every triangle of
/// the previous level into four through its edge midpoints. Levels are
/// shared between copies, so refining a hierarchy never copies coarse data.
class MeshHierarchy {
 public:
  explicit MeshHierarchy(TriangleMesh coarse);

  int finest_level() const noexcept { return static_cast<int>(levels_.size()) - 1; }
  const TriangleMesh& mesh(int k) const;
  /// Parent triangle (in level k-1) of every triangle of level k >= 1.
  std::span<const Index> parent_triangle(int k) const;
  std::span<const VertexOrigin> vertex_origin(int k) const;

  /// Copy of this hierarchy with one more level appended.
  MeshHierarchy refined() const;

 private:
  struct Level {
    TriangleMesh mesh;
    std::vector<Index> parent;
    std::vector<VertexOrigin> origin;
  };
  MeshHierarchy() = default;
  const Level& at(int k) const;

  std::vector<std::shared_ptr<const Level>> levels_;
};

MeshHierarchy refine_uniform(const MeshHierarchy& h);

/// Hierarchy refined until finest_level() == levels.
MeshHierarchy build_hierarchy(TriangleMesh coarse, int levels);

/// Uniform (n+1)x(n+1) grid of the unit square, every cell cut along its
/// (i,j)-(i+1,j+1) diagonal.
TriangleMesh build_structured_unit_square(int n);

/// Seeded irregular grid of the unit square: interior vertices move by at
/// most amplitude*h (h = 1/n) in a random direction, side vertices slide
/// along their side by at most amplitude*h, and every cell is cut along a
/// randomly chosen diagonal.
TriangleMesh build_perturbed_unit_square(int n, std::uint64_t seed, double amplitude = 0.25);

/// max over triangles of (longest edge) / (inscribed circle diameter).
double sigma_regularity(const TriangleMesh& m);

/// Exact P1 prolongation of a level-k field to level k+1.
ScalarField prolongate(const ScalarField& field, const MeshHierarchy& h);
ScalarField prolongate_to(const ScalarField& field, const MeshHierarchy& h, int target_level);

/// Transpose of the prolongation: maps a level-k nodal vector to level k-1.
std::vector<double> prolongation_transpose(std::span<const double> fine, const MeshHierarchy& h,
                                           int fine_level);

/// For every triangle of `level`, the index of its ancestor in level `ancestor_level`.
std::vector<Index> ancestor_triangles(const MeshHierarchy& h, int level, int ancestor_level);

/// Nodal interpolant of a function on one mesh.
template <class F>
std::vector<double> interpolate(const TriangleMesh& m, F&& f) {
  std::vector<double> v(m.vertex_count());
  for (Index i = 0; i < m.vertex_count(); ++i) v[i] = f(m.vertex(i));
  return v;
}

/// Arc length of every boundary loop vertex, measured from the loop start.
std::vector<double> boundary_arc_lengths(const TriangleMesh& m);

struct LoadOptions {
  // Reject clockwise triangles instead of flipping them.
  bool strict = false;
};

TriangleMesh load_mesh(const std::filesystem::path& path, const LoadOptions& options = {});
TriangleMesh parse_mesh(std::string_view text, const LoadOptions& options = {});
void save_mesh(const TriangleMesh& m, const std::filesystem::path& path);

}  // namespace psiomega
