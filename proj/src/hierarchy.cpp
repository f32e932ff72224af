#include <stdexcept>
#include <string>

#include "psiomega/mesh.hpp"

namespace psiomega {

MeshHierarchy::MeshHierarchy(TriangleMesh coarse) {
  if (coarse.level() != 0) throw std::invalid_argument("hierarchy must start from a level-0 mesh");
  levels_.push_back(std::make_shared<const Level>(Level{std::move(coarse), {}, {}}));
}

const MeshHierarchy::Level& MeshHierarchy::at(int k) const {
  if (k < 0 || k > finest_level()) {
    throw std::out_of_range("hierarchy level " + std::to_string(k) + " does not exist (finest is " +
                            std::to_string(finest_level()) + ")");
  }
  return *levels_[k];
}

const TriangleMesh& MeshHierarchy::mesh(int k) const { return at(k).mesh; }

std::span<const Index> MeshHierarchy::parent_triangle(int k) const {
  if (k == 0) throw std::out_of_range("level 0 has no parent");
  return at(k).parent;
}

std::span<const VertexOrigin> MeshHierarchy::vertex_origin(int k) const {
  if (k == 0) throw std::out_of_range("level 0 has no parent");
  return at(k).origin;
}

MeshHierarchy MeshHierarchy::refined() const {
  const TriangleMesh& coarse = mesh(finest_level());
  const Index nv = coarse.vertex_count();
  const Index ne = coarse.edge_count();
  const Index nt = coarse.triangle_count();

  std::vector<Point> vertices(coarse.vertices().begin(), coarse.vertices().end());
  std::vector<VertexOrigin> origin(static_cast<std::size_t>(nv) + ne);
  vertices.reserve(static_cast<std::size_t>(nv) + ne);
  for (Index v = 0; v < nv; ++v) origin[v] = {v, v};
  for (Index e = 0; e < ne; ++e) {
    const Edge& edge = coarse.edges()[e];
    const Point& a = coarse.vertex(edge[0]);
    const Point& b = coarse.vertex(edge[1]);
    vertices.push_back({0.5 * (a.x + b.x), 0.5 * (a.y + b.y)});
    origin[nv + e] = {edge[0], edge[1]};
  }

  std::vector<Triangle> triangles;
  std::vector<Index> parent;
  triangles.reserve(static_cast<std::size_t>(4) * nt);
  parent.reserve(static_cast<std::size_t>(4) * nt);
  for (Index t = 0; t < nt; ++t) {
    const Triangle& tri = coarse.triangle(t);
    const auto& te = coarse.triangle_edges()[t];
    const Index m01 = nv + te[0];
    const Index m12 = nv + te[1];
    const Index m20 = nv + te[2];
    triangles.push_back({tri[0], m01, m20});
    triangles.push_back({m01, tri[1], m12});
    triangles.push_back({m20, m12, tri[2]});
    triangles.push_back({m01, m12, m20});
    parent.insert(parent.end(), 4, t);
  }

  MeshOptions options;
  options.level = finest_level() + 1;
  options.repair_orientation = false;
  options.boundary_start = coarse.boundary_vertices().front();

  MeshHierarchy out;
  out.levels_ = levels_;
  out.levels_.push_back(std::make_shared<const Level>(
      Level{TriangleMesh(std::move(vertices), std::move(triangles), options), std::move(parent),
            std::move(origin)}));
  return out;
}

MeshHierarchy refine_uniform(const MeshHierarchy& h) { return h.refined(); }

MeshHierarchy build_hierarchy(TriangleMesh coarse, int levels) {
  MeshHierarchy h(std::move(coarse));
  while (h.finest_level() < levels) h = h.refined();
  return h;
}

ScalarField prolongate(const ScalarField& field, const MeshHierarchy& h) {
  const int k = field.level;
  if (k < 0 || k >= h.finest_level()) {
    throw std::invalid_argument("prolongation needs level " + std::to_string(k + 1) +
                                " to exist");
  }
  if (static_cast<Index>(field.values.size()) != h.mesh(k).vertex_count()) {
    throw std::invalid_argument("field length does not match its mesh level");
  }
  const auto origin = h.vertex_origin(k + 1);
  ScalarField out{k + 1, std::vector<double>(origin.size())};
  for (std::size_t i = 0; i < origin.size(); ++i) {
    const VertexOrigin& o = origin[i];
    out.values[i] = o.is_copy() ? field.values[o.first]
                                : 0.5 * (field.values[o.first] + field.values[o.second]);
  }
  return out;
}

ScalarField prolongate_to(const ScalarField& field, const MeshHierarchy& h, int target_level) {
  if (target_level < field.level) throw std::invalid_argument("cannot prolongate to a coarser level");
  ScalarField out = field;
  while (out.level < target_level) out = prolongate(out, h);
  return out;
}

std::vector<double> prolongation_transpose(std::span<const double> fine, const MeshHierarchy& h,
                                           int fine_level) {
  const auto origin = h.vertex_origin(fine_level);
  if (fine.size() != origin.size()) throw std::invalid_argument("vector length does not match level");
  std::vector<double> coarse(h.mesh(fine_level - 1).vertex_count(), 0.0);
  for (std::size_t i = 0; i < origin.size(); ++i) {
    const VertexOrigin& o = origin[i];
    if (o.is_copy()) {
      coarse[o.first] += fine[i];
    } else {
      coarse[o.first] += 0.5 * fine[i];
      coarse[o.second] += 0.5 * fine[i];
    }
  }
  return coarse;
}

std::vector<Index> ancestor_triangles(const MeshHierarchy& h, int level, int ancestor_level) {
  if (ancestor_level > level) throw std::invalid_argument("ancestor level above level");
  std::vector<Index> ancestor(h.mesh(level).triangle_count());
  for (Index t = 0; t < static_cast<Index>(ancestor.size()); ++t) ancestor[t] = t;
  for (int k = level; k > ancestor_level; --k) {
    const auto parent = h.parent_triangle(k);
    for (Index& a : ancestor) a = parent[a];
  }
  return ancestor;
}

}  // namespace psiomega
