#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "psiomega/errors.hpp"
#include "psiomega/mesh.hpp"

namespace psiomega {

namespace {

double cross(const Point& a, const Point& b, const Point& c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

double distance(const Point& a, const Point& b) { return std::hypot(b.x - a.x, b.y - a.y); }

struct HalfEdge {
  Index lo;
  Index hi;
  Index tri;
  std::uint8_t local;  // 0: (v0,v1), 1: (v1,v2), 2: (v2,v0)
};

}  // namespace

TriangleMesh::TriangleMesh(std::vector<Point> vertices, std::vector<Triangle> triangles,
                           const MeshOptions& options)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)), level_(options.level) {
  const Index nv = vertex_count();
  const Index nt = triangle_count();
  if (nt == 0) throw ValidationError("mesh has no triangles");

  for (const Point& p : vertices_) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw ValidationError("mesh has a non-finite vertex coordinate");
    }
  }

  // Orientation and degeneracy.
  for (Index t = 0; t < nt; ++t) {
    Triangle& tri = triangles_[t];
    for (Index v : tri) {
      if (v < 0 || v >= nv) {
        throw ValidationError("triangle " + std::to_string(t) + " references vertex " +
                              std::to_string(v) + " out of range");
      }
    }
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) {
      throw ValidationError("triangle " + std::to_string(t) + " repeats a vertex");
    }
    const Point& a = vertices_[tri[0]];
    const Point& b = vertices_[tri[1]];
    const Point& c = vertices_[tri[2]];
    const double area2 = cross(a, b, c);
    const double scale = std::max({distance(a, b), distance(b, c), distance(c, a)});
    if (std::abs(area2) <= 1e-14 * scale * scale) {
      throw ValidationError("degenerate triangle " + std::to_string(t));
    }
    if (area2 < 0.0) {
      if (!options.repair_orientation) {
        throw ValidationError("triangle " + std::to_string(t) + " is clockwise");
      }
      std::swap(tri[1], tri[2]);
    }
  }

  // Edges: half-edges bucketed by their smaller vertex, then sorted by the
  // larger one. Edge ids follow the (lo, hi) key order.
  std::vector<Index> bucket(static_cast<std::size_t>(nv) + 1, 0);
  for (const Triangle& tri : triangles_) {
    for (int e = 0; e < 3; ++e) ++bucket[std::min(tri[e], tri[(e + 1) % 3]) + 1];
  }
  std::partial_sum(bucket.begin(), bucket.end(), bucket.begin());
  std::vector<HalfEdge> half(static_cast<std::size_t>(3) * nt);
  {
    std::vector<Index> fill(bucket.begin(), bucket.end() - 1);
    for (Index t = 0; t < nt; ++t) {
      const Triangle& tri = triangles_[t];
      for (int e = 0; e < 3; ++e) {
        const Index u = tri[e];
        const Index w = tri[(e + 1) % 3];
        half[fill[std::min(u, w)]++] =
            HalfEdge{std::min(u, w), std::max(u, w), t, static_cast<std::uint8_t>(e)};
      }
    }
  }
  for (Index v = 0; v < nv; ++v) {
    std::sort(half.begin() + bucket[v], half.begin() + bucket[v + 1],
              [](const HalfEdge& a, const HalfEdge& b) {
                return a.hi != b.hi ? a.hi < b.hi : a.tri < b.tri;
              });
  }

  triangle_edges_.assign(nt, {0, 0, 0});
  std::vector<Index> next_boundary(nv, -1);  // outgoing boundary edge target
  std::size_t boundary_edge_count = 0;
  for (std::size_t i = 0; i < half.size();) {
    std::size_t j = i;
    while (j < half.size() && half[j].lo == half[i].lo && half[j].hi == half[i].hi) ++j;
    const Index id = static_cast<Index>(edges_.size());
    edges_.push_back({half[i].lo, half[i].hi});
    for (std::size_t p = i; p < j; ++p) triangle_edges_[half[p].tri][half[p].local] = id;

    const auto directed_from = [&](const HalfEdge& h) {
      return triangles_[h.tri][h.local];
    };
    if (j - i > 2) {
      throw ValidationError("non-conforming mesh: edge (" + std::to_string(half[i].lo) + "," +
                            std::to_string(half[i].hi) + ") is shared by more than two triangles");
    }
    if (j - i == 2 && directed_from(half[i]) == directed_from(half[i + 1])) {
      throw ValidationError("overlapping triangles " + std::to_string(half[i].tri) + " and " +
                            std::to_string(half[i + 1].tri));
    }
    if (j - i == 1) {
      const Index from = directed_from(half[i]);
      const Index to = from == half[i].lo ? half[i].hi : half[i].lo;
      if (next_boundary[from] != -1) {
        throw ValidationError("non-conforming mesh: boundary pinches at vertex " +
                              std::to_string(from));
      }
      next_boundary[from] = to;
      ++boundary_edge_count;
    }
    i = j;
  }

  // Boundary loop.
  Index start = -1;
  if (options.boundary_start) {
    start = *options.boundary_start;
    if (start < 0 || start >= nv || next_boundary[start] == -1) {
      throw ValidationError("requested boundary start is not a boundary vertex");
    }
  } else {
    double best = std::numeric_limits<double>::infinity();
    for (Index v = 0; v < nv; ++v) {
      if (next_boundary[v] == -1) continue;
      const double d = std::hypot(vertices_[v].x, vertices_[v].y);
      if (d < best) {
        best = d;
        start = v;
      }
    }
  }
  if (start < 0) throw ValidationError("mesh has no boundary");

  boundary_position_.assign(nv, -1);
  for (Index v = start; boundary_position_[v] < 0;) {
    const Index w = next_boundary[v];
    if (w == -1) throw ValidationError("boundary is not closed at vertex " + std::to_string(v));
    boundary_position_[v] = static_cast<Index>(boundary_vertices_.size());
    boundary_vertices_.push_back(v);
    boundary_edges_.push_back({v, w});
    v = w;
    if (boundary_position_[v] >= 0 && v != start) {
      throw ValidationError("boundary is not a simple loop");
    }
  }
  if (boundary_vertices_.size() != boundary_edge_count) {
    throw ValidationError("multiple boundary loops");
  }

  const long long euler = static_cast<long long>(nv) - edge_count() + nt;
  if (euler != 1) {
    throw ValidationError("Euler characteristic V - E + T = " + std::to_string(euler) +
                          " (expected 1; unused vertices or disconnected mesh)");
  }
}

double TriangleMesh::signed_area(Index t) const {
  const Triangle& tri = triangles_[t];
  return 0.5 * cross(vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]);
}

double TriangleMesh::total_area() const {
  double a = 0.0;
  for (Index t = 0; t < triangle_count(); ++t) a += signed_area(t);
  return a;
}

double TriangleMesh::max_diameter() const {
  double h = 0.0;
  for (const Edge& e : edges_) h = std::max(h, distance(vertices_[e[0]], vertices_[e[1]]));
  return h;
}

// ---------------------------------------------------------------------------

TriangleMesh build_structured_unit_square(int n) {
  if (n < 1) throw std::invalid_argument("structured grid needs n >= 1");
  const Index stride = n + 1;
  std::vector<Point> vertices;
  vertices.reserve(static_cast<std::size_t>(stride) * stride);
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      vertices.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});
    }
  }
  std::vector<Triangle> triangles;
  triangles.reserve(static_cast<std::size_t>(2) * n * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const Index v00 = j * stride + i;
      const Index v10 = v00 + 1;
      const Index v01 = v00 + stride;
      const Index v11 = v01 + 1;
      triangles.push_back({v00, v10, v11});
      triangles.push_back({v00, v11, v01});
    }
  }
  return TriangleMesh(std::move(vertices), std::move(triangles));
}

TriangleMesh build_perturbed_unit_square(int n, std::uint64_t seed, double amplitude) {
  if (n < 1) throw std::invalid_argument("perturbed grid needs n >= 1");
  if (!(amplitude >= 0.0 && amplitude < 0.35)) {
    throw std::invalid_argument("perturbation amplitude must lie in [0, 0.35)");
  }
  const Index stride = n + 1;
  std::vector<Point> vertices;
  vertices.reserve(static_cast<std::size_t>(stride) * stride);
  const double h = 1.0 / n;
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) vertices.push_back({i * h, j * h});
  }

  // Uniform doubles from the raw engine output, so the grid is identical on
  // every standard library. Draw order: vertices row by row, then cells.
  std::mt19937_64 engine(seed);
  const auto uniform = [&engine] { return static_cast<double>(engine() >> 11) * 0x1.0p-53; };
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      Point& p = vertices[static_cast<std::size_t>(j) * stride + i];
      const bool side_x = i == 0 || i == n;
      const bool side_y = j == 0 || j == n;
      if (!side_x && !side_y) {
        const double r = amplitude * h * std::sqrt(uniform());
        const double theta = kTwoPi * uniform();
        p.x += r * std::cos(theta);
        p.y += r * std::sin(theta);
      } else if (side_x != side_y) {
        // Side vertices slide along their side; corners stay.
        const double shift = amplitude * h * (2.0 * uniform() - 1.0);
        (side_x ? p.y : p.x) += shift;
      }
    }
  }
  std::vector<Triangle> triangles;
  triangles.reserve(2 * static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const Index a = j * stride + i;
      const Index b = a + 1;
      const Index c = a + stride + 1;
      const Index d = a + stride;
      if (uniform() < 0.5) {
        triangles.push_back({a, b, d});
        triangles.push_back({b, c, d});
      } else {
        triangles.push_back({a, b, c});
        triangles.push_back({a, c, d});
      }
    }
  }
  MeshOptions options;
  options.repair_orientation = false;
  return TriangleMesh(std::move(vertices), std::move(triangles), options);
}

double sigma_regularity(const TriangleMesh& m) {
  double sigma = 0.0;
  for (Index t = 0; t < m.triangle_count(); ++t) {
    const Triangle& tri = m.triangle(t);
    const Point& a = m.vertex(tri[0]);
    const Point& b = m.vertex(tri[1]);
    const Point& c = m.vertex(tri[2]);
    const double ab = distance(a, b);
    const double bc = distance(b, c);
    const double ca = distance(c, a);
    const double area = 0.5 * std::abs(cross(a, b, c));
    if (area == 0.0) throw ValidationError("degenerate triangle " + std::to_string(t));
    const double inscribed_diameter = 4.0 * area / (ab + bc + ca);
    sigma = std::max(sigma, std::max({ab, bc, ca}) / inscribed_diameter);
  }
  return sigma;
}

std::vector<double> boundary_arc_lengths(const TriangleMesh& m) {
  std::vector<double> s(m.boundary_vertex_count(), 0.0);
  const auto edges = m.boundary_edges();
  for (std::size_t i = 1; i < s.size(); ++i) {
    s[i] = s[i - 1] + distance(m.vertex(edges[i - 1][0]), m.vertex(edges[i - 1][1]));
  }
  return s;
}

}  // namespace psiomega
