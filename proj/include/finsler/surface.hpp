#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "finsler/sampling.hpp"

namespace finsler {

using Vec3 = Eigen::Vector3d;
using Triangle = std::array<int, 3>;

struct Mesh {
  std::vector<Vec3> vertices;
  std::vector<Triangle> triangles;
};

// Triangulated surface with its edge structure. Triangles flagged as unrefined get no
// Steiner cross edges (they are only crossed along their own edges).
class PolyhedralSurface {
 public:
  // Throws GeometryError for non-manifold edges, zero-length edges or bad indices.
  explicit PolyhedralSurface(Mesh mesh, std::vector<bool> refined = {});

  const std::vector<Vec3>& vertices() const { return mesh_.vertices; }
  const std::vector<Triangle>& triangles() const { return mesh_.triangles; }
  const Mesh& mesh() const { return mesh_; }
  const std::vector<std::array<int, 2>>& edges() const { return edges_; }
  // Edges of each triangle, opposite to vertex 0, 1, 2.
  const std::array<int, 3>& triangle_edges(int t) const { return triangle_edges_[t]; }
  const std::vector<int>& edge_triangles(int e) const { return edge_triangles_[e]; }
  const std::vector<int>& vertex_triangles(int v) const { return vertex_triangles_[v]; }
  bool refined(int t) const { return refined_[t]; }

  double min_edge_length() const { return min_edge_; }
  double max_edge_length() const { return max_edge_; }
  double area() const;
  int nearest_vertex(const Vec3& p) const;

 private:
  Mesh mesh_;
  std::vector<bool> refined_;
  std::vector<std::array<int, 2>> edges_;
  std::vector<std::array<int, 3>> triangle_edges_;
  std::vector<std::vector<int>> edge_triangles_;
  std::vector<std::vector<int>> vertex_triangles_;
  double min_edge_ = 0.0, max_edge_ = 0.0;
};

// OFF meshes. Polygonal faces are fanned into triangles. Errors are std::runtime_error.
Mesh read_off(std::istream& in);
Mesh read_off(const std::string& path);
void write_off(std::ostream& out, const Mesh& mesh);
void write_off(const std::string& path, const Mesh& mesh);

// [0, side]^2 in the plane z = 0, cells x cells squares split along one diagonal.
Mesh flat_square_mesh(int cells, double side = 1.0);
Mesh icosphere_mesh(int subdivisions);

// Periodic zigzag: distance to the nearest integer.
double zigzag(double t);
// 2^-n zigzag(t 2^n).
double zigzag_scaled(double t, int n);

// Height of the zigzag graph. Bands 2^-(n+1) <= |y| <= 2^-n interpolate linearly between
// the scale-n and scale-(n+1) zigzags; below |y| = 2^-n_max the height fades linearly
// from the scale-n_max zigzag to 0 at y = 0.
double zigzag_height(double x, double y, int n_max);
// Lipschitz bound of zigzag_height (slopes 1 in x and 3/2 in y).
double zigzag_height_lipschitz();

struct ZigzagOptions {
  int n_max = 6;
  double extent = 1.0;  // the square [-extent, extent]^2
  int rows_per_band = 4;
  long max_vertices = 4'000'000;
};

// Graph of zigzag_height over the square. Columns sit on the breakpoints of the finest
// zigzag, rows on the band boundaries (and rows_per_band - 1 rows inside each band), and a
// row of vertices lies on y = 0. The fade strip |y| < 2^-n_max is one unrefined row of
// triangles on each side of the x-axis. Throws std::length_error with the vertex estimate
// when the mesh exceeds max_vertices.
PolyhedralSurface build_zigzag_surface(const ZigzagOptions& opts = {});

// Steiner graph: every edge carries 2^level - 1 interior points, and the boundary points of
// each refined triangle are pairwise connected by straight segments across the triangle.
class SteinerGraph {
 public:
  SteinerGraph(const PolyhedralSurface& surface, int level);

  const PolyhedralSurface& surface() const { return *surface_; }
  int level() const { return level_; }
  std::size_t node_count() const { return positions_.size(); }
  const Vec3& position(int node) const { return positions_[node]; }
  // Nearest node (vertex or Steiner point) to p.
  int nearest_node(const Vec3& p) const;
  // Minimum distance between adjacent nodes along an edge.
  double min_spacing() const { return min_spacing_; }

  // Visits every neighbor of `node`; neighbors reached through several triangles may repeat.
  template <class F>
  void for_each_neighbor(int node, F&& visit) const;

 private:
  const PolyhedralSurface* surface_;
  int level_;
  int per_edge_;
  std::vector<Vec3> positions_;
  std::vector<std::vector<int>> triangle_nodes_;  // boundary nodes of each triangle
  double min_spacing_ = 0.0;
};

template <class F>
void SteinerGraph::for_each_neighbor(int node, F&& visit) const {
  const int nv = static_cast<int>(surface_->vertices().size());
  const std::vector<int>& tris =
      node < nv ? surface_->vertex_triangles(node) : surface_->edge_triangles((node - nv) / per_edge_);
  for (int t : tris)
    for (int other : triangle_nodes_[t])
      if (other != node) visit(other);
}

struct ShortestPathResult {
  std::vector<double> distance;  // +inf for unreachable nodes
  std::vector<int> parent;
};

// Dijkstra from `source`. `blocked(a, b)` removes individual segments. With a target the
// search stops once the target is settled and uses the straight-line distance as an A*
// bound, which is admissible because every segment is straight.
using SegmentFilter = std::function<bool(int, int)>;
double shortest_path(const SteinerGraph& graph, int source, int target, const SegmentFilter& blocked = {});
ShortestPathResult shortest_paths(const SteinerGraph& graph, int source, const SegmentFilter& blocked = {});

}  // namespace finsler
