#include "finsler/surface.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "finsler/errors.hpp"

namespace finsler {

PolyhedralSurface::PolyhedralSurface(Mesh mesh, std::vector<bool> refined)
    : mesh_(std::move(mesh)), refined_(std::move(refined)) {
  const int nv = static_cast<int>(mesh_.vertices.size());
  const int nt = static_cast<int>(mesh_.triangles.size());
  if (nv == 0 || nt == 0) throw GeometryError("PolyhedralSurface: empty mesh");
  if (refined_.empty()) refined_.assign(nt, true);
  if (static_cast<int>(refined_.size()) != nt) throw GeometryError("PolyhedralSurface: refinement flags do not match");

  std::unordered_map<std::int64_t, int> index;
  vertex_triangles_.resize(nv);
  triangle_edges_.resize(nt);
  min_edge_ = std::numeric_limits<double>::infinity();
  for (int t = 0; t < nt; ++t) {
    const Triangle& tri = mesh_.triangles[t];
    for (int v : tri)
      if (v < 0 || v >= nv) throw GeometryError("PolyhedralSurface: vertex index out of range");
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2])
      throw GeometryError("PolyhedralSurface: triangle with repeated vertex");
    for (int k = 0; k < 3; ++k) {
      vertex_triangles_[tri[k]].push_back(t);
      const int a = std::min(tri[(k + 1) % 3], tri[(k + 2) % 3]);
      const int b = std::max(tri[(k + 1) % 3], tri[(k + 2) % 3]);
      const std::int64_t key = static_cast<std::int64_t>(a) * nv + b;
      auto [it, inserted] = index.try_emplace(key, static_cast<int>(edges_.size()));
      if (inserted) {
        edges_.push_back({a, b});
        edge_triangles_.emplace_back();
        const double len = (mesh_.vertices[a] - mesh_.vertices[b]).norm();
        if (!(len > 0)) throw GeometryError("PolyhedralSurface: zero-length edge");
        min_edge_ = std::min(min_edge_, len);
        max_edge_ = std::max(max_edge_, len);
      }
      triangle_edges_[t][k] = it->second;
      edge_triangles_[it->second].push_back(t);
      if (edge_triangles_[it->second].size() > 2)
        throw GeometryError("PolyhedralSurface: edge shared by more than two triangles");
    }
  }
}

double PolyhedralSurface::area() const {
  double total = 0.0;
  for (const Triangle& t : mesh_.triangles) {
    const Vec3& a = mesh_.vertices[t[0]];
    total += 0.5 * (mesh_.vertices[t[1]] - a).cross(mesh_.vertices[t[2]] - a).norm();
  }
  return total;
}

int PolyhedralSurface::nearest_vertex(const Vec3& p) const {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < mesh_.vertices.size(); ++i) {
    const double d = (mesh_.vertices[i] - p).squaredNorm();
    if (d < best_d) best_d = d, best = static_cast<int>(i);
  }
  return best;
}

namespace {

std::vector<std::vector<std::string>> off_lines(std::istream& in) {
  std::vector<std::vector<std::string>> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ss(line);
    std::vector<std::string> tokens;
    for (std::string tok; ss >> tok;) tokens.push_back(tok);
    if (!tokens.empty()) out.push_back(std::move(tokens));
  }
  return out;
}

double to_double(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw std::runtime_error("OFF: bad number '" + s + "' in record " + std::to_string(line));
}

long to_long(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    const long v = std::stol(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw std::runtime_error("OFF: bad integer '" + s + "' in record " + std::to_string(line));
}

}  // namespace

Mesh read_off(std::istream& in) {
  auto lines = off_lines(in);
  if (lines.empty() || lines[0][0] != "OFF") throw std::runtime_error("OFF: missing OFF header");
  std::size_t cursor = 0;
  std::vector<std::string> counts(lines[0].begin() + 1, lines[0].end());
  if (counts.empty()) {
    if (lines.size() < 2) throw std::runtime_error("OFF: missing counts");
    counts = lines[1];
    cursor = 2;
  } else {
    cursor = 1;
  }
  if (counts.size() < 2) throw std::runtime_error("OFF: counts need vertices and faces");
  const long nv = to_long(counts[0], cursor), nf = to_long(counts[1], cursor);
  if (nv < 0 || nf < 0) throw std::runtime_error("OFF: negative counts");
  if (lines.size() < cursor + nv + nf) throw std::runtime_error("OFF: file ends before all records");
  Mesh mesh;
  for (long i = 0; i < nv; ++i, ++cursor) {
    const auto& tok = lines[cursor];
    if (tok.size() < 3) throw std::runtime_error("OFF: vertex record " + std::to_string(cursor) + " needs 3 coordinates");
    mesh.vertices.emplace_back(to_double(tok[0], cursor), to_double(tok[1], cursor), to_double(tok[2], cursor));
  }
  for (long i = 0; i < nf; ++i, ++cursor) {
    const auto& tok = lines[cursor];
    const long n = to_long(tok[0], cursor);
    if (n < 3 || static_cast<long>(tok.size()) < n + 1)
      throw std::runtime_error("OFF: face record " + std::to_string(cursor) + " is malformed");
    std::vector<int> idx;
    for (long k = 1; k <= n; ++k) {
      const long v = to_long(tok[k], cursor);
      if (v < 0 || v >= nv) throw std::runtime_error("OFF: face index out of range in record " + std::to_string(cursor));
      idx.push_back(static_cast<int>(v));
    }
    for (long k = 1; k + 1 < n; ++k) mesh.triangles.push_back({idx[0], idx[k], idx[k + 1]});
  }
  return mesh;
}

Mesh read_off(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open OFF file '" + path + "'");
  return read_off(in);
}

void write_off(std::ostream& out, const Mesh& mesh) {
  out << "OFF\n" << mesh.vertices.size() << ' ' << mesh.triangles.size() << " 0\n";
  out << std::setprecision(17);
  for (const Vec3& v : mesh.vertices) out << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  for (const Triangle& t : mesh.triangles) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

void write_off(const std::string& path, const Mesh& mesh) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write OFF file '" + path + "'");
  write_off(out, mesh);
  if (!out) throw std::runtime_error("failed writing OFF file '" + path + "'");
}

Mesh flat_square_mesh(int cells, double side) {
  if (cells < 1 || !(side > 0)) throw std::invalid_argument("flat_square_mesh: need cells >= 1 and side > 0");
  Mesh m;
  for (int j = 0; j <= cells; ++j)
    for (int i = 0; i <= cells; ++i) m.vertices.emplace_back(side * i / cells, side * j / cells, 0.0);
  auto id = [cells](int i, int j) { return j * (cells + 1) + i; };
  for (int j = 0; j < cells; ++j)
    for (int i = 0; i < cells; ++i) {
      m.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      m.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  return m;
}

Mesh icosphere_mesh(int subdivisions) {
  IcoSphere s = icosphere(subdivisions);
  return {std::move(s.vertices), std::move(s.triangles)};
}

double zigzag(double t) { return std::abs(t - std::nearbyint(t)); }

double zigzag_scaled(double t, int n) { return std::ldexp(zigzag(std::ldexp(t, n)), -n); }

double zigzag_height(double x, double y, int n_max) {
  if (n_max < 1) throw std::invalid_argument("zigzag_height: n_max must be at least 1");
  y = std::abs(y);
  if (y == 0.0) return 0.0;
  const double strip = std::ldexp(1.0, -n_max);
  if (y < strip) return (y / strip) * zigzag_scaled(x, n_max);
  int e = 0;
  std::frexp(y, &e);  // y in [2^(e-1), 2^e)
  const int n = -e;   // band 2^-(n+1) <= y < 2^-n
  const double lambda = std::ldexp(y, n + 1) - 1.0;
  return lambda * zigzag_scaled(x, n) + (1.0 - lambda) * zigzag_scaled(x, n + 1);
}

double zigzag_height_lipschitz() { return std::sqrt(1.0 + 1.5 * 1.5); }

PolyhedralSurface build_zigzag_surface(const ZigzagOptions& opts) {
  if (opts.n_max < 1 || opts.rows_per_band < 1) throw std::invalid_argument("build_zigzag_surface: bad options");
  const double strip = std::ldexp(1.0, -opts.n_max);
  if (!(opts.extent > strip)) throw std::invalid_argument("build_zigzag_surface: extent inside the fade strip");

  const double step = std::ldexp(1.0, -(opts.n_max + 1));
  const long ncols = static_cast<long>(std::ceil(2.0 * opts.extent / step - 1e-9));
  std::vector<double> upper{strip};
  for (int n = opts.n_max - 1;; --n) {
    const double lo = std::ldexp(1.0, -(n + 1));
    if (lo >= opts.extent) break;
    for (int r = 1; r <= opts.rows_per_band; ++r) {
      const double y = lo * (1.0 + static_cast<double>(r) / opts.rows_per_band);
      if (y < opts.extent * (1 - 1e-12)) upper.push_back(y);
    }
  }
  upper.push_back(opts.extent);
  std::vector<double> rows;
  for (auto it = upper.rbegin(); it != upper.rend(); ++it) rows.push_back(-*it);
  rows.push_back(0.0);
  rows.insert(rows.end(), upper.begin(), upper.end());

  const long estimate = (ncols + 1) * static_cast<long>(rows.size());
  if (estimate > opts.max_vertices)
    throw std::length_error("build_zigzag_surface: " + std::to_string(estimate) + " vertices exceed the budget of " +
                            std::to_string(opts.max_vertices));

  Mesh mesh;
  mesh.vertices.reserve(estimate);
  for (double y : rows)
    for (long j = 0; j <= ncols; ++j) {
      const double x = -opts.extent + 2.0 * opts.extent * static_cast<double>(j) / ncols;
      mesh.vertices.emplace_back(x, y, zigzag_height(x, y, opts.n_max));
    }
  std::vector<bool> refined;
  const long width = ncols + 1;
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    const bool in_strip = std::abs(rows[i]) <= strip && std::abs(rows[i + 1]) <= strip;
    for (long j = 0; j < ncols; ++j) {
      const int a = static_cast<int>(i * width + j), b = a + 1, c = static_cast<int>((i + 1) * width + j + 1),
                d = c - 1;
      mesh.triangles.push_back({a, b, c});
      mesh.triangles.push_back({a, c, d});
      refined.push_back(!in_strip);
      refined.push_back(!in_strip);
    }
  }
  return PolyhedralSurface(std::move(mesh), std::move(refined));
}

SteinerGraph::SteinerGraph(const PolyhedralSurface& surface, int level) : surface_(&surface), level_(level) {
  if (level < 0 || level > 12) throw std::invalid_argument("SteinerGraph: level must lie in [0, 12]");
  per_edge_ = (1 << level) - 1;
  const auto& verts = surface.vertices();
  const int nv = static_cast<int>(verts.size());
  positions_ = verts;
  positions_.reserve(verts.size() + surface.edges().size() * per_edge_);
  for (const auto& e : surface.edges())
    for (int k = 1; k <= per_edge_; ++k) {
      const double s = static_cast<double>(k) / (per_edge_ + 1);
      positions_.push_back((1 - s) * verts[e[0]] + s * verts[e[1]]);
    }
  const int nt = static_cast<int>(surface.triangles().size());
  triangle_nodes_.resize(nt);
  for (int t = 0; t < nt; ++t) {
    auto& nodes = triangle_nodes_[t];
    for (int v : surface.triangles()[t]) nodes.push_back(v);
    if (!surface.refined(t)) continue;
    for (int e : surface.triangle_edges(t))
      for (int k = 0; k < per_edge_; ++k) nodes.push_back(nv + e * per_edge_ + k);
  }
  min_spacing_ = surface.min_edge_length() / (per_edge_ + 1);
}

int SteinerGraph::nearest_node(const Vec3& p) const {
  const int nv = static_cast<int>(surface_->vertices().size());
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < positions_.size(); ++i) {
    const double d = (positions_[i] - p).squaredNorm();
    if (d >= best_d) continue;
    if (static_cast<int>(i) >= nv) {
      // Steiner points on edges without a refined triangle are not connected.
      const int e = (static_cast<int>(i) - nv) / per_edge_;
      bool attached = false;
      for (int t : surface_->edge_triangles(e)) attached = attached || surface_->refined(t);
      if (!attached) continue;
    }
    best_d = d;
    best = static_cast<int>(i);
  }
  return best;
}

namespace {

template <class Heuristic>
ShortestPathResult run_search(const SteinerGraph& graph, int source, int target, const SegmentFilter& blocked,
                              Heuristic&& h) {
  const std::size_t n = graph.node_count();
  if (source < 0 || static_cast<std::size_t>(source) >= n) throw std::out_of_range("shortest_path: bad source node");
  ShortestPathResult r;
  r.distance.assign(n, std::numeric_limits<double>::infinity());
  r.parent.assign(n, -1);
  std::vector<char> settled(n, 0);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  r.distance[source] = 0.0;
  queue.emplace(h(source), source);
  while (!queue.empty()) {
    const int u = queue.top().second;
    queue.pop();
    if (settled[u]) continue;
    settled[u] = 1;
    if (u == target) break;
    const Vec3& pu = graph.position(u);
    const double du = r.distance[u];
    graph.for_each_neighbor(u, [&](int v) {
      if (settled[v]) return;
      const double dv = du + (graph.position(v) - pu).norm();
      if (dv >= r.distance[v]) return;
      if (blocked && blocked(u, v)) return;
      r.distance[v] = dv;
      r.parent[v] = u;
      queue.emplace(dv + h(v), v);
    });
  }
  return r;
}

}  // namespace

double shortest_path(const SteinerGraph& graph, int source, int target, const SegmentFilter& blocked) {
  if (target < 0 || static_cast<std::size_t>(target) >= graph.node_count())
    throw std::out_of_range("shortest_path: bad target node");
  const Vec3 goal = graph.position(target);
  return run_search(graph, source, target, blocked, [&](int v) { return (graph.position(v) - goal).norm(); })
      .distance[target];
}

ShortestPathResult shortest_paths(const SteinerGraph& graph, int source, const SegmentFilter& blocked) {
  return run_search(graph, source, -1, blocked, [](int) { return 0.0; });
}

}  // namespace finsler
