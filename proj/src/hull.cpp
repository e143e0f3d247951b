#include "finsler/hull.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <unordered_map>

#include "finsler/errors.hpp"

namespace finsler {

namespace {

double cross2(const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

struct Face {
  std::array<int, 3> v;
  Eigen::Vector3d normal;
  double offset;
  bool alive = true;
};

std::uint64_t edge_key(int a, int b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}

}  // namespace

std::vector<int> convex_hull_2d(const std::vector<Eigen::Vector2d>& points) {
  const int n = static_cast<int>(points.size());
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    return points[a].x() < points[b].x() || (points[a].x() == points[b].x() && points[a].y() < points[b].y());
  });
  if (n < 3) return idx;

  double scale = 0.0;
  for (const auto& p : points) scale = std::max(scale, p.cwiseAbs().maxCoeff());
  const double eps = 1e-14 * std::max(scale * scale, 1e-300);

  std::vector<int> hull(2 * n);
  int k = 0;
  for (int i = 0; i < n; ++i) {
    while (k >= 2 && cross2(points[hull[k - 2]], points[hull[k - 1]], points[idx[i]]) <= eps) --k;
    hull[k++] = idx[i];
  }
  for (int i = n - 2, t = k + 1; i >= 0; --i) {
    while (k >= t && cross2(points[hull[k - 2]], points[hull[k - 1]], points[idx[i]]) <= eps) --k;
    hull[k++] = idx[i];
  }
  hull.resize(std::max(k - 1, 0));
  return hull;
}

Hull3 convex_hull_3d(const std::vector<Eigen::Vector3d>& pts) {
  const int n = static_cast<int>(pts.size());
  if (n < 4) throw GeometryError("convex_hull_3d: need at least four points");
  double scale = 0.0;
  for (const auto& p : pts) scale = std::max(scale, p.cwiseAbs().maxCoeff());
  const double eps = 1e-11 * std::max(scale, 1e-300);

  // Initial tetrahedron from extreme points.
  int i0 = 0;
  for (int i = 1; i < n; ++i)
    if (pts[i].x() < pts[i0].x()) i0 = i;
  int i1 = -1;
  double best = 0.0;
  for (int i = 0; i < n; ++i)
    if (double d = (pts[i] - pts[i0]).norm(); d > best) best = d, i1 = i;
  if (i1 < 0 || best <= eps) throw GeometryError("convex_hull_3d: points coincide");
  const Eigen::Vector3d dir = (pts[i1] - pts[i0]).normalized();
  int i2 = -1;
  best = 0.0;
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector3d w = pts[i] - pts[i0];
    if (double d = (w - w.dot(dir) * dir).norm(); d > best) best = d, i2 = i;
  }
  if (i2 < 0 || best <= eps) throw GeometryError("convex_hull_3d: points are collinear");
  const Eigen::Vector3d nrm = (pts[i1] - pts[i0]).cross(pts[i2] - pts[i0]).normalized();
  int i3 = -1;
  best = 0.0;
  for (int i = 0; i < n; ++i)
    if (double d = std::abs((pts[i] - pts[i0]).dot(nrm)); d > best) best = d, i3 = i;
  if (i3 < 0 || best <= eps) throw GeometryError("convex_hull_3d: points are coplanar");

  const Eigen::Vector3d centroid = 0.25 * (pts[i0] + pts[i1] + pts[i2] + pts[i3]);
  std::vector<Face> faces;
  std::unordered_map<std::uint64_t, int> edge_face;

  auto add_face = [&](int a, int b, int c) {
    Face f;
    f.v = {a, b, c};
    f.normal = (pts[b] - pts[a]).cross(pts[c] - pts[a]);
    const double len = f.normal.norm();
    if (len > 0) f.normal /= len;
    f.offset = f.normal.dot(pts[a]);
    if (f.normal.dot(centroid) - f.offset > 0) {
      std::swap(f.v[1], f.v[2]);
      f.normal = -f.normal;
      f.offset = -f.offset;
    }
    const int id = static_cast<int>(faces.size());
    faces.push_back(f);
    for (int e = 0; e < 3; ++e) edge_face[edge_key(faces[id].v[e], faces[id].v[(e + 1) % 3])] = id;
    return id;
  };
  add_face(i0, i1, i2);
  add_face(i0, i1, i3);
  add_face(i0, i2, i3);
  add_face(i1, i2, i3);

  std::vector<char> visible;
  for (int p = 0; p < n; ++p) {
    if (p == i0 || p == i1 || p == i2 || p == i3) continue;
    visible.assign(faces.size(), 0);
    bool any = false;
    for (std::size_t f = 0; f < faces.size(); ++f) {
      if (!faces[f].alive) continue;
      if (faces[f].normal.dot(pts[p]) - faces[f].offset > eps) {
        visible[f] = 1;
        any = true;
      }
    }
    if (!any) continue;

    std::vector<std::pair<int, int>> horizon;
    for (std::size_t f = 0; f < visible.size(); ++f) {
      if (!visible[f]) continue;
      for (int e = 0; e < 3; ++e) {
        const int a = faces[f].v[e], b = faces[f].v[(e + 1) % 3];
        const auto it = edge_face.find(edge_key(b, a));
        if (it == edge_face.end() || !visible[it->second]) horizon.emplace_back(a, b);
      }
    }
    for (std::size_t f = 0; f < visible.size(); ++f) {
      if (!visible[f]) continue;
      faces[f].alive = false;
      for (int e = 0; e < 3; ++e) {
        const auto it = edge_face.find(edge_key(faces[f].v[e], faces[f].v[(e + 1) % 3]));
        if (it != edge_face.end() && it->second == static_cast<int>(f)) edge_face.erase(it);
      }
    }
    for (const auto& [a, b] : horizon) {
      Face f;
      f.v = {a, b, p};
      f.normal = (pts[b] - pts[a]).cross(pts[p] - pts[a]);
      const double len = f.normal.norm();
      if (len > 0) f.normal /= len;
      f.offset = f.normal.dot(pts[a]);
      const int id = static_cast<int>(faces.size());
      faces.push_back(f);
      for (int e = 0; e < 3; ++e) edge_face[edge_key(f.v[e], f.v[(e + 1) % 3])] = id;
    }
  }

  Hull3 out;
  std::vector<char> used(n, 0);
  for (const auto& f : faces) {
    if (!f.alive) continue;
    out.faces.push_back(f.v);
    for (int v : f.v) used[v] = 1;
  }
  for (int i = 0; i < n; ++i)
    if (used[i]) out.vertices.push_back(i);
  return out;
}

}  // namespace finsler
