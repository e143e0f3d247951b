#include "finsler/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>
#include <boost/random/sobol.hpp>

namespace finsler {

double unit_ball_volume(int m) {
  if (m < 0) throw std::invalid_argument("unit_ball_volume: negative dimension");
  return std::pow(std::numbers::pi, 0.5 * m) / std::tgamma(0.5 * m + 1.0);
}

std::vector<Vec> circle_directions(std::size_t count, double offset) {
  std::vector<Vec> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double a = offset + 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(count);
    Vec v(2);
    v << std::cos(a), std::sin(a);
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<Vec> fibonacci_sphere(std::size_t count) {
  std::vector<Vec> out;
  out.reserve(count);
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (std::size_t k = 0; k < count; ++k) {
    const double z = 1.0 - (2.0 * static_cast<double>(k) + 1.0) / static_cast<double>(count);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double a = golden * static_cast<double>(k);
    Vec v(3);
    v << r * std::cos(a), r * std::sin(a), z;
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<Vec> sphere_directions(int m, std::size_t count) {
  if (m < 1) throw std::invalid_argument("sphere_directions: dimension must be positive");
  if (m == 1) {
    Vec a(1), b(1);
    a << 1.0;
    b << -1.0;
    return {a, b};
  }
  if (m == 2) return circle_directions(count);
  if (m == 3) return fibonacci_sphere(count);

  const boost::math::normal_distribution<double> normal;
  SobolPoints sobol(m);
  std::vector<Vec> out;
  out.reserve(count);
  Vec u(m), g(m);
  while (out.size() < count) {
    sobol.next(u);
    for (int i = 0; i < m; ++i) {
      const double p = std::clamp(u[i], 1e-12, 1.0 - 1e-12);
      g[i] = boost::math::quantile(normal, p);
    }
    const double n = g.norm();
    if (n < 1e-12) continue;
    out.push_back(g / n);
  }
  return out;
}

Vec random_unit_vector(int m, Rng& rng) {
  std::normal_distribution<double> normal;
  Vec v(m);
  do {
    for (int i = 0; i < m; ++i) v[i] = normal(rng);
  } while (v.norm() < 1e-12);
  return v / v.norm();
}

IcoSphere icosphere(int subdivisions) {
  if (subdivisions < 0) throw std::invalid_argument("icosphere: negative subdivision level");
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  IcoSphere s;
  const double base[12][3] = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0},
                              {0, -1, t}, {0, 1, t}, {0, -1, -t}, {0, 1, -t},
                              {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (const auto& p : base) s.vertices.push_back(Eigen::Vector3d(p[0], p[1], p[2]).normalized());
  s.triangles = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                 {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                 {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                 {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

  for (int level = 0; level < subdivisions; ++level) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      const auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      s.vertices.push_back((s.vertices[a] + s.vertices[b]).normalized());
      const int idx = static_cast<int>(s.vertices.size()) - 1;
      midpoint.emplace(key, idx);
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(s.triangles.size() * 4);
    for (const auto& tri : s.triangles) {
      const int a = mid(tri[0], tri[1]);
      const int b = mid(tri[1], tri[2]);
      const int c = mid(tri[2], tri[0]);
      next.push_back({tri[0], a, c});
      next.push_back({tri[1], b, a});
      next.push_back({tri[2], c, b});
      next.push_back({a, b, c});
    }
    s.triangles = std::move(next);
  }
  return s;
}

struct SobolPoints::Impl {
  explicit Impl(int dim) : engine(static_cast<std::size_t>(dim)) {}
  boost::random::sobol engine;
};

SobolPoints::SobolPoints(int dim, std::size_t skip) : dim_(dim), impl_(std::make_shared<Impl>(dim)) {
  if (dim < 1) throw std::invalid_argument("SobolPoints: dimension must be positive");
  impl_->engine.discard(static_cast<std::uintmax_t>(skip) * static_cast<std::uintmax_t>(dim));
}

void SobolPoints::next(Vec& out) {
  out.resize(dim_);
  for (int i = 0; i < dim_; ++i) out[i] = std::ldexp(static_cast<double>(impl_->engine()), -64);
}

}  // namespace finsler
