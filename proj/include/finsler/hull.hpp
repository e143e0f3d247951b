#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

namespace finsler {

// Indices of the convex hull vertices in counter-clockwise order, collinear points dropped.
std::vector<int> convex_hull_2d(const std::vector<Eigen::Vector2d>& points);

struct Hull3 {
  std::vector<std::array<int, 3>> faces;  // outward (counter-clockwise seen from outside)
  std::vector<int> vertices;              // sorted indices of points used by some face
};

// Incremental hull. Throws GeometryError when the points are (numerically) coplanar.
Hull3 convex_hull_3d(const std::vector<Eigen::Vector3d>& points);

}  // namespace finsler
