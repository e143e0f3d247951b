#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace finsler {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Rng = std::mt19937_64;

inline constexpr std::uint64_t kDefaultSeed = 0x5eed'f1e5'1e40'0001ULL;

// Lebesgue volume of the Euclidean unit ball in R^m (alpha_1 = 2, alpha_2 = pi, ...).
double unit_ball_volume(int m);

// Equally spaced directions on the unit circle, k * 2pi / count + offset.
std::vector<Vec> circle_directions(std::size_t count, double offset = 0.0);

// Spherical Fibonacci lattice on S^2.
std::vector<Vec> fibonacci_sphere(std::size_t count);

// Deterministic, reproducible unit directions in R^m: the circle lattice for m = 2,
// the Fibonacci lattice for m = 3, and Sobol points pushed through the Gaussian
// quantile for m >= 4. m = 1 returns {+1, -1}.
std::vector<Vec> sphere_directions(int m, std::size_t count);

// Uniform random unit vector (for seeded property sampling, not for reports).
Vec random_unit_vector(int m, Rng& rng);

struct IcoSphere {
  std::vector<Eigen::Vector3d> vertices;
  std::vector<std::array<int, 3>> triangles;
};

// Loop-subdivided icosahedron projected to the unit sphere. Subdivision level k
// has 10 * 4^k + 2 vertices (level 4 -> 2562).
IcoSphere icosphere(int subdivisions);

// Sobol points in [0,1)^dim (boost::random::sobol), skipping the first `skip` points.
class SobolPoints {
 public:
  explicit SobolPoints(int dim, std::size_t skip = 0);
  // Fills `out` (size dim) with the next point.
  void next(Vec& out);
  int dim() const { return dim_; }

 private:
  int dim_;
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

}  // namespace finsler
