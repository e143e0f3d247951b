#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "finsler/sampling.hpp"

namespace finsler {

// Centrally symmetric convex polytope centered at the origin.
//
// Built either from points (convex hull) or from facet functionals {x : |a_i . x| <= 1}.
// In dimensions 2 and 3 both descriptions are always available; in higher dimension only
// the one it was built from is.
class Polytope {
 public:
  // Hull of the rows of `points`. The set must be symmetric (every p has -p within a
  // relative 1e-9) unless `symmetrize` is set, in which case -points is added.
  static Polytope from_vertices(const Mat& points, bool symmetrize = false);
  // {x : |f_i . x| <= 1} for the rows f_i.
  static Polytope from_facets(const Mat& facets);

  int dim() const { return dim_; }
  // Lower-dimensional point sets give a degenerate polytope of volume 0.
  bool degenerate() const { return degenerate_; }
  bool has_vertices() const { return vertices_.rows() > 0; }
  bool has_facets() const { return facets_.rows() > 0; }

  // Hull vertices as rows (both v and -v present). In 2D they come counter-clockwise.
  const Mat& vertices() const;
  // Facet normals a as rows, scaled so the facet is {a . x = 1}; symmetric list.
  const Mat& facets() const;
  // Outward triangles over vertices(), 3D only.
  const std::vector<std::array<int, 3>>& hull_triangles() const { return triangles_; }

  // max_a a . x over facets (the Minkowski gauge).
  double gauge(const Vec& x) const;
  // max_v v . y over vertices (the support function).
  double support(const Vec& y) const;

  Polytope polar() const;
  // L * P for square invertible L.
  Polytope transformed(const Mat& L) const;

 private:
  int dim_ = 0;
  bool degenerate_ = false;
  Mat vertices_;
  Mat facets_;
  std::vector<std::array<int, 3>> triangles_;
};

// {x : x^T A x <= 1}, A symmetric positive definite.
struct Ellipsoid {
  Mat shape;

  int dim() const { return static_cast<int>(shape.rows()); }
  double volume() const;
  double gauge(const Vec& x) const;  // sqrt(x^T A x)
  Ellipsoid polar() const { return {shape.inverse()}; }
};

// {x : |f_i . x| <= 1}, f_i the rows of an invertible square matrix.
struct Parallelepiped {
  Mat functionals;
  bool exact = true;  // false when found by a heuristic search

  int dim() const { return static_cast<int>(functionals.rows()); }
  double volume() const;
  double gauge(const Vec& x) const;
  Mat vertices() const;  // the 2^m corners as rows
};

struct QmcOptions {
  std::size_t samples = 2'000'000;
  int blocks = 16;  // independent random shifts; the spread gives the standard error
  std::uint64_t seed = kDefaultSeed;
};

struct VolumeResult {
  double value = 0.0;
  double std_error = 0.0;
  bool exact = true;
  bool degenerate = false;
};

// Exact for m <= 3 (segment, shoelace, origin fan), quasi-Monte Carlo above.
VolumeResult volume(const Polytope& body, const QmcOptions& qmc = {});
double volume(const Ellipsoid& body);
double volume(const Parallelepiped& body);

// Randomly shifted Sobol estimate of the volume of {x : inside(x)} within the box
// prod [-half_widths_i, half_widths_i].
VolumeResult qmc_volume(const std::function<bool(const Vec&)>& inside, const Vec& half_widths,
                        const QmcOptions& qmc = {});

struct EllipsoidFit {
  Ellipsoid ellipsoid;
  double gap = 0.0;  // relative volume optimality gap
  int iterations = 0;
};

struct EllipsoidOptions {
  double tol = 1e-8;
  int max_iterations = 100'000;
};

// Centered minimum-volume ellipsoid containing the rows of `points` (taken symmetric).
// Every point satisfies x^T A x <= 1 on return.
EllipsoidFit min_enclosing_ellipsoid(const Mat& points, const EllipsoidOptions& opts = {});
EllipsoidFit min_enclosing_ellipsoid(const Polytope& body, const EllipsoidOptions& opts = {});
// Centered maximum-volume ellipsoid inside the facet description.
EllipsoidFit max_inscribed_ellipsoid(const Polytope& body, const EllipsoidOptions& opts = {});

struct ParallelepipedOptions {
  int restarts = 16;
  std::uint64_t seed = kDefaultSeed;
  // 3D vertex-triple enumeration is used when the polar has at most this many vertices.
  int exhaustive_limit = 160;
};

// Minimum-volume centered parallelepiped containing the body. Its functionals are polar
// vertices, so containment holds by construction on every path.
Parallelepiped min_enclosing_parallelepiped(const Polytope& body, const ParallelepipedOptions& opts = {});

// Exhaustive search over pairs of polar vertices; test oracle for the 2D path.
Parallelepiped min_enclosing_parallelogram_bruteforce(const Polytope& body);

bool contains(const Polytope& body, const Vec& x, double tol = 1e-9);
bool contains(const Ellipsoid& body, const Vec& x, double tol = 1e-9);
bool contains(const Parallelepiped& body, const Vec& x, double tol = 1e-9);

}  // namespace finsler
