#pragma once

#include <array>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "finsler/rectifiable.hpp"
#include "finsler/surface.hpp"

namespace finsler {

// Measure-zero sets on a surface, made of segments and circles.
class NullSet {
 public:
  struct Segment {
    Vec3 a, b;
  };
  struct Circle {
    Vec3 center, normal;
    double radius;
  };

  NullSet& add_segment(const Vec3& a, const Vec3& b);
  NullSet& add_circle(const Vec3& center, const Vec3& normal, double radius);
  bool empty() const { return segments_.empty() && circles_.empty(); }
  const std::vector<Segment>& segments() const { return segments_; }
  const std::vector<Circle>& circles() const { return circles_; }
  // Euclidean distance from p to the nearest primitive (+inf when empty).
  double distance(const Vec3& p) const;

 private:
  std::vector<Segment> segments_;
  std::vector<Circle> circles_;
};

struct SurfaceDistance {
  double value = 0.0;
  bool reachable = true;
  int level = 0;
  int source_node = -1, target_node = -1;
  double snap_error = 0.0;  // largest distance from a query point to its node
  std::string diagnostic;
};

// Segments of the Steiner graph lying in the null set: both endpoints and the midpoint
// within `tol` of one primitive.
SegmentFilter null_set_filter(const SteinerGraph& graph, const NullSet& null_set, double tol);
// Default containment tolerance: 1e-9 of the mesh bounding-box diagonal.
double null_set_tolerance(const PolyhedralSurface& surface);

// Shortest path in the Steiner graph between the nodes nearest to p and q. The value is an
// upper bound of the induced length distance between those nodes.
SurfaceDistance graph_distance(const SteinerGraph& graph, const Vec3& p, const Vec3& q);
SurfaceDistance graph_distance(const PolyhedralSurface& surface, const Vec3& p, const Vec3& q, int level);
// As graph_distance with the segments inside the null set removed; transversal crossings stay.
SurfaceDistance essential_distance(const SteinerGraph& graph, const Vec3& p, const Vec3& q, const NullSet& null_set);
SurfaceDistance essential_distance(const PolyhedralSurface& surface, const Vec3& p, const Vec3& q,
                                   const NullSet& null_set, int level);

class DistanceOracle {
 public:
  virtual ~DistanceOracle() = default;
  virtual double distance(const Vec3& x, const Vec3& y) const = 0;
  virtual std::string name() const = 0;
  // Pairwise matrix, entry (i, j) = distance(points[i], points[j]).
  virtual Mat distance_matrix(const std::vector<Vec3>& points) const;
};

class EuclideanOracle : public DistanceOracle {
 public:
  double distance(const Vec3& x, const Vec3& y) const override { return (x - y).norm(); }
  std::string name() const override { return "euclidean"; }
};

// Intrinsic distance of the unit sphere (inputs are normalized).
class GreatCircleOracle : public DistanceOracle {
 public:
  double distance(const Vec3& x, const Vec3& y) const override;
  std::string name() const override { return "great_circle"; }
};

// Sphere with a great circle C along which travel costs half:
//   d(x,y) = min(D(x,y), inf_{v,w in C} D(x,v) + D(v,w)/2 + D(w,y)).
// The infimum is sampled at circle_samples angles through a slope-1/2 distance transform
// and polished by golden-section search.
class ShortcutSphereOracle : public DistanceOracle {
 public:
  explicit ShortcutSphereOracle(const Vec3& normal = Vec3::UnitZ(), int circle_samples = 256);
  double distance(const Vec3& x, const Vec3& y) const override;
  std::string name() const override { return "shortcut_sphere"; }
  const Vec3& normal() const { return normal_; }
  int circle_samples() const { return samples_; }
  // Point of C at angle theta.
  Vec3 circle_point(double theta) const;
  // Distance on the sphere from x to C.
  double distance_to_circle(const Vec3& x) const;
  // Error scale of the sampled infimum, (2 pi / samples)^2.
  double tolerance() const;

 private:
  Vec3 normal_, u_, v_;
  int samples_;
};

// Graph distance on a Steiner-refined surface; with a null set, the essential distance.
// Single-source trees are cached per source node, so the oracle is not thread-safe.
class SurfaceOracle : public DistanceOracle {
 public:
  SurfaceOracle(std::shared_ptr<const PolyhedralSurface> surface, int level, NullSet null_set = {},
                std::string name = "surface");
  double distance(const Vec3& x, const Vec3& y) const override;
  std::string name() const override { return name_; }
  Mat distance_matrix(const std::vector<Vec3>& points) const override;
  const SteinerGraph& graph() const { return graph_; }
  int node(const Vec3& p) const;

 private:
  const std::vector<double>& tree(int source) const;

  std::shared_ptr<const PolyhedralSurface> surface_;
  SteinerGraph graph_;
  NullSet null_set_;
  SegmentFilter filter_;
  std::string name_;
  mutable std::unordered_map<int, std::vector<double>> trees_;
};

// Multiplies d(x,y) by `factor` when x precedes y lexicographically (a negative control).
class AsymmetricOracle : public DistanceOracle {
 public:
  AsymmetricOracle(std::shared_ptr<const DistanceOracle> base, double factor) : base_(std::move(base)), factor_(factor) {}
  double distance(const Vec3& x, const Vec3& y) const override;
  std::string name() const override { return "asymmetric(" + base_->name() + ")"; }

 private:
  std::shared_ptr<const DistanceOracle> base_;
  double factor_;
};

struct MetricAxiomReport {
  bool passed = true;
  int points = 0;
  int triples = 0;
  int symmetry_violations = 0;
  int identity_violations = 0;
  int triangle_violations = 0;
  double worst_asymmetry = 0.0;
  double worst_triangle_excess = 0.0;  // max of d(x,z) - d(x,y) - d(y,z)
  std::optional<std::array<int, 3>> witness;  // indices into the point list
};

// Symmetry and identity on all pairs of `points`, the triangle inequality on `triples`
// seeded random triples, each up to the absolute tolerance `tol`.
MetricAxiomReport check_metric_axioms(const DistanceOracle& oracle, const std::vector<Vec3>& points, int triples,
                                      double tol, std::uint64_t seed = kDefaultSeed);

struct LipschitzProfile {
  double max_ratio = 0.0;
  double min_ratio = std::numeric_limits<double>::infinity();
  int pairs = 0;
  std::array<int, 2> argmax{-1, -1}, argmin{-1, -1};
};

// Ratios d_target(f x, f y) / d_source(x, y) over all pairs of `points` (or `max_pairs`
// seeded random pairs when there are more). Pairs at zero source distance are skipped.
LipschitzProfile lipschitz_profile(const DistanceOracle& source, const DistanceOracle& target,
                                   const std::function<Vec3(const Vec3&)>& map, const std::vector<Vec3>& points,
                                   int max_pairs = 20000, std::uint64_t seed = kDefaultSeed);

// Seeded uniform points on the unit sphere, optionally at least `margin` (sphere distance)
// away from the great circle with the given normal.
std::vector<Vec3> random_sphere_points(int count, Rng& rng, const Vec3& avoid_normal = Vec3::Zero(),
                                       double margin = 0.0);
// Seeded points on the zigzag graph over [-extent, extent]^2.
std::vector<Vec3> random_zigzag_points(int count, Rng& rng, int n_max, double extent = 1.0);

// Graph chart of the zigzag height over [-extent, extent]^2 in Euclidean R^3.
Chart zigzag_chart(int n_max, double extent = 1.0);

struct DistanceRow {
  std::string source, target;
  double value;
  int level;
};
// CSV with header source,target,value,level; values printed with 17 significant digits.
void write_distances_csv(std::ostream& out, const std::vector<DistanceRow>& rows);

}  // namespace finsler
