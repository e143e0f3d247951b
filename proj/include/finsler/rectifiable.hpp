#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "finsler/norms.hpp"
#include "finsler/volume.hpp"

namespace finsler {

struct Box {
  Vec lo, hi;

  static Box cube(int dim, double lo, double hi);
  int dim() const { return static_cast<int>(lo.size()); }
  double volume() const { return (hi - lo).prod(); }
  bool contains(const Vec& x, double margin = 0.0) const;
};

// Target space of a chart: R^N with a norm, or a point set with a metric.
class Ambient {
 public:
  using Metric = std::function<double(const Vec&, const Vec&)>;

  static Ambient euclidean(int dim);
  static Ambient normed(Seminorm norm);
  static Ambient metric(int dim, Metric d, std::string name);

  int dim() const { return dim_; }
  bool is_normed() const { return norm_.has_value(); }
  bool is_euclidean() const;
  const Seminorm& norm() const;  // throws std::logic_error for metric ambients
  const std::string& name() const { return name_; }
  double distance(const Vec& a, const Vec& b) const;

 private:
  int dim_ = 0;
  std::optional<Seminorm> norm_;
  Metric metric_;
  std::string name_;
};

// Lipschitz map from a box in R^m into an ambient space.
class Chart {
 public:
  using Map = std::function<Vec(const Vec&)>;

  struct Validation {
    int pairs = 512;
    std::uint64_t seed = kDefaultSeed;
  };

  // Checks the declared Lipschitz constant on sampled pairs (std::invalid_argument on violation).
  Chart(Box domain, Map map, double lipschitz, Ambient ambient, Validation validation);
  Chart(Box domain, Map map, double lipschitz, Ambient ambient);
  Chart(Box domain, Map map, double lipschitz);

  int dim() const { return domain_.dim(); }
  const Box& domain() const { return domain_; }
  const Ambient& ambient() const { return ambient_; }
  double lipschitz() const { return lipschitz_; }
  Vec operator()(const Vec& x) const;

  // Optional inverse from the image back to chart coordinates (used for image charts).
  const Map& inverse() const { return inverse_; }
  Chart& with_inverse(Map inverse);

  // Observed sup of d(phi(x), phi(y)) / |x - y| on the validation pairs.
  double observed_lipschitz() const { return observed_lipschitz_; }

  // f o phi into the given ambient; the Lipschitz bound is the product of constants.
  Chart compose(const Map& f, double f_lipschitz, Ambient target) const;

 private:
  Box domain_;
  Map map_;
  Map inverse_;
  double lipschitz_ = 0.0;
  double observed_lipschitz_ = 0.0;
  Ambient ambient_;
};

struct Atlas {
  std::vector<Chart> charts;
  // Integer densities per chart (empty: density 1 everywhere).
  std::vector<std::function<int(const Vec&)>> densities;
  bool disjoint_images = true;

  int density(std::size_t chart, const Vec& x) const;
};

struct MetricDerivativeOptions {
  double h0 = 1e-3;
  int levels = 9;                 // steps h0, h0/2, ..., h0/2^(levels-1)
  double reliability_tol = 1e-6;  // relative agreement of the last two extrapolants
  std::vector<Vec> directions;    // empty: default_directions(m)
};

// Unit directions used for the Gram fit: 8 angles in the plane, otherwise the axes and
// the normalized pairwise sums and differences.
std::vector<Vec> default_directions(int m);

struct MetricDerivativeEstimate {
  Vec x;
  std::vector<Vec> directions;
  std::vector<double> values;  // md(v) per direction
  Mat gram;                    // least-squares inner product fit, projected to PSD
  double euclidean_residual = 0.0;
  bool reliable = true;
  double max_disagreement = 0.0;  // worst relative disagreement of the last two extrapolants
  bool degenerate = false;        // smallest Gram eigenvalue below 1e-9 of the largest
  std::optional<Mat> differential;  // N x m derivative, for normed ambients
};

// Symmetric difference quotients d(phi(x+tv), phi(x-tv)) / 2t over a halving schedule with
// one Richardson step. Throws DimensionError when x is closer to the boundary than h0.
MetricDerivativeEstimate metric_derivative(const Chart& chart, const Vec& x, const MetricDerivativeOptions& opts = {});

// The seminorm v -> md(phi_x)(v): a pullback of the ambient norm when one exists, the Gram
// fit when the estimate is Euclidean, and an on-demand evaluator otherwise.
Seminorm md_seminorm(const Chart& chart, const MetricDerivativeEstimate& est, const MetricDerivativeOptions& opts = {});

struct MdJacobian {
  double value = 0.0;
  bool degenerate = false;
};

MdJacobian md_jacobian(const Chart& chart, const Vec& x, VolumeTag tag, const MetricDerivativeOptions& opts = {},
                       const BallResolution& res = {});

struct EuclideanReport {
  double fraction_euclidean = 0.0;
  double worst_residual = 0.0;
  int unreliable = 0;
  int samples = 0;
};

EuclideanReport is_infinitesimally_euclidean(const Chart& chart, const std::vector<Vec>& samples, double tol,
                                             const MetricDerivativeOptions& opts = {});

struct QuadratureOptions {
  int cells_per_dim = 64;
};

struct MuMeasureResult {
  double value = 0.0;
  long cells = 0;
  long degenerate_cells = 0;
  std::vector<std::string> warnings;
};

// Sum over charts of the midpoint rule for |theta| J(md phi) over cells whose image
// satisfies the indicator.
MuMeasureResult mu_measure(const Atlas& atlas, VolumeTag tag, const std::function<bool(const Vec&)>& indicator,
                           const QuadratureOptions& quad = {}, const BallResolution& res = {});

struct MapJacobianResult {
  double value = 0.0;
  bool degenerate = false;  // the composed metric derivative is degenerate
};

// J(md (f o phi)_x) / J(md phi_x). Throws GeometryError when phi is degenerate at x.
MapJacobianResult map_jacobian(const Chart& chart, const Chart::Map& f, double f_lipschitz, const Ambient& target,
                               const Vec& x, VolumeTag tag, const BallResolution& res = {});

struct IsometryReport {
  double max_deviation = 0.0;
  double fraction_passing = 0.0;
  int samples = 0;
  int unreliable = 0;
};

// Compares md(phi_x)(v) and md((f o phi)_x)(v) direction by direction.
IsometryReport infinitesimal_isometry_check(const Chart& chart, const Chart::Map& f, double f_lipschitz,
                                            const Ambient& target, const std::vector<Vec>& samples, double tol,
                                            const MetricDerivativeOptions& opts = {});

struct AreaFormulaOptions {
  int cells_per_dim = 32;        // domain and image grid resolution
  int max_depth = 8;             // bisection cap for non-injective cells
  int injectivity_probes = 3;    // probes per cell side for the orientation test
  BallResolution resolution{};
};

struct AreaFormulaResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
  int max_multiplicity = 0;
  long pieces = 0;
  long capped_pieces = 0;
  double error_budget = 0.0;  // mass carried by pieces that hit the depth cap
};

// Checks  int_S g J(md f) dmu_S  =  int_{f(S)} sum_{x in f^-1(y)} g(x) dmu_{f(S)}(y).
// The left side is midpoint quadrature on the charts of S. The right side maps injective
// pieces of each cell affinely into the coordinates of the image chart (which needs an
// inverse) and integrates the overlap with the image grid, so overlapping pieces count
// with multiplicity. Chart dimensions 1 and 2 are supported.
AreaFormulaResult area_formula_check(const Atlas& atlas, const Chart::Map& f, double f_lipschitz,
                                     const std::function<double(const Vec&)>& g, VolumeTag tag, const Chart& image_chart,
                                     const AreaFormulaOptions& opts = {});

struct ObservedOrder {
  double order = 0.0;
  bool exact = false;  // every residual at round-off level
};

// Least-squares slope of log(error) against log(h), ignoring errors below `floor`.
ObservedOrder observed_order(const std::vector<double>& h, const std::vector<double>& errors, double floor = 1e-12);

// Built-in charts.
Chart linear_chart(const Mat& A, const Box& domain);
Chart graph_chart(const std::function<double(const Vec&)>& height, double height_lipschitz, const Box& domain);
// Six cube-face charts of the unit sphere in R^3, each on [-1,1]^2 with Lipschitz constant 1.
Atlas sphere_atlas();
Chart sphere_face_chart(int axis, int sign);

}  // namespace finsler
