#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string_view>

#include "finsler/sampling.hpp"

namespace finsler {

enum class NormKind { euclidean, gram, polytopal, pnorm, callable };

std::string_view to_string(NormKind kind);

// A positively homogeneous convex functional on R^m. Immutable after construction;
// copies share the underlying representation.
//
//   euclidean  |v|
//   gram       sqrt(v^T G v), G symmetric positive semidefinite
//   polytopal  max_i |f_i . v|, f_i the rows of the facet matrix
//   pnorm      (sum |v_i|^p)^(1/p), p in [1, inf]
//   callable   black-box evaluator with a declared evaluation tolerance
class Seminorm {
 public:
  using Evaluator = std::function<double(const Vec&)>;

  static Seminorm euclidean(int dim);
  static Seminorm gram(Mat G);
  static Seminorm polytopal(Mat facets);
  static Seminorm p_norm(int dim, double p);
  static Seminorm callable(int dim, Evaluator fn, double tolerance = 1e-12);

  int dim() const { return dim_; }
  NormKind kind() const { return kind_; }

  double operator()(const Vec& v) const;
  double eval(const Vec& v) const { return (*this)(v); }

  // Representation payloads. Throw std::logic_error when the kind does not match.
  const Mat& gram_matrix() const;
  const Mat& facets() const;
  double exponent() const;
  // Declared evaluation tolerance (1e-12 for closed forms).
  double tolerance() const { return tolerance_; }

  // Unit ball is an ellipsoid {v : v^T G v <= 1}; G returned by ellipsoid_matrix().
  bool is_ellipsoidal() const;
  Mat ellipsoid_matrix() const;

  // Unit ball is a polytope {v : |f_i . v| <= 1}; returns the facet rows.
  std::optional<Mat> polytope_facets() const;

  // lambda * s. Keeps the representation where one exists.
  Seminorm scaled(double lambda) const;

  // v -> s(A v) for A with dim() rows; the result lives on R^{A.cols()}.
  Seminorm pullback(const Mat& A) const;

 private:
  Seminorm(int dim, NormKind kind) : dim_(dim), kind_(kind) {}

  int dim_ = 0;
  NormKind kind_ = NormKind::euclidean;
  double tolerance_ = 1e-12;
  std::shared_ptr<const Mat> matrix_;  // gram matrix or facet rows
  double p_ = 2.0;
  std::shared_ptr<const Evaluator> fn_;
};

struct AxiomReport {
  double homogeneity_residual = 0.0;
  double triangle_residual = 0.0;
  double min_unit_value = 0.0;
  bool nan_detected = false;
  bool is_norm = false;
};

// Seeded randomized check of absolute homogeneity, subadditivity and definiteness.
// Residuals are relative to the magnitudes involved.
AxiomReport check_axioms(const Seminorm& s, std::size_t sample_count, double tol,
                         std::uint64_t seed = kDefaultSeed);

inline constexpr double kDegeneracyThreshold = 1e-9;

// Minimum of s over a deterministic direction set augmented with the
// representation's own extremal candidates (eigenvectors, kernel vectors).
double min_unit_value(const Seminorm& s, std::size_t direction_count = 4096);

bool is_degenerate(const Seminorm& s, double threshold = kDegeneracyThreshold);

struct NormComparisonReport {
  bool dominates_euclidean = false;
  double max_ratio = 0.0;
  double min_ratio = 0.0;
  Vec witness_direction;  // argmax of s(v)/|v|
  Vec min_direction;      // argmin of s(v)/|v|
};

// Ratios s(v)/|v| over a deterministic low-discrepancy direction set plus the
// representation's candidate extremal directions. Throws GeometryError for a
// degenerate seminorm.
NormComparisonReport compare_to_euclidean(const Seminorm& s, std::size_t direction_count = 4096,
                                          double tol = 1e-9);

// A subgradient of s at v != 0: a functional f with f . v = s(v) and |f . w| <= s(w).
// Closed form for the built-in kinds, central differences for callables.
Vec subgradient(const Seminorm& s, const Vec& v);

// Polytopal norm whose unit ball is the regular 2n-gon with vertices at k*pi/n.
Seminorm regular_2ngon_norm(int n);

// Requires G symmetric positive definite.
Seminorm ellipsoidal_norm(const Mat& G);

// Requires the facet rows to span R^m.
Seminorm polytopal_norm(const Mat& facets);

}  // namespace finsler
