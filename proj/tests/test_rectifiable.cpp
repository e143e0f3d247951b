#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "finsler/errors.hpp"
#include "finsler/rectifiable.hpp"

using namespace finsler;

namespace {

Vec v2(double x, double y) { return (Vec(2) << x, y).finished(); }

Chart identity_square(double side = 1.0) { return linear_chart(Mat::Identity(2, 2), Box::cube(2, 0.0, side)); }

Atlas single(Chart c) {
  Atlas a;
  a.charts.push_back(std::move(c));
  return a;
}

const auto everything = [](const Vec&) { return true; };

std::vector<Vec> grid_samples(double lo, double hi, int n) {
  std::vector<Vec> out;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out.push_back(v2(lo + (hi - lo) * (i + 0.5) / n, lo + (hi - lo) * (j + 0.5) / n));
  return out;
}

}  // namespace

TEST(ChartValidation, RejectsUnderstatedLipschitz) {
  const Mat A = 3.0 * Mat::Identity(2, 2);
  EXPECT_THROW(Chart(Box::cube(2, 0, 1), [A](const Vec& x) { return Vec(A * x); }, 2.0), std::invalid_argument);
  const Chart ok(Box::cube(2, 0, 1), [A](const Vec& x) { return Vec(A * x); }, 3.0);
  EXPECT_NEAR(ok.observed_lipschitz(), 3.0, 1e-9);
}

TEST(MetricDerivative, LinearChartMatchesMatrixNorm) {
  Mat A(3, 2);
  A << 1, 2, 0, 1, -1, 0.5;
  const Chart c = linear_chart(A, Box::cube(2, -1, 1));
  const MetricDerivativeEstimate est = metric_derivative(c, v2(0.1, -0.3));
  for (std::size_t k = 0; k < est.directions.size(); ++k)
    EXPECT_NEAR(est.values[k], (A * est.directions[k]).norm(), 1e-10);
  EXPECT_TRUE(est.reliable);
  EXPECT_LT((est.gram - A.transpose() * A).norm(), 1e-9);
  ASSERT_TRUE(est.differential.has_value());
  EXPECT_LT((*est.differential - A).norm(), 1e-9);
}

TEST(MetricDerivative, TiltedGraphGram) {
  const Chart c = graph_chart([](const Vec& x) { return x(0); }, 1.0, Box::cube(2, 0, 1));
  const MetricDerivativeEstimate est = metric_derivative(c, v2(0.4, 0.6));
  EXPECT_LT((est.gram - Eigen::Vector2d(2, 1).asDiagonal().toDenseMatrix()).norm(), 1e-9);
  EXPECT_LT(est.euclidean_residual, 1e-9);
}

TEST(MetricDerivative, MetricAmbientAgreesWithNormedAmbient) {
  const auto height = [](const Vec& x) { return std::sin(x(0)) * std::cos(x(1)); };
  const Chart normed = graph_chart(height, std::sqrt(2.0), Box::cube(2, 0, 1));
  const Chart metric(Box::cube(2, 0, 1), [&normed](const Vec& x) { return normed(x); }, std::sqrt(3.0),
                     Ambient::metric(3, [](const Vec& a, const Vec& b) { return (a - b).norm(); }, "euclidean-metric"));
  const Vec x = v2(0.3, 0.7);
  const MetricDerivativeEstimate a = metric_derivative(normed, x), b = metric_derivative(metric, x);
  for (std::size_t k = 0; k < a.values.size(); ++k) EXPECT_NEAR(a.values[k], b.values[k], 1e-9);
  EXPECT_FALSE(b.differential.has_value());
  EXPECT_NEAR(md_jacobian(metric, x, VolumeTag::bh).value, md_jacobian(normed, x, VolumeTag::bh).value, 1e-7);
}

TEST(MetricDerivative, BoundaryPointsAreRejected) {
  const Chart c = identity_square();
  EXPECT_THROW(metric_derivative(c, v2(0.0, 0.5)), DimensionError);
  EXPECT_THROW(metric_derivative(c, v2(0.5, 0.9995)), DimensionError);
  EXPECT_NO_THROW(metric_derivative(c, v2(0.5, 0.998)));
}

TEST(MetricDerivative, KinkIsUnreliable) {
  // Difference quotients at the origin oscillate like 2 + sin(log h).
  const Chart c(
      Box::cube(1, -1, 1),
      [](const Vec& x) {
        const double t = x(0);
        return (Vec(1) << (t == 0 ? 0.0 : t * (2 + std::sin(std::log(std::abs(t)))))).finished();
      },
      3.5);
  EXPECT_FALSE(metric_derivative(c, Vec::Zero(1)).reliable);
  EXPECT_TRUE(metric_derivative(c, (Vec(1) << 0.5).finished()).reliable);
}

TEST(InfinitesimallyEuclidean, EuclideanVersusSupNorm) {
  const auto samples = grid_samples(0.1, 0.9, 4);
  const Chart graph = graph_chart([](const Vec& x) { return 0.5 * x(0) * x(1); }, 1.0, Box::cube(2, 0, 1));
  const EuclideanReport yes = is_infinitesimally_euclidean(graph, samples, 1e-6);
  EXPECT_EQ(yes.fraction_euclidean, 1.0);

  const Chart sup(Box::cube(2, 0, 1), [](const Vec& x) { return x; }, 1.0, Ambient::normed(Seminorm::p_norm(2, INFINITY)));
  const EuclideanReport no = is_infinitesimally_euclidean(sup, samples, 1e-3);
  EXPECT_EQ(no.fraction_euclidean, 0.0);
  EXPECT_GT(no.worst_residual, 0.05);
}

TEST(MuMeasure, FlatExamples) {
  for (VolumeTag tag : kAllVolumeTags) {
    EXPECT_NEAR(mu_measure(single(identity_square()), tag, everything).value, 1.0, 1e-10);
    const Chart doubled = linear_chart(2.0 * Mat::Identity(2, 2), Box::cube(2, 0, 1));
    EXPECT_NEAR(mu_measure(single(doubled), tag, everything).value, 4.0, 1e-10);
  }
}

TEST(MuMeasure, UnitSphereArea) {
  const MuMeasureResult r = mu_measure(sphere_atlas(), VolumeTag::bh, everything, {64});
  EXPECT_NEAR(r.value, 4 * std::numbers::pi, 2e-3);
  EXPECT_TRUE(r.warnings.empty());
}

TEST(MuMeasure, Additivity) {
  const Atlas a = single(graph_chart([](const Vec& x) { return x(0) * x(0); }, 2.0, Box::cube(2, 0, 1)));
  auto left = [](const Vec& p) { return p(0) < 0.5; };
  auto right = [](const Vec& p) { return p(0) >= 0.5; };
  for (VolumeTag tag : {VolumeTag::bh, VolumeTag::sr}) {
    const double whole = mu_measure(a, tag, everything, {32}).value;
    EXPECT_NEAR(mu_measure(a, tag, left, {32}).value + mu_measure(a, tag, right, {32}).value, whole, 1e-12);
  }
}

TEST(MuMeasure, ChartIndependence) {
  const auto warp = [](double u) { return u + 0.1 * std::sin(std::numbers::pi * u); };
  const Chart warped(Box::cube(2, 0, 1), [&](const Vec& x) { return v2(warp(x(0)), warp(x(1))); },
                     1.0 + 0.1 * std::numbers::pi);
  const Chart stretched = linear_chart((Mat(2, 2) << 2, 0, 0, 1).finished(),
                                       Box{v2(0, 0), v2(0.5, 1)});
  for (VolumeTag tag : kAllVolumeTags) {
    EXPECT_NEAR(mu_measure(single(warped), tag, everything, {64}).value, 1.0, 1e-3);
    EXPECT_NEAR(mu_measure(single(stretched), tag, everything, {64}).value, 1.0, 1e-10);
  }
}

TEST(MuMeasure, DegenerateChartWarns) {
  const Chart flat(Box::cube(2, 0, 1), [](const Vec& x) { return (Vec(3) << x(0), 0.0, 0.0).finished(); }, 1.0);
  const MuMeasureResult r = mu_measure(single(flat), VolumeTag::bh, everything, {8});
  EXPECT_EQ(r.value, 0.0);
  EXPECT_EQ(r.degenerate_cells, 64);
  EXPECT_FALSE(r.warnings.empty());
}

TEST(MapJacobian, ProjectionOfTiltedPlane) {
  const Chart tilted = graph_chart([](const Vec& x) { return x(0); }, 1.0, Box::cube(2, 0, 1));
  const auto project = [](const Vec& p) { return Vec(p.head(2)); };
  for (VolumeTag tag : kAllVolumeTags) {
    const MapJacobianResult r = map_jacobian(tilted, project, 1.0, Ambient::euclidean(2), v2(0.5, 0.5), tag);
    EXPECT_NEAR(r.value, 1.0 / std::sqrt(2.0), 1e-9) << to_string(tag);
  }
}

TEST(MapJacobian, DegenerateBaseThrows) {
  const Chart flat(Box::cube(2, 0, 1), [](const Vec& x) { return (Vec(3) << x(0), 0.0, 0.0).finished(); }, 1.0);
  EXPECT_THROW(map_jacobian(flat, [](const Vec& p) { return p; }, 1.0, Ambient::euclidean(3), v2(0.5, 0.5), VolumeTag::bh),
               GeometryError);
}

TEST(MapJacobian, ShortMapsNeverExpand) {
  Rng rng(11);
  std::uniform_real_distribution<double> unif(-1, 1);
  const Chart sheet = graph_chart([](const Vec& x) { return 0.3 * std::sin(3 * x(0)) * x(1); }, 1.0, Box::cube(2, 0, 1));
  for (int trial = 0; trial < 8; ++trial) {
    Mat B(3, 3);
    for (int i = 0; i < 9; ++i) B.data()[i] = unif(rng);
    B /= Eigen::JacobiSVD<Mat>(B).singularValues()(0);
    const auto f = [B](const Vec& p) { return Vec((B * p).array().sin()); };
    const Vec x = v2(0.2 + 0.6 * std::abs(unif(rng)), 0.2 + 0.6 * std::abs(unif(rng)));
    for (VolumeTag tag : kAllVolumeTags) {
      const MapJacobianResult r = map_jacobian(sheet, f, 1.0, Ambient::euclidean(3), x, tag);
      EXPECT_LE(r.value, 1.0 + 1e-6) << to_string(tag);
    }
  }
}

TEST(IsometryCheck, RigidMotionPassesScalingFails) {
  const Chart sheet = graph_chart([](const Vec& x) { return x(0) * x(1); }, std::sqrt(2.0), Box::cube(2, 0, 1));
  const Mat R = Eigen::AngleAxisd(0.7, Eigen::Vector3d(1, 2, 3).normalized()).toRotationMatrix();
  const auto samples = grid_samples(0.1, 0.9, 3);
  const IsometryReport rigid =
      infinitesimal_isometry_check(sheet, [R](const Vec& p) { return Vec(R * p); }, 1.0, Ambient::euclidean(3), samples, 1e-8);
  EXPECT_EQ(rigid.fraction_passing, 1.0);
  const IsometryReport scaled =
      infinitesimal_isometry_check(sheet, [](const Vec& p) { return Vec(1.01 * p); }, 1.01, Ambient::euclidean(3), samples, 1e-4);
  EXPECT_EQ(scaled.fraction_passing, 0.0);
}

TEST(AreaFormula, Identity) {
  const Chart square = identity_square();
  const AreaFormulaResult r = area_formula_check(single(square), [](const Vec& p) { return p; }, 1.0,
                                                 [](const Vec&) { return 1.0; }, VolumeTag::bh, square, {16});
  EXPECT_NEAR(r.lhs, 1.0, 1e-12);
  EXPECT_NEAR(r.rhs, 1.0, 1e-12);
  EXPECT_EQ(r.max_multiplicity, 1);
  EXPECT_EQ(r.capped_pieces, 0);
}

TEST(AreaFormula, FoldCountsMultiplicityTwo) {
  const Chart domain = linear_chart(Mat::Identity(2, 2), Box{v2(0, 0), v2(2, 1)});
  const Chart image = identity_square();
  const auto fold = [](const Vec& p) { return v2(std::min(p(0), 2.0 - p(0)), p(1)); };
  const AreaFormulaResult r =
      area_formula_check(single(domain), fold, 1.0, [](const Vec&) { return 1.0; }, VolumeTag::bh, image, {16});
  EXPECT_NEAR(r.lhs, 2.0, 1e-12);
  EXPECT_NEAR(r.rhs, 2.0, 1e-12);
  EXPECT_EQ(r.max_multiplicity, 2);
}

TEST(AreaFormula, MisalignedFoldStaysWithinBudget) {
  const Chart domain = linear_chart(Mat::Identity(2, 2), Box{v2(0, 0), v2(2, 1)});
  const Chart image = identity_square();
  const auto fold = [](const Vec& p) { return v2(std::min(p(0), 2.0 - p(0)), p(1)); };
  const AreaFormulaResult r =
      area_formula_check(single(domain), fold, 1.0, [](const Vec&) { return 1.0; }, VolumeTag::bh, image, {15});
  EXPECT_NEAR(r.rhs, 2.0, 1e-3);
  // The midpoint rule drops the column of cells centred on the fold line.
  EXPECT_LE(std::abs(r.lhs - r.rhs), 2.0 / 15 + r.error_budget + 1e-9);
  EXPECT_GT(r.pieces, 225);
}

TEST(AreaFormula, StretchWithIndicator) {
  const Chart domain = identity_square();
  const Chart image = linear_chart(Mat::Identity(2, 2), Box{v2(0, 0), v2(3, 1)});
  const auto stretch = [](const Vec& p) { return v2(3 * p(0), p(1)); };
  const auto left = [](const Vec& p) { return p(0) < 0.5 ? 1.0 : 0.0; };
  for (VolumeTag tag : kAllVolumeTags) {
    const AreaFormulaResult r = area_formula_check(single(domain), stretch, 3.0, left, tag, image, {16});
    EXPECT_NEAR(r.lhs, 1.5, 1e-12) << to_string(tag);
    EXPECT_NEAR(r.rhs, 1.5, 1e-12) << to_string(tag);
  }
}

TEST(AreaFormula, FoldedInterval) {
  // Odd weight about the fold point: both sides cancel.
  const Chart domain(Box::cube(1, 0.0, std::numbers::pi), [](const Vec& t) { return t; }, 1.0);
  const auto wrap = [](const Vec& t) { return (Vec(1) << std::numbers::pi / 2 - std::abs(t(0) - std::numbers::pi / 2)).finished(); };
  const Chart image = linear_chart(Mat::Identity(1, 1), Box::cube(1, 0.0, std::numbers::pi / 2));
  const AreaFormulaResult r =
      area_formula_check(single(domain), wrap, 1.0, [](const Vec& t) { return std::cos(t(0)); }, VolumeTag::bh, image, {32});
  EXPECT_NEAR(r.lhs, 0.0, 1e-12);
  EXPECT_NEAR(r.rhs, r.lhs, 5e-3);
  EXPECT_EQ(r.max_multiplicity, 2);
}

TEST(ObservedOrder, SlopeAndExactness) {
  const std::vector<double> h{0.1, 0.05, 0.025};
  EXPECT_NEAR(observed_order(h, {1e-2, 2.5e-3, 6.25e-4}).order, 2.0, 1e-12);
  EXPECT_TRUE(observed_order(h, {1e-16, 0, 3e-15}).exact);
}
