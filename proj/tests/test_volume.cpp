#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "finsler/errors.hpp"
#include "finsler/volume.hpp"

using namespace finsler;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Hull of random symmetric points on the unit circle: dominates |.| with min ratio 1.
Seminorm random_circle_polygon_norm(Rng& rng, int half_count) {
  std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
  Mat V(half_count, 2);
  for (int i = 0; i < half_count; ++i) {
    const double a = angle(rng);
    V(i, 0) = std::cos(a);
    V(i, 1) = std::sin(a);
  }
  const Polytope P = Polytope::from_vertices(V, true);
  return Seminorm::polytopal(P.facets());
}

}  // namespace

TEST(Jacobian, EuclideanIsOneForEveryDefinition) {
  for (int m : {1, 2, 3, 5})
    for (VolumeTag t : kAllVolumeTags) {
      const JacobianResult r = jacobian(t, Seminorm::euclidean(m));
      EXPECT_EQ(r.value, 1.0) << to_string(t) << " m=" << m;
      EXPECT_EQ(r.exactness, Exactness::exact);
    }
}

TEST(Jacobian, PolytopePathsOnEllipsoidsAgreeWithClosedForm) {
  // The same Euclidean ball pushed through the discretized path.
  for (int m : {2, 3}) {
    const Seminorm e = Seminorm::callable(m, [](const Vec& v) { return v.norm(); });
    for (VolumeTag t : kAllVolumeTags) {
      const JacobianResult r = jacobian(t, e);
      EXPECT_NEAR(r.value, 1.0, m == 2 ? 1e-4 : 5e-3) << to_string(t) << " m=" << m;
      EXPECT_NE(r.exactness, Exactness::exact);
    }
  }
}

TEST(Jacobian, GramIsSquareRootOfDeterminant) {
  Mat G(2, 2);
  G << 4, 1, 1, 2;
  for (VolumeTag t : kAllVolumeTags) EXPECT_NEAR(jacobian(t, Seminorm::gram(G)).value, std::sqrt(7.0), 1e-14);
}

TEST(Jacobian, Examples) {
  EXPECT_NEAR(jacobian(VolumeTag::bh, Seminorm::p_norm(2, kInf)).value, std::numbers::pi / 4.0, 1e-14);
  const JacobianResult ms = jacobian(VolumeTag::mstar, Seminorm::p_norm(2, 1.0));
  EXPECT_NEAR(ms.value, 2.0, 1e-14);
  EXPECT_EQ(ms.exactness, Exactness::exact);
  EXPECT_NEAR(jacobian(VolumeTag::sr, regular_2ngon_norm(4)).value, 1.0, 1e-8);
}

TEST(Jacobian, DegenerateSeminormIsZero) {
  Mat G = Mat::Zero(3, 3);
  G(0, 0) = G(1, 1) = 1;
  for (VolumeTag t : kAllVolumeTags) {
    const JacobianResult r = jacobian(t, Seminorm::gram(G));
    EXPECT_TRUE(r.degenerate);
    EXPECT_EQ(r.value, 0.0);
  }
}

TEST(Jacobian, ScalingLaw) {
  Mat F(3, 2);
  F << 1, 0, 0.3, 1, -0.6, 0.8;
  Mat F3(4, 3);
  F3 << 1, 0, 0, 0, 1, 0, 0, 0, 1, 0.4, -0.4, 0.5;
  const std::vector<Seminorm> norms{Seminorm::polytopal(F), Seminorm::p_norm(2, 3.0), Seminorm::polytopal(F3),
                                    Seminorm::p_norm(3, 1.0)};
  for (const Seminorm& s : norms)
    for (double lambda : {0.5, 1.7})
      for (VolumeTag t : kAllVolumeTags) {
        const double base = jacobian(t, s).value;
        const double scaled = jacobian(t, s.scaled(lambda)).value;
        EXPECT_NEAR(scaled, std::pow(lambda, s.dim()) * base, 1e-6 * std::max(1.0, scaled))
            << to_string(t) << " m=" << s.dim();
      }
}

TEST(Jacobian, DefinitionsAreComparable) {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const Seminorm s = random_circle_polygon_norm(rng, 3 + trial % 6);
    double lo = kInf, hi = 0.0;
    for (VolumeTag t : kAllVolumeTags) {
      const double v = jacobian(t, s).value;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    EXPECT_LE(hi / lo, 10.0);
  }
}

TEST(Jacobian, SampledPathInFourDimensions) {
  BallResolution res;
  res.qmc.samples = 400'000;
  res.directions_nd = 6000;
  const Seminorm e = Seminorm::callable(4, [](const Vec& v) { return v.norm(); });
  for (VolumeTag t : kAllVolumeTags) {
    const JacobianResult r = jacobian(t, e, res);
    EXPECT_NEAR(r.value, 1.0, t == VolumeTag::bh ? 5e-3 : 1e-6) << to_string(t);
    EXPECT_EQ(r.exactness, t == VolumeTag::mstar ? Exactness::heuristic : Exactness::sampled);
  }
  // l-infinity in R^4: bh = alpha_4 / 16, mstar = 1 (the cube is its own parallelepiped).
  const Seminorm sup = Seminorm::p_norm(4, kInf);
  EXPECT_NEAR(jacobian(VolumeTag::bh, sup, res).value, unit_ball_volume(4) / 16.0, 2e-3);
  EXPECT_NEAR(jacobian(VolumeTag::mstar, sup, res).value, 1.0, 1e-12);
}

TEST(ShortMaps, Examples) {
  const Seminorm e = Seminorm::euclidean(2);
  const MonotonicityCheck id = check_short_map_monotonicity(VolumeTag::bh, e, e, Mat::Identity(2, 2));
  EXPECT_TRUE(id.holds);
  EXPECT_NEAR(id.image_measure, id.source_measure, 1e-15);
  const MonotonicityCheck half = check_short_map_monotonicity(VolumeTag::sr, e, e, 0.5 * Mat::Identity(2, 2));
  EXPECT_TRUE(half.holds);
  EXPECT_NEAR(half.image_measure, 0.25, 1e-15);

  // The cube norm scaled by sqrt(2) dominates |.|; the identity into |.| is short.
  const Seminorm big_sup = Seminorm::p_norm(2, kInf).scaled(std::sqrt(2.0));
  const MonotonicityCheck c = check_short_map_monotonicity(VolumeTag::bh, big_sup, e, Mat::Identity(2, 2));
  EXPECT_TRUE(c.holds);
  // mu_src([0,1]^2) = pi / vol(square of side sqrt 2) = pi / 2.
  EXPECT_NEAR(c.source_measure, std::numbers::pi / 2.0, 1e-12);
  EXPECT_NEAR(c.image_measure, 1.0, 1e-15);

  EXPECT_THROW(check_short_map_monotonicity(VolumeTag::bh, e, e, 2.0 * Mat::Identity(2, 2)), std::invalid_argument);
}

TEST(ShortMaps, RandomShortMapsNeverIncreaseVolume) {
  Rng rng(23);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 40; ++trial) {
    const Seminorm src = random_circle_polygon_norm(rng, 4 + trial % 5);
    const Seminorm dst = random_circle_polygon_norm(rng, 4 + trial % 3);
    Mat A(2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) A(i, j) = normal(rng);
    double op = 0.0;
    for (const Vec& u : sphere_directions(2, 4096)) op = std::max(op, dst(A * u) / src(u));
    // Also polish at the polytope vertices where the ratio peaks.
    const Polytope ball = unit_ball_polytope(src);
    for (int r = 0; r < ball.vertices().rows(); ++r) op = std::max(op, dst(A * ball.vertices().row(r).transpose()));
    A /= op * (1 + 1e-9);
    for (VolumeTag t : kAllVolumeTags) EXPECT_TRUE(check_short_map_monotonicity(t, src, dst, A).holds) << to_string(t);
  }
}

TEST(Rigidity, Examples) {
  const RigidityVerdict e = rigidity_test(VolumeTag::bh, Seminorm::euclidean(2));
  EXPECT_TRUE(e.hypotheses_hold);
  EXPECT_TRUE(e.conclusion_holds);
  EXPECT_FALSE(e.witness_direction.has_value());

  const RigidityVerdict big = rigidity_test(VolumeTag::bh, Seminorm::euclidean(2).scaled(1.1));
  EXPECT_TRUE(big.dominates_euclidean);
  EXPECT_FALSE(big.jacobian_at_most_one);
  EXPECT_FALSE(big.hypotheses_hold);
  EXPECT_NEAR(big.jacobian.value, 1.21, 1e-12);

  const RigidityVerdict oct = rigidity_test(VolumeTag::sr, regular_2ngon_norm(4));
  EXPECT_TRUE(oct.hypotheses_hold);
  EXPECT_FALSE(oct.conclusion_holds);
  EXPECT_FALSE(oct.contradiction());
  ASSERT_TRUE(oct.witness_direction.has_value());
  const double a = std::atan2((*oct.witness_direction)(1), (*oct.witness_direction)(0));
  EXPECT_NEAR(std::remainder(a - std::numbers::pi / 8.0, std::numbers::pi / 4.0), 0.0, 1e-6);
}

TEST(Rigidity, RigidDefinitionsDetectNonEuclideanDominatingNorms) {
  Rng rng(29);
  int tested = 0;
  while (tested < 60) {
    const Seminorm s = random_circle_polygon_norm(rng, 3 + tested % 10);
    if (compare_to_euclidean(s).max_ratio < 1.01) continue;
    ++tested;
    for (VolumeTag t : {VolumeTag::bh, VolumeTag::mstar}) {
      const RigidityVerdict v = rigidity_test(t, s);
      EXPECT_GT(v.jacobian.value, 1.0) << to_string(t);
      EXPECT_FALSE(v.contradiction());
    }
  }
}

TEST(Counterexample, PolygonNorms) {
  const CounterexampleCertificate c2 = sr_counterexample(2);
  EXPECT_TRUE(c2.certified());
  EXPECT_NEAR(c2.max_ratio, std::sqrt(2.0), 1e-9);
  const CounterexampleCertificate c4 = sr_counterexample(4);
  EXPECT_TRUE(c4.certified());
  EXPECT_NEAR(c4.max_ratio, 1.0 / std::cos(std::numbers::pi / 8.0), 1e-9);
  EXPECT_NEAR(c4.jacobian_sr, 1.0, 1e-6);
  const CounterexampleCertificate c64 = sr_counterexample(64);
  EXPECT_LT(c64.max_ratio - 1.0, 1e-3);
  EXPECT_THROW(sr_counterexample(1), std::invalid_argument);
}

TEST(VolumeTags, RoundTrip) {
  for (VolumeTag t : kAllVolumeTags) EXPECT_EQ(parse_volume_tag(to_string(t)), t);
  EXPECT_THROW(parse_volume_tag("hausdorff"), std::invalid_argument);
  EXPECT_FALSE(euclidean_rigidity_claimed(VolumeTag::sr));
  EXPECT_TRUE(euclidean_rigidity_claimed(VolumeTag::ir));
}
