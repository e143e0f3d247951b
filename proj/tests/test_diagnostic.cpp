#include <gtest/gtest.h>

#include <algorithm>

#include "finsler/diagnostic.hpp"

using namespace finsler;

namespace {

bool has_flag(const DiagnosticReport& r, const std::string& prefix) {
  return std::any_of(r.flags.begin(), r.flags.end(), [&](const std::string& f) { return f.rfind(prefix, 0) == 0; });
}

}  // namespace

TEST(MapDiagnostic, FlatIdentityIsIsometry) {
  const DiagnosticReport r = map_rigidity_diagnostic(flat_square_identity_input());
  for (const auto& c : r.checks) {
    EXPECT_TRUE(c.available) << c.name;
    EXPECT_TRUE(c.holds) << c.name << " " << c.value;
  }
  EXPECT_NEAR(r.check("mass_bound").value, 1.0, 1e-10);
  EXPECT_TRUE(r.hypotheses_hold);
  EXPECT_TRUE(r.isometry_observed);
  EXPECT_TRUE(r.flags.empty());
}

TEST(MapDiagnostic, ShortenedMapFailsVolumeHypotheses) {
  MapDiagnosticInput in = flat_square_identity_input();
  in.map = [](const Vec3& p) { return Vec3(0.5 * p.x(), p.y(), p.z()); };
  in.inverse = [](const Vec3& p) { return Vec3(2 * p.x(), p.y(), p.z()); };
  Mat half = Mat::Zero(3, 2);
  half(0, 0) = 0.5;
  half(1, 1) = 1.0;
  in.target_atlas.charts = {linear_chart(half, Box::cube(2, 0, 1))};
  const DiagnosticReport r = map_rigidity_diagnostic(in);
  EXPECT_TRUE(r.check("one_lipschitz").holds);
  EXPECT_TRUE(r.check("mass_bound").holds);
  EXPECT_FALSE(r.check("volume_preservation").holds);
  EXPECT_FALSE(r.check("infinitesimal_isometry").holds);
  EXPECT_FALSE(r.hypotheses_hold);
  EXPECT_NEAR(r.check("distance_preservation").value, 0.5, 0.05);
  EXPECT_TRUE(has_flag(r, "hypothesis fails: volume_preservation"));
}

TEST(MapDiagnostic, ShortcutSphereKeepsVolumeButShrinksDistances) {
  const MapDiagnosticInput in = shortcut_sphere_input();
  ASSERT_GT(in.isometry_samples.size(), 60u);
  const DiagnosticReport r = map_rigidity_diagnostic(in);
  EXPECT_TRUE(r.check("one_lipschitz").holds) << r.check("one_lipschitz").value;
  EXPECT_TRUE(r.check("mass_bound").holds);
  EXPECT_TRUE(r.check("volume_preservation").holds) << r.check("volume_preservation").value;
  EXPECT_TRUE(r.check("infinitesimal_isometry").holds) << r.check("infinitesimal_isometry").detail;
  EXPECT_TRUE(r.hypotheses_hold);
  EXPECT_FALSE(r.isometry_observed);
  EXPECT_NEAR(r.profile.min_ratio, 0.5, 1e-6);
  EXPECT_TRUE(has_flag(r, "target not an essential length space"));
}

TEST(MapDiagnostic, ZigzagIntrinsicBelowEssential) {
  const DiagnosticReport r = map_rigidity_diagnostic(zigzag_input(5, 2, 10));
  EXPECT_TRUE(r.check("one_lipschitz").holds) << r.check("one_lipschitz").value;
  EXPECT_TRUE(r.check("mass_bound").holds);
  EXPECT_TRUE(r.check("volume_preservation").holds);
  EXPECT_TRUE(r.check("infinitesimal_isometry").holds);
  EXPECT_TRUE(r.hypotheses_hold);
  EXPECT_FALSE(r.isometry_observed);
  EXPECT_LT(r.profile.min_ratio, 0.97);
  EXPECT_TRUE(has_flag(r, "target not an essential length space"));
}

TEST(MapDiagnostic, MissingPiecesAreUnavailable) {
  MapDiagnosticInput in = flat_square_identity_input();
  in.inverse = nullptr;
  in.source_distance = nullptr;
  const DiagnosticReport r = map_rigidity_diagnostic(in);
  EXPECT_FALSE(r.check("volume_preservation").available);
  EXPECT_FALSE(r.check("one_lipschitz").available);
  EXPECT_TRUE(has_flag(r, "unavailable: volume_preservation"));
  EXPECT_THROW(r.check("nonexistent"), std::out_of_range);
}
