#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "finsler/length_space.hpp"
#include "finsler/rectifiable.hpp"

namespace finsler {

// Everything the diagnostic needs about a map f between two surfaces in R^3.
struct MapDiagnosticInput {
  std::string name;
  Atlas source_atlas;  // charts of the source, for its mass and the metric derivatives
  Atlas target_atlas;  // charts of the target, for its volume
  std::function<Vec3(const Vec3&)> map;
  std::function<Vec3(const Vec3&)> inverse;  // optional; enables the ball checks
  double map_lipschitz = 1.0;
  Ambient target_ambient = Ambient::euclidean(3);  // metric used for md(f o phi)
  std::shared_ptr<const DistanceOracle> source_distance, target_distance;
  std::vector<Vec3> points;                    // source points for the distance profiles
  std::vector<std::pair<int, Vec>> isometry_samples;  // (chart index, chart coordinates)
  std::vector<std::pair<Vec3, double>> balls;  // Euclidean balls (center, radius) in the source
};

struct DiagnosticOptions {
  VolumeTag tag = VolumeTag::bh;
  double lipschitz_tol = 1e-6;
  double volume_tol = 1e-2;
  double isometry_tol = 1e-4;
  double isometry_fraction = 0.99;
  double distance_tol = 1e-3;
  int cells_per_dim = 24;
};

struct DiagnosticCheck {
  std::string name;
  bool available = true;
  bool holds = false;
  double value = 0.0;
  double reference = 0.0;
  std::string detail;
};

struct DiagnosticReport {
  std::string name;
  std::vector<DiagnosticCheck> checks;  // one_lipschitz, mass_bound, volume_preservation, infinitesimal_isometry, distance_preservation
  bool hypotheses_hold = false;         // the first four checks
  bool isometry_observed = false;
  LipschitzProfile profile;
  std::vector<std::string> flags;

  const DiagnosticCheck& check(const std::string& name) const;
};

// Runs (i) the 1-Lipschitz profile, (ii) source mass against target volume, (iii) mass of
// sampled balls against the volume of their images, (iv) the infinitesimal isometry
// fraction and (v) distance preservation. The report is empirical evidence only.
DiagnosticReport map_rigidity_diagnostic(const MapDiagnosticInput& input, const DiagnosticOptions& opts = {});

// Ready-made inputs: identity of the flat unit square, the identity from the round sphere
// onto the sphere with the half-cost circle, and the identity of the zigzag surface from
// its essential distance onto its induced length distance.
MapDiagnosticInput flat_square_identity_input(int points = 24, std::uint64_t seed = kDefaultSeed);
MapDiagnosticInput shortcut_sphere_input(int circle_samples = 256, int points = 40, std::uint64_t seed = kDefaultSeed);
MapDiagnosticInput zigzag_input(int n_max = 6, int level = 3, int points = 16, std::uint64_t seed = kDefaultSeed);

}  // namespace finsler
