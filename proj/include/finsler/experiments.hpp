#pragma once

#include <string>
#include <vector>

#include "finsler/json_io.hpp"
#include "finsler/length_space.hpp"
#include "finsler/rectifiable.hpp"
#include "finsler/volume.hpp"

namespace finsler {

// Hull of random symmetric points on the unit circle; dominates |.| with min ratio 1.
Seminorm random_circle_polygon_norm(Rng& rng, int half_count);

struct RigidityBatchOptions {
  int count = 200;
  int min_half_vertices = 3;
  int max_half_vertices = 12;
  double min_ratio = 1.01;  // rejection threshold on max s(v)/|v|
  std::vector<VolumeTag> tags{VolumeTag::bh, VolumeTag::mstar};
  std::uint64_t seed = kDefaultSeed;
};

struct RigidityBatchTag {
  VolumeTag tag = VolumeTag::bh;
  int above_one = 0;
  double min_jacobian = 0.0;
  int contradictions = 0;
};

struct RigidityBatchResult {
  int count = 0;
  int rejected = 0;  // candidates too close to Euclidean
  std::vector<RigidityBatchTag> tags;
  bool all_above_one() const;
};

// rigidity_test over seeded random polygon norms that dominate |.| and are not Euclidean.
RigidityBatchResult rigidity_batch(const RigidityBatchOptions& opts = {});

// Planar test maps for the area formula with a smooth weight and a closed-form integral.
//   identity     [0,1]^2 onto itself
//   fold         [0,2]x[0,1] folded onto [0,1]^2, multiplicity 2
//   linear_det3  [0,1]^2 under a symmetric matrix of determinant 3
struct AreaBenchmark {
  std::string name;
  Atlas atlas;
  Chart::Map map;
  double lipschitz = 1.0;
  std::function<double(const Vec&)> weight;
  Chart image;
  double exact = 0.0;  // both sides of the formula converge to this
  int multiplicity = 1;
};

std::vector<std::string> area_benchmark_names();
AreaBenchmark area_benchmark(const std::string& name);  // std::invalid_argument on unknown names

struct AreaSweepRow {
  int cells = 0;
  double h = 0.0;
  AreaFormulaResult result;
  double error = 0.0;  // max of |lhs - exact| and |rhs - exact|
};

struct AreaSweep {
  std::string name;
  VolumeTag tag = VolumeTag::bh;
  std::vector<AreaSweepRow> rows;
  ObservedOrder order;  // of the error against h
};

AreaSweep area_sweep(const AreaBenchmark& bench, VolumeTag tag, const std::vector<int>& cells);

struct ShortcutSphereOptions {
  int circle_samples = 256;
  int points = 64;
  int triples = 10'000;
  int isometry_samples = 240;
  double circle_margin = 0.05;  // isometry samples stay this far from the circle
  std::uint64_t seed = kDefaultSeed;
};

struct ShortcutSphereCertificate {
  double tolerance = 0.0;  // oracle discretization error
  MetricAxiomReport axioms;
  long pairs = 0;
  double min_ratio_to_round = 0.0;  // min d/D over sampled pairs
  double max_ratio_to_round = 0.0;
  bool two_sided_bound = false;     // D/2 <= d <= D within tolerance
  double isometry_fraction = 0.0;
  int isometry_samples = 0;
  double antipodal_distance = 0.0;  // antipodes on the circle
  LipschitzProfile profile;         // identity from the round sphere
};

ShortcutSphereCertificate shortcut_sphere_certificate(const ShortcutSphereOptions& opts = {});

struct ZigzagExperimentOptions {
  int n_max = 6;
  std::vector<int> levels{3, 4};
  int points = 12;        // random points for the chord comparison
  int profile_level = 2;  // coarser graphs only overestimate the intrinsic distance
  std::uint64_t seed = kDefaultSeed;
};

struct ZigzagLevelRow {
  int level = 0;
  long nodes = 0;
  double graph = 0.0;
  double essential = 0.0;
  double margin = 0.0;
};

struct ZigzagCertificate {
  std::vector<ZigzagLevelRow> rows;
  double margin_spread = 0.0;  // relative change of the margin over the two finest levels
  double chord_min_ratio = 0.0;  // min d_i / d, at least 1
  double chord_max_ratio = 0.0;  // the reported L
  long pairs = 0;
};

// Distances between (0,0,0) and (1,0,0) with and without the segment between them
// removed, and the intrinsic distance against the chord on random pairs.
ZigzagCertificate zigzag_certificate(const ZigzagExperimentOptions& opts = {});

Json to_json(const RigidityBatchResult& r);
Json to_json(const AreaSweep& s);
Json to_json(const ShortcutSphereCertificate& c);
Json to_json(const ZigzagCertificate& c);
Json to_json(const CounterexampleCertificate& c);
Json to_json(const MetricAxiomReport& r);
Json to_json(const LipschitzProfile& p);

}  // namespace finsler
