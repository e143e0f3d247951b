#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "finsler/convex.hpp"
#include "finsler/norms.hpp"

namespace finsler {

// The four Finsler volume definitions, each a rule normalizing one body attached to the
// unit ball of a normed space:
//   bh     the unit ball itself has measure alpha_m (Busemann-Hausdorff)
//   mstar  the minimal enclosing parallelepiped has measure 2^m (Gromov mass-star)
//   sr     the minimal enclosing ellipsoid has measure alpha_m (circumscribed Riemannian)
//   ir     the maximal inscribed ellipsoid has measure alpha_m (inscribed Riemannian)
enum class VolumeTag { bh, mstar, sr, ir };

inline constexpr VolumeTag kAllVolumeTags[] = {VolumeTag::bh, VolumeTag::mstar, VolumeTag::sr, VolumeTag::ir};

std::string_view to_string(VolumeTag tag);
VolumeTag parse_volume_tag(std::string_view name);  // throws std::invalid_argument

// Whether the definition is known to be Euclidean rigid (false only for sr).
bool euclidean_rigidity_claimed(VolumeTag tag);

enum class Exactness {
  exact,        // closed form, or exact polytope computation on an exact unit ball
  discretized,  // exact computation on a secant polytope of a curved unit ball
  heuristic,    // parallelepiped search without optimality certificate
  sampled,      // quasi-Monte Carlo or sampled boundary (m >= 4)
};

std::string_view to_string(Exactness e);

struct BallResolution {
  int directions_2d = 512;
  int icosphere_level = 4;              // 2562 vertices
  std::size_t directions_nd = 20'000;   // boundary samples for m >= 4
  QmcOptions qmc{};
  EllipsoidOptions ellipsoid{};
  ParallelepipedOptions parallelepiped{};
};

struct JacobianResult {
  VolumeTag tag = VolumeTag::bh;
  double value = 0.0;
  Exactness exactness = Exactness::exact;
  bool degenerate = false;
  double std_error = 0.0;    // QMC standard error propagated to the Jacobian
  double ellipsoid_gap = 0.0;
};

// Unit ball of s as a polytope (m <= 3): exact for polytopal norms, otherwise the hull of
// radial boundary points u / s(u).
Polytope unit_ball_polytope(const Seminorm& s, const BallResolution& res = {});

JacobianResult jacobian(VolumeTag tag, const Seminorm& s, const BallResolution& res = {});

struct MonotonicityCheck {
  bool holds = false;
  double operator_norm = 0.0;   // sampled sup dst(A u) / src(u)
  double source_measure = 0.0;  // mu_src([0,1]^m)
  double image_measure = 0.0;   // mu_dst(A [0,1]^m)
};

// Short linear maps do not increase volume. Throws std::invalid_argument when A is
// not short (sampled operator norm above 1 + 1e-9).
MonotonicityCheck check_short_map_monotonicity(VolumeTag tag, const Seminorm& src, const Seminorm& dst,
                                               const Mat& A, const BallResolution& res = {});

struct RigidityOptions {
  double hypothesis_tol = 1e-6;
  double conclusion_tol = 1e-4;
  std::size_t direction_count = 4096;
  BallResolution resolution{};
};

struct RigidityVerdict {
  VolumeTag tag = VolumeTag::bh;
  JacobianResult jacobian;
  bool dominates_euclidean = false;
  bool jacobian_at_most_one = false;
  bool hypotheses_hold = false;
  bool conclusion_holds = false;
  double max_ratio = 0.0;
  double min_ratio = 0.0;
  std::optional<Vec> witness_direction;  // set when the norms differ
  bool rigidity_claimed = false;
  // Hypotheses hold, conclusion fails, and the definition is claimed rigid.
  bool contradiction() const { return rigidity_claimed && hypotheses_hold && !conclusion_holds; }
};

RigidityVerdict rigidity_test(VolumeTag tag, const Seminorm& s, const RigidityOptions& opts = {});

struct CounterexampleCertificate {
  Seminorm norm = Seminorm::euclidean(2);
  double jacobian_sr = 0.0;
  double max_ratio = 0.0;
  double expected_max_ratio = 0.0;
  bool dominates_euclidean = false;
  bool jacobian_is_one = false;
  bool max_ratio_matches = false;
  bool certified() const { return dominates_euclidean && jacobian_is_one && max_ratio_matches; }
};

// The regular 2n-gon norm: 1-Lipschitz over the Euclidean norm and sr-volume preserving,
// yet not Euclidean.
CounterexampleCertificate sr_counterexample(int n, double tol = 1e-6);

}  // namespace finsler
