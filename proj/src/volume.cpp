#include "finsler/volume.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "finsler/errors.hpp"

namespace finsler {

std::string_view to_string(VolumeTag tag) {
  switch (tag) {
    case VolumeTag::bh: return "bh";
    case VolumeTag::mstar: return "mstar";
    case VolumeTag::sr: return "sr";
    case VolumeTag::ir: return "ir";
  }
  return "unknown";
}

VolumeTag parse_volume_tag(std::string_view name) {
  for (VolumeTag t : kAllVolumeTags)
    if (to_string(t) == name) return t;
  throw std::invalid_argument("unknown volume definition '" + std::string(name) + "' (expected bh, mstar, sr, ir)");
}

bool euclidean_rigidity_claimed(VolumeTag tag) { return tag != VolumeTag::sr; }

std::string_view to_string(Exactness e) {
  switch (e) {
    case Exactness::exact: return "exact";
    case Exactness::discretized: return "discretized";
    case Exactness::heuristic: return "heuristic";
    case Exactness::sampled: return "sampled";
  }
  return "unknown";
}

namespace {

Mat radial_points(const Seminorm& s, const std::vector<Vec>& dirs) {
  Mat R(static_cast<int>(dirs.size()), s.dim());
  for (std::size_t k = 0; k < dirs.size(); ++k) {
    const double v = s(dirs[k]);
    if (!(v > 0.0) || !std::isfinite(v)) throw GeometryError("unit ball: seminorm vanishes or is not finite on a direction");
    R.row(static_cast<int>(k)) = (dirs[k] / v).transpose();
  }
  return R;
}

Mat symmetric_stack(const Mat& P) {
  Mat out(2 * P.rows(), P.cols());
  out << P, -P;
  return out;
}

double log_abs_det(const Mat& M) {
  Eigen::PartialPivLU<Mat> lu(M);
  double acc = 0.0;
  for (int i = 0; i < M.rows(); ++i) acc += std::log(std::abs(lu.matrixLU()(i, i)));
  return acc;
}

JacobianResult polytope_jacobian(VolumeTag tag, const Seminorm& s, const BallResolution& res) {
  const int m = s.dim();
  JacobianResult r;
  r.tag = tag;
  const bool exact_ball = s.polytope_facets().has_value();
  const Polytope ball = unit_ball_polytope(s, res);
  if (ball.degenerate()) {
    r.degenerate = true;
    return r;
  }
  r.exactness = exact_ball ? Exactness::exact : Exactness::discretized;
  const double alpha = unit_ball_volume(m);
  switch (tag) {
    case VolumeTag::bh:
      r.value = alpha / volume(ball).value;
      break;
    case VolumeTag::sr: {
      const EllipsoidFit fit = min_enclosing_ellipsoid(ball, res.ellipsoid);
      r.value = alpha / fit.ellipsoid.volume();
      r.ellipsoid_gap = fit.gap;
      break;
    }
    case VolumeTag::ir: {
      const EllipsoidFit fit = max_inscribed_ellipsoid(ball, res.ellipsoid);
      r.value = alpha / fit.ellipsoid.volume();
      r.ellipsoid_gap = fit.gap;
      break;
    }
    case VolumeTag::mstar: {
      const Parallelepiped P = min_enclosing_parallelepiped(ball, res.parallelepiped);
      r.value = std::ldexp(1.0, m) / P.volume();
      if (!P.exact) r.exactness = Exactness::heuristic;
      break;
    }
  }
  return r;
}

// Coordinate ascent of |det F| with every row a subgradient of s, i.e. a point of the polar
// body; row r is replaced by the subgradient at the cofactor direction, which maximizes the
// determinant over the polar body.
Mat ascend_subgradient_frame(const Seminorm& s, Mat F) {
  const int m = s.dim();
  double best = 0.0;
  for (int sweep = 0; sweep < 200; ++sweep) {
    for (int r = 0; r < m; ++r) {
      Eigen::PartialPivLU<Mat> lu(F);
      const Vec c = lu.solve(Mat::Identity(m, m).col(r));
      F.row(r) = subgradient(s, c).transpose();
    }
    const double d = std::abs(F.determinant());
    if (d <= best * (1.0 + 1e-13)) break;
    best = d;
  }
  return F;
}

JacobianResult sampled_jacobian(VolumeTag tag, const Seminorm& s, const BallResolution& res) {
  const int m = s.dim();
  JacobianResult r;
  r.tag = tag;
  r.exactness = Exactness::sampled;
  const double alpha = unit_ball_volume(m);
  const auto dirs = sphere_directions(m, res.directions_nd);
  const std::optional<Mat> facets = s.polytope_facets();

  auto polar_points = [&]() {
    if (facets) return symmetric_stack(*facets);
    Mat G(static_cast<int>(dirs.size()), m);
    for (std::size_t k = 0; k < dirs.size(); ++k) G.row(static_cast<int>(k)) = subgradient(s, dirs[k]).transpose();
    return symmetric_stack(G);
  };

  switch (tag) {
    case VolumeTag::bh: {
      Vec half(m);
      if (facets) {
        const Mat pinv = facets->completeOrthogonalDecomposition().pseudoInverse();
        half = pinv.cwiseAbs().rowwise().sum();
      } else if (s.kind() == NormKind::pnorm) {
        half = Vec::Ones(m);
      } else {
        const Mat R = radial_points(s, dirs);
        half = 1.25 * R.cwiseAbs().colwise().maxCoeff().transpose();
      }
      const VolumeResult v = qmc_volume([&](const Vec& x) { return s(x) <= 1.0; }, half, res.qmc);
      if (v.value <= 0) {
        r.degenerate = true;
        return r;
      }
      r.value = alpha / v.value;
      r.std_error = alpha * v.std_error / (v.value * v.value);
      break;
    }
    case VolumeTag::sr: {
      const EllipsoidFit fit = min_enclosing_ellipsoid(symmetric_stack(radial_points(s, dirs)), res.ellipsoid);
      r.value = alpha / fit.ellipsoid.volume();
      r.ellipsoid_gap = fit.gap;
      break;
    }
    case VolumeTag::ir: {
      // The inscribed ellipsoid is the polar of the enclosing ellipsoid of the polar body.
      const EllipsoidFit fit = min_enclosing_ellipsoid(polar_points(), res.ellipsoid);
      r.value = 1.0 / std::sqrt(fit.ellipsoid.shape.determinant());
      r.ellipsoid_gap = fit.gap;
      break;
    }
    case VolumeTag::mstar: {
      const Mat A = min_enclosing_ellipsoid(polar_points(), res.ellipsoid).ellipsoid.shape;
      Eigen::SelfAdjointEigenSolver<Mat> eig(A);
      const Mat frame = eig.operatorInverseSqrt();
      Rng rng(res.parallelepiped.seed);
      std::normal_distribution<double> normal;
      Mat best_F;
      double best = -1.0;
      for (int start = 0; start < std::max(1, res.parallelepiped.restarts); ++start) {
        Mat Rot = Mat::Identity(m, m);
        if (start > 0) {
          Mat G(m, m);
          for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) G(i, j) = normal(rng);
          Eigen::HouseholderQR<Mat> qr(G);
          Rot = qr.householderQ();
        }
        const Mat F = ascend_subgradient_frame(s, Rot * frame);
        const double d = std::abs(F.determinant());
        if (d > best) best = d, best_F = F;
      }
      // Certify containment on the boundary samples; shrink the frame if a sample leaks.
      const Mat R = radial_points(s, dirs);
      const double slack = std::max(1.0, (R * best_F.transpose()).cwiseAbs().maxCoeff());
      r.value = best / std::pow(slack, m);
      r.exactness = Exactness::heuristic;
      break;
    }
  }
  return r;
}

}  // namespace

Polytope unit_ball_polytope(const Seminorm& s, const BallResolution& res) {
  const int m = s.dim();
  if (m > 3) throw DimensionError("unit_ball_polytope: only dimensions 1 to 3 are polytopalized");
  if (const auto F = s.polytope_facets()) return Polytope::from_facets(*F);
  if (m == 1) {
    Mat p(1, 1);
    p(0, 0) = 1.0 / s(Vec::Ones(1));
    return Polytope::from_vertices(p, true);
  }
  if (m == 2) {
    // Half the circle, mirrored: symmetric by construction even for noisy callables.
    const int count = std::max(2, res.directions_2d / 2);
    std::vector<Vec> half;
    for (int k = 0; k < count; ++k) {
      const double t = std::numbers::pi * k / count;
      half.push_back((Vec(2) << std::cos(t), std::sin(t)).finished());
    }
    return Polytope::from_vertices(radial_points(s, half), true);
  }
  const IcoSphere ico = icosphere(res.icosphere_level);
  std::vector<Vec> dirs;
  for (const auto& v : ico.vertices) {
    // Keep one of each antipodal pair.
    if (v.z() > 1e-12 || (std::abs(v.z()) <= 1e-12 && (v.y() > 1e-12 || (std::abs(v.y()) <= 1e-12 && v.x() > 0))))
      dirs.push_back(Vec(v));
  }
  return Polytope::from_vertices(radial_points(s, dirs), true);
}

JacobianResult jacobian(VolumeTag tag, const Seminorm& s, const BallResolution& res) {
  const int m = s.dim();
  JacobianResult r;
  r.tag = tag;
  if (is_degenerate(s)) {
    r.degenerate = true;
    return r;
  }
  if (m == 1) {
    r.value = s(Vec::Ones(1));
    return r;
  }
  if (s.is_ellipsoidal()) {
    // All four bodies of an ellipsoid {v^T G v <= 1} have volume alpha_m / sqrt(det G)
    // (2^m / sqrt(det G) for the parallelepiped), so every Jacobian is sqrt(det G).
    r.value = s.kind() == NormKind::gram ? std::exp(0.5 * log_abs_det(s.gram_matrix())) : 1.0;
    return r;
  }
  if (m <= 3) return polytope_jacobian(tag, s, res);
  return sampled_jacobian(tag, s, res);
}

MonotonicityCheck check_short_map_monotonicity(VolumeTag tag, const Seminorm& src, const Seminorm& dst,
                                               const Mat& A, const BallResolution& res) {
  const int m = src.dim();
  if (dst.dim() != m || A.rows() != m || A.cols() != m)
    throw DimensionError("check_short_map_monotonicity: A must be square between spaces of equal dimension");
  MonotonicityCheck out;
  for (const Vec& u : sphere_directions(m, 4096)) {
    const double den = src(u);
    if (den <= 0) continue;
    out.operator_norm = std::max(out.operator_norm, dst(A * u) / den);
  }
  if (out.operator_norm > 1.0 + 1e-9)
    throw std::invalid_argument("check_short_map_monotonicity: map is not short (operator norm " +
                                std::to_string(out.operator_norm) + ")");
  out.source_measure = jacobian(tag, src, res).value;
  out.image_measure = jacobian(tag, dst.pullback(A), res).value;
  out.holds = out.image_measure <= out.source_measure * (1.0 + 1e-9);
  return out;
}

RigidityVerdict rigidity_test(VolumeTag tag, const Seminorm& s, const RigidityOptions& opts) {
  RigidityVerdict v;
  v.tag = tag;
  v.rigidity_claimed = euclidean_rigidity_claimed(tag);
  v.jacobian = jacobian(tag, s, opts.resolution);
  if (v.jacobian.degenerate) {
    // A degenerate seminorm cannot dominate the Euclidean norm.
    v.jacobian_at_most_one = true;
    return v;
  }
  const NormComparisonReport cmp = compare_to_euclidean(s, opts.direction_count);
  v.max_ratio = cmp.max_ratio;
  v.min_ratio = cmp.min_ratio;
  v.dominates_euclidean = cmp.min_ratio >= 1.0 - opts.hypothesis_tol;
  v.jacobian_at_most_one = v.jacobian.value <= 1.0 + opts.hypothesis_tol;
  v.hypotheses_hold = v.dominates_euclidean && v.jacobian_at_most_one;
  v.conclusion_holds = cmp.max_ratio - 1.0 <= opts.conclusion_tol && 1.0 - cmp.min_ratio <= opts.conclusion_tol;
  if (!v.conclusion_holds)
    v.witness_direction = (cmp.max_ratio - 1.0 >= 1.0 - cmp.min_ratio) ? cmp.witness_direction : cmp.min_direction;
  return v;
}

CounterexampleCertificate sr_counterexample(int n, double tol) {
  if (n < 2) throw std::invalid_argument("sr_counterexample: n must be at least 2");
  CounterexampleCertificate c;
  c.norm = regular_2ngon_norm(n);
  c.jacobian_sr = jacobian(VolumeTag::sr, c.norm).value;
  const NormComparisonReport cmp = compare_to_euclidean(c.norm);
  c.max_ratio = cmp.max_ratio;
  c.expected_max_ratio = 1.0 / std::cos(std::numbers::pi / (2.0 * n));
  c.dominates_euclidean = cmp.min_ratio >= 1.0 - tol;
  c.jacobian_is_one = std::abs(c.jacobian_sr - 1.0) <= tol;
  c.max_ratio_matches = std::abs(c.max_ratio - c.expected_max_ratio) <= tol;
  return c;
}

}  // namespace finsler
