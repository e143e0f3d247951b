#include "finsler/convex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "finsler/errors.hpp"
#include "finsler/hull.hpp"

namespace finsler {

namespace {

double max_abs(const Mat& M) { return M.size() ? M.cwiseAbs().maxCoeff() : 0.0; }

void require_symmetric(const Mat& P) {
  const double tol = 1e-9 * std::max(max_abs(P), 1e-300);
  const int n = static_cast<int>(P.rows());
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  // Sort by first coordinate so the mirror of each point is found by a short scan.
  std::sort(order.begin(), order.end(), [&](int a, int b) { return P(a, 0) < P(b, 0); });
  for (int i = 0; i < n; ++i) {
    const Vec target = -P.row(i).transpose();
    auto lo = std::lower_bound(order.begin(), order.end(), target(0) - tol,
                               [&](int idx, double v) { return P(idx, 0) < v; });
    bool found = false;
    for (auto it = lo; it != order.end() && P(*it, 0) <= target(0) + tol; ++it) {
      if ((P.row(*it).transpose() - target).cwiseAbs().maxCoeff() <= tol) {
        found = true;
        break;
      }
    }
    if (!found) throw GeometryError("Polytope: vertex set is not centrally symmetric");
  }
}

Mat rows_of(const std::vector<Vec>& rows, int m) {
  Mat out(static_cast<int>(rows.size()), m);
  for (int i = 0; i < out.rows(); ++i) out.row(i) = rows[i].transpose();
  return out;
}

// Drops numerically repeated rows.
Mat unique_rows(const Mat& M, double rel_tol) {
  std::vector<Vec> kept;
  const double tol = rel_tol * std::max(max_abs(M), 1e-300);
  for (int i = 0; i < M.rows(); ++i) {
    const Vec r = M.row(i).transpose();
    bool dup = false;
    for (const auto& k : kept)
      if ((k - r).cwiseAbs().maxCoeff() <= tol) {
        dup = true;
        break;
      }
    if (!dup) kept.push_back(r);
  }
  return rows_of(kept, static_cast<int>(M.cols()));
}

}  // namespace

Polytope Polytope::from_vertices(const Mat& points_in, bool symmetrize) {
  const int m = static_cast<int>(points_in.cols());
  if (m < 1) throw DimensionError("Polytope: dimension must be positive");
  if (points_in.rows() == 0) throw DimensionError("Polytope: empty point set");
  if (!points_in.allFinite()) throw GeometryError("Polytope: non-finite vertex");
  Mat points = points_in;
  if (symmetrize) {
    points.resize(2 * points_in.rows(), m);
    points << points_in, -points_in;
  } else {
    require_symmetric(points);
  }

  Polytope P;
  P.dim_ = m;
  const double scale = max_abs(points);
  if (scale == 0.0) {
    P.degenerate_ = true;
    P.vertices_ = Mat::Zero(1, m);
    return P;
  }

  if (m == 1) {
    P.vertices_.resize(2, 1);
    P.vertices_ << scale, -scale;
    P.facets_.resize(2, 1);
    P.facets_ << 1.0 / scale, -1.0 / scale;
    return P;
  }

  if (m == 2) {
    std::vector<Eigen::Vector2d> pts(points.rows());
    for (int i = 0; i < points.rows(); ++i) pts[i] = points.row(i).transpose();
    const auto hull = convex_hull_2d(pts);
    if (hull.size() < 3) {
      P.degenerate_ = true;
      P.vertices_ = points;
      return P;
    }
    const int k = static_cast<int>(hull.size());
    P.vertices_.resize(k, 2);
    for (int i = 0; i < k; ++i) P.vertices_.row(i) = pts[hull[i]].transpose();
    P.facets_.resize(k, 2);
    for (int i = 0; i < k; ++i) {
      const Eigen::Vector2d p = P.vertices_.row(i), q = P.vertices_.row((i + 1) % k);
      const Eigen::Vector2d n(q.y() - p.y(), p.x() - q.x());
      const double c = n.dot(p);
      if (c <= 1e-14 * scale * n.norm()) {
        P.degenerate_ = true;
        P.facets_.resize(0, 2);
        return P;
      }
      P.facets_.row(i) = (n / c).transpose();
    }
    return P;
  }

  if (m == 3) {
    std::vector<Eigen::Vector3d> pts(points.rows());
    for (int i = 0; i < points.rows(); ++i) pts[i] = points.row(i).transpose();
    Hull3 hull;
    try {
      hull = convex_hull_3d(pts);
    } catch (const GeometryError&) {
      P.degenerate_ = true;
      P.vertices_ = points;
      return P;
    }
    std::vector<int> remap(pts.size(), -1);
    P.vertices_.resize(static_cast<int>(hull.vertices.size()), 3);
    for (std::size_t i = 0; i < hull.vertices.size(); ++i) {
      remap[hull.vertices[i]] = static_cast<int>(i);
      P.vertices_.row(static_cast<int>(i)) = pts[hull.vertices[i]].transpose();
    }
    std::vector<Vec> normals;
    for (const auto& f : hull.faces) {
      P.triangles_.push_back({remap[f[0]], remap[f[1]], remap[f[2]]});
      const Eigen::Vector3d n = (pts[f[1]] - pts[f[0]]).cross(pts[f[2]] - pts[f[0]]);
      const double c = n.dot(pts[f[0]]);
      if (c <= 1e-14 * scale * n.norm()) {
        P.degenerate_ = true;
        P.facets_.resize(0, 3);
        return P;
      }
      normals.push_back(n / c);
    }
    P.facets_ = unique_rows(rows_of(normals, 3), 1e-9);
    return P;
  }

  P.vertices_ = unique_rows(points, 1e-12);
  Eigen::FullPivLU<Mat> lu(P.vertices_);
  lu.setThreshold(1e-12);
  if (lu.rank() < m) P.degenerate_ = true;
  return P;
}

Polytope Polytope::from_facets(const Mat& F) {
  const int m = static_cast<int>(F.cols());
  if (m < 1 || F.rows() == 0) throw DimensionError("Polytope: empty facet matrix");
  if (!F.allFinite()) throw GeometryError("Polytope: non-finite facet");
  Eigen::FullPivLU<Mat> lu(F);
  lu.setThreshold(1e-12);
  if (lu.rank() < m) throw GeometryError("Polytope: facets do not bound a body (rank deficient)");

  Mat both(2 * F.rows(), m);
  both << F, -F;
  if (m <= 3) {
    const Polytope dual = Polytope::from_vertices(both);
    Polytope P = Polytope::from_vertices(dual.facets_);
    // The irredundant input functionals are exact; keep them rather than re-derived normals.
    P.facets_ = dual.vertices_;
    return P;
  }
  Polytope P;
  P.dim_ = m;
  P.facets_ = unique_rows(both, 1e-12);
  return P;
}

const Mat& Polytope::vertices() const {
  if (!has_vertices()) throw GeometryError("Polytope: vertex description unavailable in this dimension");
  return vertices_;
}

const Mat& Polytope::facets() const {
  if (!has_facets()) throw GeometryError("Polytope: facet description unavailable");
  return facets_;
}

double Polytope::gauge(const Vec& x) const {
  if (x.size() != dim_) throw DimensionError("Polytope::gauge: dimension mismatch");
  return std::max(0.0, (facets() * x).maxCoeff());
}

double Polytope::support(const Vec& y) const {
  if (y.size() != dim_) throw DimensionError("Polytope::support: dimension mismatch");
  return std::max(0.0, (vertices() * y).maxCoeff());
}

Polytope Polytope::polar() const {
  if (degenerate_) throw GeometryError("Polytope::polar: degenerate body");
  if (dim_ <= 3) return Polytope::from_vertices(facets());
  Polytope Q;
  Q.dim_ = dim_;
  Q.vertices_ = facets_;
  Q.facets_ = vertices_;
  return Q;
}

Polytope Polytope::transformed(const Mat& L) const {
  if (L.rows() != dim_ || L.cols() != dim_) throw DimensionError("Polytope::transformed: L must be m x m");
  if (dim_ <= 3 || (has_vertices() && !has_facets())) return Polytope::from_vertices(vertices() * L.transpose());
  Polytope Q;
  Q.dim_ = dim_;
  Q.facets_ = facets_ * L.inverse();
  if (has_vertices()) Q.vertices_ = vertices_ * L.transpose();
  return Q;
}

double Ellipsoid::volume() const {
  const double d = shape.determinant();
  if (d <= 0) throw GeometryError("Ellipsoid: shape matrix is not positive definite");
  return unit_ball_volume(dim()) / std::sqrt(d);
}

double Ellipsoid::gauge(const Vec& x) const { return std::sqrt(std::max(0.0, x.dot(shape * x))); }

double Parallelepiped::volume() const {
  const double d = std::abs(functionals.determinant());
  if (d == 0) throw GeometryError("Parallelepiped: singular functionals");
  return std::ldexp(1.0, dim()) / d;
}

double Parallelepiped::gauge(const Vec& x) const { return (functionals * x).cwiseAbs().maxCoeff(); }

Mat Parallelepiped::vertices() const {
  const int m = dim();
  const Mat inv = functionals.inverse();
  Mat out(1 << m, m);
  for (int mask = 0; mask < (1 << m); ++mask) {
    Vec s(m);
    for (int i = 0; i < m; ++i) s(i) = (mask >> i) & 1 ? 1.0 : -1.0;
    out.row(mask) = (inv * s).transpose();
  }
  return out;
}

double volume(const Ellipsoid& body) { return body.volume(); }
double volume(const Parallelepiped& body) { return body.volume(); }

VolumeResult qmc_volume(const std::function<bool(const Vec&)>& inside, const Vec& half_widths,
                        const QmcOptions& qmc) {
  const int m = static_cast<int>(half_widths.size());
  if (m < 1) throw DimensionError("qmc_volume: empty box");
  if (qmc.blocks < 2 || qmc.samples < static_cast<std::size_t>(qmc.blocks))
    throw std::invalid_argument("qmc_volume: need at least two blocks and one sample per block");
  const std::size_t per_block = qmc.samples / static_cast<std::size_t>(qmc.blocks);

  SobolPoints sobol(m);
  Mat base(m, static_cast<int>(per_block));
  Vec u(m);
  for (std::size_t k = 0; k < per_block; ++k) {
    sobol.next(u);
    base.col(static_cast<int>(k)) = u;
  }
  double box = 1.0;
  for (int i = 0; i < m; ++i) box *= 2.0 * half_widths(i);

  Rng rng(qmc.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> estimates(qmc.blocks);
  Vec x(m);
  for (int b = 0; b < qmc.blocks; ++b) {
    Vec shift(m);
    for (int i = 0; i < m; ++i) shift(i) = unif(rng);
    std::size_t hits = 0;
    for (std::size_t k = 0; k < per_block; ++k) {
      for (int i = 0; i < m; ++i) {
        double t = base(i, static_cast<int>(k)) + shift(i);
        if (t >= 1.0) t -= 1.0;
        x(i) = (2.0 * t - 1.0) * half_widths(i);
      }
      if (inside(x)) ++hits;
    }
    estimates[b] = box * static_cast<double>(hits) / static_cast<double>(per_block);
  }
  double mean = 0.0;
  for (double e : estimates) mean += e;
  mean /= qmc.blocks;
  double var = 0.0;
  for (double e : estimates) var += (e - mean) * (e - mean);
  var /= (qmc.blocks - 1);
  VolumeResult r;
  r.value = mean;
  r.std_error = std::sqrt(var / qmc.blocks);
  r.exact = false;
  r.degenerate = mean == 0.0;
  return r;
}

VolumeResult volume(const Polytope& body, const QmcOptions& qmc) {
  VolumeResult r;
  if (body.degenerate()) {
    r.degenerate = true;
    return r;
  }
  const int m = body.dim();
  if (m == 1) {
    r.value = 2.0 * body.vertices()(0, 0);
    return r;
  }
  if (m == 2) {
    const Mat& V = body.vertices();
    const int k = static_cast<int>(V.rows());
    double twice = 0.0;
    for (int i = 0; i < k; ++i) {
      const int j = (i + 1) % k;
      twice += V(i, 0) * V(j, 1) - V(j, 0) * V(i, 1);
    }
    r.value = 0.5 * std::abs(twice);
    return r;
  }
  if (m == 3) {
    const Mat& V = body.vertices();
    double six = 0.0;
    for (const auto& t : body.hull_triangles()) {
      const Eigen::Vector3d a = V.row(t[0]), b = V.row(t[1]), c = V.row(t[2]);
      six += a.dot(b.cross(c));
    }
    r.value = std::abs(six) / 6.0;
    return r;
  }

  const Mat& F = body.facets();
  Vec half(m);
  if (body.has_vertices()) {
    half = body.vertices().cwiseAbs().colwise().maxCoeff().transpose();
  } else {
    // |x_i| <= sum_j |(F^+)_ij| for |F x|_inf <= 1.
    const Mat pinv = F.completeOrthogonalDecomposition().pseudoInverse();
    half = pinv.cwiseAbs().rowwise().sum();
  }
  return qmc_volume([&](const Vec& x) { return (F * x).maxCoeff() <= 1.0; }, half, qmc);
}

namespace {

// Khachiyan coordinate ascent with away steps on the rows `idx` of `points`, weights `u`
// aligned with `idx`. Returns the scatter matrix sum u_i x_i x_i^T at termination.
Mat khachiyan(const Mat& points, const std::vector<int>& idx, Vec& u, double tol, int& iterations,
              int max_iterations) {
  const int m = static_cast<int>(points.cols());
  const int n = static_cast<int>(idx.size());
  Mat X(n, m);
  for (int i = 0; i < n; ++i) X.row(i) = points.row(idx[i]);
  auto rebuild = [&]() {
    Mat M = Mat::Zero(m, m);
    for (int i = 0; i < n; ++i)
      if (u(i) > 0) M.noalias() += u(i) * X.row(i).transpose() * X.row(i);
    return M;
  };
  Mat M = rebuild();
  for (int local = 0;; ++local, ++iterations) {
    Eigen::LLT<Mat> llt(M);
    if (llt.info() != Eigen::Success) throw GeometryError("min_enclosing_ellipsoid: singular scatter matrix");
    const Vec kappa = llt.matrixL().solve(X.transpose()).colwise().squaredNorm().transpose();
    int j = 0, k = -1;
    for (int i = 0; i < n; ++i) {
      if (kappa(i) > kappa(j)) j = i;
      if (u(i) > 0 && (k < 0 || kappa(i) < kappa(k))) k = i;
    }
    const double gap = std::pow(kappa(j) / m, 0.5 * m) - 1.0;
    if (gap <= tol) return M;
    if (iterations >= max_iterations)
      throw ConvergenceError("min_enclosing_ellipsoid: iteration cap reached", gap);

    const double up = kappa(j) / m - 1.0;
    const double down = 1.0 - kappa(k) / m;
    int pick;
    double beta;
    if (up >= down) {
      pick = j;
      beta = (kappa(j) - m) / (m * (kappa(j) - 1.0));
    } else {
      pick = k;
      beta = std::max((kappa(k) - m) / (m * (kappa(k) - 1.0)), -u(k) / (1.0 - u(k)));
    }
    u *= (1.0 - beta);
    u(pick) += beta;
    if (u(pick) < 0) u(pick) = 0;
    if ((local + 1) % 200 == 0) {
      M = rebuild();
    } else {
      M = (1.0 - beta) * M + beta * X.row(pick).transpose() * X.row(pick);
    }
  }
}

}  // namespace

EllipsoidFit min_enclosing_ellipsoid(const Mat& points, const EllipsoidOptions& opts) {
  const int m = static_cast<int>(points.cols());
  const int n = static_cast<int>(points.rows());
  if (m < 1 || n < 1) throw DimensionError("min_enclosing_ellipsoid: empty input");
  if (!points.allFinite()) throw GeometryError("min_enclosing_ellipsoid: non-finite point");
  {
    Eigen::FullPivLU<Mat> lu(points);
    lu.setThreshold(1e-12);
    if (lu.rank() < m) throw GeometryError("min_enclosing_ellipsoid: points are not full-dimensional");
  }

  // Active set: start from the longest points plus extreme points along the coordinate
  // axes, solve there, then add the points the current ellipsoid misses most.
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  const Vec norms = points.rowwise().squaredNorm();
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return norms(a) > norms(b); });
  std::vector<char> active(n, 0);
  std::vector<int> idx;
  for (int i = 0; i < std::min(n, 4 * m); ++i) active[order[i]] = 1;
  for (int c = 0; c < m; ++c) {
    int arg;
    points.col(c).cwiseAbs().maxCoeff(&arg);
    active[arg] = 1;
  }
  for (int i = 0; i < n; ++i)
    if (active[i]) idx.push_back(i);
  Vec u = Vec::Constant(static_cast<int>(idx.size()), 1.0 / static_cast<double>(idx.size()));

  int iterations = 0;
  for (;;) {
    Mat M;
    try {
      M = khachiyan(points, idx, u, opts.tol, iterations, opts.max_iterations);
    } catch (const GeometryError&) {
      if (static_cast<int>(idx.size()) == n) throw;
      // Active points not yet spanning: take everything.
      idx.resize(n);
      for (int i = 0; i < n; ++i) idx[i] = i, active[i] = 1;
      u = Vec::Constant(n, 1.0 / n);
      continue;
    }
    Eigen::LLT<Mat> llt(M);
    const Vec kappa = llt.matrixL().solve(points.transpose()).colwise().squaredNorm().transpose();
    int j;
    const double kmax = kappa.maxCoeff(&j);
    const double gap = std::pow(kmax / m, 0.5 * m) - 1.0;
    if (gap <= opts.tol) {
      Mat A = llt.solve(Mat::Identity(m, m)) / kmax;
      A = 0.5 * (A + A.transpose());
      return {Ellipsoid{A}, std::max(gap, 0.0), iterations};
    }
    std::vector<int> missed;
    const double threshold = m * std::pow(1.0 + opts.tol, 2.0 / m);
    for (int i = 0; i < n; ++i)
      if (!active[i] && kappa(i) > threshold) missed.push_back(i);
    std::stable_sort(missed.begin(), missed.end(), [&](int a, int b) { return kappa(a) > kappa(b); });
    missed.resize(std::min<std::size_t>(missed.size(), std::max<std::size_t>(16, idx.size())));
    Vec grown = Vec::Zero(static_cast<int>(idx.size() + missed.size()));
    grown.head(u.size()) = u;
    for (int i : missed) idx.push_back(i), active[i] = 1;
    u = grown;
  }
}

EllipsoidFit min_enclosing_ellipsoid(const Polytope& body, const EllipsoidOptions& opts) {
  if (body.degenerate()) throw GeometryError("min_enclosing_ellipsoid: degenerate body");
  return min_enclosing_ellipsoid(body.vertices(), opts);
}

EllipsoidFit max_inscribed_ellipsoid(const Polytope& body, const EllipsoidOptions& opts) {
  if (body.degenerate()) throw GeometryError("max_inscribed_ellipsoid: degenerate body");
  EllipsoidFit dual = min_enclosing_ellipsoid(body.facets(), opts);
  Mat A = dual.ellipsoid.shape.inverse();
  A = 0.5 * (A + A.transpose());
  return {Ellipsoid{A}, dual.gap, dual.iterations};
}

namespace {

double cross2(const Mat& Q, int a, int b) { return Q(a, 0) * Q(b, 1) - Q(a, 1) * Q(b, 0); }

Parallelepiped parallelogram_from(const Mat& Q, int a, int b) {
  Mat F(2, 2);
  F.row(0) = Q.row(a);
  F.row(1) = Q.row(b);
  return {F, true};
}

// Coordinate ascent on |det F| with rows restricted to polar vertices. The first sweep
// replaces every row unconditionally, so F may start anywhere invertible.
double ascend_rows(const Mat& Q, Mat& F) {
  const int m = static_cast<int>(F.cols());
  double best = 0.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    bool improved = false;
    for (int r = 0; r < m; ++r) {
      Eigen::PartialPivLU<Mat> lu(F);
      const double d = F.determinant();
      if (d == 0) return 0.0;
      // det with row r replaced by q equals det(F) * q . (F^{-1} e_r).
      const Vec col = lu.solve(Mat::Identity(m, m).col(r));
      const Vec vals = (Q * col).cwiseAbs() * std::abs(d);
      int arg;
      const double cand = vals.maxCoeff(&arg);
      if (sweep == 0 || cand > best * (1.0 + 1e-13)) {
        F.row(r) = Q.row(arg);
        best = std::abs(F.determinant());
        improved = true;
      }
    }
    if (!improved) break;
  }
  return best;
}

Parallelepiped heuristic_parallelepiped(const Polytope& body, const Mat& Q, const ParallelepipedOptions& opts) {
  const int m = body.dim();
  // Seed frames from the enclosing ellipsoid: rows A^{1/2} R for rotations R.
  Mat sqrtA;
  if (body.has_vertices()) {
    const Mat A = min_enclosing_ellipsoid(body.vertices()).ellipsoid.shape;
    Eigen::SelfAdjointEigenSolver<Mat> eig(A);
    sqrtA = eig.operatorSqrt();
  } else {
    const Mat B = max_inscribed_ellipsoid(body).ellipsoid.shape;
    Eigen::SelfAdjointEigenSolver<Mat> eig(B);
    sqrtA = eig.operatorSqrt();
  }
  Rng rng(opts.seed);
  std::normal_distribution<double> normal;
  Mat best_F;
  double best = -1.0;
  for (int start = 0; start < std::max(1, opts.restarts); ++start) {
    Mat R = Mat::Identity(m, m);
    if (start > 0) {
      Mat G(m, m);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) G(i, j) = normal(rng);
      Eigen::HouseholderQR<Mat> qr(G);
      R = qr.householderQ();
    }
    Mat F = R * sqrtA;
    const double val = ascend_rows(Q, F);
    if (val > best) {
      best = val;
      best_F = F;
    }
  }
  if (best <= 0) throw GeometryError("min_enclosing_parallelepiped: search failed to find an invertible frame");
  return {best_F, false};
}

}  // namespace

Parallelepiped min_enclosing_parallelogram_bruteforce(const Polytope& body) {
  if (body.dim() != 2 || body.degenerate()) throw DimensionError("bruteforce parallelogram needs a 2D body");
  const Mat& Q = body.facets();
  int ba = 0, bb = 1;
  double best = -1.0;
  for (int a = 0; a < Q.rows(); ++a)
    for (int b = a + 1; b < Q.rows(); ++b)
      if (double v = std::abs(cross2(Q, a, b)); v > best) best = v, ba = a, bb = b;
  return parallelogram_from(Q, ba, bb);
}

Parallelepiped min_enclosing_parallelepiped(const Polytope& body, const ParallelepipedOptions& opts) {
  if (body.degenerate()) throw GeometryError("min_enclosing_parallelepiped: degenerate body");
  const int m = body.dim();
  const Mat& Q = body.facets();
  if (m == 1) return {Q.row(0).cwiseAbs(), true};

  if (m == 2) {
    // Polar vertices come counter-clockwise; for each a the best partner b advances monotonically.
    const int n = static_cast<int>(Q.rows());
    int b = 1, ba = 0, bb = 1;
    double best = -1.0;
    for (int a = 0; a < n; ++a) {
      if (b == a) b = (b + 1) % n;
      for (int steps = 0; steps < n && cross2(Q, a, (b + 1) % n) >= cross2(Q, a, b); ++steps) b = (b + 1) % n;
      if (double v = std::abs(cross2(Q, a, b)); v > best) best = v, ba = a, bb = b;
    }
    return parallelogram_from(Q, ba, bb);
  }

  if (m == 3 && Q.rows() <= opts.exhaustive_limit) {
    const int n = static_cast<int>(Q.rows());
    double best = -1.0;
    int bi = 0, bj = 1, bk = 2;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const Eigen::Vector3d c = Eigen::Vector3d(Q.row(i)).cross(Eigen::Vector3d(Q.row(j)));
        for (int k = j + 1; k < n; ++k) {
          const double v = std::abs(c.dot(Eigen::Vector3d(Q.row(k))));
          if (v > best) best = v, bi = i, bj = j, bk = k;
        }
      }
    Mat F(3, 3);
    F.row(0) = Q.row(bi);
    F.row(1) = Q.row(bj);
    F.row(2) = Q.row(bk);
    return {F, true};
  }
  return heuristic_parallelepiped(body, Q, opts);
}

bool contains(const Polytope& body, const Vec& x, double tol) {
  if (body.degenerate()) throw GeometryError("contains: degenerate body");
  return body.gauge(x) <= 1.0 + tol;
}

bool contains(const Ellipsoid& body, const Vec& x, double tol) {
  if (x.size() != body.dim()) throw DimensionError("contains: dimension mismatch");
  return body.gauge(x) <= 1.0 + tol;
}

bool contains(const Parallelepiped& body, const Vec& x, double tol) {
  if (x.size() != body.dim()) throw DimensionError("contains: dimension mismatch");
  return body.gauge(x) <= 1.0 + tol;
}

}  // namespace finsler
