#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "finsler/convex.hpp"
#include "finsler/errors.hpp"
#include "finsler/hull.hpp"

using namespace finsler;

namespace {

Vec v2(double x, double y) { return (Vec(2) << x, y).finished(); }

Mat regular_polygon(int k, double phase = 0.0) {
  Mat V(k, 2);
  for (int i = 0; i < k; ++i) {
    const double a = phase + 2.0 * std::numbers::pi * i / k;
    V(i, 0) = std::cos(a);
    V(i, 1) = std::sin(a);
  }
  return V;
}

Mat square() {
  Mat V(4, 2);
  V << 1, 1, -1, 1, -1, -1, 1, -1;
  return V;
}

Mat diamond() {
  Mat V(4, 2);
  V << 1, 0, 0, 1, -1, 0, 0, -1;
  return V;
}

Mat cube() {
  Mat V(8, 3);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 3; ++j) V(i, j) = (i >> j) & 1 ? 1.0 : -1.0;
  return V;
}

// Random symmetric point cloud, stretched by a random linear map.
Mat random_symmetric_cloud(Rng& rng, int m, int half_count) {
  std::normal_distribution<double> normal;
  Mat L(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) L(i, j) = normal(rng) + (i == j ? 2.0 : 0.0);
  Mat P(half_count, m);
  for (int i = 0; i < half_count; ++i)
    for (int j = 0; j < m; ++j) P(i, j) = normal(rng);
  return P * L.transpose();
}

// Points on the boundary of the hull: random convex combinations along facet-adjacent
// vertex pairs are not guaranteed on the boundary, so use the radial gauge instead.
std::vector<Vec> boundary_samples(const Polytope& P, int count, Rng& rng) {
  std::vector<Vec> out;
  for (int i = 0; i < count; ++i) {
    const Vec u = random_unit_vector(P.dim(), rng);
    out.push_back(u / P.gauge(u));
  }
  return out;
}

}  // namespace

TEST(ConvexVolume, Examples) {
  EXPECT_NEAR(volume(Ellipsoid{Mat::Identity(2, 2)}), std::numbers::pi, 1e-15);
  EXPECT_NEAR(volume(Polytope::from_vertices(square())).value, 4.0, 1e-15);
  const VolumeResult oct = volume(Polytope::from_vertices(regular_polygon(8)));
  // Area of a regular k-gon inscribed in the unit circle: (k/2) sin(2 pi / k).
  EXPECT_NEAR(oct.value, 4.0 * std::sin(std::numbers::pi / 4.0), 1e-14);
  EXPECT_NEAR(oct.value, 2.0 * std::sqrt(2.0), 1e-14);
  EXPECT_TRUE(oct.exact);
  EXPECT_NEAR(volume(Polytope::from_vertices(cube())).value, 8.0, 1e-14);
  Mat octa(6, 3);
  octa << 1, 0, 0, -1, 0, 0, 0, 1, 0, 0, -1, 0, 0, 0, 1, 0, 0, -1;
  EXPECT_NEAR(volume(Polytope::from_vertices(octa)).value, 4.0 / 3.0, 1e-14);
  Mat F(2, 2);
  F << 1, 0, 0, 0.5;
  EXPECT_NEAR(volume(Parallelepiped{F}), 8.0, 1e-15);
}

TEST(ConvexVolume, IcosphereHullAgainstTetrahedronSum) {
  const IcoSphere ico = icosphere(3);
  Mat V(static_cast<int>(ico.vertices.size()), 3);
  for (std::size_t i = 0; i < ico.vertices.size(); ++i) V.row(static_cast<int>(i)) = ico.vertices[i].transpose();
  double oracle = 0.0;
  for (const auto& t : ico.triangles)
    oracle += std::abs(ico.vertices[t[0]].dot(ico.vertices[t[1]].cross(ico.vertices[t[2]]))) / 6.0;
  const Polytope P = Polytope::from_vertices(V);
  EXPECT_NEAR(volume(P).value, oracle, 1e-12);
  EXPECT_EQ(P.vertices().rows(), V.rows());
}

TEST(ConvexVolume, DegenerateBodyIsFlagged) {
  Mat flat(4, 2);
  flat << 1, 1, -1, -1, 2, 2, -2, -2;
  const VolumeResult r = volume(Polytope::from_vertices(flat));
  EXPECT_TRUE(r.degenerate);
  EXPECT_EQ(r.value, 0.0);
  Mat planar(4, 3);
  planar << 1, 0, 0, -1, 0, 0, 0, 1, 0, 0, -1, 0;
  EXPECT_TRUE(volume(Polytope::from_vertices(planar)).degenerate);
}

TEST(ConvexVolume, AsymmetricVertexSetRejected) {
  Mat V(3, 2);
  V << 1, 0, 0, 1, -1, -1;
  EXPECT_THROW(Polytope::from_vertices(V), GeometryError);
  EXPECT_NO_THROW(Polytope::from_vertices(V, true));
}

TEST(ConvexVolume, QmcCrossPolytopeInFourDimensions) {
  Mat F(8, 4);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 4; ++j) F(i, j) = (i >> j) & 1 ? 1.0 : -1.0;
  QmcOptions q;
  q.samples = 400'000;
  const VolumeResult r = volume(Polytope::from_facets(F), q);
  // Cross-polytope volume 2^m / m!.
  EXPECT_FALSE(r.exact);
  EXPECT_NEAR(r.value, 16.0 / 24.0, 5 * r.std_error + 1e-3);
  EXPECT_LT(r.std_error, 2e-3);
  const VolumeResult again = volume(Polytope::from_facets(F), q);
  EXPECT_EQ(r.value, again.value);
}

TEST(ConvexVolume, LinearEquivariance) {
  Rng rng(21);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 50; ++trial) {
    for (int m : {2, 3}) {
      const Polytope P = Polytope::from_vertices(random_symmetric_cloud(rng, m, 12), true);
      Mat L(m, m);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) L(i, j) = normal(rng);
      const double lhs = volume(P.transformed(L)).value;
      const double rhs = std::abs(L.determinant()) * volume(P).value;
      EXPECT_NEAR(lhs, rhs, 1e-9 * std::max(1.0, rhs));
    }
  }
}

TEST(ConvexHull, ThreeDimensionalHullContainsAllPoints) {
  Rng rng(3);
  std::normal_distribution<double> normal;
  std::vector<Eigen::Vector3d> pts(400);
  for (auto& p : pts) p = Eigen::Vector3d(normal(rng), normal(rng), normal(rng));
  const Hull3 h = convex_hull_3d(pts);
  // Euler characteristic of a triangulated sphere: F = 2V - 4.
  EXPECT_EQ(h.faces.size(), 2 * h.vertices.size() - 4);
  for (const auto& f : h.faces) {
    const Eigen::Vector3d n = (pts[f[1]] - pts[f[0]]).cross(pts[f[2]] - pts[f[0]]);
    for (const auto& p : pts) EXPECT_LE(n.dot(p - pts[f[0]]), 1e-9);
  }
}

TEST(ConvexHull, PlanarHullIsCounterClockwise) {
  std::vector<Eigen::Vector2d> pts{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}, {0.5, 0}};
  const auto h = convex_hull_2d(pts);
  ASSERT_EQ(h.size(), 4u);
  double twice = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const auto& a = pts[h[i]];
    const auto& b = pts[h[(i + 1) % h.size()]];
    twice += a.x() * b.y() - b.x() * a.y();
  }
  EXPECT_NEAR(twice, 2.0, 1e-15);
}

TEST(EnclosingEllipsoid, SquareGivesDiskOfRadiusSqrtTwo) {
  const EllipsoidFit fit = min_enclosing_ellipsoid(Polytope::from_vertices(square()));
  EXPECT_LE(fit.gap, 1e-8);
  EXPECT_NEAR((fit.ellipsoid.shape - 0.5 * Mat::Identity(2, 2)).cwiseAbs().maxCoeff(), 0.0, 1e-8);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(fit.ellipsoid.gauge(square().row(i).transpose()), 1.0, 1e-8);
  // Optimality against perturbed shapes that still contain the square.
  Rng rng(1);
  std::normal_distribution<double> normal;
  const double best = fit.ellipsoid.volume();
  for (int k = 0; k < 200; ++k) {
    Mat D(2, 2);
    D << normal(rng), normal(rng), 0, normal(rng);
    D(1, 0) = D(0, 1);
    Mat A = fit.ellipsoid.shape + 0.05 * D;
    Eigen::SelfAdjointEigenSolver<Mat> eig(A);
    if (eig.eigenvalues().minCoeff() <= 0) continue;
    double worst = 0.0;
    for (int i = 0; i < 4; ++i) worst = std::max(worst, Ellipsoid{A}.gauge(square().row(i).transpose()));
    A /= worst * worst;
    EXPECT_GE(Ellipsoid{A}.volume(), best * (1 - 1e-8));
  }
}

TEST(EnclosingEllipsoid, RegularPolygonGivesUnitDisk) {
  for (int n : {2, 4, 8}) {
    const EllipsoidFit fit = min_enclosing_ellipsoid(Polytope::from_vertices(regular_polygon(2 * n)));
    EXPECT_NEAR((fit.ellipsoid.shape - Mat::Identity(2, 2)).cwiseAbs().maxCoeff(), 0.0, 1e-7) << n;
  }
}

TEST(EnclosingEllipsoid, EllipseSamples) {
  Mat V = regular_polygon(64);
  V.col(0) *= 2.0;
  const EllipsoidFit fit = min_enclosing_ellipsoid(Polytope::from_vertices(V));
  Mat expected(2, 2);
  expected << 0.25, 0, 0, 1;
  EXPECT_NEAR((fit.ellipsoid.shape - expected).cwiseAbs().maxCoeff(), 0.0, 1e-7);
}

TEST(EnclosingEllipsoid, IterationCapReportsGap) {
  Rng rng(2);
  const Mat P = random_symmetric_cloud(rng, 3, 50);
  EllipsoidOptions opts;
  opts.max_iterations = 2;
  try {
    min_enclosing_ellipsoid(Polytope::from_vertices(P, true), opts);
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_GT(e.gap(), 1e-8);
  }
}

TEST(InscribedEllipsoid, Examples) {
  const EllipsoidFit sq = max_inscribed_ellipsoid(Polytope::from_vertices(square()));
  EXPECT_NEAR((sq.ellipsoid.shape - Mat::Identity(2, 2)).cwiseAbs().maxCoeff(), 0.0, 1e-8);
  const EllipsoidFit dm = max_inscribed_ellipsoid(Polytope::from_vertices(diamond()));
  EXPECT_NEAR((dm.ellipsoid.shape - 2.0 * Mat::Identity(2, 2)).cwiseAbs().maxCoeff(), 0.0, 1e-7);
  // Tangency: the gauge of the facet normal direction touches the facet.
  const Vec n = v2(1, 1) / std::sqrt(2.0);
  EXPECT_NEAR(1.0 / dm.ellipsoid.gauge(n), 1.0 / std::sqrt(2.0), 1e-8);

  Mat V = regular_polygon(512);
  V.col(0) *= 2.0;
  const EllipsoidFit el = max_inscribed_ellipsoid(Polytope::from_vertices(V));
  Mat expected(2, 2);
  expected << 0.25, 0, 0, 1;
  EXPECT_NEAR((el.ellipsoid.shape - expected).cwiseAbs().maxCoeff(), 0.0, 1e-4);
}

TEST(Parallelepiped, Examples) {
  const Parallelepiped sq = min_enclosing_parallelepiped(Polytope::from_vertices(square()));
  EXPECT_TRUE(sq.exact);
  EXPECT_NEAR(sq.volume(), 4.0, 1e-14);
  const Parallelepiped dm = min_enclosing_parallelepiped(Polytope::from_vertices(diamond()));
  EXPECT_NEAR(dm.volume(), 2.0, 1e-14);
  const Parallelepiped disk = min_enclosing_parallelepiped(Polytope::from_vertices(regular_polygon(512)));
  EXPECT_NEAR(disk.volume(), 4.0, 1e-3);
  EXPECT_GE(disk.volume(), volume(Polytope::from_vertices(regular_polygon(512))).value);
  const Parallelepiped c = min_enclosing_parallelepiped(Polytope::from_vertices(cube()));
  EXPECT_TRUE(c.exact);
  EXPECT_NEAR(c.volume(), 8.0, 1e-13);
}

TEST(Parallelepiped, PlanarSearchMatchesBruteForce) {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const Polytope P = Polytope::from_vertices(random_symmetric_cloud(rng, 2, 3 + trial % 20), true);
    const double fast = min_enclosing_parallelepiped(P).volume();
    const double slow = min_enclosing_parallelogram_bruteforce(P).volume();
    EXPECT_NEAR(fast, slow, 1e-12 * slow) << trial;
  }
}

TEST(Parallelepiped, AlwaysContainsTheBody) {
  Rng rng(41);
  ParallelepipedOptions heuristic;
  heuristic.exhaustive_limit = 0;
  for (int trial = 0; trial < 30; ++trial) {
    for (int m : {2, 3}) {
      const Polytope P = Polytope::from_vertices(random_symmetric_cloud(rng, m, 40), true);
      for (const ParallelepipedOptions& opts : {ParallelepipedOptions{}, heuristic}) {
        const Parallelepiped box = min_enclosing_parallelepiped(P, opts);
        for (int i = 0; i < P.vertices().rows(); ++i)
          EXPECT_TRUE(contains(box, P.vertices().row(i).transpose(), 1e-9));
        EXPECT_GE(box.volume(), volume(P).value * (1 - 1e-12));
      }
    }
  }
}

TEST(Parallelepiped, HeuristicNeverBeatsExhaustive) {
  Rng rng(43);
  ParallelepipedOptions heuristic;
  heuristic.exhaustive_limit = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const Polytope P = Polytope::from_vertices(random_symmetric_cloud(rng, 3, 15), true);
    const Parallelepiped exact = min_enclosing_parallelepiped(P);
    const Parallelepiped heur = min_enclosing_parallelepiped(P, heuristic);
    EXPECT_TRUE(exact.exact);
    EXPECT_FALSE(heur.exact);
    EXPECT_GE(heur.volume(), exact.volume() * (1 - 1e-12));
  }
}

TEST(Containment, Examples) {
  const Ellipsoid disk{Mat::Identity(2, 2)};
  EXPECT_TRUE(contains(disk, v2(1, 0)));
  EXPECT_FALSE(contains(disk, v2(1.001, 0), 1e-6));
  const Polytope oct = Polytope::from_vertices(regular_polygon(8));
  EXPECT_TRUE(contains(oct, v2(1, 0)));
  EXPECT_TRUE(contains(oct, v2(std::cos(std::numbers::pi / 4), std::sin(std::numbers::pi / 4))));
  EXPECT_FALSE(contains(oct, v2(0.95, 0.3)));
}

TEST(Sandwich, InscribedInsideBodyInsideEnclosing) {
  Rng rng(51);
  for (int trial = 0; trial < 20; ++trial) {
    for (int m : {2, 3}) {
      const Polytope P = Polytope::from_vertices(random_symmetric_cloud(rng, m, 30), true);
      const Ellipsoid out = min_enclosing_ellipsoid(P).ellipsoid;
      const Ellipsoid in = max_inscribed_ellipsoid(P).ellipsoid;
      for (int i = 0; i < P.vertices().rows(); ++i) EXPECT_TRUE(contains(out, P.vertices().row(i).transpose(), 1e-9));
      for (const Vec& x : boundary_samples(P, 1000, rng)) {
        EXPECT_TRUE(contains(out, x, 1e-9));
        // Boundary points of P are never strictly inside the inscribed ellipsoid.
        EXPECT_GE(in.gauge(x), 1.0 - 1e-9);
      }
      const double vp = volume(P).value;
      EXPECT_LE(in.volume(), vp * (1 + 1e-9));
      EXPECT_LE(vp, out.volume() * (1 + 1e-9));
      EXPECT_LE(vp, min_enclosing_parallelepiped(P).volume() * (1 + 1e-12));
    }
  }
}

TEST(PolytopeDuality, PolarOfPolarIsOriginal) {
  Rng rng(61);
  for (int m : {2, 3}) {
    const Polytope P = Polytope::from_vertices(random_symmetric_cloud(rng, m, 25), true);
    const Polytope back = P.polar().polar();
    EXPECT_NEAR(volume(back).value, volume(P).value, 1e-9 * volume(P).value);
    // Facet descriptions agree: f_i . v <= 1 for every vertex and facet.
    EXPECT_LE((P.polar().vertices() * P.vertices().transpose()).maxCoeff(), 1 + 1e-9);
  }
}
