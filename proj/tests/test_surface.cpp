#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "finsler/errors.hpp"
#include "finsler/surface.hpp"

using namespace finsler;

TEST(OffFormat, RoundTrip) {
  const Mesh mesh = flat_square_mesh(3);
  std::stringstream buf;
  write_off(buf, mesh);
  const Mesh back = read_off(buf);
  ASSERT_EQ(back.vertices.size(), mesh.vertices.size());
  ASSERT_EQ(back.triangles.size(), mesh.triangles.size());
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) EXPECT_EQ(back.vertices[i], mesh.vertices[i]);
  EXPECT_EQ(back.triangles, mesh.triangles);
}

TEST(OffFormat, QuadsCommentsAndCountsOnHeader) {
  std::istringstream in("OFF 4 1 0 # square\n0 0 0\n1 0 0\n1 1 0\n# a comment\n0 1 0\n4 0 1 2 3\n");
  const Mesh m = read_off(in);
  ASSERT_EQ(m.triangles.size(), 2u);
  EXPECT_EQ(m.triangles[1], (Triangle{0, 2, 3}));
}

TEST(OffFormat, RejectsBadInput) {
  std::istringstream no_header("3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n");
  EXPECT_THROW(read_off(no_header), std::runtime_error);
  std::istringstream bad_index("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 7\n");
  EXPECT_THROW(read_off(bad_index), std::runtime_error);
  std::istringstream truncated("OFF\n3 1 0\n0 0 0\n1 0 0\n");
  EXPECT_THROW(read_off(truncated), std::runtime_error);
  std::istringstream words("OFF\n3 1 0\n0 0 x\n1 0 0\n0 1 0\n3 0 1 2\n");
  EXPECT_THROW(read_off(words), std::runtime_error);
  EXPECT_THROW(read_off(std::string("/nonexistent/mesh.off")), std::runtime_error);
}

TEST(PolyhedralSurface, ValidatesManifoldAndEdges) {
  Mesh fin{{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, -1, 0), Vec3(0, 0, 1)}, {{0, 1, 2}, {0, 1, 3}, {0, 1, 4}}};
  EXPECT_THROW(PolyhedralSurface{fin}, GeometryError);
  Mesh collapsed{{Vec3(0, 0, 0), Vec3(0, 0, 0), Vec3(0, 1, 0)}, {{0, 1, 2}}};
  EXPECT_THROW(PolyhedralSurface{collapsed}, GeometryError);
  Mesh bad{{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)}, {{0, 1, 5}}};
  EXPECT_THROW(PolyhedralSurface{bad}, GeometryError);
}

TEST(PolyhedralSurface, Areas) {
  EXPECT_NEAR(PolyhedralSurface(flat_square_mesh(5, 2.0)).area(), 4.0, 1e-12);
  const PolyhedralSurface sphere(icosphere_mesh(4));
  EXPECT_NEAR(sphere.area(), 4 * std::numbers::pi, 0.002 * 4 * std::numbers::pi);
  EXPECT_LT(sphere.area(), 4 * std::numbers::pi);
  EXPECT_EQ(sphere.edges().size(), 3 * sphere.triangles().size() / 2);
}

TEST(Zigzag, HeightExamples) {
  EXPECT_DOUBLE_EQ(zigzag_height(0.25, 2.0, 6), 0.25);
  for (int n : {1, 2, 3})
    for (double s : {0.1, 0.3, 0.77}) EXPECT_DOUBLE_EQ(zigzag_height(s, std::ldexp(1.0, -n), 6), zigzag_scaled(s, n));
  for (double x : {-0.9, 0.0, 0.123, 0.5}) EXPECT_EQ(zigzag_height(x, 0.0, 6), 0.0);
  EXPECT_DOUBLE_EQ(zigzag_scaled(0.25, 1), 0.25);
  EXPECT_DOUBLE_EQ(zigzag(0.75), 0.25);
}

TEST(Zigzag, SymmetricContinuousLipschitz) {
  Rng rng(2);
  std::uniform_real_distribution<double> unif(-1, 1);
  std::normal_distribution<double> normal;
  for (int i = 0; i < 20000; ++i) {
    const double x = unif(rng), y = unif(rng);
    EXPECT_EQ(zigzag_height(x, y, 6), zigzag_height(x, -y, 6));
    const double dx = 1e-3 * normal(rng), dy = 1e-3 * normal(rng);
    const double diff = std::abs(zigzag_height(x + dx, y + dy, 6) - zigzag_height(x, y, 6));
    EXPECT_LE(diff, zigzag_height_lipschitz() * std::hypot(dx, dy) + 1e-15);
  }
  for (int n = 0; n < 6; ++n) {
    const double y = std::ldexp(1.0, -n);
    for (double x : {0.1, 0.37})
      EXPECT_NEAR(zigzag_height(x, std::nextafter(y, 0.0), 6), zigzag_height(x, y, 6), 1e-12);
  }
}

TEST(Zigzag, MeshFollowsHeightAndMarksStrip) {
  ZigzagOptions opts;
  opts.n_max = 4;
  const PolyhedralSurface s = build_zigzag_surface(opts);
  bool has_axis_row = false;
  for (const Vec3& v : s.vertices()) {
    EXPECT_DOUBLE_EQ(v.z(), zigzag_height(v.x(), v.y(), 4));
    has_axis_row = has_axis_row || (v.y() == 0.0 && v.x() == 1.0);
  }
  EXPECT_TRUE(has_axis_row);
  int unrefined = 0;
  for (std::size_t t = 0; t < s.triangles().size(); ++t) {
    if (s.refined(static_cast<int>(t))) continue;
    ++unrefined;
    for (int v : s.triangles()[t]) EXPECT_LE(std::abs(s.vertices()[v].y()), 1.0 / 16);
  }
  EXPECT_EQ(unrefined, 2 * 2 * 64);
  opts.max_vertices = 1000;
  EXPECT_THROW(build_zigzag_surface(opts), std::length_error);
}

TEST(SteinerGraph, CountsAndFlatDistances) {
  const PolyhedralSurface square(flat_square_mesh(4));
  double previous = INFINITY;
  for (int level = 0; level <= 4; ++level) {
    const SteinerGraph g(square, level);
    EXPECT_EQ(g.node_count(), square.vertices().size() + square.edges().size() * ((1u << level) - 1));
    const double d = shortest_path(g, g.nearest_node(Vec3(0, 0, 0)), g.nearest_node(Vec3(1, 0.5, 0)));
    EXPECT_GE(d, std::hypot(1.0, 0.5) - 1e-12);
    EXPECT_LE(d, previous + 1e-12);
    previous = d;
  }
  EXPECT_NEAR(previous, std::hypot(1.0, 0.5), 0.02 * std::hypot(1.0, 0.5));
}

TEST(SteinerGraph, AStarMatchesDijkstra) {
  const PolyhedralSurface sphere(icosphere_mesh(2));
  const SteinerGraph g(sphere, 2);
  Rng rng(4);
  std::uniform_int_distribution<int> pick(0, static_cast<int>(g.node_count()) - 1);
  for (int trial = 0; trial < 5; ++trial) {
    const int s = pick(rng);
    const ShortestPathResult all = shortest_paths(g, s);
    for (int k = 0; k < 10; ++k) {
      const int t = pick(rng);
      EXPECT_NEAR(shortest_path(g, s, t), all.distance[t], 1e-12);
    }
  }
}
