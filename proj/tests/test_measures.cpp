#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "finsler/errors.hpp"
#include "finsler/measures.hpp"

using namespace finsler;

namespace {

Vec v1(double x) { return (Vec(1) << x).finished(); }
Vec v2(double x, double y) { return (Vec(2) << x, y).finished(); }

DiscreteMeasure random_measure(Rng& rng, int m, int count) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> weight(0.1, 2.0);
  DiscreteMeasure mu(m);
  for (int i = 0; i < count; ++i) {
    Vec p(m);
    for (int j = 0; j < m; ++j) p(j) = normal(rng);
    mu.add(p, weight(rng));
  }
  return mu;
}

// Brute-force oracle: dense geometric radius sweep with closed balls.
double swept_maximal(const DiscreteMeasure& mu, const Vec& x, double r_max, int steps) {
  double best = 0.0;
  const double r_min = 1e-6;
  for (int k = 0; k <= steps; ++k) {
    const double r = r_min * std::pow(r_max / r_min, static_cast<double>(k) / steps);
    double mass = 0.0;
    for (const Atom& a : mu.atoms())
      if ((a.point - x).norm() <= r) mass += a.weight;
    best = std::max(best, mass / (unit_ball_volume(mu.dim()) * std::pow(r, mu.dim())));
  }
  return best;
}

}  // namespace

TEST(MaximalFunction, PointMass) {
  DiscreteMeasure delta(1);
  delta.add(v1(0), 1.0);
  const MaximalValue away = maximal_function(delta, v1(1));
  EXPECT_DOUBLE_EQ(away.value, 0.5);
  EXPECT_DOUBLE_EQ(away.radius, 1.0);
  EXPECT_FALSE(away.unbounded);
  const MaximalValue on = maximal_function(delta, v1(0));
  EXPECT_TRUE(on.unbounded);
  EXPECT_TRUE(std::isinf(on.value));
}

TEST(MaximalFunction, SquareCorners) {
  DiscreteMeasure mu(2);
  for (double x : {0.0, 1.0})
    for (double y : {0.0, 1.0}) mu.add(v2(x, y), 0.25);
  const MaximalValue r = maximal_function(mu, v2(0.5, 0.5));
  EXPECT_NEAR(r.value, 2.0 / std::numbers::pi, 1e-15);
  EXPECT_NEAR(r.radius, std::sqrt(0.5), 1e-15);
}

TEST(MaximalFunction, EmptyMeasureIsZero) {
  EXPECT_EQ(maximal_function(DiscreteMeasure(3), Vec::Zero(3)).value, 0.0);
}

TEST(MaximalFunction, ExactValueDominatesDenseSweep) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 1 + trial % 3;
    const DiscreteMeasure mu = random_measure(rng, m, 15);
    Vec x(m);
    for (int j = 0; j < m; ++j) x(j) = 0.3 * j - 0.2;
    const double exact = maximal_function(mu, x).value;
    const double swept = swept_maximal(mu, x, 8.0, 20000);
    EXPECT_GE(exact, swept * (1 - 1e-12));
    EXPECT_LE(exact, swept * 1.01);
  }
}

TEST(MaximalFunction, GlobalAverageLowerBound) {
  Rng rng(5);
  const DiscreteMeasure mu = random_measure(rng, 2, 30);
  double radius = 0.0;
  const Vec x = v2(0.1, -0.2);
  for (const Atom& a : mu.atoms()) radius = std::max(radius, (a.point - x).norm());
  for (double R : {radius, 2 * radius, 10 * radius})
    EXPECT_GE(maximal_function(mu, x).value, mu.total_mass() / (std::numbers::pi * R * R) * (1 - 1e-12));
}

TEST(MaximalFunction, AddingAnAtomNeverDecreases) {
  Rng rng(7);
  std::normal_distribution<double> normal;
  DiscreteMeasure mu = random_measure(rng, 2, 5);
  std::vector<Vec> probes;
  for (int i = 0; i < 20; ++i) probes.push_back(v2(normal(rng), normal(rng)));
  for (int step = 0; step < 20; ++step) {
    std::vector<double> before;
    for (const Vec& x : probes) before.push_back(maximal_function(mu, x).value);
    mu.add(v2(normal(rng), normal(rng)), 0.3);
    for (std::size_t i = 0; i < probes.size(); ++i) EXPECT_GE(maximal_function(mu, probes[i]).value, before[i]);
  }
}

TEST(Pushforward, Examples) {
  DiscreteMeasure mu(1);
  mu.add(v1(0), 1.0);
  mu.add(v1(1), 1.0);
  const DiscreteMeasure same = pushforward(mu, [](const Vec& x) { return x; });
  ASSERT_EQ(same.atoms().size(), 2u);
  EXPECT_EQ(same.atoms()[1].point(0), 1.0);
  const DiscreteMeasure doubled = pushforward(mu, [](const Vec& x) { return Vec(2.0 * x); });
  EXPECT_EQ(doubled.atoms()[1].point(0), 2.0);
  EXPECT_EQ(doubled.atoms()[1].weight, 1.0);
  const DiscreteMeasure constant = pushforward(mu, [](const Vec&) { return v2(3, 4); });
  ASSERT_EQ(constant.atoms().size(), 1u);
  EXPECT_EQ(constant.atoms()[0].weight, 2.0);
  EXPECT_EQ(constant.dim(), 2);
  EXPECT_THROW(pushforward(mu, [](const Vec& x) -> Vec { throw std::runtime_error("boom" + std::to_string(x(0))); }),
               GeometryError);
}

TEST(Pushforward, PreservesTotalMass) {
  Rng rng(9);
  const DiscreteMeasure mu = random_measure(rng, 3, 100);
  const DiscreteMeasure image = pushforward(mu, [](const Vec& x) { return Vec(x.head(2).array().round()); });
  double mass = 0.0;
  for (const Atom& a : image.atoms()) mass += a.weight;
  EXPECT_NEAR(image.total_mass(), mu.total_mass(), 1e-12);
  EXPECT_NEAR(mass, mu.total_mass(), 1e-12);
}

TEST(MeasureCsv, ParsesHeaderCommentsAndRows) {
  std::istringstream in("# cloud\nx,y,weight\n0,0,0.5\n1, 2 ,1.5\n\n");
  const DiscreteMeasure mu = read_measure_csv(in);
  EXPECT_EQ(mu.dim(), 2);
  ASSERT_EQ(mu.atoms().size(), 2u);
  EXPECT_EQ(mu.atoms()[1].point(1), 2.0);
  EXPECT_EQ(mu.total_mass(), 2.0);
}

TEST(MeasureCsv, RejectsBadInput) {
  std::istringstream neg("0,0,-1\n");
  EXPECT_THROW(read_measure_csv(neg), std::runtime_error);
  std::istringstream ragged("0,0,1\n1,1\n");
  EXPECT_THROW(read_measure_csv(ragged), std::runtime_error);
  std::istringstream words("x,y,w\n1,a,1\n");
  EXPECT_THROW(read_measure_csv(words), std::runtime_error);
  std::istringstream empty("# nothing\n");
  EXPECT_THROW(read_measure_csv(empty), std::runtime_error);
  EXPECT_THROW(read_measure_csv(std::string("/nonexistent/cloud.csv")), std::runtime_error);
}

TEST(DiscreteMeasureInvariants, WeightsMustBePositive) {
  DiscreteMeasure mu(2);
  EXPECT_THROW(mu.add(v2(0, 0), 0.0), std::invalid_argument);
  EXPECT_THROW(mu.add(v1(0), 1.0), DimensionError);
}
