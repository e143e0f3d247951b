#include "finsler/diagnostic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace finsler {

namespace {

Vec3 to3(const Vec& v) { return Vec3(v(0), v(1), v(2)); }
Vec from3(const Vec3& v) { return Vec(v); }

Chart::Map as_chart_map(const std::function<Vec3(const Vec3&)>& f) {
  return [f](const Vec& v) { return from3(f(to3(v))); };
}

DiagnosticCheck named(std::string name) {
  DiagnosticCheck c;
  c.name = std::move(name);
  return c;
}

}  // namespace

const DiagnosticCheck& DiagnosticReport::check(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return c;
  throw std::out_of_range("DiagnosticReport: no check named " + name);
}

DiagnosticReport map_rigidity_diagnostic(const MapDiagnosticInput& in, const DiagnosticOptions& opts) {
  if (!in.map) throw std::invalid_argument("map_rigidity_diagnostic: no map");
  DiagnosticReport report;
  report.name = in.name;
  const QuadratureOptions quad{opts.cells_per_dim};
  const auto everything = [](const Vec&) { return true; };

  DiagnosticCheck lip = named("one_lipschitz");
  DiagnosticCheck dist = named("distance_preservation");
  if (in.source_distance && in.target_distance && in.points.size() >= 2) {
    report.profile = lipschitz_profile(*in.source_distance, *in.target_distance, in.map, in.points);
    lip.value = report.profile.max_ratio;
    lip.reference = 1.0;
    lip.holds = report.profile.max_ratio <= 1.0 + opts.lipschitz_tol;
    lip.detail = "max distance ratio over " + std::to_string(report.profile.pairs) + " pairs";
    dist.value = report.profile.min_ratio;
    dist.reference = 1.0;
    dist.holds = report.profile.min_ratio >= 1.0 - opts.distance_tol && lip.holds;
    dist.detail = "min distance ratio over " + std::to_string(report.profile.pairs) + " pairs";
  } else {
    lip.available = dist.available = false;
    lip.detail = dist.detail = "distance oracles or points missing";
  }

  DiagnosticCheck mass = named("mass_bound");
  double source_mass = 0.0, target_volume = 0.0;
  if (!in.source_atlas.charts.empty() && !in.target_atlas.charts.empty()) {
    source_mass = mu_measure(in.source_atlas, opts.tag, everything, quad).value;
    target_volume = mu_measure(in.target_atlas, VolumeTag::bh, everything, quad).value;
    mass.value = source_mass;
    mass.reference = target_volume;
    mass.holds = source_mass >= target_volume * (1.0 - opts.volume_tol);
    mass.detail = "source mass against target volume";
  } else {
    mass.available = false;
    mass.detail = "area oracles unavailable";
  }

  DiagnosticCheck preserve = named("volume_preservation");
  if (in.inverse && !in.balls.empty() && mass.available) {
    double worst = 0.0;
    for (const auto& [center, radius] : in.balls) {
      const double src =
          mu_measure(in.source_atlas, opts.tag, [&](const Vec& x) { return (to3(x) - center).norm() < radius; }, quad)
              .value;
      const double img = mu_measure(in.target_atlas, VolumeTag::bh,
                                    [&](const Vec& y) { return (in.inverse(to3(y)) - center).norm() < radius; }, quad)
                             .value;
      worst = std::max(worst, std::abs(src - img) / std::max(src, 1e-12));
    }
    preserve.value = worst;
    preserve.reference = opts.volume_tol;
    preserve.holds = worst <= opts.volume_tol;
    preserve.detail = "worst relative gap over " + std::to_string(in.balls.size()) + " balls";
  } else {
    preserve.available = false;
    preserve.detail = "needs an inverse map, sample balls and area oracles";
  }

  DiagnosticCheck iso = named("infinitesimal_isometry");
  if (!in.isometry_samples.empty()) {
    const Chart::Map f = as_chart_map(in.map);
    int passing = 0;
    double worst = 0.0;
    for (const auto& [chart_index, z] : in.isometry_samples) {
      const IsometryReport r = infinitesimal_isometry_check(in.source_atlas.charts.at(chart_index), f, in.map_lipschitz,
                                                            in.target_ambient, {z}, opts.isometry_tol);
      passing += r.fraction_passing == 1.0;
      worst = std::max(worst, r.max_deviation);
    }
    iso.value = static_cast<double>(passing) / in.isometry_samples.size();
    iso.reference = opts.isometry_fraction;
    iso.holds = iso.value >= opts.isometry_fraction;
    iso.detail = "largest metric-derivative deviation " + std::to_string(worst);
  } else {
    iso.available = false;
    iso.detail = "no samples";
  }

  report.checks = {lip, mass, preserve, iso, dist};
  report.hypotheses_hold = true;
  for (const DiagnosticCheck* c : {&lip, &mass, &preserve, &iso}) {
    if (!c->available) {
      report.flags.push_back("unavailable: " + c->name);
    } else if (!c->holds) {
      report.hypotheses_hold = false;
      report.flags.push_back("hypothesis fails: " + c->name);
    }
  }
  report.isometry_observed = dist.available && dist.holds;
  if (report.hypotheses_hold && dist.available && !dist.holds)
    report.flags.push_back("target not an essential length space: volume hypotheses hold but distances shrink");
  return report;
}

MapDiagnosticInput flat_square_identity_input(int points, std::uint64_t seed) {
  MapDiagnosticInput in;
  in.name = "flat_square_identity";
  Mat embed = Mat::Zero(3, 2);
  embed(0, 0) = embed(1, 1) = 1.0;
  in.source_atlas.charts.push_back(linear_chart(embed, Box::cube(2, 0, 1)));
  in.target_atlas = in.source_atlas;
  in.map = [](const Vec3& p) { return p; };
  in.inverse = in.map;
  in.source_distance = std::make_shared<EuclideanOracle>();
  in.target_distance = in.source_distance;
  Rng rng(seed);
  std::uniform_real_distribution<double> unif(0, 1);
  for (int i = 0; i < points; ++i) in.points.emplace_back(unif(rng), unif(rng), 0.0);
  for (double x : {0.2, 0.45, 0.8})
    for (double y : {0.15, 0.6}) in.isometry_samples.emplace_back(0, (Vec(2) << x, y).finished());
  in.balls = {{Vec3(0.3, 0.4, 0), 0.2}, {Vec3(0.7, 0.7, 0), 0.25}, {Vec3(0.5, 0.5, 0), 0.6}};
  return in;
}

MapDiagnosticInput shortcut_sphere_input(int circle_samples, int points, std::uint64_t seed) {
  MapDiagnosticInput in;
  in.name = "shortcut_sphere_identity";
  auto shortcut = std::make_shared<ShortcutSphereOracle>(Vec3::UnitZ(), circle_samples);
  in.source_atlas = sphere_atlas();
  const Ambient metric = Ambient::metric(
      3, [shortcut](const Vec& a, const Vec& b) { return shortcut->distance(to3(a), to3(b)); }, "shortcut_sphere");
  for (const Chart& face : in.source_atlas.charts)
    in.target_atlas.charts.emplace_back(face.domain(), [face](const Vec& z) { return face(z); },
                                        face.lipschitz() * std::numbers::pi / 2,
                                        metric);
  in.map = [](const Vec3& p) { return p; };
  in.inverse = in.map;
  in.target_ambient = metric;
  in.source_distance = std::make_shared<GreatCircleOracle>();
  in.target_distance = shortcut;
  Rng rng(seed);
  in.points = random_sphere_points(points, rng);
  in.points.push_back(Vec3(1, 0, 0));
  in.points.push_back(Vec3(-1, 0, 0));
  for (std::size_t c = 0; c < in.source_atlas.charts.size(); ++c)
    for (double u : {-0.7, -0.2, 0.3, 0.8})
      for (double v : {-0.6, -0.15, 0.35, 0.75}) {
        const Vec z = (Vec(2) << u, v).finished();
        if (shortcut->distance_to_circle(to3(in.source_atlas.charts[c](z))) > 0.05)
          in.isometry_samples.emplace_back(static_cast<int>(c), z);
      }
  in.balls = {{Vec3(0, 0, 1), 0.6}, {Vec3(1, 0, 0), 0.5}, {Vec3(0.6, 0, 0.8), 0.9}};
  return in;
}

MapDiagnosticInput zigzag_input(int n_max, int level, int points, std::uint64_t seed) {
  MapDiagnosticInput in;
  in.name = "zigzag_identity";
  ZigzagOptions zo;
  zo.n_max = n_max;
  auto surface = std::make_shared<const PolyhedralSurface>(build_zigzag_surface(zo));
  NullSet segment;
  segment.add_segment(Vec3(0, 0, 0), Vec3(1, 0, 0));
  in.source_distance = std::make_shared<SurfaceOracle>(surface, level, segment, "zigzag_essential");
  in.target_distance = std::make_shared<SurfaceOracle>(surface, level, NullSet{}, "zigzag_intrinsic");
  in.source_atlas.charts.push_back(zigzag_chart(n_max));
  in.target_atlas = in.source_atlas;
  in.map = [](const Vec3& p) { return p; };
  in.inverse = in.map;
  Rng rng(seed);
  in.points = random_zigzag_points(points, rng, n_max);
  in.points.push_back(Vec3(0, 0, 0));
  in.points.push_back(Vec3(1, 0, 0));
  std::uniform_real_distribution<double> unif(-0.9, 0.9);
  for (int i = 0; i < 24; ++i) in.isometry_samples.emplace_back(0, (Vec(2) << unif(rng), unif(rng)).finished());
  in.balls = {{Vec3(0.5, 0, 0), 0.3}, {Vec3(-0.4, 0.5, zigzag_height(-0.4, 0.5, n_max)), 0.4}};
  return in;
}

}  // namespace finsler
