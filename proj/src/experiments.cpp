#include "finsler/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace finsler {

namespace {

constexpr double kE = std::numbers::e;

Vec v2(double x, double y) { return (Vec(2) << x, y).finished(); }

Atlas single(Chart c) {
  Atlas a;
  a.charts.push_back(std::move(c));
  return a;
}

Json ratio_pair(const std::array<int, 2>& p) { return p[0] < 0 ? Json(nullptr) : Json{p[0], p[1]}; }

}  // namespace

Seminorm random_circle_polygon_norm(Rng& rng, int half_count) {
  std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
  Mat V(half_count, 2);
  for (int i = 0; i < half_count; ++i) {
    const double a = angle(rng);
    V(i, 0) = std::cos(a);
    V(i, 1) = std::sin(a);
  }
  return Seminorm::polytopal(Polytope::from_vertices(V, true).facets());
}

bool RigidityBatchResult::all_above_one() const {
  return std::all_of(tags.begin(), tags.end(), [&](const RigidityBatchTag& t) { return t.above_one == count; });
}

RigidityBatchResult rigidity_batch(const RigidityBatchOptions& opts) {
  if (opts.min_half_vertices < 2 || opts.max_half_vertices < opts.min_half_vertices)
    throw std::invalid_argument("rigidity_batch: bad vertex range");
  RigidityBatchResult out;
  for (VolumeTag t : opts.tags) out.tags.push_back({t, 0, INFINITY, 0});
  Rng rng(opts.seed);
  const int span = opts.max_half_vertices - opts.min_half_vertices + 1;
  while (out.count < opts.count) {
    const Seminorm s = random_circle_polygon_norm(rng, opts.min_half_vertices + (out.count + out.rejected) % span);
    if (compare_to_euclidean(s).max_ratio < opts.min_ratio) {
      ++out.rejected;
      continue;
    }
    ++out.count;
    for (RigidityBatchTag& t : out.tags) {
      const RigidityVerdict v = rigidity_test(t.tag, s);
      t.above_one += v.jacobian.value > 1.0;
      t.min_jacobian = std::min(t.min_jacobian, v.jacobian.value);
      t.contradictions += v.contradiction();
    }
  }
  return out;
}

std::vector<std::string> area_benchmark_names() { return {"identity", "fold", "linear_det3"}; }

AreaBenchmark area_benchmark(const std::string& name) {
  const auto weight = [](const Vec& p) { return std::exp(p(0) + 0.5 * p(1)); };
  const double unit_integral = (kE - 1) * 2 * (std::sqrt(kE) - 1);
  const Chart unit = linear_chart(Mat::Identity(2, 2), Box::cube(2, 0, 1));
  if (name == "identity")
    return {name, single(unit), [](const Vec& p) { return p; }, 1.0, weight, unit, unit_integral, 1};
  if (name == "fold") {
    const Chart strip = linear_chart(Mat::Identity(2, 2), Box{v2(0, 0), v2(2, 1)});
    return {name,
            single(strip),
            [](const Vec& p) { return v2(std::min(p(0), 2.0 - p(0)), p(1)); },
            1.0,
            [](const Vec& p) { return std::exp(0.5 * (p(0) + p(1))); },
            unit,
            4 * (kE - 1) * (std::sqrt(kE) - 1),
            2};
  }
  if (name == "linear_det3") {
    Mat A(2, 2);
    A << 2, 1, 1, 2;
    return {name,
            single(unit),
            [A](const Vec& p) { return Vec(A * p); },
            3.0,
            weight,
            linear_chart(Mat::Identity(2, 2), Box::cube(2, 0, 3)),
            3 * unit_integral,
            1};
  }
  throw std::invalid_argument("area_benchmark: unknown case '" + name + "'");
}

AreaSweep area_sweep(const AreaBenchmark& bench, VolumeTag tag, const std::vector<int>& cells) {
  AreaSweep out{bench.name, tag, {}, {}};
  std::vector<double> h, err;
  for (int n : cells) {
    AreaFormulaOptions o;
    o.cells_per_dim = n;
    AreaSweepRow row;
    row.cells = n;
    row.h = 1.0 / n;
    row.result = area_formula_check(bench.atlas, bench.map, bench.lipschitz, bench.weight, tag, bench.image, o);
    row.error = std::max(std::abs(row.result.lhs - bench.exact), std::abs(row.result.rhs - bench.exact));
    h.push_back(row.h);
    err.push_back(row.error);
    out.rows.push_back(row);
  }
  if (cells.size() >= 2) out.order = observed_order(h, err);
  return out;
}

ShortcutSphereCertificate shortcut_sphere_certificate(const ShortcutSphereOptions& opts) {
  ShortcutSphereCertificate c;
  const auto d = std::make_shared<ShortcutSphereOracle>(Vec3::UnitZ(), opts.circle_samples);
  const GreatCircleOracle D;
  c.tolerance = d->tolerance();
  Rng rng(opts.seed);
  auto pts = random_sphere_points(opts.points, rng);
  pts.push_back(Vec3(1, 0, 0));
  pts.push_back(Vec3(-1, 0, 0));
  c.axioms = check_metric_axioms(*d, pts, opts.triples, 2 * c.tolerance, opts.seed);

  const Mat dm = d->distance_matrix(pts);
  c.min_ratio_to_round = INFINITY;
  c.two_sided_bound = true;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double round = D.distance(pts[i], pts[j]);
      if (round == 0.0) continue;
      ++c.pairs;
      c.min_ratio_to_round = std::min(c.min_ratio_to_round, dm(i, j) / round);
      c.max_ratio_to_round = std::max(c.max_ratio_to_round, dm(i, j) / round);
      c.two_sided_bound = c.two_sided_bound && dm(i, j) <= round + c.tolerance && dm(i, j) >= 0.5 * round - c.tolerance;
    }

  const Atlas atlas = sphere_atlas();
  const Ambient metric = Ambient::metric(
      3, [d](const Vec& a, const Vec& b) { return d->distance(Vec3(a(0), a(1), a(2)), Vec3(b(0), b(1), b(2))); },
      "shortcut_sphere");
  std::uniform_int_distribution<int> pick_chart(0, static_cast<int>(atlas.charts.size()) - 1);
  std::uniform_real_distribution<double> coord(-0.9, 0.9);
  int passing = 0;
  while (c.isometry_samples < opts.isometry_samples) {
    const Chart& chart = atlas.charts[pick_chart(rng)];
    const Vec z = v2(coord(rng), coord(rng));
    const Vec p = chart(z);
    if (d->distance_to_circle(Vec3(p(0), p(1), p(2))) <= opts.circle_margin) continue;
    ++c.isometry_samples;
    const IsometryReport r =
        infinitesimal_isometry_check(chart, [](const Vec& x) { return x; }, std::numbers::pi / 2, metric, {z}, 1e-4);
    passing += r.fraction_passing == 1.0;
  }
  c.isometry_fraction = c.isometry_samples ? static_cast<double>(passing) / c.isometry_samples : 0.0;
  c.antipodal_distance = d->distance(Vec3(1, 0, 0), Vec3(-1, 0, 0));
  c.profile = lipschitz_profile(D, *d, [](const Vec3& p) { return p; }, pts);
  return c;
}

ZigzagCertificate zigzag_certificate(const ZigzagExperimentOptions& opts) {
  if (opts.levels.empty()) throw std::invalid_argument("zigzag_certificate: no levels");
  ZigzagCertificate c;
  ZigzagOptions zo;
  zo.n_max = opts.n_max;
  const auto surface = std::make_shared<const PolyhedralSurface>(build_zigzag_surface(zo));
  NullSet segment;
  segment.add_segment(Vec3(0, 0, 0), Vec3(1, 0, 0));
  const Vec3 p(0, 0, 0), q(1, 0, 0);
  for (int level : opts.levels) {
    const SteinerGraph g(*surface, level);
    ZigzagLevelRow row;
    row.level = level;
    row.nodes = static_cast<long>(g.node_count());
    row.graph = graph_distance(g, p, q).value;
    row.essential = essential_distance(g, p, q, segment).value;
    row.margin = row.essential - row.graph;
    c.rows.push_back(row);
  }
  if (c.rows.size() >= 2) {
    const double a = c.rows[c.rows.size() - 2].margin, b = c.rows.back().margin;
    c.margin_spread = std::abs(a - b) / std::max(std::abs(a), 1e-300);
  }

  const SurfaceOracle intrinsic(surface, opts.profile_level);
  const EuclideanOracle chord;
  Rng rng(opts.seed);
  std::vector<Vec3> snapped;
  for (const Vec3& x : random_zigzag_points(opts.points, rng, opts.n_max))
    snapped.push_back(intrinsic.graph().position(intrinsic.node(x)));
  const LipschitzProfile prof = lipschitz_profile(chord, intrinsic, [](const Vec3& x) { return x; }, snapped);
  c.chord_min_ratio = prof.min_ratio;
  c.chord_max_ratio = prof.max_ratio;
  c.pairs = prof.pairs;
  return c;
}

Json to_json(const RigidityBatchResult& r) {
  Json tags = Json::array();
  for (const auto& t : r.tags)
    tags.push_back({{"tag", std::string(to_string(t.tag))},
                    {"above_one", t.above_one},
                    {"min_jacobian", t.min_jacobian},
                    {"contradictions", t.contradictions}});
  return {{"count", r.count}, {"rejected", r.rejected}, {"all_above_one", r.all_above_one()}, {"tags", tags}};
}

Json to_json(const AreaSweep& s) {
  Json rows = Json::array();
  for (const auto& row : s.rows)
    rows.push_back({{"cells", row.cells},
                    {"h", row.h},
                    {"lhs", row.result.lhs},
                    {"rhs", row.result.rhs},
                    {"residual", row.result.residual},
                    {"error", row.error},
                    {"max_multiplicity", row.result.max_multiplicity},
                    {"pieces", row.result.pieces},
                    {"capped_pieces", row.result.capped_pieces},
                    {"error_budget", row.result.error_budget}});
  return {{"case", s.name},
          {"tag", std::string(to_string(s.tag))},
          {"rows", rows},
          {"observed_order", s.order.order},
          {"round_off_exact", s.order.exact}};
}

Json to_json(const MetricAxiomReport& r) {
  Json witness = nullptr;
  if (r.witness) witness = {(*r.witness)[0], (*r.witness)[1], (*r.witness)[2]};
  return {{"passed", r.passed},
          {"points", r.points},
          {"triples", r.triples},
          {"symmetry_violations", r.symmetry_violations},
          {"identity_violations", r.identity_violations},
          {"triangle_violations", r.triangle_violations},
          {"worst_asymmetry", r.worst_asymmetry},
          {"worst_triangle_excess", r.worst_triangle_excess},
          {"witness", witness}};
}

Json to_json(const LipschitzProfile& p) {
  return {{"max_ratio", p.max_ratio},
          {"min_ratio", p.min_ratio},
          {"pairs", p.pairs},
          {"argmax", ratio_pair(p.argmax)},
          {"argmin", ratio_pair(p.argmin)}};
}

Json to_json(const ShortcutSphereCertificate& c) {
  return {{"oracle_tolerance", c.tolerance},
          {"metric_axioms", to_json(c.axioms)},
          {"pairs", c.pairs},
          {"min_ratio_to_round", c.min_ratio_to_round},
          {"max_ratio_to_round", c.max_ratio_to_round},
          {"two_sided_bound", c.two_sided_bound},
          {"isometry_fraction", c.isometry_fraction},
          {"isometry_samples", c.isometry_samples},
          {"antipodal_distance", c.antipodal_distance},
          {"identity_profile", to_json(c.profile)}};
}

Json to_json(const ZigzagCertificate& c) {
  Json rows = Json::array();
  for (const auto& r : c.rows)
    rows.push_back({{"level", r.level},
                    {"nodes", r.nodes},
                    {"graph_distance", r.graph},
                    {"essential_distance", r.essential},
                    {"margin", r.margin}});
  return {{"levels", rows},
          {"margin_spread", c.margin_spread},
          {"chord_min_ratio", c.chord_min_ratio},
          {"chord_lipschitz_bound", c.chord_max_ratio},
          {"pairs", c.pairs}};
}

Json to_json(const CounterexampleCertificate& c) {
  return {{"norm", norm_to_json(c.norm)},
          {"jacobian_sr", c.jacobian_sr},
          {"max_ratio", c.max_ratio},
          {"expected_max_ratio", c.expected_max_ratio},
          {"dominates_euclidean", c.dominates_euclidean},
          {"jacobian_is_one", c.jacobian_is_one},
          {"max_ratio_matches", c.max_ratio_matches},
          {"certified", c.certified()}};
}

}  // namespace finsler
