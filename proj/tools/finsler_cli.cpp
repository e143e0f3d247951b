#include <CLI11.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>

#include "finsler/diagnostic.hpp"
#include "finsler/errors.hpp"
#include "finsler/experiments.hpp"
#include "finsler/json_io.hpp"
#include "finsler/measures.hpp"
#include "finsler/rectifiable.hpp"
#include "finsler/surface.hpp"

namespace fs = std::filesystem;
using namespace finsler;

namespace {

constexpr int kSchemaVersion = 1;

enum Exit { kOk = 0, kViolation = 1, kUsage = 2, kIo = 3, kNumerical = 4 };

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return out.str();
}

// A CSV table kept as text; written next to result.json under tables/.
struct Table {
  std::string name;
  std::string text;
};

struct Run {
  Json config;  // the command section, defaults not filled in
  std::uint64_t seed = kDefaultSeed;
  std::optional<int> level;
  Json results = Json::object();
  std::vector<std::string> warnings;
  std::vector<std::string> violations;
  std::vector<Table> tables;
};

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

// --- config helpers ---------------------------------------------------------

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const Json::exception&) {
    throw SchemaError(std::string("config: '") + key + "' has the wrong type");
  }
}

int positive_int(const Json& j, const char* key, int fallback) {
  const int v = get_or<int>(j, key, fallback);
  if (v < 1) throw SchemaError(std::string("config: '") + key + "' must be positive");
  return v;
}

std::vector<int> int_list(const Json& j, const char* key, std::vector<int> fallback) {
  const auto v = get_or<std::vector<int>>(j, key, fallback);
  if (v.empty()) throw SchemaError(std::string("config: '") + key + "' must not be empty");
  return v;
}

std::vector<VolumeTag> tag_list(const Json& j, std::vector<VolumeTag> fallback) {
  if (!j.contains("tags")) return fallback;
  std::vector<VolumeTag> out;
  for (const auto& name : get_or<std::vector<std::string>>(j, "tags", {})) {
    try {
      out.push_back(parse_volume_tag(name));
    } catch (const std::invalid_argument&) {
      throw SchemaError("config: unknown volume tag '" + name + "'");
    }
  }
  if (out.empty()) throw SchemaError("config: 'tags' must not be empty");
  return out;
}

Vec3 point3(const Json& j, const std::string& where) {
  const Vec v = vec_from_json(j, where);
  if (v.size() != 3) throw SchemaError(where + ": expected three coordinates");
  return Vec3(v(0), v(1), v(2));
}

std::map<std::string, Seminorm> named_norms(const Json& j, const std::map<std::string, Seminorm>& fallback) {
  if (!j.contains("norms")) return fallback;
  const Json& norms = j["norms"];
  if (!norms.is_object() || norms.empty()) throw SchemaError("config: 'norms' must be a non-empty object");
  std::map<std::string, Seminorm> out;
  for (const auto& [name, doc] : norms.items()) out.emplace(name, norm_from_json(doc));
  return out;
}

void require_file(const std::string& path) {
  if (!fs::is_regular_file(path)) throw IoError("cannot read '" + path + "'");
}

// --- commands ---------------------------------------------------------------

void cmd_jacobian(Run& run) {
  const Json& c = run.config;
  require_keys(c, {"norms", "tags", "resolution"}, "jacobian");
  const auto norms = named_norms(c, {{"euclidean", Seminorm::euclidean(2)}});
  const auto tags = tag_list(c, {std::begin(kAllVolumeTags), std::end(kAllVolumeTags)});
  BallResolution res;
  if (c.contains("resolution")) {
    const Json& r = c["resolution"];
    require_keys(r, {"directions_2d", "icosphere_level", "directions_nd", "qmc_samples"}, "jacobian.resolution");
    res.directions_2d = positive_int(r, "directions_2d", res.directions_2d);
    res.icosphere_level = positive_int(r, "icosphere_level", res.icosphere_level);
    res.directions_nd = positive_int(r, "directions_nd", static_cast<int>(res.directions_nd));
    res.qmc.samples = positive_int(r, "qmc_samples", static_cast<int>(res.qmc.samples));
  }
  res.qmc.seed = run.seed;
  Json entries = Json::array();
  std::string csv = "norm,tag,jacobian,exactness,std_error\n";
  for (const auto& [name, s] : norms)
    for (VolumeTag t : tags) {
      const JacobianResult r = jacobian(t, s, res);
      Json e = to_json(r);
      e["norm"] = name;
      entries.push_back(e);
      csv += name + "," + std::string(to_string(t)) + "," + fmt(r.value) + "," + std::string(to_string(r.exactness)) +
             "," + fmt(r.std_error) + "\n";
      if (r.exactness == Exactness::heuristic)
        run.warnings.push_back(name + "/" + std::string(to_string(t)) + ": parallelepiped found heuristically");
      if (s.kind() == NormKind::euclidean) {
        const double tol = r.exactness == Exactness::sampled ? 1e-3 : 1e-9;
        if (std::abs(r.value - 1.0) > tol)
          run.violations.push_back(name + "/" + std::string(to_string(t)) + ": Euclidean Jacobian " + fmt(r.value) +
                                   " differs from 1");
      }
    }
  run.results["jacobians"] = entries;
  run.tables.push_back({"jacobian", csv});
}

void cmd_rigidity(Run& run) {
  const Json& c = run.config;
  require_keys(c, {"norms", "tags", "batch", "counterexample_n"}, "rigidity");
  const auto tags = tag_list(c, {std::begin(kAllVolumeTags), std::end(kAllVolumeTags)});
  const auto norms = named_norms(c, {{"square_octagon", regular_2ngon_norm(4)}});
  Json verdicts = Json::array();
  std::string csv = "norm,tag,jacobian,hypotheses_hold,conclusion_holds,max_ratio\n";
  for (const auto& [name, s] : norms)
    for (VolumeTag t : tags) {
      const RigidityVerdict v = rigidity_test(t, s);
      Json j = to_json(v);
      j["norm"] = name;
      verdicts.push_back(j);
      csv += name + "," + std::string(to_string(t)) + "," + fmt(v.jacobian.value) + "," +
             (v.hypotheses_hold ? "1" : "0") + "," + (v.conclusion_holds ? "1" : "0") + "," + fmt(v.max_ratio) + "\n";
      if (v.contradiction())
        run.violations.push_back(name + "/" + std::string(to_string(t)) + ": rigid definition admits a non-Euclidean norm");
    }
  run.results["verdicts"] = verdicts;
  run.tables.push_back({"rigidity", csv});

  RigidityBatchOptions bo;
  bo.seed = run.seed;
  if (c.contains("batch")) {
    const Json& b = c["batch"];
    require_keys(b, {"count", "min_half_vertices", "max_half_vertices", "min_ratio"}, "rigidity.batch");
    bo.count = positive_int(b, "count", bo.count);
    bo.min_half_vertices = positive_int(b, "min_half_vertices", bo.min_half_vertices);
    bo.max_half_vertices = positive_int(b, "max_half_vertices", bo.max_half_vertices);
    bo.min_ratio = get_or<double>(b, "min_ratio", bo.min_ratio);
  }
  try {
    const RigidityBatchResult batch = rigidity_batch(bo);
    run.results["batch"] = to_json(batch);
    for (const auto& t : batch.tags)
      if (t.contradictions > 0)
        run.violations.push_back("batch: " + std::string(to_string(t.tag)) + " has " + std::to_string(t.contradictions) +
                                 " contradictions");
  } catch (const std::invalid_argument& e) {
    throw SchemaError(std::string("rigidity.batch: ") + e.what());
  }

  Json certs = Json::array();
  for (int n : int_list(c, "counterexample_n", {4})) {
    if (n < 2) throw SchemaError("rigidity: counterexample_n entries must be at least 2");
    Json j = to_json(sr_counterexample(n));
    j["n"] = n;
    certs.push_back(j);
  }
  run.results["sr_counterexamples"] = certs;
}

Box box_from_json(const Json& j, const std::string& where) {
  require_keys(j, {"lo", "hi"}, where);
  Box b{vec_from_json(j.at("lo"), where + ".lo"), vec_from_json(j.at("hi"), where + ".hi")};
  if (b.lo.size() != b.hi.size() || !(b.hi.array() > b.lo.array()).all())
    throw SchemaError(where + ": need lo < hi coordinatewise");
  return b;
}

// Height sum_k c_k x^a_k y^b_k from rows [c, a, b]; the Lipschitz bound is crude but valid on the box.
Chart polynomial_graph_chart(const Json& terms, const Box& domain, const std::string& where) {
  if (domain.dim() != 2) throw SchemaError(where + ": graph charts live on a planar box");
  const Mat t = mat_from_json(terms, where + ".polynomial");
  if (t.cols() != 3 || ((t.col(1).array() < 0) || (t.col(2).array() < 0)).any() ||
      ((t.col(1).array() != t.col(1).array().round()) || (t.col(2).array() != t.col(2).array().round())).any())
    throw SchemaError(where + ": polynomial rows are [coefficient, x power, y power] with whole powers");
  const double X = std::max(std::abs(domain.lo(0)), std::abs(domain.hi(0)));
  const double Y = std::max(std::abs(domain.lo(1)), std::abs(domain.hi(1)));
  double lip = 0.0;
  for (Eigen::Index k = 0; k < t.rows(); ++k) {
    const double c = std::abs(t(k, 0)), a = t(k, 1), b = t(k, 2);
    if (a > 0) lip += c * a * std::pow(X, a - 1) * std::pow(Y, b);
    if (b > 0) lip += c * b * std::pow(X, a) * std::pow(Y, b - 1);
  }
  return graph_chart(
      [t](const Vec& x) {
        double h = 0.0;
        for (Eigen::Index k = 0; k < t.rows(); ++k) h += t(k, 0) * std::pow(x(0), t(k, 1)) * std::pow(x(1), t(k, 2));
        return h;
      },
      lip, domain);
}

Atlas atlas_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw SchemaError(where + ": expected a non-empty list of charts");
  Atlas atlas;
  for (const Json& chart : j) {
    const std::string kind = chart.value("kind", "");
    if (kind == "sphere_faces") {
      require_keys(chart, {"kind"}, where);
      for (Chart& face : sphere_atlas().charts) atlas.charts.push_back(std::move(face));
    } else if (kind == "linear") {
      require_keys(chart, {"kind", "matrix", "domain"}, where);
      const Mat A = mat_from_json(chart.at("matrix"), where + ".matrix");
      const Box domain = box_from_json(chart.at("domain"), where + ".domain");
      if (A.cols() != domain.dim()) throw SchemaError(where + ": matrix columns must match the domain dimension");
      atlas.charts.push_back(linear_chart(A, domain));
    } else if (kind == "graph") {
      require_keys(chart, {"kind", "polynomial", "domain"}, where);
      atlas.charts.push_back(
          polynomial_graph_chart(chart.at("polynomial"), box_from_json(chart.at("domain"), where + ".domain"), where));
    } else if (kind == "zigzag") {
      require_keys(chart, {"kind", "n_max", "extent"}, where);
      atlas.charts.push_back(zigzag_chart(positive_int(chart, "n_max", 6), get_or<double>(chart, "extent", 1.0)));
    } else {
      throw SchemaError(where + ": unknown chart kind '" + kind + "'");
    }
  }
  return atlas;
}

// mu-measure of config-defined atlases; the whole image is measured.
void measure_atlases(Run& run, const Json& measures, const std::vector<VolumeTag>& tags, int cells) {
  if (!measures.is_object()) throw SchemaError("area_check: 'measures' must map names to chart lists");
  Json out = Json::array();
  std::string csv = "measure,tag,cells_per_dim,value,degenerate_cells\n";
  for (const auto& [name, charts] : measures.items()) {
    const Atlas atlas = atlas_from_json(charts, "area_check.measures." + name);
    for (VolumeTag t : tags) {
      const MuMeasureResult r = mu_measure(atlas, t, [](const Vec&) { return true; }, {cells});
      out.push_back({{"measure", name}, {"tag", to_string(t)}, {"cells_per_dim", cells}, {"value", r.value},
                     {"degenerate_cells", r.degenerate_cells}});
      csv += name + "," + std::string(to_string(t)) + "," + std::to_string(cells) + "," + fmt(r.value) + "," +
             std::to_string(r.degenerate_cells) + "\n";
      for (const auto& w : r.warnings) run.warnings.push_back(name + ": " + w);
    }
  }
  run.results["measures"] = out;
  run.tables.push_back({"mu_measure", csv});
}

void cmd_area_check(Run& run) {
  const Json& c = run.config;
  require_keys(c, {"cases", "tags", "cells", "residual_tol", "measures", "cells_per_dim"}, "area_check");
  if (c.contains("measures")) {
    int cells = positive_int(c, "cells_per_dim", 64);
    if (run.level) cells = 8 << *run.level;
    measure_atlases(run, c["measures"], tag_list(c, {VolumeTag::bh}), cells);
    if (!c.contains("cases")) return;
  }
  const auto cases = get_or<std::vector<std::string>>(c, "cases", area_benchmark_names());
  const auto tags = tag_list(c, {VolumeTag::bh});
  std::vector<int> cells = int_list(c, "cells", {8, 16, 32});
  if (run.level) cells = {8 << *run.level};
  const double tol = get_or<double>(c, "residual_tol", 1e-3);
  Json sweeps = Json::array();
  std::string csv = "case,tag,cells,h,lhs,rhs,residual,error\n";
  for (const std::string& name : cases) {
    const auto names = area_benchmark_names();
    if (std::find(names.begin(), names.end(), name) == names.end())
      throw SchemaError("area_check: unknown case '" + name + "'");
    const AreaBenchmark bench = area_benchmark(name);
    for (VolumeTag t : tags) {
      const AreaSweep s = area_sweep(bench, t, cells);
      sweeps.push_back(to_json(s));
      for (const auto& r : s.rows)
        csv += name + "," + std::string(to_string(t)) + "," + std::to_string(r.cells) + "," + fmt(r.h) + "," +
               fmt(r.result.lhs) + "," + fmt(r.result.rhs) + "," + fmt(r.result.residual) + "," + fmt(r.error) + "\n";
      const AreaFormulaResult& finest = s.rows.back().result;
      if (finest.capped_pieces > 0)
        run.warnings.push_back(name + ": " + std::to_string(finest.capped_pieces) + " pieces hit the bisection cap");
      if (finest.residual > tol)
        run.violations.push_back(name + "/" + std::string(to_string(t)) + ": residual " + fmt(finest.residual) +
                                 " above " + fmt(tol));
    }
  }
  run.results["sweeps"] = sweeps;
  run.tables.push_back({"area_residuals", csv});
}

std::shared_ptr<const PolyhedralSurface> load_surface(const Json& s) {
  require_keys(s, {"kind", "n_max", "cells", "side", "subdivisions", "path"}, "geodesic.surface");
  const std::string kind = get_or<std::string>(s, "kind", "zigzag");
  if (kind == "zigzag") {
    ZigzagOptions o;
    o.n_max = positive_int(s, "n_max", o.n_max);
    return std::make_shared<const PolyhedralSurface>(build_zigzag_surface(o));
  }
  if (kind == "flat_square")
    return std::make_shared<const PolyhedralSurface>(
        flat_square_mesh(positive_int(s, "cells", 4), get_or<double>(s, "side", 1.0)));
  if (kind == "icosphere") return std::make_shared<const PolyhedralSurface>(icosphere_mesh(positive_int(s, "subdivisions", 3)));
  if (kind == "off") {
    const std::string path = get_or<std::string>(s, "path", "");
    require_file(path);
    return std::make_shared<const PolyhedralSurface>(read_off(path));
  }
  throw SchemaError("geodesic.surface: unknown kind '" + kind + "'");
}

NullSet load_null_set(const Json& j, const std::string& where) {
  if (!j.is_array()) throw SchemaError(where + ": expected a list of primitives");
  NullSet n;
  for (const Json& p : j) {
    require_keys(p, {"segment", "circle"}, where);
    if (p.contains("segment")) {
      const Json& s = p["segment"];
      if (!s.is_array() || s.size() != 2) throw SchemaError(where + ": a segment has two endpoints");
      n.add_segment(point3(s[0], where), point3(s[1], where));
    } else if (p.contains("circle")) {
      const Json& c = p["circle"];
      require_keys(c, {"center", "normal", "radius"}, where + ".circle");
      n.add_circle(point3(c.at("center"), where), point3(c.at("normal"), where), c.at("radius").get<double>());
    } else {
      throw SchemaError(where + ": empty primitive");
    }
  }
  return n;
}

void cmd_geodesic(Run& run) {
  const Json& c = run.config;
  require_keys(c, {"surface", "points", "points_csv", "pairs", "null_sets", "levels", "oracles"}, "geodesic");
  const bool use_surface = c.contains("surface") || !c.contains("oracles");

  std::map<std::string, Vec3> points;
  if (c.contains("points")) {
    if (!c["points"].is_object()) throw SchemaError("geodesic: 'points' must map names to coordinates");
    for (const auto& [name, p] : c["points"].items()) points.emplace(name, point3(p, "geodesic.points." + name));
  } else if (!c.contains("points_csv")) {
    points = {{"p", Vec3(0, 0, 0)}, {"q", Vec3(1, 0, 0)}};
  }
  if (c.contains("points_csv")) {
    const std::string path = c["points_csv"].get<std::string>();
    require_file(path);
    const DiscreteMeasure m = read_measure_csv(path);
    if (m.dim() != 3) throw SchemaError("geodesic: points_csv must hold points in R^3");
    for (std::size_t i = 0; i < m.atoms().size(); ++i) {
      const Vec& a = m.atoms()[i].point;
      points.emplace("atom" + std::to_string(i), Vec3(a(0), a(1), a(2)));
    }
  }

  std::vector<std::pair<std::string, std::string>> pairs;
  if (c.contains("pairs")) {
    for (const Json& p : c["pairs"]) {
      if (!p.is_array() || p.size() != 2 || !p[0].is_string() || !p[1].is_string())
        throw SchemaError("geodesic: each pair is [source, target]");
      pairs.emplace_back(p[0].get<std::string>(), p[1].get<std::string>());
    }
  } else {
    for (auto a = points.begin(); a != points.end(); ++a)
      for (auto b = std::next(a); b != points.end(); ++b) pairs.emplace_back(a->first, b->first);
  }
  for (const auto& [a, b] : pairs)
    if (!points.count(a) || !points.count(b)) throw SchemaError("geodesic: pair names an unknown point");

  std::map<std::string, NullSet> null_sets;
  if (c.contains("null_sets")) {
    if (!c["null_sets"].is_object()) throw SchemaError("geodesic: 'null_sets' must be an object");
    for (const auto& [name, doc] : c["null_sets"].items()) null_sets.emplace(name, load_null_set(doc, "null_sets." + name));
  } else if (use_surface && c.value("surface", Json::object()).value("kind", "zigzag") == "zigzag") {
    null_sets.emplace("I", NullSet().add_segment(Vec3(0, 0, 0), Vec3(1, 0, 0)));
  }

  if (c.contains("oracles")) {
    Json out = Json::object();
    for (const auto& name : get_or<std::vector<std::string>>(c, "oracles", {})) {
      std::unique_ptr<DistanceOracle> oracle;
      if (name == "euclidean") oracle = std::make_unique<EuclideanOracle>();
      else if (name == "great_circle") oracle = std::make_unique<GreatCircleOracle>();
      else if (name == "shortcut_sphere") oracle = std::make_unique<ShortcutSphereOracle>();
      else throw SchemaError("geodesic: unknown oracle '" + name + "'");
      std::vector<DistanceRow> rows;
      Json values = Json::array();
      for (const auto& [a, b] : pairs) {
        const double d = oracle->distance(points[a], points[b]);
        rows.push_back({a, b, d, 0});
        values.push_back({{"source", a}, {"target", b}, {"value", d}});
      }
      out[name] = values;
      std::ostringstream csv;
      write_distances_csv(csv, rows);
      run.tables.push_back({"distances_" + name, csv.str()});
    }
    run.results["oracles"] = out;
  }
  if (!use_surface) return;

  const auto surface = load_surface(c.value("surface", Json::object()));
  std::vector<int> levels = int_list(c, "levels", {2, 3, 4});
  if (run.level) levels = {*run.level};

  std::vector<DistanceRow> graph_rows;
  std::map<std::string, std::vector<DistanceRow>> ess_rows;
  Json rows = Json::array();
  for (int level : levels) {
    if (level < 0 || level > 12) throw SchemaError("geodesic: levels must lie in [0, 12]");
    const SteinerGraph g(*surface, level);
    for (const auto& [a, b] : pairs) {
      const SurfaceDistance plain = graph_distance(g, points[a], points[b]);
      Json row{{"source", a}, {"target", b}, {"level", level}, {"graph_distance", plain.value},
               {"snap_error", plain.snap_error}};
      if (!plain.reachable) {
        row["graph_distance"] = nullptr;
        run.warnings.push_back(a + "-" + b + " level " + std::to_string(level) + ": " + plain.diagnostic);
      }
      graph_rows.push_back({a, b, plain.value, level});
      Json ess = Json::object();
      for (const auto& [name, n] : null_sets) {
        const SurfaceDistance e = essential_distance(g, points[a], points[b], n);
        ess[name] = e.reachable ? Json(e.value) : Json(nullptr);
        if (!e.reachable) run.warnings.push_back(a + "-" + b + " avoiding " + name + ": " + e.diagnostic);
        ess_rows[name].push_back({a, b, e.value, level});
        if (e.reachable && plain.reachable && e.value < plain.value - 1e-12)
          run.violations.push_back(a + "-" + b + ": essential distance below graph distance");
      }
      row["essential_distance"] = ess;
      rows.push_back(row);
    }
  }
  run.results["surface"] = {{"vertices", surface->vertices().size()}, {"triangles", surface->triangles().size()}};
  run.results["distances"] = rows;
  std::ostringstream g;
  write_distances_csv(g, graph_rows);
  run.tables.push_back({"distances", g.str()});
  for (const auto& [name, r] : ess_rows) {
    std::ostringstream e;
    write_distances_csv(e, r);
    run.tables.push_back({"distances_avoiding_" + name, e.str()});
  }
}

void cmd_counterexample(Run& run, const std::string& name) {
  const Json& c = run.config;
  if (name == "sr_polygon") {
    require_keys(c, {"n"}, "counterexample");
    const int n = positive_int(c, "n", 4);
    const CounterexampleCertificate cert = sr_counterexample(n);
    run.results = to_json(cert);
    run.results["n"] = n;
    if (!cert.certified()) run.violations.push_back("sr_polygon: certificate not established");
    run.tables.push_back({"sr_polygon", "n,jacobian_sr,max_ratio,expected_max_ratio\n" + std::to_string(n) + "," +
                                            fmt(cert.jacobian_sr) + "," + fmt(cert.max_ratio) + "," +
                                            fmt(cert.expected_max_ratio) + "\n"});
  } else if (name == "shortcut_sphere") {
    require_keys(c, {"circle_samples", "points", "triples", "isometry_samples"}, "counterexample");
    ShortcutSphereOptions o;
    o.circle_samples = positive_int(c, "circle_samples", o.circle_samples);
    o.points = positive_int(c, "points", o.points);
    o.triples = positive_int(c, "triples", o.triples);
    o.isometry_samples = positive_int(c, "isometry_samples", o.isometry_samples);
    o.seed = run.seed;
    const ShortcutSphereCertificate cert = shortcut_sphere_certificate(o);
    run.results = to_json(cert);
    if (!cert.axioms.passed) run.violations.push_back("shortcut_sphere: metric axioms fail");
    if (!cert.two_sided_bound) run.violations.push_back("shortcut_sphere: D/2 <= d <= D fails");
    run.tables.push_back({"shortcut_sphere",
                          "quantity,value\nmin_ratio_to_round," + fmt(cert.min_ratio_to_round) + "\nmax_ratio_to_round," +
                              fmt(cert.max_ratio_to_round) + "\nisometry_fraction," + fmt(cert.isometry_fraction) +
                              "\nantipodal_distance," + fmt(cert.antipodal_distance) + "\n"});
  } else if (name == "zigzag") {
    require_keys(c, {"n_max", "levels", "points", "profile_level"}, "counterexample");
    ZigzagExperimentOptions o;
    o.n_max = positive_int(c, "n_max", o.n_max);
    o.levels = int_list(c, "levels", o.levels);
    if (run.level) o.levels = {std::max(0, *run.level - 1), *run.level};
    o.points = positive_int(c, "points", o.points);
    o.profile_level = get_or<int>(c, "profile_level", o.profile_level);
    o.seed = run.seed;
    const ZigzagCertificate cert = zigzag_certificate(o);
    run.results = to_json(cert);
    std::string csv = "level,nodes,graph_distance,essential_distance,margin\n";
    for (const auto& r : cert.rows) {
      csv += std::to_string(r.level) + "," + std::to_string(r.nodes) + "," + fmt(r.graph) + "," + fmt(r.essential) +
             "," + fmt(r.margin) + "\n";
      if (r.margin < -1e-12) run.violations.push_back("zigzag: essential distance below graph distance");
    }
    if (cert.chord_min_ratio < 1.0 - 1e-12) run.violations.push_back("zigzag: intrinsic distance below the chord");
    run.tables.push_back({"zigzag", csv});
  } else {
    throw SchemaError("counterexample: unknown construction '" + name + "'");
  }
  run.results["construction"] = name;
}

void cmd_diagnose_map(Run& run) {
  const Json& c = run.config;
  require_keys(c, {"preset", "points", "circle_samples", "n_max", "level", "tag", "cells_per_dim"}, "diagnose_map");
  const std::string preset = get_or<std::string>(c, "preset", "shortcut_sphere");
  MapDiagnosticInput in;
  if (preset == "flat_square")
    in = flat_square_identity_input(positive_int(c, "points", 24), run.seed);
  else if (preset == "shortcut_sphere")
    in = shortcut_sphere_input(positive_int(c, "circle_samples", 256), positive_int(c, "points", 40), run.seed);
  else if (preset == "zigzag")
    in = zigzag_input(positive_int(c, "n_max", 6), run.level.value_or(get_or<int>(c, "level", 3)),
                      positive_int(c, "points", 16), run.seed);
  else
    throw SchemaError("diagnose_map: unknown preset '" + preset + "'");
  DiagnosticOptions o;
  try {
    o.tag = parse_volume_tag(get_or<std::string>(c, "tag", "bh"));
  } catch (const std::invalid_argument&) {
    throw SchemaError("diagnose_map: unknown volume tag");
  }
  o.cells_per_dim = positive_int(c, "cells_per_dim", o.cells_per_dim);
  const DiagnosticReport r = map_rigidity_diagnostic(in, o);
  Json checks = Json::array();
  std::string csv = "check,available,holds,value,reference\n";
  for (const auto& k : r.checks) {
    checks.push_back({{"name", k.name},
                      {"available", k.available},
                      {"holds", k.holds},
                      {"value", k.value},
                      {"reference", k.reference},
                      {"detail", k.detail}});
    csv += k.name + "," + (k.available ? "1" : "0") + "," + (k.holds ? "1" : "0") + "," + fmt(k.value) + "," +
           fmt(k.reference) + "\n";
  }
  run.results = {{"preset", preset},
                 {"map", r.name},
                 {"checks", checks},
                 {"hypotheses_hold", r.hypotheses_hold},
                 {"isometry_observed", r.isometry_observed},
                 {"profile", to_json(r.profile)},
                 {"flags", r.flags}};
  for (const auto& f : r.flags) run.warnings.push_back(f);
  run.tables.push_back({"diagnostic", csv});
}

// --- output -----------------------------------------------------------------

void write_atomic(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    out << text;
    if (!out.flush()) throw IoError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move '" + tmp.string() + "' into place: " + ec.message());
}

Json load_config(const std::string& path) {
  if (path.empty()) return Json::object();
  require_file(path);
  std::ifstream in(path);
  try {
    return Json::parse(in, nullptr, true, true);
  } catch (const Json::parse_error& e) {
    throw SchemaError(std::string("config is not valid JSON: ") + e.what());
  }
}

// Top-level keys are shared; the command's own settings live under a section named after it.
Json command_section(const Json& config, const std::string& command, const std::string& section) {
  require_keys(config, {"schema_version", "command", "seed", "level", "jacobian", "rigidity", "area_check", "geodesic",
                        "counterexample", "diagnose_map"},
               "config");
  if (config.contains("schema_version") && config["schema_version"] != kSchemaVersion)
    throw SchemaError("config: unsupported schema_version (expected " + std::to_string(kSchemaVersion) + ")");
  if (config.contains("command") && config["command"] != command)
    throw SchemaError("config: written for command '" + config["command"].dump() + "', run as '" + command + "'");
  return config.value(section, Json::object());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finsler volume, area formula and length-space experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path, out_dir = "finsler_out", construction;
  std::optional<std::uint64_t> seed_flag;
  std::optional<int> level_flag;
  bool print_json = false;
  app.add_option("--config", config_path, "JSON experiment configuration");
  app.add_option("--out", out_dir, "output directory for result.json and tables/");
  app.add_option("--seed", seed_flag, "random seed (overrides the config)");
  app.add_option("--level", level_flag, "refinement level (overrides the config)");
  app.add_flag("--json", print_json, "also print the result envelope to stdout");
  const std::map<std::string, std::string> sections{{"jacobian", "jacobian"},         {"rigidity", "rigidity"},
                                                    {"area-check", "area_check"},     {"geodesic", "geodesic"},
                                                    {"counterexample", "counterexample"}, {"diagnose-map", "diagnose_map"}};
  for (const auto& [name, section] : sections) {
    CLI::App* sub = app.add_subcommand(name);
    if (name == "counterexample")
      sub->add_option("construction", construction, "sr_polygon, shortcut_sphere or zigzag")
          ->required()
          ->check(CLI::IsMember({"sr_polygon", "shortcut_sphere", "zigzag"}));
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  const auto start = std::chrono::steady_clock::now();
  Run run;
  try {
    const Json config = load_config(config_path);
    run.config = command_section(config, command, sections.at(command));
    run.seed = seed_flag.value_or(get_or<std::uint64_t>(config, "seed", kDefaultSeed));
    if (level_flag)
      run.level = *level_flag;
    else if (config.contains("level"))
      run.level = get_or<int>(config, "level", 0);
    if (run.level && *run.level < 0) throw SchemaError("level must be non-negative");

    if (command == "jacobian") cmd_jacobian(run);
    else if (command == "rigidity") cmd_rigidity(run);
    else if (command == "area-check") cmd_area_check(run);
    else if (command == "geodesic") cmd_geodesic(run);
    else if (command == "counterexample") cmd_counterexample(run, construction);
    else cmd_diagnose_map(run);

    Json effective = {{"command", command}, {"section", run.config}, {"seed", run.seed}};
    if (command == "counterexample") effective["construction"] = construction;
    if (run.level) effective["level"] = *run.level;
    Json envelope{{"schema_version", kSchemaVersion},
                  {"command", command},
                  {"config_hash", sha256_hex(effective.dump())},
                  {"seed", run.seed},
                  {"results", run.results},
                  {"warnings", run.warnings},
                  {"invariant_violations", run.violations},
                  {"wall_time_s", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};
    if (command == "counterexample") envelope["command"] = command + " " + construction;

    fs::create_directories(fs::path(out_dir) / "tables");
    write_atomic(fs::path(out_dir) / "result.json", envelope.dump(2) + "\n");
    for (const Table& t : run.tables) write_atomic(fs::path(out_dir) / "tables" / (t.name + ".csv"), t.text);
    if (print_json) std::cout << envelope.dump(2) << "\n";
    for (const auto& v : run.violations) std::cerr << "invariant violation: " << v << "\n";
    return run.violations.empty() ? kOk : kViolation;
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kUsage;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const DimensionError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kUsage;
  } catch (const ConvergenceError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kNumerical;
  } catch (const GeometryError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::length_error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  }
}
