#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "finsler/diagnostic.hpp"
#include "finsler/errors.hpp"
#include "finsler/experiments.hpp"
#include "finsler/json_io.hpp"
#include "finsler/surface.hpp"

namespace py = pybind11;
using namespace finsler;

namespace {

// Results cross the boundary as JSON text; the Python side turns them into dicts.
std::string text(const Json& j) { return j.dump(); }

Vec3 point3(const Vec& v) {
  if (v.size() != 3) throw DimensionError("expected a point in R^3");
  return Vec3(v(0), v(1), v(2));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Finsler volumes, rectifiable area formula and polyhedral length spaces";

  py::register_exception<SchemaError>(m, "SchemaError", PyExc_ValueError);
  py::register_exception<GeometryError>(m, "GeometryError", PyExc_RuntimeError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);

  py::class_<Seminorm>(m, "Norm")
      .def_static("euclidean", &Seminorm::euclidean, py::arg("dim"))
      .def_static("gram", &Seminorm::gram, py::arg("matrix"))
      .def_static("polytopal", &Seminorm::polytopal, py::arg("facets"))
      .def_static("p_norm", &Seminorm::p_norm, py::arg("dim"), py::arg("p"))
      .def_static("callable", &Seminorm::callable, py::arg("dim"), py::arg("fn"), py::arg("tolerance") = 1e-12)
      .def_static("regular_2ngon", &regular_2ngon_norm, py::arg("n"))
      .def_static("from_json", [](const std::string& s) { return norm_from_json(Json::parse(s)); })
      .def("to_json", [](const Seminorm& s) { return text(norm_to_json(s)); })
      .def_property_readonly("dim", &Seminorm::dim)
      .def("__call__", [](const Seminorm& s, const Vec& v) { return s(v); });

  m.def("volume_tags", [] {
    std::vector<std::string> out;
    for (VolumeTag t : kAllVolumeTags) out.emplace_back(to_string(t));
    return out;
  });

  m.def(
      "jacobian",
      [](const std::string& tag, const Seminorm& s, long qmc_samples, std::uint64_t seed) {
        BallResolution res;
        res.qmc.samples = qmc_samples;
        res.qmc.seed = seed;
        return text(to_json(jacobian(parse_volume_tag(tag), s, res)));
      },
      py::arg("tag"), py::arg("norm"), py::arg("qmc_samples") = BallResolution{}.qmc.samples,
      py::arg("seed") = kDefaultSeed);

  m.def(
      "rigidity_test", [](const std::string& tag, const Seminorm& s) {
        return text(to_json(rigidity_test(parse_volume_tag(tag), s)));
      },
      py::arg("tag"), py::arg("norm"));

  m.def(
      "sr_counterexample", [](int n) { return text(to_json(sr_counterexample(n))); }, py::arg("n") = 4);

  m.def(
      "rigidity_batch",
      [](int count, std::uint64_t seed) {
        RigidityBatchOptions o;
        o.count = count;
        o.seed = seed;
        return text(to_json(rigidity_batch(o)));
      },
      py::arg("count") = 200, py::arg("seed") = kDefaultSeed);

  m.def("area_cases", &area_benchmark_names);
  m.def(
      "area_sweep",
      [](const std::string& name, const std::string& tag, const std::vector<int>& cells) {
        return text(to_json(area_sweep(area_benchmark(name), parse_volume_tag(tag), cells)));
      },
      py::arg("case"), py::arg("tag") = "bh", py::arg("cells") = std::vector<int>{8, 16, 32});

  m.def(
      "surface_distance",
      [](const std::string& off_path, const Vec& p, const Vec& q, int level,
         const std::vector<std::pair<Vec, Vec>>& removed_segments) {
        const PolyhedralSurface surface(read_off(off_path));
        const SteinerGraph g(surface, level);
        NullSet n;
        for (const auto& [a, b] : removed_segments) n.add_segment(point3(a), point3(b));
        const SurfaceDistance d = removed_segments.empty() ? graph_distance(g, point3(p), point3(q))
                                                           : essential_distance(g, point3(p), point3(q), n);
        py::dict out;
        out["value"] = d.reachable ? py::cast(d.value) : py::none();
        out["level"] = d.level;
        out["snap_error"] = d.snap_error;
        out["diagnostic"] = d.diagnostic;
        return out;
      },
      py::arg("off_path"), py::arg("p"), py::arg("q"), py::arg("level") = 2,
      py::arg("removed_segments") = std::vector<std::pair<Vec, Vec>>{});

  m.def(
      "write_zigzag_off",
      [](const std::string& path, int n_max) {
        ZigzagOptions o;
        o.n_max = n_max;
        write_off(path, build_zigzag_surface(o).mesh());
      },
      py::arg("path"), py::arg("n_max") = 6);

  m.def(
      "shortcut_sphere_certificate",
      [](int points, int triples, int isometry_samples, std::uint64_t seed) {
        ShortcutSphereOptions o;
        o.points = points;
        o.triples = triples;
        o.isometry_samples = isometry_samples;
        o.seed = seed;
        return text(to_json(shortcut_sphere_certificate(o)));
      },
      py::arg("points") = 64, py::arg("triples") = 10'000, py::arg("isometry_samples") = 240,
      py::arg("seed") = kDefaultSeed);

  m.def(
      "zigzag_certificate",
      [](int n_max, const std::vector<int>& levels, int points, int profile_level, std::uint64_t seed) {
        ZigzagExperimentOptions o;
        o.n_max = n_max;
        o.levels = levels;
        o.points = points;
        o.profile_level = profile_level;
        o.seed = seed;
        return text(to_json(zigzag_certificate(o)));
      },
      py::arg("n_max") = 6, py::arg("levels") = std::vector<int>{3, 4}, py::arg("points") = 12,
      py::arg("profile_level") = 2, py::arg("seed") = kDefaultSeed);

  m.def(
      "diagnose_map",
      [](const std::string& preset, std::uint64_t seed) {
        MapDiagnosticInput in;
        if (preset == "flat_square") in = flat_square_identity_input(24, seed);
        else if (preset == "shortcut_sphere") in = shortcut_sphere_input(256, 40, seed);
        else if (preset == "zigzag") in = zigzag_input(6, 3, 16, seed);
        else throw std::invalid_argument("unknown preset '" + preset + "'");
        const DiagnosticReport r = map_rigidity_diagnostic(in);
        Json checks = Json::array();
        for (const auto& c : r.checks)
          checks.push_back({{"name", c.name}, {"available", c.available}, {"holds", c.holds}, {"value", c.value},
                            {"reference", c.reference}});
        return text({{"map", r.name},
                     {"checks", checks},
                     {"hypotheses_hold", r.hypotheses_hold},
                     {"isometry_observed", r.isometry_observed},
                     {"flags", r.flags}});
      },
      py::arg("preset"), py::arg("seed") = kDefaultSeed);
}
