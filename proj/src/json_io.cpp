#include "finsler/json_io.hpp"

#include <cmath>
#include <limits>

#include "finsler/errors.hpp"

namespace finsler {

namespace {

const Json& field(const Json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(where + ": missing key '" + key + "'");
  return *it;
}

int dim_field(const Json& j, const std::string& where) {
  const Json& d = field(j, "dim", where);
  if (!d.is_number_integer() || d.get<long>() < 1) throw SchemaError(where + ": 'dim' must be a positive integer");
  return d.get<int>();
}

void require_cols(const Mat& m, int dim, const std::string& where) {
  if (m.cols() != dim)
    throw SchemaError(where + ": rows have " + std::to_string(m.cols()) + " entries, expected dim " +
                      std::to_string(dim));
}

std::string kind_field(const Json& j, const std::string& where) {
  const Json& k = field(j, "kind", where);
  if (!k.is_string()) throw SchemaError(where + ": 'kind' must be a string");
  return k.get<std::string>();
}

}  // namespace

void require_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw SchemaError(where + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw SchemaError(where + ": unknown key '" + key + "'");
  }
}

Json to_json(const Vec& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Json to_json(const Mat& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(to_json(Vec(m.row(r).transpose())));
  return out;
}

Vec vec_from_json(const Json& j, const std::string& where) {
  if (!j.is_array()) throw SchemaError(where + ": expected an array of numbers");
  Vec v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw SchemaError(where + ": entry " + std::to_string(i) + " is not a number");
    v(i) = j[i].get<double>();
  }
  return v;
}

Mat mat_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw SchemaError(where + ": expected a non-empty list of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  Mat m(j.size(), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    const Vec row = vec_from_json(j[r], where + " row " + std::to_string(r));
    if (static_cast<std::size_t>(row.size()) != cols || cols == 0) throw SchemaError(where + ": ragged or empty rows");
    m.row(r) = row.transpose();
  }
  return m;
}

Json norm_to_json(const Seminorm& s) {
  Json out{{"dim", s.dim()}, {"kind", std::string(to_string(s.kind()))}};
  switch (s.kind()) {
    case NormKind::euclidean:
      break;
    case NormKind::gram:
      out["matrix"] = to_json(s.gram_matrix());
      break;
    case NormKind::polytopal:
      out["facets"] = to_json(s.facets());
      break;
    case NormKind::pnorm:
      if (std::isinf(s.exponent()))
        out["p"] = "inf";
      else
        out["p"] = s.exponent();
      break;
    case NormKind::callable:
      throw std::invalid_argument("norm_to_json: callable norms cannot be serialized");
  }
  return out;
}

Seminorm norm_from_json(const Json& j) {
  const std::string where = "norm";
  require_keys(j, {"dim", "kind", "matrix", "facets", "p"}, where);
  const int dim = dim_field(j, where);
  const std::string kind = kind_field(j, where);
  const auto only = [&](std::initializer_list<const char*> keys) { require_keys(j, keys, where + " (" + kind + ")"); };
  try {
    if (kind == "euclidean") {
      only({"dim", "kind"});
      return Seminorm::euclidean(dim);
    }
    if (kind == "gram") {
      only({"dim", "kind", "matrix"});
      const Mat G = mat_from_json(field(j, "matrix", where), "norm matrix");
      require_cols(G, dim, where);
      if (G.rows() != dim) throw SchemaError(where + ": gram matrix must be square");
      return Seminorm::gram(G);
    }
    if (kind == "polytopal") {
      only({"dim", "kind", "facets"});
      const Mat F = mat_from_json(field(j, "facets", where), "norm facets");
      require_cols(F, dim, where);
      return Seminorm::polytopal(F);
    }
    if (kind == "pnorm") {
      only({"dim", "kind", "p"});
      const Json& p = field(j, "p", where);
      if (p.is_string() && p.get<std::string>() == "inf")
        return Seminorm::p_norm(dim, std::numeric_limits<double>::infinity());
      if (!p.is_number()) throw SchemaError(where + ": 'p' must be a number or \"inf\"");
      return Seminorm::p_norm(dim, p.get<double>());
    }
  } catch (const DimensionError& e) {
    throw SchemaError(where + ": " + e.what());
  }
  throw SchemaError(where + ": unknown kind '" + kind + "'");
}

Json body_to_json(const Polytope& p) {
  Json out{{"dim", p.dim()}, {"kind", "polytope"}};
  if (p.has_vertices())
    out["vertices"] = to_json(p.vertices());
  else
    out["facets"] = to_json(p.facets());
  return out;
}

Json body_to_json(const Ellipsoid& e) { return {{"dim", e.dim()}, {"kind", "ellipsoid"}, {"shape", to_json(e.shape)}}; }

Json body_to_json(const Parallelepiped& p) {
  return {{"dim", p.dim()}, {"kind", "parallelepiped"}, {"functionals", to_json(p.functionals)}, {"exact", p.exact}};
}

Polytope polytope_from_json(const Json& j) {
  const std::string where = "polytope";
  require_keys(j, {"dim", "kind", "vertices", "facets"}, where);
  const int dim = dim_field(j, where);
  if (kind_field(j, where) != "polytope") throw SchemaError(where + ": kind must be 'polytope'");
  const bool v = j.contains("vertices"), f = j.contains("facets");
  if (v == f) throw SchemaError(where + ": give exactly one of 'vertices' and 'facets'");
  const Mat rows = mat_from_json(j.at(v ? "vertices" : "facets"), where);
  require_cols(rows, dim, where);
  return v ? Polytope::from_vertices(rows) : Polytope::from_facets(rows);
}

Ellipsoid ellipsoid_from_json(const Json& j) {
  const std::string where = "ellipsoid";
  require_keys(j, {"dim", "kind", "shape"}, where);
  const int dim = dim_field(j, where);
  if (kind_field(j, where) != "ellipsoid") throw SchemaError(where + ": kind must be 'ellipsoid'");
  const Mat A = mat_from_json(field(j, "shape", where), where);
  require_cols(A, dim, where);
  if (A.rows() != dim) throw SchemaError(where + ": shape must be square");
  return {A};
}

Parallelepiped parallelepiped_from_json(const Json& j) {
  const std::string where = "parallelepiped";
  require_keys(j, {"dim", "kind", "functionals", "exact"}, where);
  const int dim = dim_field(j, where);
  if (kind_field(j, where) != "parallelepiped") throw SchemaError(where + ": kind must be 'parallelepiped'");
  Parallelepiped p;
  p.functionals = mat_from_json(field(j, "functionals", where), where);
  require_cols(p.functionals, dim, where);
  if (p.functionals.rows() != dim) throw SchemaError(where + ": needs dim functionals");
  if (j.contains("exact")) {
    if (!j["exact"].is_boolean()) throw SchemaError(where + ": 'exact' must be a boolean");
    p.exact = j["exact"].get<bool>();
  }
  return p;
}

Json to_json(const JacobianResult& r) {
  Json out{{"tag", std::string(to_string(r.tag))},
           {"jacobian", r.value},
           {"exactness", std::string(to_string(r.exactness))},
           {"degenerate", r.degenerate}};
  if (r.std_error > 0) out["std_error"] = r.std_error;
  if (r.ellipsoid_gap > 0) out["ellipsoid_gap"] = r.ellipsoid_gap;
  return out;
}

Json to_json(const RigidityVerdict& v) {
  Json witness = nullptr;
  if (v.witness_direction) witness = to_json(*v.witness_direction);
  return {{"tag", std::string(to_string(v.tag))},
          {"jacobian", v.jacobian.value},
          {"exactness", std::string(to_string(v.jacobian.exactness))},
          {"hypotheses",
           {{"dominates_euclidean", v.dominates_euclidean},
            {"jacobian_at_most_one", v.jacobian_at_most_one},
            {"hold", v.hypotheses_hold}}},
          {"conclusion",
           {{"euclidean", v.conclusion_holds},
            {"max_ratio", v.max_ratio},
            {"min_ratio", v.min_ratio},
            {"rigidity_claimed", v.rigidity_claimed},
            {"contradiction", v.contradiction()}}},
          {"witness", witness}};
}

}  // namespace finsler
