#pragma once

#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "finsler/convex.hpp"
#include "finsler/norms.hpp"
#include "finsler/volume.hpp"

namespace finsler {

using Json = nlohmann::json;

// Malformed or unexpected JSON documents: wrong types, missing or unknown keys.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Json to_json(const Vec& v);
Json to_json(const Mat& m);  // list of rows
Vec vec_from_json(const Json& j, const std::string& where = "vector");
Mat mat_from_json(const Json& j, const std::string& where = "matrix");

// {"dim": m, "kind": "euclidean"|"gram"|"polytopal"|"pnorm", payload}
//   gram: "matrix", polytopal: "facets", pnorm: "p" (a number or "inf")
// Callable norms have no document form and throw std::invalid_argument.
Json norm_to_json(const Seminorm& s);
Seminorm norm_from_json(const Json& j);

// {"dim", "kind": "polytope", "vertices" | "facets"}, {"dim", "kind": "ellipsoid", "shape"},
// {"dim", "kind": "parallelepiped", "functionals", "exact"}
Json body_to_json(const Polytope& p);
Json body_to_json(const Ellipsoid& e);
Json body_to_json(const Parallelepiped& p);
Polytope polytope_from_json(const Json& j);
Ellipsoid ellipsoid_from_json(const Json& j);
Parallelepiped parallelepiped_from_json(const Json& j);

Json to_json(const JacobianResult& r);
// {tag, jacobian, exactness, hypotheses, conclusion, witness}
Json to_json(const RigidityVerdict& v);

// Rejects keys outside `allowed`; `where` prefixes the message.
void require_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& where);

}  // namespace finsler
