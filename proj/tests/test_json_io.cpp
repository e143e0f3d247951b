#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "finsler/json_io.hpp"

using namespace finsler;

namespace {

void expect_same_values(const Seminorm& a, const Seminorm& b, std::uint64_t seed) {
  ASSERT_EQ(a.dim(), b.dim());
  Rng rng(seed);
  for (int i = 0; i < 200; ++i) {
    const Vec v = random_unit_vector(a.dim(), rng) * 3.7;
    EXPECT_EQ(a(v), b(v));
  }
}

}  // namespace

TEST(NormJson, RoundTripsEveryKind) {
  Mat G(2, 2);
  G << 2.0, 0.3, 0.3, 1.0;
  const Seminorm norms[] = {Seminorm::euclidean(3), Seminorm::gram(G), regular_2ngon_norm(5),
                            Seminorm::p_norm(3, 1.5), Seminorm::p_norm(2, std::numeric_limits<double>::infinity())};
  std::uint64_t seed = 1;
  for (const Seminorm& s : norms) {
    const Json doc = norm_to_json(s);
    const Seminorm back = norm_from_json(Json::parse(doc.dump()));
    EXPECT_EQ(back.kind(), s.kind());
    expect_same_values(s, back, seed++);
    EXPECT_EQ(norm_to_json(back).dump(), doc.dump());
  }
  EXPECT_EQ(norm_to_json(Seminorm::p_norm(2, INFINITY))["p"], "inf");
}

TEST(NormJson, DocumentExample) {
  const Seminorm s = norm_from_json(Json::parse(R"({"dim": 2, "kind": "polytopal", "facets": [[1, 0], [0, 1]]})"));
  EXPECT_DOUBLE_EQ(s((Vec(2) << -3, 2).finished()), 3.0);
}

TEST(NormJson, RejectsMalformedDocuments) {
  const char* bad[] = {
      R"({"dim": 2, "kind": "euclidean", "colour": "red"})",
      R"({"dim": 2, "kind": "euclidean", "p": 2})",
      R"({"kind": "euclidean"})",
      R"({"dim": 0, "kind": "euclidean"})",
      R"({"dim": 2, "kind": "hexagonal"})",
      R"({"dim": 3, "kind": "gram", "matrix": [[1, 0], [0, 1]]})",
      R"({"dim": 2, "kind": "gram", "matrix": [[1, 0], [0]]})",
      R"({"dim": 2, "kind": "polytopal", "facets": [[1, "x"]]})",
      R"({"dim": 2, "kind": "pnorm", "p": "two"})",
      R"([1, 2])",
  };
  for (const char* doc : bad) EXPECT_THROW(norm_from_json(Json::parse(doc)), SchemaError) << doc;
  EXPECT_THROW(norm_to_json(Seminorm::callable(2, [](const Vec& v) { return v.norm(); })), std::invalid_argument);
}

TEST(BodyJson, RoundTrips) {
  const Polytope square = Polytope::from_facets(Mat::Identity(2, 2));
  const Polytope back = polytope_from_json(Json::parse(body_to_json(square).dump()));
  EXPECT_EQ(back.vertices(), square.vertices());
  EXPECT_DOUBLE_EQ(volume(back).value, 4.0);

  Mat A(3, 3);
  A << 2, 0.1, 0, 0.1, 1, 0, 0, 0, 0.5;
  const Ellipsoid e = ellipsoid_from_json(body_to_json(Ellipsoid{A}));
  EXPECT_EQ(e.shape, A);

  Parallelepiped p{(Mat(2, 2) << 1, 0, 1, 1).finished(), false};
  const Parallelepiped q = parallelepiped_from_json(body_to_json(p));
  EXPECT_EQ(q.functionals, p.functionals);
  EXPECT_FALSE(q.exact);
  EXPECT_DOUBLE_EQ(volume(q), volume(p));
}

TEST(BodyJson, RejectsMalformedDocuments) {
  EXPECT_THROW(polytope_from_json(Json::parse(R"({"dim": 2, "kind": "polytope"})")), SchemaError);
  EXPECT_THROW(polytope_from_json(Json::parse(R"({"dim": 2, "kind": "ellipsoid", "vertices": [[1, 0]]})")),
               SchemaError);
  EXPECT_THROW(ellipsoid_from_json(Json::parse(R"({"dim": 2, "kind": "ellipsoid", "shape": [[1, 0, 0]]})")),
               SchemaError);
  EXPECT_THROW(parallelepiped_from_json(Json::parse(
                   R"({"dim": 2, "kind": "parallelepiped", "functionals": [[1, 0], [0, 1]], "exact": 1})")),
               SchemaError);
}

TEST(VerdictJson, CarriesHypothesesConclusionAndWitness) {
  const Json j = to_json(rigidity_test(VolumeTag::sr, regular_2ngon_norm(4)));
  EXPECT_EQ(j["tag"], "sr");
  EXPECT_NEAR(j["jacobian"].get<double>(), 1.0, 1e-4);
  EXPECT_TRUE(j["hypotheses"]["hold"].get<bool>());
  EXPECT_FALSE(j["conclusion"]["euclidean"].get<bool>());
  EXPECT_EQ(j["witness"].size(), 2u);
  const Json e = to_json(rigidity_test(VolumeTag::bh, Seminorm::euclidean(2)));
  EXPECT_TRUE(e["witness"].is_null());
  EXPECT_TRUE(e["conclusion"]["euclidean"].get<bool>());
}
