#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "spiralpaste/errors.hpp"
#include "spiralpaste/io.hpp"
#include "spiralpaste/spaces.hpp"

using namespace spiralpaste;

namespace {

std::string field_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const SchemaError& e) {
    return e.field();
  }
  return "<no error>";
}

}  // namespace

TEST_CASE("coordinate spaces") {
  const Json doc = Json::parse(R"({"basepoint": "o", "metric": "l2",
      "points": [{"id": "o", "coords": [0, 0]}, {"id": "a", "coords": [3, 4]}]})");
  const auto s = space_from_json(doc);
  CHECK(s.size() == 2);
  CHECK(s.rho(s.index_of("a")) == 5.0);
  CHECK(s.kind() == MetricKind::L2);
}

TEST_CASE("matrix spaces") {
  const Json doc = Json::parse(R"({"basepoint": "O", "metric": "matrix",
      "points": [{"id": "O"}, {"id": "a"}, {"id": "b"}],
      "matrix": [[0, 1, 2], [1, 0, 2], [2, 2, 0]]})");
  const auto s = space_from_json(doc);
  CHECK(s.dist(s.index_of("a"), s.index_of("b")) == 2.0);
}

TEST_CASE("schema errors name the field") {
  auto parse = [](const char* text) { return [text] { space_from_json(Json::parse(text)); }; };
  CHECK(field_of(parse(R"({"metric": "linf", "points": []})")) == "basepoint");
  CHECK(field_of(parse(R"({"basepoint": "o", "metric": "l3", "points": []})")) == "metric");
  CHECK(field_of(parse(R"({"basepoint": "o", "metric": "linf", "points": []})")) == "points");
  CHECK(field_of(parse(R"({"basepoint": "o", "metric": "linf", "points": [{"id": "o"}]})")) == "points[0].coords");
  CHECK(field_of(parse(R"({"basepoint": "o", "metric": "linf", "points": [{"id": "o", "coords": [0, "x"]}]})")) ==
        "points[0].coords[1]");
  CHECK(field_of(parse(R"({"basepoint": "o", "metric": "linf",
      "points": [{"id": "o", "coords": [0]}, {"id": "a", "coords": [1, 2]}]})")) == "points[1].coords");
  CHECK(field_of(parse(R"({"basepoint": "O", "metric": "matrix", "points": [{"id": "O"}, {"id": "a"}],
      "matrix": [[0, 1], [1.1, 0]]})")) == "matrix");
  CHECK(field_of(parse(R"({"basepoint": "O", "metric": "matrix", "points": [{"id": "O"}, {"id": "a"}],
      "matrix": [[0, 1]]})")) == "matrix");
  CHECK(field_of(parse(R"({"basepoint": "O", "metric": "matrix", "points": [{"id": "O"}, {"id": "a"}]})")) == "matrix");
  CHECK(field_of(parse(R"({"basepoint": "z", "metric": "linf", "points": [{"id": "o", "coords": [0]}]})")) ==
        "basepoint");
  CHECK(field_of([] { load_json("/nonexistent/space.json"); }) == "$");
}

TEST_CASE("space round trip") {
  for (const auto& s : {log_grid_space(4), random_integer_metric(9, 2)}) {
    const auto back = space_from_json(Json::parse(dump(space_to_json(s))));
    REQUIRE(back.size() == s.size());
    CHECK(back.ids() == s.ids());
    CHECK(back.basepoint() == s.basepoint());
    for (Index i = 0; i < s.size(); ++i)
      for (Index j = 0; j < s.size(); ++j) CHECK(back.dist(i, j) == s.dist(i, j));
  }
}

TEST_CASE("block vectors") {
  const Json doc = Json::parse(R"({"p": 2, "block_dims": [2, 1], "blocks": {"0": [3, 0], "1": [4]}})");
  const auto spec = spec_from_json(doc);
  const auto v = block_vector_from_json(doc["blocks"], spec);
  CHECK(norm(v, spec) == 5.0);
  CHECK(block_vector_to_json(v) == doc["blocks"]);
  CHECK(spec_from_json(Json::parse(R"({"p": "sup", "block_dims": [1]})")).is_sup());
  CHECK(field_of([] { spec_from_json(Json::parse(R"({"p": "max", "block_dims": [1]})")); }) == "p");
  CHECK(field_of([] { spec_from_json(Json::parse(R"({"p": 0.5, "block_dims": [1]})")); }) == "p");
  CHECK(field_of([] { spec_from_json(Json::parse(R"({"p": 2, "block_dims": [1.5]})")); }) == "block_dims[0]");
  CHECK(field_of([&] { block_vector_from_json(Json::parse(R"({"2": [1]})"), spec); }) == "blocks.2");
  CHECK(field_of([&] { block_vector_from_json(Json::parse(R"({"0": [1]})"), spec); }) == "blocks.0");
  CHECK(field_of([&] { block_vector_from_json(Json::parse(R"({"x": [1]})"), spec); }) == "blocks.x");
}

TEST_CASE("image sets") {
  Eigen::MatrixXd c(3, 1);
  c << 0, 1, 3;
  const auto s = PointedMetricSpace::from_coords({"a", "b", "c"}, c, MetricKind::Linf, "a");
  const Json doc = Json::parse(R"({"p": "sup", "block_dims": [1], "bound": 2,
      "images": {"a": {"0": [0]}, "b": {"0": [1]}, "c": {"0": [2]}}})");
  const auto set = images_from_json(doc, s);
  CHECK(set.bound == 2.0);
  auto r = distortion(s, set.images, set.spec);
  CHECK(r.distortion == doctest::Approx(2.0));
  Json missing = doc;
  missing["images"].erase("c");
  CHECK(field_of([&] { images_from_json(missing, s); }) == "images.c");
  Json unknown = doc;
  unknown["images"]["d"] = Json::object();
  CHECK(field_of([&] { images_from_json(unknown, s); }) == "images.d");
}

TEST_CASE("reports serialise infinity as null") {
  DistortionReport r;
  r.distortion = std::numeric_limits<double>::infinity();
  r.injective = false;
  attach_bound(r, 3.0);
  const Json j = report_to_json(r);
  CHECK(j["distortion"].is_null());
  CHECK(j["analytic_bound"] == 3.0);
  CHECK(j["pass"] == false);
  CHECK(number(std::nan("")).is_null());
}
