#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "spiralpaste/core_metric.hpp"
#include "spiralpaste/counterexample.hpp"
#include "spiralpaste/errors.hpp"
#include "spiralpaste/spaces.hpp"

using namespace spiralpaste;

namespace {

PointedMetricSpace line(std::vector<double> xs) {
  std::vector<std::string> ids;
  Eigen::MatrixXd c(static_cast<Index>(xs.size()), 1);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    ids.push_back("q" + std::to_string(i));
    c(static_cast<Index>(i), 0) = xs[i];
  }
  return PointedMetricSpace::from_coords(ids, c, MetricKind::Linf, "q0");
}

BlockVector scalar(double x) { return BlockVector::single(0, Eigen::VectorXd::Constant(1, x)); }

}  // namespace

TEST_CASE("matrix metric validation") {
  Eigen::MatrixXd d(3, 3);
  d << 0, 1, 2, 1, 0, 2, 2, 2, 0;
  const auto s = PointedMetricSpace::from_matrix({"O", "a", "b"}, d, "O");
  CHECK(s.size() == 3);
  CHECK(s.rho(s.index_of("b")) == 2.0);

  Eigen::MatrixXd asym = d;
  asym(0, 1) = 1.1;
  CHECK_THROWS_AS(PointedMetricSpace::from_matrix({"O", "a", "b"}, asym, "O"), InvalidMetric);

  Eigen::MatrixXd tiny = d;
  tiny(0, 1) += 1e-12;  // within symmetry tolerance
  CHECK_NOTHROW(PointedMetricSpace::from_matrix({"O", "a", "b"}, tiny, "O"));

  Eigen::MatrixXd tri(3, 3);
  tri << 0, 1, 5, 1, 0, 1, 5, 1, 0;
  CHECK_THROWS_AS(PointedMetricSpace::from_matrix({"O", "a", "b"}, tri, "O"), InvalidMetric);

  Eigen::MatrixXd zero = d;
  zero(1, 2) = zero(2, 1) = 0.0;
  CHECK_THROWS_AS(PointedMetricSpace::from_matrix({"O", "a", "b"}, zero, "O"), InvalidMetric);

  CHECK_THROWS_AS(PointedMetricSpace::from_matrix({"O", "a", "a"}, d, "O"), InvalidMetric);
  CHECK_THROWS(PointedMetricSpace::from_matrix({"O", "a", "b"}, d, "missing"));
}

TEST_CASE("points are ordered by id") {
  Eigen::MatrixXd c(3, 1);
  c << 5, 0, 2;
  const auto s = PointedMetricSpace::from_coords({"c", "a", "b"}, c, MetricKind::L2, "a");
  CHECK(s.ids() == std::vector<std::string>{"a", "b", "c"});
  CHECK(s.basepoint() == 0);
  CHECK(s.dist(0, 2) == 5.0);
  CHECK(s.dist(1, 2) == 3.0);
}

TEST_CASE("ball") {
  const auto s = line({0, 1, 2});
  CHECK(ball(s, 0).size() == 1);
  CHECK(ball(s, 0).id(0) == "q0");
  const auto b = ball(s, 1);
  CHECK(b.ids() == std::vector<std::string>{"q0", "q1"});
  CHECK(ball(s, 100).size() == 3);
  CHECK_THROWS_AS(ball(s, -1), InvalidArgument);
}

TEST_CASE("ball of the depth-3 counterexample space holds every r_3(j)") {
  const RayFamily family(CounterexampleConfig::with_levels({2, 3, 4}, 4));
  const auto space = family.as_space();
  const auto b = ball(space, 13);
  for (int j = 1; j <= 4; ++j) CHECK(b.find("r3_" + std::to_string(j)).has_value());
  CHECK(b.size() == space.size());
  CHECK(ball(space, 12.5).size() < space.size());
}

TEST_CASE("distortion on small maps") {
  const auto s = line({0, 1, 3});
  SUBCASE("identity and homothety") {
    std::vector<BlockVector> id{scalar(0), scalar(1), scalar(3)};
    const auto spec = SumSpaceSpec::lp(2, {1});
    auto r = distortion(s, id, spec);
    CHECK(r.distortion == 1.0);
    CHECK(r.scale_r == 1.0);
    std::vector<BlockVector> twice{scalar(0), scalar(2), scalar(6)};
    r = distortion(s, twice, spec);
    CHECK(r.distortion == 1.0);
    CHECK(r.scale_r == 2.0);
  }
  SUBCASE("{0,1,3} to {0,1,2}") {
    std::vector<BlockVector> img{scalar(0), scalar(1), scalar(2)};
    const auto r = distortion(s, img, SumSpaceSpec::sup({1}));
    CHECK(r.distortion == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(r.scale_r == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(r.max_ratio == 1.0);
    CHECK(r.min_pair == std::pair<std::string, std::string>{"q1", "q2"});
    CHECK(r.max_pair == std::pair<std::string, std::string>{"q0", "q1"});
  }
  SUBCASE("non-injective map") {
    std::vector<BlockVector> img{scalar(0), scalar(1), scalar(1)};
    auto r = distortion(s, img, SumSpaceSpec::sup({1}));
    CHECK_FALSE(r.injective);
    CHECK(std::isinf(r.distortion));
    attach_bound(r, 100.0);
    CHECK_FALSE(r.pass);
  }
  SUBCASE("needs two points and an image per point") {
    CHECK_THROWS_AS(distortion(line({0}), std::vector<BlockVector>{scalar(0)}, SumSpaceSpec::sup({1})),
                    InvalidArgument);
    CHECK_THROWS_AS(distortion(s, std::vector<BlockVector>{scalar(0)}, SumSpaceSpec::sup({1})), InvalidArgument);
  }
}

TEST_CASE("bilipschitz chain holds on every pair") {
  const auto s = random_integer_metric(25, 5);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  Eigen::VectorXd w(s.size());
  for (Index i = 0; i < s.size(); ++i) w(i) = u(rng);
  auto f = [&](Index i, Index j) { return s.dist(i, j) * std::sqrt(w(i) * w(j)); };
  const auto r = distortion(s, f);
  for (Index i = 0; i < s.size(); ++i)
    for (Index j = i + 1; j < s.size(); ++j) {
      CHECK(f(i, j) >= r.scale_r * s.dist(i, j) * (1 - 1e-12));
      CHECK(f(i, j) <= r.scale_r * r.distortion * s.dist(i, j) * (1 + 1e-12));
    }
  CHECK(r.distortion >= 1.0);
}

TEST_CASE("distortion does not depend on the worker count") {
  const auto s = log_grid_space(13);  // 196 points, above the parallel threshold
  auto f = [&](Index i, Index j) { return s.dist(i, j) * (1.0 + 0.001 * ((i * 7 + j * 3) % 11)); };
  setenv("SPIRALPASTE_THREADS", "1", 1);
  const auto one = distortion(s, f);
  setenv("SPIRALPASTE_THREADS", "5", 1);
  const auto five = distortion(s, f);
  unsetenv("SPIRALPASTE_THREADS");
  CHECK(one.distortion == five.distortion);
  CHECK(one.max_pair == five.max_pair);
  CHECK(one.min_pair == five.min_pair);
}

TEST_CASE("max_separated_subset") {
  const auto s = line({0, 1, 2, 3, 10});
  const auto all = max_separated_subset(s, 1);
  CHECK(all.size() == 5);
  const auto sparse = max_separated_subset(s, 2);
  // greedy in index order: q0, then q2, then q4
  CHECK(sparse == std::vector<Index>{0, 2, 4});
  for (std::size_t a = 0; a < sparse.size(); ++a)
    for (std::size_t b = a + 1; b < sparse.size(); ++b) CHECK(s.dist(sparse[a], sparse[b]) >= 2);
  CHECK_THROWS_AS(max_separated_subset(s, 0), InvalidArgument);
}

TEST_CASE("separated ray tips survive") {
  const RayFamily family(CounterexampleConfig::defaults());
  for (int t = 2; t <= 6; ++t) {
    const auto w = separation_witness(family, t);
    std::vector<std::string> ids;
    Eigen::MatrixXd coords(static_cast<Index>(w.rays.size()), family.dimension());
    for (std::size_t k = 0; k < w.rays.size(); ++k) {
      ids.push_back("w" + std::to_string(k));
      coords.row(static_cast<Index>(k)) = family.ray_point(w.rays[k], t).cast<double>().transpose();
    }
    const auto s = PointedMetricSpace::from_coords(ids, coords, MetricKind::Linf, "w0");
    CHECK(max_separated_subset(s, static_cast<double>(pow3(t - 1))).size() == w.rays.size());
  }
}

TEST_CASE("packing bound") {
  CHECK(packing_bound(27, 3, 2, 1) == doctest::Approx(81));
  CHECK(packing_bound(9, 1, 1, 2) == doctest::Approx(18));
  CHECK_THROWS_AS(packing_bound(1, 0, 1, 1), InvalidArgument);
}
