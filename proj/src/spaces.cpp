#include "spiralpaste/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "spiralpaste/errors.hpp"

namespace spiralpaste {
namespace {

std::string numbered(const char* prefix, int k, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%0*d", prefix, width, k);
  return buf;
}

Eigen::MatrixXd shortest_paths(Eigen::MatrixXd d) {
  const Index n = d.rows();
  for (Index k = 0; k < n; ++k)
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) d(i, j) = std::min(d(i, j), d(i, k) + d(k, j));
  return d;
}

}  // namespace

PointedMetricSpace line_space(double max_abs) {
  if (!(max_abs >= 1.0)) throw InvalidArgument("line_space needs max_abs >= 1");
  std::set<double> magnitudes;
  for (int k = 0;; ++k) {
    const double v = std::round(std::pow(1.25, k));
    if (v > max_abs) break;
    magnitudes.insert(v);
  }
  std::vector<double> values{0.0};
  for (double m : magnitudes) {
    values.push_back(m);
    values.push_back(-m);
  }
  std::vector<std::string> ids;
  Eigen::MatrixXd coords(static_cast<Index>(values.size()), 1);
  for (std::size_t i = 0; i < values.size(); ++i) {
    ids.push_back(numbered("x", static_cast<int>(i), 3));
    coords(static_cast<Index>(i), 0) = values[i];
  }
  return PointedMetricSpace::from_coords(std::move(ids), std::move(coords), MetricKind::Linf, "x000");
}

PointedMetricSpace log_grid_space(int levels) {
  if (levels < 1 || levels > 20) throw InvalidArgument("log_grid_space needs 1 <= levels <= 20");
  std::vector<double> axis{0.0};
  for (int k = 0; k < levels; ++k) axis.push_back(std::pow(5.0, k));
  const Index side = static_cast<Index>(axis.size());
  std::vector<std::string> ids;
  Eigen::MatrixXd coords(side * side, 2);
  for (Index a = 0; a < side; ++a) {
    for (Index b = 0; b < side; ++b) {
      ids.push_back("g" + numbered("", static_cast<int>(a), 2) + "_" + numbered("", static_cast<int>(b), 2));
      coords.row(a * side + b) << axis[static_cast<std::size_t>(a)], axis[static_cast<std::size_t>(b)];
    }
  }
  return PointedMetricSpace::from_coords(std::move(ids), std::move(coords), MetricKind::Linf, "g00_00");
}

PointedMetricSpace random_tree_space(int nodes, double max_weight, std::uint64_t seed) {
  if (nodes < 2) throw InvalidArgument("random_tree_space needs at least two nodes");
  if (!(max_weight >= 1.0)) throw InvalidArgument("max_weight must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> log_weight(0.0, std::log(max_weight));
  const double inf = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd d = Eigen::MatrixXd::Constant(nodes, nodes, inf);
  d.diagonal().setZero();
  for (int v = 1; v < nodes; ++v) {
    const int parent = std::uniform_int_distribution<int>(0, v - 1)(rng);
    const double w = std::max(1.0, std::round(std::exp(log_weight(rng))));
    d(v, parent) = d(parent, v) = w;
  }
  std::vector<std::string> ids;
  for (int v = 0; v < nodes; ++v) ids.push_back(numbered("v", v, 3));
  return PointedMetricSpace::from_matrix(std::move(ids), shortest_paths(std::move(d)), "v000");
}

PointedMetricSpace random_integer_metric(int nodes, std::uint64_t seed) {
  if (nodes < 2) throw InvalidArgument("random_integer_metric needs at least two nodes");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> weight(1, 20);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  const double inf = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd d = Eigen::MatrixXd::Constant(nodes, nodes, inf);
  d.diagonal().setZero();
  for (int v = 1; v < nodes; ++v) {
    const int parent = std::uniform_int_distribution<int>(0, v - 1)(rng);
    d(v, parent) = d(parent, v) = weight(rng);
  }
  for (int a = 0; a < nodes; ++a)
    for (int b = a + 1; b < nodes; ++b)
      if (coin(rng) < 0.15) d(a, b) = d(b, a) = std::min<double>(d(a, b), weight(rng));
  std::vector<std::string> ids;
  for (int v = 0; v < nodes; ++v) ids.push_back(numbered("p", v, 2));
  return PointedMetricSpace::from_matrix(std::move(ids), shortest_paths(std::move(d)), "p00");
}

PointedMetricSpace uniform_line_space(int points, double step) {
  if (points < 1) throw InvalidArgument("uniform_line_space needs at least one point");
  if (!(step > 0.0)) throw InvalidArgument("step must be positive");
  std::vector<std::string> ids;
  Eigen::MatrixXd coords(points, 1);
  for (int k = 0; k < points; ++k) {
    ids.push_back(numbered("u", k, 3));
    coords(k, 0) = step * k;
  }
  return PointedMetricSpace::from_coords(std::move(ids), std::move(coords), MetricKind::Linf, "u000");
}

}  // namespace spiralpaste
