#include "spiralpaste/counterexample.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>
#include <string>

namespace spiralpaste {
namespace {

constexpr int kMaxDepth = 38;

std::string ray_id(int t, int j) {
  if (t == 0) return "r0";
  if (t == 1) return "r1";
  return "r" + std::to_string(t) + "_" + std::to_string(j);
}

}  // namespace

CounterexampleConfig CounterexampleConfig::defaults() {
  CounterexampleConfig c;
  c.depth = 6;
  c.ray_count = 8;
  for (int t = 1; t <= c.depth; ++t) c.N.push_back(t + 1);
  return c;
}

CounterexampleConfig CounterexampleConfig::with_levels(std::vector<int> N, int ray_count) {
  CounterexampleConfig c;
  c.depth = static_cast<int>(N.size());
  c.N = std::move(N);
  c.ray_count = ray_count;
  c.validate();
  return c;
}

void CounterexampleConfig::validate() const {
  if (depth < 1 || depth > kMaxDepth)
    throw InvalidArgument("counterexample depth must lie in [1, " + std::to_string(kMaxDepth) + "]");
  if (static_cast<int>(N.size()) != depth) throw InvalidArgument("need exactly one N_t per level 1..depth");
  for (std::size_t t = 0; t < N.size(); ++t) {
    if (N[t] < 1) throw InvalidArgument("N_t must be positive");
    if (t > 0 && N[t] <= N[t - 1]) throw InvalidArgument("N_t must be strictly increasing");
  }
  if (ray_count < 1) throw InvalidArgument("ray_count must be >= 1");
  if (ray_count < *std::max_element(N.begin(), N.end()))
    throw InvalidArgument("ray_count must be at least max N_t so every level can be covered");
}

RayFamily::RayFamily(CounterexampleConfig config) : config_(std::move(config)) {
  config_.validate();
  build_ranges();
  choices_.assign(static_cast<std::size_t>(config_.ray_count), {});
  for (int j = 1; j <= config_.ray_count; ++j)
    for (int t = 1; t < config_.depth; ++t)
      choices_[static_cast<std::size_t>(j - 1)].push_back(level_range(t).first + (j - 1) % config_.level_size(t));
}

RayFamily::RayFamily(CounterexampleConfig config, std::vector<std::vector<int>> choices)
    : config_(std::move(config)), choices_(std::move(choices)) {
  config_.validate();
  build_ranges();
  if (static_cast<int>(choices_.size()) != config_.ray_count) throw InvalidArgument("need one choice row per ray");
  for (const auto& row : choices_) {
    if (static_cast<int>(row.size()) != config_.depth - 1)
      throw InvalidArgument("each ray needs choices for levels 1..depth-1");
    for (int t = 1; t < config_.depth; ++t) {
      const auto [lo, hi] = level_range(t);
      const int n = row[static_cast<std::size_t>(t - 1)];
      if (n < lo || n >= hi) throw InvalidArgument("choice for level " + std::to_string(t) + " lies outside I_t");
    }
  }
}

void RayFamily::build_ranges() {
  level_start_.assign(static_cast<std::size_t>(config_.depth + 2), 0);
  level_start_[0] = 0;
  level_start_[1] = 1;
  for (int t = 1; t <= config_.depth; ++t)
    level_start_[static_cast<std::size_t>(t + 1)] = level_start_[static_cast<std::size_t>(t)] + config_.level_size(t);
  dimension_ = level_start_.back();
}

std::pair<int, int> RayFamily::level_range(int t) const {
  if (t < 0 || t > config_.depth) throw IndexOutOfRange("level " + std::to_string(t) + " outside [0, depth]");
  return {level_start_[static_cast<std::size_t>(t)], level_start_[static_cast<std::size_t>(t + 1)]};
}

int RayFamily::level_of(int coordinate) const {
  if (coordinate < 0 || coordinate >= dimension_) throw IndexOutOfRange("coordinate outside the truncation");
  const auto it = std::upper_bound(level_start_.begin(), level_start_.end(), coordinate);
  return static_cast<int>(it - level_start_.begin()) - 1;
}

int RayFamily::choice(int j, int t) const {
  if (j < 1 || j > config_.ray_count) throw IndexOutOfRange("ray index " + std::to_string(j) + " out of range");
  if (t < 1 || t >= config_.depth) throw IndexOutOfRange("choice level " + std::to_string(t) + " out of range");
  return choices_[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(t - 1)];
}

IntVector RayFamily::ray_point(int j, int t) const {
  if (j < 1 || j > config_.ray_count) throw IndexOutOfRange("ray index " + std::to_string(j) + " out of range");
  if (t < 0 || t > config_.depth) throw IndexOutOfRange("ray level " + std::to_string(t) + " out of range");
  IntVector v = IntVector::Zero(dimension_);
  if (t == 0) return v;
  const std::int64_t top = pow3(t);
  v(0) = (top - 1) / 2;
  for (int u = 1; u <= t - 1; ++u) v(choice(j, u)) = (top - pow3(u)) / 2;
  return v;
}

std::vector<IntVector> RayFamily::ray(int j) const {
  std::vector<IntVector> out;
  for (int t = 0; t <= config_.depth; ++t) out.push_back(ray_point(j, t));
  return out;
}

bool RayFamily::coverage_holds() const {
  for (int t = 1; t < config_.depth; ++t) {
    std::set<int> seen;
    for (int j = 1; j <= config_.ray_count; ++j) seen.insert(choice(j, t));
    if (static_cast<int>(seen.size()) != config_.level_size(t)) return false;
  }
  return true;
}

bool RayFamily::in_S(const IntVector& v) const {
  if (v.size() != dimension_) return false;
  for (int i = 0; i < dimension_; ++i) {
    if (v(i) < 0) return false;
    if (v(i) % pow3(level_of(i)) != 0) return false;
  }
  return true;
}

PointedMetricSpace RayFamily::as_space() const {
  std::map<std::vector<std::int64_t>, std::string> seen;
  std::vector<std::string> ids;
  std::vector<IntVector> points;
  for (int t = 0; t <= config_.depth; ++t)
    for (int j = 1; j <= config_.ray_count; ++j) {
      IntVector v = ray_point(j, t);
      std::vector<std::int64_t> key(v.data(), v.data() + v.size());
      if (seen.emplace(std::move(key), ray_id(t, j)).second) {
        ids.push_back(ray_id(t, j));
        points.push_back(std::move(v));
      }
    }
  Eigen::MatrixXd coords(static_cast<Index>(points.size()), dimension_);
  for (std::size_t k = 0; k < points.size(); ++k) coords.row(static_cast<Index>(k)) = points[k].cast<double>().transpose();
  return PointedMetricSpace::from_coords(std::move(ids), std::move(coords), MetricKind::Linf, "r0");
}

SumSpaceSpec RayFamily::level_blocks(double p) const {
  std::vector<int> dims;
  for (int t = 0; t <= config_.depth; ++t) {
    const auto [lo, hi] = level_range(t);
    dims.push_back(hi - lo);
  }
  return SumSpaceSpec::lp(p, std::move(dims));
}

BlockVector RayFamily::to_level_blocks(const IntVector& v) const {
  if (v.size() != dimension_) throw InvalidArgument("vector does not match the truncation's dimension");
  BlockVector out;
  for (int t = 0; t <= config_.depth; ++t) {
    const auto [lo, hi] = level_range(t);
    const IntVector seg = v.segment(lo, hi - lo);
    if ((seg.array() != 0).any()) out.set_block(t, seg.cast<double>());
  }
  return out;
}

std::int64_t pow3(int t) {
  if (t < 0 || t > 39) throw InvalidArgument("3^t overflows 64-bit integers beyond t = 39");
  std::int64_t v = 1;
  for (int k = 0; k < t; ++k) v *= 3;
  return v;
}

std::int64_t linf_distance(const IntVector& a, const IntVector& b) {
  if (a.size() != b.size()) throw InvalidArgument("vectors have different dimensions");
  if (a.size() == 0) return 0;
  return (a - b).cwiseAbs().maxCoeff();
}

bool verify_metric_ray(std::span<const IntVector> points) {
  const std::size_t n = points.size();
  if (n < 3) throw InvalidArgument("a metric ray check needs at least three points");
  for (std::size_t i = 1; i + 1 < n; ++i)
    if (linf_distance(points[i + 1], points[0]) <= linf_distance(points[i], points[0])) return false;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k)
        if (linf_distance(points[i], points[k]) !=
            linf_distance(points[i], points[j]) + linf_distance(points[j], points[k]))
          return false;
  return true;
}

bool is_metric_ray(const Eigen::MatrixXd& pairwise, double tol) {
  const Index n = pairwise.rows();
  if (n < 3 || pairwise.cols() != n) throw InvalidArgument("a metric ray check needs a square matrix of >= 3 points");
  const double eps = tol * std::max(1.0, pairwise.maxCoeff());
  for (Index i = 1; i + 1 < n; ++i)
    if (!(pairwise(i + 1, 0) > pairwise(i, 0) + eps)) return false;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      for (Index k = j + 1; k < n; ++k)
        if (std::abs(pairwise(i, k) - pairwise(i, j) - pairwise(j, k)) > eps) return false;
  return true;
}

SeparationWitness separation_witness(const RayFamily& family, int t) {
  if (t < 2 || t > family.depth())
    throw IndexOutOfRange("separation level must lie in [2, depth], got " + std::to_string(t));
  const int want = family.config().level_size(t - 1);
  SeparationWitness w{{}, std::numeric_limits<std::int64_t>::max(), 0};
  std::set<int> used;
  for (int j = 1; j <= family.ray_count() && static_cast<int>(w.rays.size()) < want; ++j)
    if (used.insert(family.choice(j, t - 1)).second) w.rays.push_back(j);
  if (static_cast<int>(w.rays.size()) < want)
    throw CoverageViolated("only " + std::to_string(w.rays.size()) + " distinct choices at level " +
                           std::to_string(t - 1) + ", need " + std::to_string(want));
  std::vector<IntVector> pts;
  for (int j : w.rays) pts.push_back(family.ray_point(j, t));
  for (std::size_t a = 0; a < pts.size(); ++a) {
    w.max_norm = std::max<std::int64_t>(w.max_norm, pts[a].cwiseAbs().maxCoeff());
    for (std::size_t b = a + 1; b < pts.size(); ++b) w.min_distance = std::min(w.min_distance, linf_distance(pts[a], pts[b]));
  }
  return w;
}

double separation_epsilon() { return 1.0 / 9.0; }

Rational separation_epsilon_exact() { return {1, 9}; }

std::int64_t separation_condition_slack(Rational epsilon, int t) {
  if (epsilon.den <= 0 || epsilon.num < 0) throw InvalidArgument("epsilon must be a nonnegative rational");
  if (t < 1 || t > 30) throw InvalidArgument("separation level must lie in [1, 30]");
  using Wide = __int128;
  const Wide p = pow3(t);
  const Wide slack = Wide(epsilon.den) * 3 * p - Wide(18) * epsilon.num * p - Wide(epsilon.den) * p;
  if (slack > std::numeric_limits<std::int64_t>::max() || slack < std::numeric_limits<std::int64_t>::min())
    throw InvalidArgument("separation slack overflows 64-bit integers");
  return static_cast<std::int64_t>(slack);
}

bool profile_proportionality(std::span<const BlockVector> ray, const SumSpaceSpec& spec, double tol) {
  const Index n = static_cast<Index>(ray.size());
  if (n < 3) throw NotARay("a ray needs at least three points");
  if (norm(ray[0], spec) != 0.0) throw NotARay("ray must start at 0");
  Eigen::MatrixXd pairwise = Eigen::MatrixXd::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      pairwise(i, j) = pairwise(j, i) = distance(ray[static_cast<std::size_t>(i)], ray[static_cast<std::size_t>(j)], spec);
  if (!is_metric_ray(pairwise, tol)) throw NotARay("points do not form a metric ray under the sum norm");
  const Eigen::VectorXd first = block_profile(ray[1], spec);
  for (Index i = 2; i < n; ++i)
    if (!proportional_ratio(block_profile(ray[static_cast<std::size_t>(i)], spec), first, tol)) return false;
  return true;
}

ProjectionLevel min_projection_level(std::span<const BlockVector> ray, const SumSpaceSpec& spec, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidArgument("epsilon must lie in (0, 1)");
  if (ray.size() < 2) throw InvalidArgument("ray needs at least r0 and r1");
  if (norm(ray[0], spec) != 0.0) throw InvalidArgument("ray must start at 0");
  const int blocks = spec.num_blocks();
  auto level_for = [&](const BlockVector& r) {
    const Eigen::VectorXd profile = block_profile(r, spec);
    const double total = aggregate(profile, spec.p);
    for (int k = 1; k <= blocks; ++k) {
      const double tail = aggregate(profile.tail(blocks - k), spec.p);
      if (tail <= epsilon * total * (1.0 + 1e-12)) return k;
    }
    return blocks;
  };
  ProjectionLevel out;
  out.level = 1;
  for (const auto& r : ray) out.level = std::max(out.level, level_for(r));
  out.level_from_first = level_for(ray[1]);
  return out;
}

}  // namespace spiralpaste
