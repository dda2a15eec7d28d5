#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "spiralpaste/core_metric.hpp"
#include "spiralpaste/sum_space.hpp"

namespace spiralpaste {

using IntVector = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

/// Truncation of the locally finite space built from rays over powers of 3.
///
/// Coordinates are 0-based: I₀ = {0}, I₁ = {1, …, N₁}, I_t follows I_{t−1}.
struct CounterexampleConfig {
  std::vector<int> N;  // N₁ … N_depth, strictly increasing
  int depth = 6;
  int ray_count = 8;

  /// N_t = t + 1, depth 6, 8 rays.
  static CounterexampleConfig defaults();
  static CounterexampleConfig with_levels(std::vector<int> N, int ray_count);

  /// Throws InvalidArgument on a malformed config. Depth is capped at 38 so
  /// every coordinate fits in a signed 64-bit integer.
  void validate() const;
  int level_size(int t) const { return N.at(static_cast<std::size_t>(t - 1)); }
};

class RayFamily {
 public:
  /// Round-robin choice n_t(j) = I_t[(j−1) mod N_t].
  explicit RayFamily(CounterexampleConfig config);
  /// Explicit choices: choices[j−1][t−1] = n_t(j) for t = 1 … depth−1.
  RayFamily(CounterexampleConfig config, std::vector<std::vector<int>> choices);

  const CounterexampleConfig& config() const { return config_; }
  int dimension() const { return dimension_; }
  int depth() const { return config_.depth; }
  int ray_count() const { return config_.ray_count; }

  /// First and one-past-last coordinate of I_t.
  std::pair<int, int> level_range(int t) const;
  /// t with coordinate i ∈ I_t.
  int level_of(int coordinate) const;
  int choice(int j, int t) const;

  /// r_t(j): zero for t = 0; otherwise (3^t−1)/2 at coordinate 0 and
  /// (3^t−3^u)/2 at n_u(j) for 1 ≤ u ≤ t−1.
  IntVector ray_point(int j, int t) const;
  std::vector<IntVector> ray(int j) const;

  /// Every n ∈ I_t with t < depth is chosen by some ray.
  bool coverage_holds() const;
  /// Membership in S: coordinate i ∈ I_t is a nonnegative multiple of 3^t.
  bool in_S(const IntVector& v) const;

  /// Distinct points of the family as a space under ℓ∞, basepoint "r0".
  PointedMetricSpace as_space() const;

  /// One block per level I_t (sup norm inside, `p`-aggregation across).
  SumSpaceSpec level_blocks(double p) const;
  BlockVector to_level_blocks(const IntVector& v) const;

 private:
  void build_ranges();

  CounterexampleConfig config_;
  std::vector<std::vector<int>> choices_;
  std::vector<int> level_start_;
  int dimension_ = 0;
};

std::int64_t pow3(int t);
std::int64_t linf_distance(const IntVector& a, const IntVector& b);

/// Exact check: distances to the first point strictly increase and
/// d(rᵢ,r_k) = d(rᵢ,r_j) + d(r_j,r_k) for all i < j < k under ℓ∞.
bool verify_metric_ray(std::span<const IntVector> points);

/// Same test on a pairwise distance matrix with absolute tolerance `tol`
/// (scaled by the largest distance when that exceeds one).
bool is_metric_ray(const Eigen::MatrixXd& pairwise, double tol);

struct SeparationWitness {
  std::vector<int> rays;       // j values, ascending
  std::int64_t min_distance;   // brute-force minimum over the selected r_t(j); INT64_MAX if only one
  std::int64_t max_norm;       // largest ‖r_t(j)‖∞ among the witnesses
};

/// N_{t−1} rays with pairwise distinct n_{t−1}(j); their level-t points are
/// 3^{t−1}-separated. Throws CoverageViolated if too few distinct choices.
SeparationWitness separation_witness(const RayFamily& family, int t);

struct Rational {
  std::int64_t num;
  std::int64_t den;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

/// 1/9, the largest ε with 3^{t−1} − 2ε·3^t ≥ 3^{t−2} for every t ≥ 1.
double separation_epsilon();
Rational separation_epsilon_exact();

/// 9·den·(3^{t−1} − 2ε·3^t − 3^{t−2}) in exact integers; ≥ 0 iff the
/// separation condition holds at level t, 0 on equality.
std::int64_t separation_condition_slack(Rational epsilon, int t);

/// True iff every block profile rᵢ (i ≥ 1) is a positive multiple of the
/// profile of r₁. Throws NotARay unless ray[0] = 0 and the points form a
/// metric ray under the sum norm (tolerance `tol`).
bool profile_proportionality(std::span<const BlockVector> ray, const SumSpaceSpec& spec, double tol = 1e-8);

struct ProjectionLevel {
  int level = 1;             // smallest k working for every point of the ray
  int level_from_first = 1;  // smallest k working for r₁ alone
  bool consistent() const { return level == level_from_first; }
};

/// Smallest k with ‖P_k rᵢ − rᵢ‖ ≤ ε‖rᵢ‖ for all i, alongside the k read off
/// r₁ alone. Requires ray[0] = 0 and ε ∈ (0,1).
ProjectionLevel min_projection_level(std::span<const BlockVector> ray, const SumSpaceSpec& spec, double epsilon);

}  // namespace spiralpaste
