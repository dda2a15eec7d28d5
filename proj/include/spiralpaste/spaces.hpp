#pragma once

#include <cstdint>

#include "spiralpaste/core_metric.hpp"

namespace spiralpaste {

// Deterministic sample spaces used by the tests, the acceptance run and the
// shipped data files.

/// Integer points 0 and ±⌊1.25^k⌉ on the real line up to `max_abs`, deduplicated.
PointedMetricSpace line_space(double max_abs = 1e9);

/// Grid {0, 5^0, …, 5^(levels−1)}² under the sup metric, basepoint at the origin.
PointedMetricSpace log_grid_space(int levels = 13);

/// Random tree on `nodes` vertices with log-uniform integer edge weights in
/// [1, max_weight]; shortest-path metric, rooted at "v000".
PointedMetricSpace random_tree_space(int nodes, double max_weight, std::uint64_t seed);

/// Shortest-path metric of a random connected graph with integer weights in
/// [1, 20]; basepoint "p00".
PointedMetricSpace random_integer_metric(int nodes, std::uint64_t seed);

/// Evenly spaced integer points 0, step, 2·step, … on the line.
PointedMetricSpace uniform_line_space(int points, double step);

}  // namespace spiralpaste
