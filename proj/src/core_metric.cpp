#include "spiralpaste/core_metric.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <thread>

namespace spiralpaste {
namespace {

constexpr double kMetricTol = 1e-9;

std::vector<Index> sorted_order(const std::vector<std::string>& ids) {
  std::vector<Index> order(ids.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(),
            [&](Index a, Index b) { return ids[static_cast<std::size_t>(a)] < ids[static_cast<std::size_t>(b)]; });
  for (std::size_t k = 1; k < order.size(); ++k)
    if (ids[static_cast<std::size_t>(order[k])] == ids[static_cast<std::size_t>(order[k - 1])])
      throw InvalidMetric("duplicate point id '" + ids[static_cast<std::size_t>(order[k])] + "'");
  return order;
}

struct PairExtremum {
  double ratio;
  Index i = -1;
  Index j = -1;
};

bool earlier(const PairExtremum& a, const PairExtremum& b) { return a.i < b.i || (a.i == b.i && a.j < b.j); }

struct ScanResult {
  PairExtremum max{-std::numeric_limits<double>::infinity()};
  PairExtremum min{std::numeric_limits<double>::infinity()};
  PairExtremum collapse{0.0};
};

void merge(ScanResult& into, const ScanResult& from) {
  if (from.max.i >= 0 &&
      (into.max.i < 0 || from.max.ratio > into.max.ratio || (from.max.ratio == into.max.ratio && earlier(from.max, into.max))))
    into.max = from.max;
  if (from.min.i >= 0 &&
      (into.min.i < 0 || from.min.ratio < into.min.ratio || (from.min.ratio == into.min.ratio && earlier(from.min, into.min))))
    into.min = from.min;
  if (from.collapse.i >= 0 && (into.collapse.i < 0 || earlier(from.collapse, into.collapse))) into.collapse = from.collapse;
}

}  // namespace

const char* to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::Matrix:
      return "matrix";
    case MetricKind::Linf:
      return "linf";
    case MetricKind::L2:
      return "l2";
  }
  return "?";
}

PointedMetricSpace PointedMetricSpace::from_matrix(std::vector<std::string> ids, Eigen::MatrixXd distances,
                                                   const std::string& basepoint) {
  const Index n = static_cast<Index>(ids.size());
  if (n == 0) throw InvalidMetric("metric space needs at least one point");
  if (distances.rows() != n || distances.cols() != n)
    throw InvalidMetric("distance matrix must be " + std::to_string(n) + "x" + std::to_string(n));
  if (!distances.allFinite()) throw InvalidMetric("distance matrix has non-finite entries");

  const double diam = distances.cwiseAbs().maxCoeff();
  const double tol = kMetricTol * std::max(1.0, diam);
  for (Index i = 0; i < n; ++i) {
    if (distances(i, i) != 0.0) throw InvalidMetric("nonzero diagonal at row " + std::to_string(i));
    for (Index j = i + 1; j < n; ++j) {
      if (std::abs(distances(i, j) - distances(j, i)) > kMetricTol)
        throw InvalidMetric("asymmetric distances at (" + std::to_string(i) + "," + std::to_string(j) + ")");
      if (!(distances(i, j) > 0.0))
        throw InvalidMetric("non-positive distance between distinct points " + ids[static_cast<std::size_t>(i)] +
                            " and " + ids[static_cast<std::size_t>(j)]);
    }
  }
  for (Index k = 0; k < n; ++k)
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j)
        if (distances(i, j) > distances(i, k) + distances(k, j) + tol)
          throw InvalidMetric("triangle inequality fails on (" + ids[static_cast<std::size_t>(i)] + "," +
                              ids[static_cast<std::size_t>(k)] + "," + ids[static_cast<std::size_t>(j)] + ")");

  const std::vector<Index> order = sorted_order(ids);
  PointedMetricSpace space;
  space.kind_ = MetricKind::Matrix;
  space.data_.resize(n, n);
  for (Index a = 0; a < n; ++a)
    for (Index b = 0; b < n; ++b) {
      // symmetrise so dist(i,j) == dist(j,i) bit for bit
      const double d = 0.5 * (distances(order[a], order[b]) + distances(order[b], order[a]));
      space.data_(a, b) = d;
    }
  space.ids_.reserve(ids.size());
  for (Index k : order) space.ids_.push_back(std::move(ids[static_cast<std::size_t>(k)]));
  space.build_index();
  space.basepoint_ = space.index_of(basepoint);
  return space;
}

PointedMetricSpace PointedMetricSpace::from_coords(std::vector<std::string> ids, Eigen::MatrixXd coords,
                                                   MetricKind kind, const std::string& basepoint) {
  if (kind == MetricKind::Matrix) throw InvalidArgument("from_coords needs a coordinate metric");
  const Index n = static_cast<Index>(ids.size());
  if (n == 0) throw InvalidMetric("metric space needs at least one point");
  if (coords.rows() != n) throw InvalidMetric("coordinate rows do not match the number of ids");
  if (coords.cols() == 0) throw InvalidMetric("coordinates must be nonempty");
  if (!coords.allFinite()) throw InvalidMetric("coordinates have non-finite entries");

  const std::vector<Index> order = sorted_order(ids);
  PointedMetricSpace space;
  space.kind_ = kind;
  space.data_.resize(n, coords.cols());
  for (Index a = 0; a < n; ++a) space.data_.row(a) = coords.row(order[a]);
  space.ids_.reserve(ids.size());
  for (Index k : order) space.ids_.push_back(std::move(ids[static_cast<std::size_t>(k)]));
  space.build_index();
  space.basepoint_ = space.index_of(basepoint);
  space.check_distinct(0.0);
  return space;
}

void PointedMetricSpace::build_index() {
  index_.clear();
  for (std::size_t k = 0; k < ids_.size(); ++k) index_.emplace(ids_[k], static_cast<Index>(k));
}

void PointedMetricSpace::check_distinct(double tol) const {
  for (Index i = 0; i < size(); ++i)
    for (Index j = i + 1; j < size(); ++j)
      if (!(dist(i, j) > tol)) throw InvalidMetric("points " + id(i) + " and " + id(j) + " coincide");
}

std::optional<Index> PointedMetricSpace::find(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Index PointedMetricSpace::index_of(const std::string& id) const {
  if (auto k = find(id)) return *k;
  throw InvalidArgument("unknown point id '" + id + "'");
}

double PointedMetricSpace::diameter() const {
  double d = 0.0;
  for (Index i = 0; i < size(); ++i)
    for (Index j = i + 1; j < size(); ++j) d = std::max(d, dist(i, j));
  return d;
}

PointedMetricSpace PointedMetricSpace::subspace(std::span<const Index> indices) const {
  std::vector<Index> keep(indices.begin(), indices.end());
  std::sort(keep.begin(), keep.end());
  if (std::adjacent_find(keep.begin(), keep.end()) != keep.end())
    throw InvalidArgument("subspace indices must be distinct");
  if (!keep.empty() && (keep.front() < 0 || keep.back() >= size()))
    throw IndexOutOfRange("subspace index out of range");
  if (!std::binary_search(keep.begin(), keep.end(), basepoint_))
    throw InvalidArgument("subspace must contain the basepoint");

  PointedMetricSpace out;
  out.kind_ = kind_;
  const Index m = static_cast<Index>(keep.size());
  if (kind_ == MetricKind::Matrix) {
    out.data_.resize(m, m);
    for (Index a = 0; a < m; ++a)
      for (Index b = 0; b < m; ++b) out.data_(a, b) = data_(keep[a], keep[b]);
  } else {
    out.data_.resize(m, data_.cols());
    for (Index a = 0; a < m; ++a) out.data_.row(a) = data_.row(keep[a]);
  }
  for (Index k : keep) out.ids_.push_back(ids_[static_cast<std::size_t>(k)]);
  out.build_index();
  out.basepoint_ = out.index_of(id(basepoint_));
  return out;
}

PointedMetricSpace ball(const PointedMetricSpace& space, double radius) {
  if (!(radius >= 0.0)) throw InvalidArgument("ball radius must be >= 0");
  std::vector<Index> keep;
  for (Index i = 0; i < space.size(); ++i)
    if (space.rho(i) <= radius) keep.push_back(i);
  return space.subspace(keep);
}

unsigned worker_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SPIRALPASTE_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<unsigned>(std::min<long>(v, 1024));
  }
  return hw;
}

DistortionReport distortion(const PointedMetricSpace& space, const ImageDistance& image_distance) {
  const Index n = space.size();
  if (n < 2) throw InvalidArgument("distortion needs at least two points");

  auto scan_rows = [&](Index first_row, Index stride) {
    ScanResult local;
    for (Index i = first_row; i < n; i += stride) {
      for (Index j = i + 1; j < n; ++j) {
        const double da = space.dist(i, j);
        const double dy = image_distance(i, j);
        if (dy == 0.0) {
          if (local.collapse.i < 0) local.collapse = {0.0, i, j};
          continue;
        }
        const double r = dy / da;
        if (local.max.i < 0 || r > local.max.ratio || (r == local.max.ratio && earlier({r, i, j}, local.max)))
          local.max = {r, i, j};
        if (local.min.i < 0 || r < local.min.ratio || (r == local.min.ratio && earlier({r, i, j}, local.min)))
          local.min = {r, i, j};
      }
    }
    return local;
  };

  const Index pairs = n * (n - 1) / 2;
  const unsigned workers = pairs < 4096 ? 1u : std::min<unsigned>(worker_count(), static_cast<unsigned>(n - 1));
  ScanResult total;
  if (workers <= 1) {
    total = scan_rows(0, 1);
  } else {
    std::vector<ScanResult> partial(workers);
    {
      std::vector<std::jthread> pool;
      pool.reserve(workers);
      for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&, w] { partial[w] = scan_rows(static_cast<Index>(w), static_cast<Index>(workers)); });
    }
    for (const auto& part : partial) merge(total, part);
  }

  DistortionReport report;
  if (total.collapse.i >= 0) {
    report.injective = false;
    report.pass = false;
    report.distortion = std::numeric_limits<double>::infinity();
    report.scale_r = 0.0;
    report.min_pair = {space.id(total.collapse.i), space.id(total.collapse.j)};
    if (total.max.i >= 0) {
      report.max_ratio = total.max.ratio;
      report.max_pair = {space.id(total.max.i), space.id(total.max.j)};
    }
    return report;
  }
  report.max_ratio = total.max.ratio;
  report.scale_r = total.min.ratio;
  report.distortion = total.max.ratio / total.min.ratio;
  report.max_pair = {space.id(total.max.i), space.id(total.max.j)};
  report.min_pair = {space.id(total.min.i), space.id(total.min.j)};
  return report;
}

DistortionReport distortion(const PointedMetricSpace& space, std::span<const BlockVector> images,
                            const SumSpaceSpec& target) {
  if (static_cast<Index>(images.size()) != space.size())
    throw InvalidArgument("image must be defined on every point");
  for (const auto& v : images) check_conforms(v, target);
  return distortion(space, [&](Index i, Index j) {
    return distance(images[static_cast<std::size_t>(i)], images[static_cast<std::size_t>(j)], target);
  });
}

DistortionReport& attach_bound(DistortionReport& report, double bound) {
  report.analytic_bound = bound;
  report.pass = report.injective && report.distortion <= bound;
  return report;
}

std::vector<Index> max_separated_subset(const PointedMetricSpace& space, double delta) {
  if (!(delta > 0.0)) throw InvalidArgument("separation delta must be > 0");
  std::vector<Index> chosen;
  for (Index i = 0; i < space.size(); ++i) {
    const bool far = std::all_of(chosen.begin(), chosen.end(), [&](Index c) { return space.dist(i, c) >= delta; });
    if (far) chosen.push_back(i);
  }
  return chosen;
}

double packing_bound(double radius, double delta, int dim, double constant) {
  if (!(radius > 0.0) || !(delta > 0.0) || !(constant > 0.0) || dim < 1)
    throw InvalidArgument("packing_bound needs R, delta, C > 0 and m >= 1");
  return std::pow(constant * radius / delta, dim);
}

}  // namespace spiralpaste
