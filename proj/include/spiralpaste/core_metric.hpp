#pragma once

#include <Eigen/Core>

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "spiralpaste/sum_space.hpp"

namespace spiralpaste {

using Index = Eigen::Index;

enum class MetricKind { Matrix, Linf, L2 };

const char* to_string(MetricKind kind);

/// Finite pointed metric space.
///
/// Points are kept in ascending id order; every "deterministic order" in the
/// library (anchors, greedy scans, ties) is this index order. Explicit metrics
/// are stored as a dense symmetric matrix, coordinate metrics are evaluated
/// lazily from the coordinate rows.
class PointedMetricSpace {
 public:
  /// Validates symmetry (1e-9), zero diagonal, positivity off the diagonal and
  /// the triangle inequality (1e-9 scaled by the diameter).
  static PointedMetricSpace from_matrix(std::vector<std::string> ids, Eigen::MatrixXd distances,
                                        const std::string& basepoint);
  /// Rows of `coords` are points; `kind` must be Linf or L2.
  static PointedMetricSpace from_coords(std::vector<std::string> ids, Eigen::MatrixXd coords, MetricKind kind,
                                        const std::string& basepoint);

  Index size() const { return static_cast<Index>(ids_.size()); }
  const std::vector<std::string>& ids() const { return ids_; }
  const std::string& id(Index i) const { return ids_[static_cast<std::size_t>(i)]; }
  Index basepoint() const { return basepoint_; }
  MetricKind kind() const { return kind_; }
  /// Coordinate rows, present only for coordinate-induced metrics.
  const Eigen::MatrixXd* coords() const { return kind_ == MetricKind::Matrix ? nullptr : &data_; }
  const Eigen::MatrixXd* matrix() const { return kind_ == MetricKind::Matrix ? &data_ : nullptr; }

  double dist(Index i, Index j) const {
    if (i == j) return 0.0;
    switch (kind_) {
      case MetricKind::Matrix:
        return data_(i, j);
      case MetricKind::Linf:
        return (data_.row(i) - data_.row(j)).cwiseAbs().maxCoeff();
      case MetricKind::L2:
        if (data_.cols() == 1) return std::abs(data_(i, 0) - data_(j, 0));
        return (data_.row(i) - data_.row(j)).norm();
    }
    return 0.0;
  }

  /// Distance to the basepoint.
  double rho(Index i) const { return dist(i, basepoint_); }

  std::optional<Index> find(const std::string& id) const;
  Index index_of(const std::string& id) const;

  double diameter() const;

  /// Subspace on the given indices (any order, no duplicates); must contain
  /// the basepoint.
  PointedMetricSpace subspace(std::span<const Index> indices) const;

 private:
  PointedMetricSpace() = default;
  void build_index();
  void check_distinct(double tol) const;

  std::vector<std::string> ids_;
  Eigen::MatrixXd data_;
  MetricKind kind_ = MetricKind::Matrix;
  Index basepoint_ = 0;
  std::unordered_map<std::string, Index> index_;
};

/// {x : d(x, O) ≤ radius}, same basepoint, restricted metric.
PointedMetricSpace ball(const PointedMetricSpace& space, double radius);

struct DistortionReport {
  double distortion = 1.0;
  double scale_r = 1.0;
  double max_ratio = 1.0;
  std::pair<std::string, std::string> max_pair;
  std::pair<std::string, std::string> min_pair;
  std::optional<double> analytic_bound;
  bool injective = true;
  bool pass = true;
};

/// Distance between the images of points i and j.
using ImageDistance = std::function<double(Index, Index)>;

/// Brute force over all unordered pairs: distortion = max ratio / min ratio
/// with ratio(u,v) = d_Y(fu,fv) / d_A(u,v), scale_r = min ratio. A pair with
/// d_Y = 0 marks the map non-injective and yields distortion = +inf.
///
/// Rows are split over SPIRALPASTE_THREADS workers (default: all cores); the
/// extremal pairs are tie-broken by index order so the result does not depend
/// on the thread count.
DistortionReport distortion(const PointedMetricSpace& space, const ImageDistance& image_distance);

DistortionReport distortion(const PointedMetricSpace& space, std::span<const BlockVector> images,
                            const SumSpaceSpec& target);

/// Sets `analytic_bound` and `pass = injective && distortion ≤ bound`.
DistortionReport& attach_bound(DistortionReport& report, double bound);

/// Greedy maximal δ-separated subset scanned in index order.
std::vector<Index> max_separated_subset(const PointedMetricSpace& space, double delta);

/// (C·R/δ)^m, the volumetric cap on δ-separated sets in an m-dimensional ball.
double packing_bound(double radius, double delta, int dim, double constant);

/// Worker count from SPIRALPASTE_THREADS, falling back to hardware concurrency.
unsigned worker_count();

}  // namespace spiralpaste
