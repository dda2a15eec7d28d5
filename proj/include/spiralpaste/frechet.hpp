#pragma once

#include <Eigen/Core>

#include <string>
#include <unordered_map>
#include <vector>

#include "spiralpaste/core_metric.hpp"

namespace spiralpaste {

/// Isometric embedding of a finite pointed metric space into ℓ∞^m, m = |space|,
/// with the basepoint sent to 0.
class FrechetMap {
 public:
  FrechetMap(std::vector<std::string> anchors, Eigen::MatrixXd images);

  const std::vector<std::string>& anchor_order() const { return anchors_; }
  Index dimension() const { return images_.cols(); }
  Index size() const { return images_.rows(); }
  /// Rows follow the anchor order, which is also the domain's point order.
  const Eigen::MatrixXd& images() const { return images_; }

  bool contains(const std::string& id) const { return row_.count(id) != 0; }
  Eigen::VectorXd image(const std::string& id) const;
  Eigen::VectorXd image(Index row) const { return images_.row(row).transpose(); }

 private:
  std::vector<std::string> anchors_;
  Eigen::MatrixXd images_;
  std::unordered_map<std::string, Index> row_;
};

/// x ↦ (d(x,aᵢ) − d(O,aᵢ))ᵢ over all anchors aᵢ in point order.
FrechetMap frechet_embed(const PointedMetricSpace& space);

}  // namespace spiralpaste
