#include "spiralpaste/frechet.hpp"

namespace spiralpaste {

FrechetMap::FrechetMap(std::vector<std::string> anchors, Eigen::MatrixXd images)
    : anchors_(std::move(anchors)), images_(std::move(images)) {
  if (static_cast<Index>(anchors_.size()) != images_.rows())
    throw InvalidArgument("Frechet map needs one image row per anchor");
  for (std::size_t k = 0; k < anchors_.size(); ++k) row_.emplace(anchors_[k], static_cast<Index>(k));
}

Eigen::VectorXd FrechetMap::image(const std::string& id) const {
  auto it = row_.find(id);
  if (it == row_.end()) throw InvalidArgument("point '" + id + "' is outside the Frechet map's domain");
  return image(it->second);
}

FrechetMap frechet_embed(const PointedMetricSpace& space) {
  const Index m = space.size();
  const Index o = space.basepoint();
  Eigen::MatrixXd images(m, m);
  for (Index x = 0; x < m; ++x)
    for (Index a = 0; a < m; ++a) images(x, a) = space.dist(x, a) - space.dist(o, a);
  images.row(o).setZero();
  return FrechetMap(space.ids(), std::move(images));
}

}  // namespace spiralpaste
