#include "spiralpaste/sum_space.hpp"

#include <string>

namespace spiralpaste {

void SumSpaceSpec::validate() const {
  if (!(p >= 1.0)) throw InvalidArgument("sum-space exponent p must be >= 1 or sup, got " + std::to_string(p));
  if (block_dims.empty()) throw InvalidArgument("sum space needs at least one block");
  for (int d : block_dims)
    if (d < 1) throw InvalidArgument("block dimensions must be positive");
}

std::optional<double> proportional_ratio(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double tol) {
  if (a.size() != b.size()) throw InvalidArgument("profiles have different lengths");
  const double bb = b.squaredNorm();
  if (bb == 0.0 || a.squaredNorm() == 0.0) return std::nullopt;
  const double c = a.dot(b) / bb;
  if (!(c > 0.0)) return std::nullopt;
  const double scale = std::max({1.0, a.cwiseAbs().maxCoeff(), (c * b).cwiseAbs().maxCoeff()});
  const double residual = (a - c * b).cwiseAbs().maxCoeff();
  if (residual > tol * scale) return std::nullopt;
  return c;
}

FlatTripleResult flat_triple_check(const BlockVector& x, const BlockVector& y, const BlockVector& z,
                                   const SumSpaceSpec& spec, double tol) {
  if (spec.is_sup()) throw InvalidArgument("flat_triple_check needs a finite exponent p");
  const double dxy = distance(x, y, spec);
  const double dyz = distance(y, z, spec);
  const double dxz = distance(x, z, spec);
  const double scale = std::max({1.0, dxy, dyz, dxz});
  if (dxy <= tol * scale || dyz <= tol * scale || dxz <= tol * scale)
    throw DegenerateTriple("flat_triple_check needs pairwise distinct points");

  FlatTripleResult result;
  if (std::abs(dxz - dxy - dyz) > tol * scale) {
    result.verdict = FlatVerdict::NotFlat;
    return result;
  }
  const Eigen::VectorXd left = block_profile(BlockVector(x - y), spec);
  const Eigen::VectorXd right = block_profile(BlockVector(y - z), spec);
  result.ratio = proportional_ratio(left, right, tol);
  result.verdict = result.ratio ? FlatVerdict::FlatProportional : FlatVerdict::FlatNotProportional;
  return result;
}

const char* to_string(FlatVerdict verdict) {
  switch (verdict) {
    case FlatVerdict::FlatProportional:
      return "FLAT_PROPORTIONAL";
    case FlatVerdict::FlatNotProportional:
      return "FLAT_NOT_PROPORTIONAL";
    case FlatVerdict::NotFlat:
      return "NOT_FLAT";
  }
  return "?";
}

}  // namespace spiralpaste
