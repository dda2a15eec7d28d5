#include "spiralpaste/fdd_glue.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <string>

#include <Eigen/QR>

namespace spiralpaste {
namespace {

void check_model_shape(const FddModel& model) {
  if (model.block_dims.empty()) throw ModelInvalid("model needs at least one block");
  for (int d : model.block_dims)
    if (d < 1) throw ModelInvalid("block dimensions must be positive");
  if (!model.eps_list.empty() && model.eps_list.size() != model.block_dims.size())
    throw ModelInvalid("eps_list must have one entry per block");
  for (double e : model.eps_list)
    if (!(e >= 0.0 && e < 1.0)) throw ModelInvalid("every eps_i must lie in [0, 1)");
}

/// Block sup-norms ‖Tₙvₙ‖ = ‖vₙ‖∞ indexed by model block.
Eigen::VectorXd block_norms(const BlockVector& v, const FddModel& model) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(model.num_blocks());
  for (const auto& [k, b] : v.blocks()) {
    if (k < 0 || k >= model.num_blocks()) throw InvalidArgument("vector is not supported in the model blocks");
    if (b.size() > 0) out(k) = b.cwiseAbs().maxCoeff();
  }
  return out;
}

double ambient_from_norms(const Eigen::VectorXd& norms, const FddModel& model) {
  double out = 0.0;
  for (Index n = 0; n < norms.size(); ++n) out = std::max(out, (1.0 - model.block_eps(static_cast<int>(n))) * norms(n));
  return out;
}

std::vector<Eigen::VectorXd> sphere_directions(int dim, int count, double phase) {
  std::vector<Eigen::VectorXd> out;
  if (dim == 1) {
    out.push_back(Eigen::VectorXd::Constant(1, 1.0));
    out.push_back(Eigen::VectorXd::Constant(1, -1.0));
  } else if (dim == 2) {
    for (int k = 0; k < count; ++k) {
      const double a = 2.0 * std::numbers::pi * (k + phase) / count;
      out.push_back((Eigen::VectorXd(2) << std::cos(a), std::sin(a)).finished());
    }
  } else {
    // Fibonacci lattice on S²
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < count; ++k) {
      const double z = 1.0 - 2.0 * (k + 0.5) / count;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double a = golden * k + 2.0 * std::numbers::pi * phase;
      out.push_back((Eigen::VectorXd(3) << r * std::cos(a), r * std::sin(a), z).finished());
    }
  }
  return out;
}

CoordinateFunctional attaining_functional(const Eigen::VectorXd& x) {
  Index k = 0;
  x.cwiseAbs().maxCoeff(&k);
  return {static_cast<int>(k), x(k) >= 0.0 ? 1 : -1};
}

}  // namespace

void validate_model(const FddModel& model, double epsilon, std::uint64_t seed, int samples) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidArgument("epsilon must lie in (0, 1)");
  check_model_shape(model);
  double product = 1.0;
  for (int n = 0; n < model.num_blocks(); ++n) product *= 1.0 - model.block_eps(n);
  if (!(product > 1.0 - epsilon))
    throw ModelInvalid("prod(1 - eps_i) = " + std::to_string(product) + " is not > 1 - eps = " +
                       std::to_string(1.0 - epsilon));

  BlockSampler sampler(model, seed);
  for (int n = 0; n + 1 < model.num_blocks(); ++n) {
    for (int s = 0; s < samples; ++s) {
      const BlockVector w = sampler.next();
      BlockVector u, v;
      for (const auto& [k, b] : w.blocks()) (k <= n ? u : v).set_block(k, b);
      const double lhs = ambient_norm(u + v, model);
      const double rhs = (1.0 - model.block_eps(n)) * ambient_norm(u, model);
      if (lhs < rhs - 1e-12 * std::max(1.0, rhs))
        throw ModelInvalid("FDD inequality ||u+v|| >= (1 - eps_n)||u|| fails at n = " + std::to_string(n));
    }
  }
}

bool model_is_valid(const FddModel& model, double epsilon) {
  try {
    validate_model(model, epsilon);
    return true;
  } catch (const ModelInvalid&) {
    return false;
  }
}

double ambient_norm(const BlockVector& v, const FddModel& model) {
  return ambient_from_norms(block_norms(v, model), model);
}

double norm_a(const BlockVector& v, const FddModel& model) {
  const Eigen::VectorXd norms = block_norms(v, model);
  double first = 0.0, second = 0.0;
  for (Index n = 0; n < norms.size(); ++n) {
    if (norms(n) > first) {
      second = first;
      first = norms(n);
    } else if (norms(n) > second) {
      second = norms(n);
    }
  }
  return std::max(ambient_from_norms(norms, model), first + second);
}

BlockSampler::BlockSampler(const FddModel& model, std::uint64_t seed) : model_(&model), rng_(seed) {
  check_model_shape(model);
}

double BlockSampler::uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

Eigen::VectorXd BlockSampler::random_block(int dim, double sup_norm) {
  Eigen::VectorXd b(dim);
  for (int i = 0; i < dim; ++i) b(i) = uniform(-1.0, 1.0);
  const int peak = std::uniform_int_distribution<int>(0, dim - 1)(rng_);
  b(peak) = uniform(0.0, 1.0) < 0.5 ? -1.0 : 1.0;
  return sup_norm * b;
}

BlockVector BlockSampler::next() {
  const int blocks = model_->num_blocks();
  const int support = std::uniform_int_distribution<int>(1, blocks)(rng_);
  std::vector<int> order(static_cast<std::size_t>(blocks));
  for (int k = 0; k < blocks; ++k) order[static_cast<std::size_t>(k)] = k;
  std::shuffle(order.begin(), order.end(), rng_);
  const bool tied = uniform(0.0, 1.0) < 0.5;
  const double level = uniform(0.5, 2.0);
  BlockVector v;
  for (int s = 0; s < support; ++s) {
    const int k = order[static_cast<std::size_t>(s)];
    v.set_block(k, random_block(model_->block_dims[static_cast<std::size_t>(k)], tied ? level : uniform(0.0, 2.0)));
  }
  return v;
}

BlockVector BlockSampler::next_pair(int j, int k) {
  BlockVector v;
  const bool zero_first = uniform(0.0, 1.0) < 0.1;
  if (!zero_first) v.set_block(j, random_block(model_->block_dims.at(static_cast<std::size_t>(j)), uniform(0.0, 2.0)));
  v.set_block(k, random_block(model_->block_dims.at(static_cast<std::size_t>(k)), uniform(0.0, 2.0)));
  return v;
}

EquivalenceResult equivalence_ratio(const FddModel& model, double epsilon, int samples, std::uint64_t seed) {
  if (samples < 1) throw InvalidArgument("equivalence_ratio needs at least one sample");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidArgument("epsilon must lie in (0, 1)");
  BlockSampler sampler(model, seed);
  EquivalenceResult out;
  out.max_ratio = 0.0;
  out.min_ratio = std::numeric_limits<double>::infinity();
  out.bound = 4.0 * (1.0 + epsilon) / (1.0 - epsilon);
  for (int s = 0; s < samples; ++s) {
    const BlockVector v = sampler.next();
    const double base = ambient_norm(v, model);
    if (base == 0.0) continue;
    const double r = norm_a(v, model) / base;
    out.max_ratio = std::max(out.max_ratio, r);
    out.min_ratio = std::min(out.min_ratio, r);
  }
  return out;
}

double pair_isometry_check(const FddModel& model, int j, int k, int samples, std::uint64_t seed) {
  if (j == k) throw InvalidArgument("pair_isometry_check needs two distinct blocks");
  if (j < 0 || k < 0 || j >= model.num_blocks() || k >= model.num_blocks())
    throw IndexOutOfRange("block index outside the model");
  BlockSampler sampler(model, seed);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const BlockVector v = sampler.next_pair(j, k);
    const Eigen::VectorXd norms = block_norms(v, model);
    worst = std::max(worst, std::abs(norm_a(v, model) - (norms(j) + norms(k))));
  }
  return worst;
}

NormingSet norming_functionals(const std::vector<Eigen::VectorXd>& basis, double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw InvalidArgument("lambda must lie in (0, 1)");
  if (basis.empty()) throw InvalidArgument("norming_functionals needs a nonempty basis");
  const int dim = static_cast<int>(basis.size());
  if (dim > 3) throw DimensionTooLarge("norming nets are limited to subspaces of dimension <= 3");
  const Index ambient = basis.front().size();
  Eigen::MatrixXd B(ambient, dim);
  for (int c = 0; c < dim; ++c) {
    if (basis[static_cast<std::size_t>(c)].size() != ambient) throw InvalidArgument("basis vectors differ in length");
    B.col(c) = basis[static_cast<std::size_t>(c)];
  }
  if (Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(B).rank() != dim)
    throw InvalidArgument("basis vectors are linearly dependent");

  auto on_sphere = [&](const Eigen::VectorXd& u) {
    Eigen::VectorXd y = B * u;
    return Eigen::VectorXd(y / y.cwiseAbs().maxCoeff());
  };
  // prime sample counts so the check never lands on net points
  std::vector<Eigen::VectorXd> sample;
  for (const auto& u : sphere_directions(dim, dim == 2 ? 4099 : 6007, 0.5)) sample.push_back(on_sphere(u));

  const int start = dim == 1 ? 2 : dim == 2 ? 8 : 32;
  const int cap = 1 << 14;
  for (int count = start; count <= cap; count *= 2) {
    NormingSet set;
    set.lambda = lambda;
    std::set<CoordinateFunctional> unique;
    for (const auto& u : sphere_directions(dim, count, 0.0)) {
      Eigen::VectorXd x = on_sphere(u);
      unique.insert(attaining_functional(x));
      set.net.push_back(std::move(x));
    }
    set.functionals.assign(unique.begin(), unique.end());

    set.net_mesh = 0.0;
    set.norming_constant = std::numeric_limits<double>::infinity();
    for (const auto& y : sample) {
      double nearest = std::numeric_limits<double>::infinity();
      for (const auto& x : set.net) nearest = std::min(nearest, (y - x).cwiseAbs().maxCoeff());
      set.net_mesh = std::max(set.net_mesh, nearest);
      double best = 0.0;
      for (const auto& f : set.functionals) best = std::max(best, std::abs(f(y)));
      set.norming_constant = std::min(set.norming_constant, best);
    }
    if (set.net_mesh <= 1.0 - lambda && set.norming_constant >= lambda) return set;
    if (dim == 1) break;
  }
  throw NetTooCoarse("could not certify a (1 - lambda)-net for lambda = " + std::to_string(lambda));
}

double no_cotype_bound(double epsilon) {
  return 4.0 * (1.0 + epsilon) * (1.0 + epsilon) / (1.0 - epsilon);
}

NoCotypeEmbedding embed_no_cotype(const PointedMetricSpace& space, double epsilon, int model_size,
                                  std::vector<double> eps_list) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidArgument("epsilon must lie in (0, 1)");
  if (model_size < 0) throw InvalidArgument("model_size must be >= 0");
  double max_rho = 0.0;
  for (Index i = 0; i < space.size(); ++i) max_rho = std::max(max_rho, space.rho(i));
  const int bands = model_size > 0 ? model_size : bands_needed(epsilon, max_rho);

  NoCotypeEmbedding out{paste(space, 1.0, epsilon, bands), {}, std::nullopt, std::nullopt};
  out.model = FddModel{out.embedding.layout.block_dims, std::move(eps_list)};
  validate_model(out.model, epsilon);
  if (space.size() < 2) return out;

  const auto& images = out.embedding.images;
  const FddModel& model = out.model;
  auto image_diff = [&](Index i, Index j) {
    return BlockVector(images[static_cast<std::size_t>(i)] - images[static_cast<std::size_t>(j)]);
  };
  DistortionReport a = distortion(space, [&](Index i, Index j) { return norm_a(image_diff(i, j), model); });
  attach_bound(a, analytic_bound(1.0, epsilon));
  DistortionReport amb = distortion(space, [&](Index i, Index j) { return ambient_norm(image_diff(i, j), model); });
  attach_bound(amb, no_cotype_bound(epsilon));
  out.report_a = a;
  out.report_ambient = amb;
  return out;
}

}  // namespace spiralpaste
