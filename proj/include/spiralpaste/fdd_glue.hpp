#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "spiralpaste/core_metric.hpp"
#include "spiralpaste/spiral_glue.hpp"
#include "spiralpaste/sum_space.hpp"

namespace spiralpaste {

/// Concrete no-cotype gluing model: disjoint sup-norm blocks Y₁ … Y_N inside a
/// c₀-type sum, each Tₙ the identity onto ℓ∞^{m(n)}.
///
/// With nonzero εₙ the ambient norm of block n is scaled by (1 − εₙ), so that
/// ‖y‖ ≤ ‖Tₙy‖ still holds while the decomposition constants become nontrivial.
struct FddModel {
  std::vector<int> block_dims;
  std::vector<double> eps_list;  // empty means all zero

  static FddModel identity(std::vector<int> dims) { return FddModel{std::move(dims), {}}; }

  int num_blocks() const { return static_cast<int>(block_dims.size()); }
  double block_eps(int n) const {
    return eps_list.empty() ? 0.0 : eps_list.at(static_cast<std::size_t>(n));
  }
  SumSpaceSpec ambient() const { return SumSpaceSpec::sup(block_dims); }
};

/// Checks Π(1−εᵢ) > 1−ε and spot-checks ‖u+v‖ ≥ (1−εₙ)‖u‖ for u in blocks ≤ n,
/// v in blocks > n. Throws ModelInvalid naming the failing inequality.
void validate_model(const FddModel& model, double epsilon, std::uint64_t seed = 7, int samples = 256);
bool model_is_valid(const FddModel& model, double epsilon);

/// max_n (1−εₙ)‖vₙ‖∞.
double ambient_norm(const BlockVector& v, const FddModel& model);

/// max(‖v‖_ambient, max_{j≠k} ‖T_j v_j‖ + ‖T_k v_k‖).
double norm_a(const BlockVector& v, const FddModel& model);

/// Seeded sampler of block vectors over the model. Half of the samples tie all
/// nonzero blocks to a common sup-norm, which is where ‖·‖_a/‖·‖ peaks.
class BlockSampler {
 public:
  BlockSampler(const FddModel& model, std::uint64_t seed);
  BlockVector next();
  /// Random vector supported in blocks {j, k}.
  BlockVector next_pair(int j, int k);

 private:
  Eigen::VectorXd random_block(int dim, double sup_norm);

  const FddModel* model_;
  std::mt19937_64 rng_;
  double uniform(double lo, double hi);
};

struct EquivalenceResult {
  double max_ratio = 1.0;
  double min_ratio = 1.0;
  double bound = 0.0;  // 4(1+ε)/(1−ε)
};

EquivalenceResult equivalence_ratio(const FddModel& model, double epsilon, int samples, std::uint64_t seed);

/// max over sampled v supported in {j,k} of |‖v‖_a − (‖v_j‖∞ + ‖v_k‖∞)|.
double pair_isometry_check(const FddModel& model, int j, int k, int samples, std::uint64_t seed = 11);

struct CoordinateFunctional {
  int coordinate = 0;
  int sign = 1;
  double operator()(const Eigen::VectorXd& y) const { return sign * y(coordinate); }
  friend bool operator<(const CoordinateFunctional& a, const CoordinateFunctional& b) {
    return a.coordinate < b.coordinate || (a.coordinate == b.coordinate && a.sign < b.sign);
  }
  friend bool operator==(const CoordinateFunctional&, const CoordinateFunctional&) = default;
};

struct NormingSet {
  std::vector<CoordinateFunctional> functionals;
  std::vector<Eigen::VectorXd> net;
  double lambda = 0.0;
  double net_mesh = 0.0;            // sampled sup distance from the sphere to the net
  double norming_constant = 0.0;    // sampled inf over the sphere of max |f(y)|
};

/// (1−λ)-net of the ℓ∞ unit sphere of span(basis) with one norm-1 coordinate
/// functional per net point attaining 1 there. Subspace dimension is capped
/// at 3 (DimensionTooLarge); NetTooCoarse if refinement cannot certify the
/// net and λ-norming on a dense sphere sample.
NormingSet norming_functionals(const std::vector<Eigen::VectorXd>& basis, double lambda);

struct NoCotypeEmbedding {
  PastedEmbedding embedding;
  FddModel model;
  // Both empty for a one-point space, where distortion is undefined.
  std::optional<DistortionReport> report_a;        // bound: B(1, ε)
  std::optional<DistortionReport> report_ambient;  // bound: 4(1+ε)²/(1−ε)
};

/// p = 1 spiral paste read in ‖·‖_a and in the ambient sup norm.
/// `model_size` = 0 picks the smallest band count that covers the space.
NoCotypeEmbedding embed_no_cotype(const PointedMetricSpace& space, double epsilon, int model_size = 0,
                                  std::vector<double> eps_list = {});

double no_cotype_bound(double epsilon);

}  // namespace spiralpaste
