#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "spiralpaste/core_metric.hpp"
#include "spiralpaste/frechet.hpp"
#include "spiralpaste/sum_space.hpp"

namespace spiralpaste {

/// Radii R₁ < R₂ < … < R_{2K} with
///   R₁ = 1,  ε·ln(R_{2i}/R_{2i−1}) = π/2,  R_{2i+1} = R_{2i}/ε.
///
/// Radii are 1-based to match the usual indexing of the construction; the
/// logarithms are kept so band classification never has to touch huge values.
class RadiiSchedule {
 public:
  RadiiSchedule(double epsilon, int band_count);

  double epsilon() const { return epsilon_; }
  /// K: number of (odd, even) radius pairs, which is also the number of blocks.
  int band_count() const { return band_count_; }
  int size() const { return static_cast<int>(radii_.size()); }
  double radius(int i) const;
  double log_radius(int i) const;
  const std::vector<double>& radii() const { return radii_; }
  const std::vector<double>& log_radii() const { return log_radii_; }

  /// Band i with ρ ∈ (R_{2i−1}, R_{2i+1}]; band 1 also takes ρ ≤ R₁.
  /// Throws ScheduleTooShort when ρ exceeds the last odd radius R_{2K−1}.
  int band_of(double rho) const;

 private:
  double epsilon_;
  int band_count_;
  std::vector<double> radii_;
  std::vector<double> log_radii_;
};

/// Throws ScheduleOverflow if a radius would exceed 1e300.
RadiiSchedule radii_schedule(double epsilon, int band_count);

/// Smallest K whose schedule covers every ρ ≤ max_rho (R_{2K−1} ≥ max_rho).
int bands_needed(double epsilon, double max_rho);

struct Blend {
  double c = 1.0;
  double s = 0.0;
};

/// Blend at angle θ ∈ [0, π/2]: (cos^{2/p}θ, sin^{2/p}θ) for p ≤ 2 and the
/// normalised pair (f_p(θ), g_p(θ)) for p > 2. Always c^p + s^p = 1, and the
/// endpoints return (1,0) and (0,1) exactly.
Blend blend_angle(double p, double theta);

/// Blend of band i at radius ρ: θ = ε·ln(clamp(ρ, R_{2i−1}, R_{2i}) / R_{2i−1}).
Blend blend(double p, const RadiiSchedule& schedule, int band, double rho);

/// C(p) = 2^{1−2/p}·(1 + 2^{1+(p−1)(p−2)/(2p)}), the derivative constant of
/// the p > 2 blend. Requires p > 2.
double c_constant(double p);

/// One fresh sup-norm block per even radius: block b (0-based) holds the
/// provider image for R_{2(b+1)} and has dimension |ball(R_{2(b+1)})|.
struct BlockLayout {
  std::vector<int> block_dims;

  int block_of_even_index(int i) const { return i / 2 - 1; }
  SumSpaceSpec spec(double p) const { return SumSpaceSpec::lp(p, block_dims); }
};

struct PastedEmbedding {
  RadiiSchedule schedule;
  BlockLayout layout;
  SumSpaceSpec target;
  std::vector<BlockVector> images;  // aligned with the space's point order
  std::vector<int> band_of;         // branch of the paste that produced each image
};

/// Embedding of a finite ball into ℓ∞^m with the basepoint sent to 0.
using Provider = std::function<FrechetMap(const PointedMetricSpace&)>;

/// Pastes ball embeddings E_{R₂}, E_{R₄}, …, E_{R_{2K}} along the spiral:
///
///   Tx = c_{2i−1}(x)·E_{R_{2i}}x ⊕ s_{2i−1}(x)·E_{R_{2i+2}}x   for ρ(x) ∈ (R_{2i−1}, R_{2i+1}],
///
/// with the two terms in the layout blocks of 2i and 2i+2.
class SpiralPaster {
 public:
  SpiralPaster(const PointedMetricSpace& space, double p, RadiiSchedule schedule, const Provider& provider);

  const RadiiSchedule& schedule() const { return schedule_; }
  const BlockLayout& layout() const { return layout_; }
  const SumSpaceSpec& target() const { return target_; }
  double p() const { return p_; }

  /// Image of point x under the branch of band i, regardless of which band x
  /// belongs to. Throws ScheduleTooShort when the branch needs a block beyond
  /// the layout and InvalidArgument when x lies outside a ball it needs.
  BlockVector branch(Index x, int band) const;

  /// Coefficient-block split of the branch: (c·E x, s·F x) as separate vectors.
  std::pair<BlockVector, BlockVector> branch_terms(Index x, int band) const;

  PastedEmbedding embed() const;

 private:
  const PointedMetricSpace* space_;
  double p_;
  RadiiSchedule schedule_;
  BlockLayout layout_;
  SumSpaceSpec target_;
  std::vector<FrechetMap> providers_;  // providers_[b] embeds ball(R_{2(b+1)})
};

PastedEmbedding paste(const PointedMetricSpace& space, double p, double epsilon, int band_count,
                      const Provider& provider = frechet_embed);

/// Pieces of the distortion bound B(p, ε) for the pasted map.
struct AnalyticBound {
  double k_factor = 2.0;        // 2 for p ≤ 2, C(p) for p > 2
  double band_upper = 0.0;      // max_c (1+ε)((c+Kε)^p + (s+Kε)^p)^{1/p}
  double band_lower = 0.0;      // min_c ((c−Kε(1+ε))₊^p + (s−Kε(1+ε))₊^p)^{1/p}
  double band_ratio = 0.0;      // +inf when band_lower ≤ 0
  double small_norm_ratio = 0.0;  // (1+ε)³ / ((1−ε)(1−ε−ε²)), ρ(y) ≤ ερ(x)
  double value = 0.0;           // max(band_ratio, small_norm_ratio)
};

AnalyticBound analytic_bound_parts(double p, double epsilon);

/// B(p, ε); +inf when the lower band factor vanishes.
double analytic_bound(double p, double epsilon);

/// Distortion of t ↦ t(cos(ε ln t), sin(ε ln t)) on `samples` geometric
/// samples of (1, t_max], measured against |s − t|.
double spiral_distortion(double epsilon, double t_max, int samples);

}  // namespace spiralpaste
