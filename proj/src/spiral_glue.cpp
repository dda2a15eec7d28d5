#include "spiralpaste/spiral_glue.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <string>

namespace spiralpaste {
namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;
constexpr double kMaxRadius = 1e300;

double max_log_radius() { return std::log(kMaxRadius); }

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidArgument("epsilon must lie in (0, 1)");
}

void check_p(double p) {
  if (!(p >= 1.0) || std::isinf(p)) throw InvalidArgument("p must be a finite real >= 1");
}

/// Golden-section search for the extremum of f on [lo, hi]; `sign` = +1
/// maximises, −1 minimises.
template <typename F>
double golden_extremum(F&& f, double lo, double hi, double sign, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = sign * f(c), fd = sign * f(d);
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = sign * f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = sign * f(d);
    }
  }
  return std::max({sign * f(a), sign * f(b), fc, fd}) * sign;
}

/// Dense grid plus golden-section refinement around the best grid cell.
template <typename F>
double extremum_on_unit_interval(F&& f, double sign) {
  constexpr int kGrid = 10000;
  int best = 0;
  double best_value = sign * f(0.0);
  for (int k = 1; k <= kGrid; ++k) {
    const double v = sign * f(static_cast<double>(k) / kGrid);
    if (v > best_value) {
      best_value = v;
      best = k;
    }
  }
  const double lo = static_cast<double>(std::max(best - 1, 0)) / kGrid;
  const double hi = static_cast<double>(std::min(best + 1, kGrid)) / kGrid;
  const double refined = golden_extremum(f, lo, hi, sign, 1e-10);
  return sign * std::max(best_value, sign * refined);
}

}  // namespace

RadiiSchedule::RadiiSchedule(double epsilon, int band_count) : epsilon_(epsilon), band_count_(band_count) {
  check_epsilon(epsilon);
  if (band_count < 1) throw InvalidArgument("band_count must be >= 1");
  const double even_step = kHalfPi / epsilon;
  const double odd_step = -std::log(epsilon);
  radii_.reserve(static_cast<std::size_t>(2 * band_count));
  log_radii_.reserve(radii_.capacity());
  radii_.push_back(1.0);
  log_radii_.push_back(0.0);
  const double even_factor = std::exp(even_step);
  while (static_cast<int>(radii_.size()) < 2 * band_count) {
    const bool next_is_even = radii_.size() % 2 == 1;
    const double log_next = log_radii_.back() + (next_is_even ? even_step : odd_step);
    if (log_next > max_log_radius())
      throw ScheduleOverflow("radius R_" + std::to_string(radii_.size() + 1) + " = e^" + std::to_string(log_next) +
                             " exceeds 1e300; use fewer bands or a larger epsilon");
    radii_.push_back(next_is_even ? radii_.back() * even_factor : radii_.back() / epsilon);
    // log of the stored radius, so band_of(radius(i)) is classified exactly like radius(i)
    log_radii_.push_back(std::log(radii_.back()));
  }
}

double RadiiSchedule::radius(int i) const {
  if (i < 1 || i > size()) throw IndexOutOfRange("radius index " + std::to_string(i) + " outside the schedule");
  return radii_[static_cast<std::size_t>(i - 1)];
}

double RadiiSchedule::log_radius(int i) const {
  if (i < 1 || i > size()) throw IndexOutOfRange("radius index " + std::to_string(i) + " outside the schedule");
  return log_radii_[static_cast<std::size_t>(i - 1)];
}

int RadiiSchedule::band_of(double rho) const {
  if (!(rho >= 0.0)) throw InvalidArgument("rho must be >= 0");
  if (rho == 0.0) return 1;
  const double lr = std::log(rho);
  const int last_odd = 2 * band_count_ - 1;
  if (lr > log_radius(last_odd)) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "rho = %.6g exceeds the last odd radius R_%d = %.6g", rho, last_odd,
                  radius(last_odd));
    throw ScheduleTooShort(buf);
  }
  if (lr <= 0.0) return 1;
  for (int i = 1; 2 * i + 1 <= last_odd; ++i)
    if (lr <= log_radius(2 * i + 1)) return i;
  return band_count_ - 1;
}

RadiiSchedule radii_schedule(double epsilon, int band_count) { return RadiiSchedule(epsilon, band_count); }

int bands_needed(double epsilon, double max_rho) {
  check_epsilon(epsilon);
  if (!(max_rho >= 0.0)) throw InvalidArgument("max_rho must be >= 0");
  if (max_rho <= 1.0) return 1;
  const double target = std::log(max_rho);
  // log R_{2K−1} = (K−1)(π/(2ε) − ln ε)
  const double per_band = kHalfPi / epsilon - std::log(epsilon);
  int k = 1 + static_cast<int>(std::ceil(target / per_band));
  while (k > 1 && (k - 2) * per_band >= target) --k;
  // the schedule sums its logs step by step; trust that over the closed form
  while (RadiiSchedule(epsilon, k).log_radius(2 * k - 1) < target) ++k;
  return k;
}

Blend blend_angle(double p, double theta) {
  check_p(p);
  if (!(theta > 0.0)) return {1.0, 0.0};
  if (theta >= kHalfPi) return {0.0, 1.0};
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  if (p <= 2.0) {
    if (p == 2.0) return {c, s};
    return {std::pow(c, 2.0 / p), std::pow(s, 2.0 / p)};
  }
  const double scale = std::pow(std::pow(c, p) + std::pow(s, p), 1.0 / p);
  return {c / scale, s / scale};
}

Blend blend(double p, const RadiiSchedule& schedule, int band, double rho) {
  if (band < 1) throw IndexOutOfRange("band index must be >= 1");
  if (!(rho >= 0.0)) throw InvalidArgument("rho must be >= 0");
  const int lower = 2 * band - 1;
  if (lower > schedule.size()) throw ScheduleTooShort("band " + std::to_string(band) + " lies beyond the schedule");
  check_p(p);
  const double log_lower = schedule.log_radius(lower);
  if (rho == 0.0 || std::log(rho) <= log_lower) return {1.0, 0.0};
  const double log_upper = schedule.log_radius(lower + 1);
  const double lr = std::log(rho);
  if (lr >= log_upper) return {0.0, 1.0};
  return blend_angle(p, schedule.epsilon() * (lr - log_lower));
}

double c_constant(double p) {
  if (!(p > 2.0) || std::isinf(p)) throw InvalidArgument("C(p) is defined for finite p > 2");
  return std::pow(2.0, 1.0 - 2.0 / p) * (1.0 + std::pow(2.0, 1.0 + (p - 1.0) * (p - 2.0) / (2.0 * p)));
}

SpiralPaster::SpiralPaster(const PointedMetricSpace& space, double p, RadiiSchedule schedule,
                           const Provider& provider)
    : space_(&space), p_(p), schedule_(std::move(schedule)) {
  check_p(p);
  const int k = schedule_.band_count();
  providers_.reserve(static_cast<std::size_t>(k));
  for (int b = 0; b < k; ++b) {
    const PointedMetricSpace sub = ball(space, schedule_.radius(2 * (b + 1)));
    FrechetMap map = provider(sub);
    if (map.size() != sub.size()) throw InvalidArgument("provider must map every point of the ball");
    const Eigen::VectorXd origin = map.image(space.id(space.basepoint()));
    if (origin.size() > 0 && origin.cwiseAbs().maxCoeff() != 0.0)
      throw InvalidArgument("provider must send the basepoint to 0");
    layout_.block_dims.push_back(static_cast<int>(map.dimension()));
    providers_.push_back(std::move(map));
  }
  target_ = layout_.spec(p);
}

std::pair<BlockVector, BlockVector> SpiralPaster::branch_terms(Index x, int band) const {
  if (x < 0 || x >= space_->size()) throw IndexOutOfRange("point index out of range");
  const Blend w = blend(p_, schedule_, band, space_->rho(x));
  const std::string& id = space_->id(x);
  const int k = schedule_.band_count();
  auto term = [&](int block, double coeff) {
    BlockVector v;
    if (coeff == 0.0) return v;
    if (block >= k)
      throw ScheduleTooShort("branch " + std::to_string(band) + " needs block " + std::to_string(block) +
                             " beyond the " + std::to_string(k) + "-block layout");
    const FrechetMap& map = providers_[static_cast<std::size_t>(block)];
    if (!map.contains(id))
      throw InvalidArgument("point '" + id + "' lies outside the ball needed by branch " + std::to_string(band));
    v.set_block(block, coeff * map.image(id));
    return v;
  };
  return {term(band - 1, w.c), term(band, w.s)};
}

BlockVector SpiralPaster::branch(Index x, int band) const {
  auto [c_term, s_term] = branch_terms(x, band);
  return c_term + s_term;
}

PastedEmbedding SpiralPaster::embed() const {
  PastedEmbedding out{schedule_, layout_, target_, {}, {}};
  out.images.reserve(static_cast<std::size_t>(space_->size()));
  out.band_of.reserve(static_cast<std::size_t>(space_->size()));
  for (Index x = 0; x < space_->size(); ++x) {
    const int band = schedule_.band_of(space_->rho(x));
    out.images.push_back(branch(x, band));
    out.band_of.push_back(band);
  }
  return out;
}

PastedEmbedding paste(const PointedMetricSpace& space, double p, double epsilon, int band_count,
                      const Provider& provider) {
  return SpiralPaster(space, p, radii_schedule(epsilon, band_count), provider).embed();
}

AnalyticBound analytic_bound_parts(double p, double epsilon) {
  check_p(p);
  check_epsilon(epsilon);
  AnalyticBound out;
  out.k_factor = p <= 2.0 ? 2.0 : c_constant(p);
  const double shift = out.k_factor * epsilon;
  const double cut = out.k_factor * epsilon * (1.0 + epsilon);
  auto partner = [p](double c) { return std::pow(std::max(0.0, 1.0 - std::pow(c, p)), 1.0 / p); };
  auto pnorm2 = [p](double a, double b) {
    if (a == 0.0) return b;
    if (b == 0.0) return a;
    return std::pow(std::pow(a, p) + std::pow(b, p), 1.0 / p);
  };
  auto upper = [&](double c) { return (1.0 + epsilon) * pnorm2(c + shift, partner(c) + shift); };
  auto lower = [&](double c) { return pnorm2(std::max(c - cut, 0.0), std::max(partner(c) - cut, 0.0)); };

  out.band_upper = extremum_on_unit_interval(upper, +1.0);
  out.band_lower = extremum_on_unit_interval(lower, -1.0);
  const double inf = std::numeric_limits<double>::infinity();
  out.band_ratio = out.band_lower > 0.0 ? out.band_upper / out.band_lower : inf;

  const double denom = (1.0 - epsilon) * (1.0 - epsilon - epsilon * epsilon);
  out.small_norm_ratio = denom > 0.0 ? std::pow(1.0 + epsilon, 3) / denom : inf;
  out.value = std::max(out.band_ratio, out.small_norm_ratio);
  return out;
}

double analytic_bound(double p, double epsilon) { return analytic_bound_parts(p, epsilon).value; }

double spiral_distortion(double epsilon, double t_max, int samples) {
  if (!(epsilon >= 0.0)) throw InvalidArgument("spiral epsilon must be >= 0");
  if (!(t_max > 1.0)) throw InvalidArgument("t_max must be > 1");
  if (samples < 2) throw InvalidArgument("spiral needs at least two samples");

  const double log_tmax = std::log(t_max);
  std::vector<std::string> ids;
  Eigen::MatrixXd coords(samples, 1);
  std::vector<BlockVector> images;
  ids.reserve(static_cast<std::size_t>(samples));
  images.reserve(static_cast<std::size_t>(samples));
  for (int k = 1; k <= samples; ++k) {
    const double t = k == samples ? t_max : std::exp(log_tmax * k / samples);
    char id[32];
    std::snprintf(id, sizeof id, "t%06d", k);
    ids.emplace_back(id);
    coords(k - 1, 0) = t;
    const double angle = epsilon * std::log(t);
    BlockVector v;
    v.set_block(0, Eigen::VectorXd::Constant(1, t * std::cos(angle)));
    v.set_block(1, Eigen::VectorXd::Constant(1, t * std::sin(angle)));
    images.push_back(std::move(v));
  }
  const auto line = PointedMetricSpace::from_coords(std::move(ids), std::move(coords), MetricKind::Linf, "t000001");
  const auto plane = SumSpaceSpec::lp(2.0, {1, 1});
  return distortion(line, images, plane).distortion;
}

}  // namespace spiralpaste
