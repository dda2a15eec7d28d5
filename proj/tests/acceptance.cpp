// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "spiralpaste/core_metric.hpp"
#include "spiralpaste/counterexample.hpp"
#include "spiralpaste/fdd_glue.hpp"
#include "spiralpaste/frechet.hpp"
#include "spiralpaste/io.hpp"
#include "spiralpaste/spaces.hpp"
#include "spiralpaste/spiral_glue.hpp"
#include "spiralpaste/sum_space.hpp"

using namespace spiralpaste;
namespace fs = std::filesystem;

namespace {

const double kPs[] = {1.0, 1.5, 2.0, 3.0, 4.0};
const double kEps[] = {0.5, 0.2, 0.1};

struct Outcome {
  bool ok = true;
  std::string detail;
};

struct NamedSpace {
  std::string name;
  PointedMetricSpace space;
  double max_rho;
};

std::vector<NamedSpace> test_spaces() {
  std::vector<NamedSpace> out;
  auto add = [&](std::string name, PointedMetricSpace s) {
    double r = 0.0;
    for (Index i = 0; i < s.size(); ++i) r = std::max(r, s.rho(i));
    out.push_back({std::move(name), std::move(s), r});
  };
  add("line", line_space());
  add("grid", log_grid_space());
  add("tree", random_tree_space(150, 2e8, 42));
  return out;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Outcome partition_of_unity() {
  double worst = 0.0;
  for (double p : kPs)
    for (int k = 0; k < 1000; ++k) {
      const auto w = blend_angle(p, std::numbers::pi / 2 * k / 999.0);
      worst = std::max(worst, std::abs(std::pow(w.c, p) + std::pow(w.s, p) - 1.0));
    }
  return {worst <= 1e-12, fmt("max |c^p + s^p - 1| = %.3g over 5000 (p, theta)", worst)};
}

Outcome frechet_exactness() {
  int failures = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto s = random_integer_metric(2 + static_cast<int>(seed % 39), seed);
    const auto f = frechet_embed(s);
    std::vector<BlockVector> images;
    bool norms = true;
    for (Index i = 0; i < s.size(); ++i) {
      images.push_back(BlockVector::single(0, f.image(i)));
      norms = norms && f.image(i).cwiseAbs().maxCoeff() == s.rho(i);
    }
    const auto r = distortion(s, images, SumSpaceSpec::sup({static_cast<int>(s.size())}));
    if (!(norms && r.distortion == 1.0)) ++failures;
  }
  return {failures == 0, fmt("%.0f of 100 spaces (n <= 40) not exactly isometric", failures)};
}

Outcome pasted_bound(const std::vector<NamedSpace>& spaces) {
  Outcome o;
  int runs = 0;
  double worst_norm = 0.0;
  for (const auto& ns : spaces) {
    if (ns.space.size() > 200) {
      o.ok = false;
      o.detail += ns.name + " has more than 200 points; ";
    }
    for (double p : kPs) {
      double previous = std::numeric_limits<double>::infinity();
      for (double eps : kEps) {  // decreasing ε
        const auto emb = paste(ns.space, p, eps, bands_needed(eps, ns.max_rho));
        const int spanned = *std::max_element(emb.band_of.begin(), emb.band_of.end());
        if (spanned < (eps >= 0.2 ? 3 : 1)) {
          o.ok = false;
          o.detail += ns.name + fmt(" spans only %.0f bands at eps %.2f; ", spanned, eps);
        }
        auto r = distortion(ns.space, emb.images, emb.target);
        attach_bound(r, analytic_bound(p, eps));
        for (Index i = 0; i < ns.space.size(); ++i) {
          const double rho = ns.space.rho(i);
          worst_norm = std::max(worst_norm, std::abs(norm(emb.images[static_cast<std::size_t>(i)], emb.target) - rho) /
                                                std::max(1.0, rho));
        }
        if (!r.pass) {
          o.ok = false;
          o.detail += ns.name + fmt(" p=%.1f eps=%.1f distortion %.6g above bound; ", p, eps, r.distortion);
        }
        if (!(r.distortion < previous)) {
          o.ok = false;
          o.detail += ns.name + fmt(" p=%.1f: distortion not strictly decreasing at eps=%.1f; ", p, eps);
        }
        previous = r.distortion;
        ++runs;
      }
    }
  }
  o.ok = o.ok && worst_norm <= 1e-9;
  o.detail += fmt("%.0f (space, p, eps) runs, max relative | ||Tx|| - rho(x) | = %.3g", runs, worst_norm);
  return o;
}

Outcome seam_consistency(const std::vector<NamedSpace>& spaces) {
  long checked = 0, mismatches = 0;
  for (const auto& ns : spaces)
    for (double eps : kEps) {
      const auto schedule = radii_schedule(eps, bands_needed(eps, ns.max_rho));
      for (double p : kPs) {
        const SpiralPaster paster(ns.space, p, schedule, frechet_embed);
        for (Index x = 0; x < ns.space.size(); ++x) {
          const double lr = std::log(ns.space.rho(x));
          for (int i = 1; i < schedule.band_count(); ++i) {
            if (lr < schedule.log_radius(2 * i) || lr > schedule.log_radius(2 * i + 1)) continue;
            ++checked;
            if (!(paster.branch(x, i) == paster.branch(x, i + 1))) ++mismatches;
          }
        }
      }
    }
  return {checked > 0 && mismatches == 0,
          fmt("%.0f points in constancy intervals, %.0f branch mismatches", static_cast<double>(checked),
              static_cast<double>(mismatches))};
}

Outcome spiral_oracle() {
  const double zero = spiral_distortion(0.0, 1e4, 512);
  std::vector<double> d;
  for (double eps : {0.2, 0.1, 0.05, 0.025}) d.push_back(spiral_distortion(eps, 1e4, 512));
  bool decreasing = true;
  for (std::size_t k = 1; k < d.size(); ++k) decreasing = decreasing && d[k] < d[k - 1];
  return {zero == 1.0 && decreasing && d.back() < d.front(),
          fmt("eps=0: %.17g; eps=0.2: %.6f; eps=0.025: %.6f", zero, d.front(), d.back())};
}

Outcome counterexample_witnesses() {
  const RayFamily family(CounterexampleConfig::defaults());
  bool ok = family.coverage_holds();
  for (int j = 1; j <= family.ray_count(); ++j) {
    const auto ray = family.ray(j);
    for (const auto& r : ray) ok = ok && family.in_S(r);
    ok = ok && verify_metric_ray(ray);
    for (int s = 0; s <= family.depth(); ++s)
      for (int t = s + 1; t <= family.depth(); ++t)
        ok = ok && 2 * linf_distance(ray[static_cast<std::size_t>(s)], ray[static_cast<std::size_t>(t)]) ==
                       pow3(t) - pow3(s);
  }
  for (int t = 2; t <= 6; ++t) {
    const auto w = separation_witness(family, t);
    ok = ok && static_cast<int>(w.rays.size()) == family.config().level_size(t - 1) && w.min_distance >= pow3(t - 1);
  }
  for (int t = 1; t <= 12; ++t) ok = ok && separation_condition_slack(separation_epsilon_exact(), t) == 0;
  return {ok, "N_t = t+1, depth 6, J = 8: S-membership, exact ray identities, witnesses t=2..6, eps=1/9 equality t=1..12"};
}

BlockVector random_block_vector(std::mt19937_64& rng, const SumSpaceSpec& spec) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  BlockVector v;
  for (int k = 0; k < spec.num_blocks(); ++k) {
    Eigen::VectorXd b(spec.block_dim(k));
    for (Index i = 0; i < b.size(); ++i) b(i) = u(rng);
    v.set_block(k, b);
  }
  return v;
}

Outcome flat_triple_law() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> t(0.05, 0.95);
  int bad = 0;
  for (double p : {1.5, 2.0, 3.0}) {
    const auto spec = SumSpaceSpec::lp(p, {3, 1, 4, 2});
    for (int k = 0; k < 1000; ++k) {
      const BlockVector a = random_block_vector(rng, spec), b = random_block_vector(rng, spec);
      const double s = t(rng);
      const BlockVector m = (1.0 - s) * a + s * b;
      if (flat_triple_check(a, m, b, spec).verdict != FlatVerdict::FlatProportional) ++bad;
    }
  }
  BlockVector x;
  x.set_block(0, Eigen::VectorXd::Constant(1, 1.0));
  x.set_block(1, Eigen::VectorXd::Constant(1, 1.0));
  const auto p1 = flat_triple_check(x, BlockVector::single(1, Eigen::VectorXd::Constant(1, 1.0)), BlockVector{},
                                    SumSpaceSpec::lp(1.0, {1, 1}));
  const bool p1_ok = p1.verdict == FlatVerdict::FlatNotProportional;
  return {bad == 0 && p1_ok, fmt("%.0f of 3000 collinear triples misclassified; p=1 disjoint construction: ", bad) +
                                 to_string(p1.verdict)};
}

Outcome fdd_model(const std::vector<NamedSpace>& spaces) {
  Outcome o;
  const auto layout = paste(spaces[1].space, 1.0, 0.2, bands_needed(0.2, spaces[1].max_rho)).layout;
  const auto model = FddModel::identity(layout.block_dims);
  double worst_pair = 0.0;
  for (int j = 0; j < model.num_blocks(); ++j)
    for (int k = 0; k < model.num_blocks(); ++k)
      if (j != k) worst_pair = std::max(worst_pair, pair_isometry_check(model, j, k, 1000, 31 + j * 7 + k));
  const auto eq = equivalence_ratio(model, 0.2, 2000, 5);
  std::vector<double> eps_list(layout.block_dims.size());
  for (std::size_t n = 0; n < eps_list.size(); ++n) eps_list[n] = 0.2 / std::pow(2.0, static_cast<double>(n) + 2.0);
  const auto eq_skew = equivalence_ratio(FddModel{layout.block_dims, eps_list}, 0.2, 2000, 5);
  o.ok = worst_pair <= 1e-12 && std::abs(eq.max_ratio - 2.0) <= 1e-9 && eq.max_ratio <= eq.bound &&
         eq_skew.max_ratio <= eq_skew.bound && eq.min_ratio >= 1.0;
  o.detail = fmt("pair deviation %.3g; equivalence max %.12g (eps_i=0), %.6g (skewed)", worst_pair, eq.max_ratio,
                 eq_skew.max_ratio);
  double worst = 0.0;
  for (const auto& ns : spaces)
    for (double eps : kEps) {
      const auto e = embed_no_cotype(ns.space, eps);
      if (!e.report_ambient || !e.report_ambient->pass) {
        o.ok = false;
        o.detail += "; " + ns.name + fmt(" ambient distortion above bound at eps=%.1f", eps);
      } else {
        worst = std::max(worst, e.report_ambient->distortion / no_cotype_bound(eps));
      }
    }
  o.detail += fmt("; worst ambient distortion / 4(1+eps)^2/(1-eps) = %.4f", worst);
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Outcome determinism(const std::vector<NamedSpace>& spaces) {
  const fs::path dir = fs::temp_directory_path() / "spiralpaste_acceptance";
  fs::create_directories(dir);
  const fs::path grid = dir / "grid.json";
  std::ofstream(grid) << dump(space_to_json(spaces[1].space));
  const std::string cli = SPIRALPASTE_CLI_PATH;
  const std::vector<std::string> commands = {
      "embed --input " + grid.string() + " --p 2 --epsilon 0.2",
      "fdd-demo --input " + grid.string() + " --epsilon 0.2 --samples 500 --seed 13",
      "counterexample --depth 6 --rays 8",
      "spiral --epsilon 0.1 --tmax 10000",
      "sweep --input " + grid.string() + " --p 1,3 --epsilon 0.5,0.2",
  };
  int differing = 0, failed = 0;
  for (std::size_t k = 0; k < commands.size(); ++k) {
    std::string first;
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path out = dir / ("out" + std::to_string(k) + "_" + std::to_string(rep));
      const std::string cmd = "\"" + cli + "\" " + commands[k] + " --out " + out.string() + " > /dev/null 2>&1";
      if (std::system(cmd.c_str()) != 0) ++failed;
      if (rep == 0) first = slurp(out);
      else if (first.empty() || slurp(out) != first) ++differing;
    }
  }
  return {differing == 0 && failed == 0,
          fmt("%.0f subcommands run twice: %.0f differing reports, %.0f failed runs", commands.size(), differing,
              failed)};
}

}  // namespace

int main() {
  using Clock = std::chrono::steady_clock;
  const auto spaces = test_spaces();
  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "partition of unity", 1, partition_of_unity},
      {2, "Frechet exactness", 5, frechet_exactness},
      {3, "distortion bound at desk scale", 60, [&] { return pasted_bound(spaces); }},
      {4, "seam consistency", 1, [&] { return seam_consistency(spaces); }},
      {5, "spiral oracle", 2, spiral_oracle},
      {6, "counterexample witnesses", 2, counterexample_witnesses},
      {7, "flat-triple law", 5, flat_triple_law},
      {8, "FDD model", 30, [&] { return fdd_model(spaces); }},
      {9, "determinism", 5, [&] { return determinism(spaces); }},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    const bool in_time = secs < c.limit_s;
    const bool pass = o.ok && in_time;
    failures += !pass;
    std::printf("criterion %d [%s] %s: %s (%.3f s, limit %.0f s%s)\n", c.id, pass ? "PASS" : "FAIL", c.name,
                o.detail.c_str(), secs, c.limit_s, in_time ? "" : ", too slow");
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
