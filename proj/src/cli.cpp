#include "spiralpaste/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#include "spiralpaste/core_metric.hpp"
#include "spiralpaste/counterexample.hpp"
#include "spiralpaste/errors.hpp"
#include "spiralpaste/fdd_glue.hpp"
#include "spiralpaste/frechet.hpp"
#include "spiralpaste/io.hpp"
#include "spiralpaste/spiral_glue.hpp"

namespace spiralpaste {
namespace {

constexpr double kNormTol = 1e-9;

struct Options {
  std::string input;
  std::string images;
  std::string out;
  std::string method = "spiral";
  double p = 2.0;
  double epsilon = 0.2;
  int bands = 0;
  int depth = 6;
  int rays = 8;
  std::string levels;
  int packing_dim = 1;
  double packing_constant = 1.0;
  std::string eps_list;
  int samples = 1000;
  std::uint64_t seed = 7;
  double t_max = 1e4;
  std::string p_list = "1,2,3";
  std::string eps_grid = "0.5,0.2,0.1";
};

std::vector<double> parse_reals(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || item.find_first_not_of(" \t", used) != std::string::npos)
      throw SchemaError(flag, "'" + item + "' is not a number");
    out.push_back(v);
  }
  return out;
}

std::vector<int> parse_ints(const std::string& text, const std::string& flag) {
  std::vector<int> out;
  for (double v : parse_reals(text, flag)) {
    if (v != std::floor(v) || std::abs(v) > 1e9) throw SchemaError(flag, "expected integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

void require_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw SchemaError("--epsilon", "must lie in (0, 1)");
}

void require_p(double p) {
  if (!(p >= 1.0) || std::isinf(p)) throw SchemaError("--p", "must be a finite number >= 1");
}

Json header(const char* command, Json config) {
  Json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["command"] = command;
  doc["config"] = std::move(config);
  return doc;
}

double max_rho(const PointedMetricSpace& space) {
  double out = 0.0;
  for (Index i = 0; i < space.size(); ++i) out = std::max(out, space.rho(i));
  return out;
}

Json schedule_json(const RadiiSchedule& schedule) {
  Json s;
  s["epsilon"] = schedule.epsilon();
  s["band_count"] = schedule.band_count();
  Json radii = Json::array(), logs = Json::array();
  for (int i = 1; i <= schedule.size(); ++i) {
    radii.push_back(number(schedule.radius(i)));
    logs.push_back(schedule.log_radius(i));
  }
  s["radii"] = radii;
  s["log_radii"] = logs;
  return s;
}

Json int_array(const std::vector<int>& v) {
  Json out = Json::array();
  for (int x : v) out.push_back(x);
  return out;
}

Json real_array(const std::vector<double>& v) {
  Json out = Json::array();
  for (double x : v) out.push_back(number(x));
  return out;
}

Json sparse_json(const IntVector& v) {
  Json out = Json::object();
  for (Index i = 0; i < v.size(); ++i)
    if (v(i) != 0) out[std::to_string(i)] = v(i);
  return out;
}

int cmd_embed(const Options& o, Json& doc) {
  const auto space = load_space(o.input);
  if (o.method == "frechet") {
    doc = header("embed", {{"input", o.input}, {"method", o.method}});
    const FrechetMap map = frechet_embed(space);
    std::vector<BlockVector> images;
    double norm_error = 0.0;
    for (Index i = 0; i < space.size(); ++i) {
      images.push_back(BlockVector::single(0, map.image(i)));
      norm_error = std::max(norm_error, std::abs(map.image(i).cwiseAbs().maxCoeff() - space.rho(i)));
    }
    doc["dimension"] = map.dimension();
    doc["norm_error"] = norm_error;
    bool pass = norm_error == 0.0;
    if (space.size() >= 2) {
      DistortionReport r = distortion(space, images, SumSpaceSpec::sup({static_cast<int>(map.dimension())}));
      attach_bound(r, 1.0);
      doc["report"] = report_to_json(r);
      pass = pass && r.pass;
    } else {
      doc["report"] = nullptr;
    }
    doc["pass"] = pass;
    return pass ? kExitOk : kExitContract;
  }
  if (o.method != "spiral") throw SchemaError("--method", "expected spiral or frechet");
  require_p(o.p);
  require_epsilon(o.epsilon);
  if (o.bands < 0) throw SchemaError("--bands", "must be >= 0");
  const int bands = o.bands > 0 ? o.bands : bands_needed(o.epsilon, max_rho(space));
  doc = header("embed", {{"input", o.input}, {"method", o.method}, {"p", o.p}, {"epsilon", o.epsilon}, {"bands", bands}});

  const PastedEmbedding emb = paste(space, o.p, o.epsilon, bands);
  doc["schedule"] = schedule_json(emb.schedule);
  doc["block_dims"] = int_array(emb.layout.block_dims);
  std::vector<int> per_band(static_cast<std::size_t>(bands), 0);
  for (int b : emb.band_of) ++per_band[static_cast<std::size_t>(b - 1)];
  doc["band_point_counts"] = int_array(per_band);

  double norm_error = 0.0;
  for (Index i = 0; i < space.size(); ++i) {
    const double rho = space.rho(i);
    norm_error = std::max(norm_error, std::abs(norm(emb.images[static_cast<std::size_t>(i)], emb.target) - rho) /
                                          std::max(1.0, rho));
  }
  const AnalyticBound bound = analytic_bound_parts(o.p, o.epsilon);
  doc["analytic_bound"] = {{"value", number(bound.value)},
                           {"k_factor", bound.k_factor},
                           {"band_ratio", number(bound.band_ratio)},
                           {"small_norm_ratio", number(bound.small_norm_ratio)}};
  doc["norm_error"] = norm_error;
  bool pass = norm_error <= kNormTol;
  if (space.size() >= 2) {
    DistortionReport r = distortion(space, emb.images, emb.target);
    attach_bound(r, bound.value);
    doc["report"] = report_to_json(r);
    doc["margin"] = number(bound.value - r.distortion);
    pass = pass && r.pass;
  } else {
    doc["report"] = nullptr;
  }
  doc["checks"] = {{"norm_preserved", norm_error <= kNormTol}};
  doc["pass"] = pass;
  return pass ? kExitOk : kExitContract;
}

int cmd_distortion(const Options& o, Json& doc) {
  const auto space = load_space(o.input);
  const ImageSet set = images_from_json(load_json(o.images), space);
  doc = header("distortion", {{"input", o.input}, {"images", o.images}});
  DistortionReport r = distortion(space, set.images, set.spec);
  if (set.bound) attach_bound(r, *set.bound);
  doc["report"] = report_to_json(r);
  doc["pass"] = r.pass;
  return r.pass ? kExitOk : kExitContract;
}

int cmd_counterexample(const Options& o, Json& doc) {
  if (o.depth < 1 || o.depth > 38) throw SchemaError("--depth", "must lie in [1, 38]");
  if (o.rays < 1) throw SchemaError("--rays", "must be >= 1");
  if (o.packing_dim < 1) throw SchemaError("--packing-dim", "must be >= 1");
  if (!(o.packing_constant > 0.0)) throw SchemaError("--packing-constant", "must be > 0");
  CounterexampleConfig config;
  if (o.levels.empty()) {
    config = CounterexampleConfig::defaults();
    config.N.clear();
    for (int t = 1; t <= o.depth; ++t) config.N.push_back(t + 1);
    config.depth = o.depth;
    config.ray_count = o.rays;
  } else {
    config = CounterexampleConfig::with_levels(parse_ints(o.levels, "--N"), o.rays);
    if (config.depth != o.depth) throw SchemaError("--N", "expected one entry per level (" + std::to_string(o.depth) + ")");
  }
  try {
    config.validate();
  } catch (const InvalidArgument& e) {
    throw SchemaError("--N", e.what());
  }
  const RayFamily family(config);
  doc = header("counterexample", {{"depth", config.depth},
                                  {"rays", config.ray_count},
                                  {"N", int_array(config.N)},
                                  {"packing_dim", o.packing_dim},
                                  {"packing_constant", o.packing_constant}});
  doc["dimension"] = family.dimension();

  bool all_in_s = true, all_rays = true, all_telescoping = true;
  Json table = Json::array();
  for (int j = 1; j <= config.ray_count; ++j) {
    const auto ray = family.ray(j);
    std::vector<int> choices;
    for (int t = 1; t < config.depth; ++t) choices.push_back(family.choice(j, t));
    Json points = Json::array();
    for (const auto& r : ray) {
      points.push_back(sparse_json(r));
      all_in_s = all_in_s && family.in_S(r);
    }
    const bool is_ray = ray.size() < 3 || verify_metric_ray(ray);
    bool telescoping = true;
    for (std::size_t s = 0; s < ray.size(); ++s)
      for (std::size_t t = s + 1; t < ray.size(); ++t)
        telescoping = telescoping && 2 * linf_distance(ray[s], ray[t]) ==
                                         pow3(static_cast<int>(t)) - pow3(static_cast<int>(s));
    all_rays = all_rays && is_ray;
    all_telescoping = all_telescoping && telescoping;
    table.push_back({{"j", j}, {"choices", int_array(choices)}, {"points", points}, {"metric_ray", is_ray},
                     {"telescoping", telescoping}});
  }
  doc["rays"] = table;
  const bool coverage = family.coverage_holds();

  Json witnesses = Json::array();
  bool separated = true;
  for (int t = 2; t <= config.depth; ++t) {
    Json w{{"t", t}};
    try {
      const SeparationWitness sw = separation_witness(family, t);
      const bool ok = sw.min_distance >= pow3(t - 1) && 2 * sw.max_norm <= pow3(t) - 1;
      separated = separated && ok;
      w["rays"] = int_array(sw.rays);
      w["count"] = sw.rays.size();
      w["min_distance"] = sw.rays.size() < 2 ? Json(nullptr) : Json(sw.min_distance);
      w["delta"] = pow3(t - 1);
      w["max_norm"] = sw.max_norm;
      // (9C)^m cap on 3^{t-2}-separated points in a radius-3^t ball of an m-dimensional space
      const double cap = packing_bound(static_cast<double>(pow3(t)), static_cast<double>(pow3(t - 2)), o.packing_dim,
                                       o.packing_constant);
      w["packing_bound"] = number(cap);
      w["exceeds_packing_bound"] = static_cast<double>(sw.rays.size()) > cap;
      w["pass"] = ok;
    } catch (const CoverageViolated& e) {
      separated = false;
      w["error"] = e.what();
      w["pass"] = false;
    }
    witnesses.push_back(w);
  }
  doc["separation"] = witnesses;

  const Rational eps = separation_epsilon_exact();
  Json slack = Json::array();
  bool equality = true;
  for (int t = 1; t <= 12; ++t) {
    const auto v = separation_condition_slack(eps, t);
    equality = equality && v == 0;
    slack.push_back(v);
  }
  doc["separation_epsilon"] = {{"num", eps.num}, {"den", eps.den}, {"value", eps.value()}, {"slack", slack},
                               {"equality", equality}};
  doc["checks"] = {{"coverage", coverage},
                   {"points_in_S", all_in_s},
                   {"metric_rays", all_rays},
                   {"telescoping", all_telescoping},
                   {"separation", separated},
                   {"epsilon_equality", equality}};
  const bool pass = coverage && all_in_s && all_rays && all_telescoping && separated && equality;
  doc["pass"] = pass;
  return pass ? kExitOk : kExitContract;
}

int cmd_fdd(const Options& o, Json& doc) {
  const auto space = load_space(o.input);
  require_epsilon(o.epsilon);
  if (o.samples < 1) throw SchemaError("--samples", "must be >= 1");
  if (o.bands < 0) throw SchemaError("--bands", "must be >= 0");
  const std::vector<double> eps_list = parse_reals(o.eps_list, "--eps-list");
  const int bands = o.bands > 0 ? o.bands : bands_needed(o.epsilon, max_rho(space));
  if (!eps_list.empty() && static_cast<int>(eps_list.size()) != bands)
    throw SchemaError("--eps-list", "expected " + std::to_string(bands) + " entries, one per block");
  doc = header("fdd-demo", {{"input", o.input}, {"epsilon", o.epsilon}, {"eps_list", real_array(eps_list)},
                            {"samples", o.samples}, {"seed", o.seed}, {"bands", bands}});

  const NoCotypeEmbedding emb = [&] {
    try {
      return embed_no_cotype(space, o.epsilon, bands, eps_list);
    } catch (const ModelInvalid& e) {
      throw SchemaError("--eps-list", e.what());
    }
  }();
  doc["model"] = {{"block_dims", int_array(emb.model.block_dims)}, {"eps_list", real_array(emb.model.eps_list)}};

  const EquivalenceResult eq = equivalence_ratio(emb.model, o.epsilon, o.samples, o.seed);
  const bool eq_ok = eq.max_ratio <= eq.bound && eq.min_ratio >= 1.0 - 1e-12;
  doc["equivalence"] = {{"max_ratio", eq.max_ratio}, {"min_ratio", number(eq.min_ratio)}, {"bound", eq.bound},
                        {"pass", eq_ok}};

  Json pairs = Json::array();
  bool pairs_ok = true;
  for (int j = 0; j < emb.model.num_blocks(); ++j) {
    for (int k = j + 1; k < emb.model.num_blocks(); ++k) {
      const double dev = pair_isometry_check(emb.model, j, k, o.samples, o.seed + 1);
      pairs_ok = pairs_ok && dev <= 1e-12;
      pairs.push_back({{"j", j}, {"k", k}, {"max_deviation", dev}});
    }
  }
  doc["pair_isometry"] = pairs;
  doc["report_a"] = emb.report_a ? report_to_json(*emb.report_a) : Json(nullptr);
  doc["report_ambient"] = emb.report_ambient ? report_to_json(*emb.report_ambient) : Json(nullptr);
  const bool reports_ok = (!emb.report_a || emb.report_a->pass) && (!emb.report_ambient || emb.report_ambient->pass);
  doc["checks"] = {{"equivalence", eq_ok}, {"pair_isometry", pairs_ok}, {"distortion", reports_ok}};
  const bool pass = eq_ok && pairs_ok && reports_ok;
  doc["pass"] = pass;
  return pass ? kExitOk : kExitContract;
}

int cmd_spiral(const Options& o, Json& doc) {
  if (!(o.epsilon >= 0.0 && o.epsilon < 1.0)) throw SchemaError("--epsilon", "must lie in [0, 1)");
  if (!(o.t_max > 1.0)) throw SchemaError("--tmax", "must be > 1");
  if (o.samples < 2) throw SchemaError("--samples", "must be >= 2");
  doc = header("spiral", {{"epsilon", o.epsilon}, {"tmax", o.t_max}, {"samples", o.samples}});
  const double d = spiral_distortion(o.epsilon, o.t_max, o.samples);
  doc["distortion"] = number(d);
  const bool pass = std::isfinite(d) && d >= 1.0;
  doc["pass"] = pass;
  return pass ? kExitOk : kExitContract;
}

std::string csv_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

int cmd_sweep(const Options& o, std::string& csv, std::ostream& err) {
  const auto space = load_space(o.input);
  const auto ps = parse_reals(o.p_list, "--p");
  const auto eps = parse_reals(o.eps_grid, "--epsilon");
  if (ps.empty()) throw SchemaError("--p", "empty grid");
  if (eps.empty()) throw SchemaError("--epsilon", "empty grid");
  for (double p : ps) require_p(p);
  for (double e : eps) require_epsilon(e);
  if (o.bands < 0) throw SchemaError("--bands", "must be >= 0");
  if (space.size() < 2) throw SchemaError("points", "sweep needs at least two points");

  std::ostringstream table;
  table << "p,epsilon,bands,distortion,bound,margin,pass\n";
  bool all_pass = true;
  bool monotone = true;
  for (double p : ps) {
    std::map<double, double> by_eps;
    for (double e : eps) {
      const int bands = o.bands > 0 ? o.bands : bands_needed(e, max_rho(space));
      const PastedEmbedding emb = paste(space, p, e, bands);
      DistortionReport r = distortion(space, emb.images, emb.target);
      const double bound = analytic_bound(p, e);
      attach_bound(r, bound);
      all_pass = all_pass && r.pass;
      by_eps[e] = r.distortion;
      table << csv_number(p) << ',' << csv_number(e) << ',' << bands << ',' << csv_number(r.distortion) << ','
            << csv_number(bound) << ',' << csv_number(bound - r.distortion) << ',' << (r.pass ? "true" : "false")
            << '\n';
    }
    double previous = 0.0;
    for (const auto& [e, d] : by_eps) {  // ascending ε: distortion should rise
      monotone = monotone && d > previous;
      previous = d;
    }
  }
  csv = table.str();
  if (!monotone) err << "note: measured distortion is not strictly decreasing in epsilon for every p\n";
  return all_pass ? kExitOk : kExitContract;
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw SchemaError("--out", "cannot write '" + path + "'");
  f << text;
  if (!f) throw SchemaError("--out", "write to '" + path + "' failed");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Spiral pasting embeddings into sums of sup-norm blocks", "spiralpaste"};
  app.require_subcommand(1);

  auto* embed = app.add_subcommand("embed", "Embed a space by spiral pasting or the Frechet map");
  embed->add_option("--input", o.input, "Metric space JSON")->required();
  embed->add_option("--method", o.method, "spiral or frechet")->capture_default_str();
  embed->add_option("--p", o.p, "Outer exponent p >= 1")->capture_default_str();
  embed->add_option("--epsilon", o.epsilon, "Spiral parameter in (0,1)")->capture_default_str();
  embed->add_option("--bands", o.bands, "Band count, 0 = smallest that covers the space")->capture_default_str();
  embed->add_option("--out", o.out, "Report path (default: stdout)");

  auto* dist = app.add_subcommand("distortion", "Distortion of given images of a space");
  dist->add_option("--input", o.input, "Metric space JSON")->required();
  dist->add_option("--images", o.images, "Images JSON")->required();
  dist->add_option("--out", o.out, "Report path (default: stdout)");

  auto* counter = app.add_subcommand("counterexample", "Rays, separation witnesses and packing counts");
  counter->add_option("--depth", o.depth, "Number of levels")->capture_default_str();
  counter->add_option("--rays", o.rays, "Number of rays J")->capture_default_str();
  counter->add_option("--N", o.levels, "Level sizes N_1,...,N_depth (default N_t = t+1)");
  counter->add_option("--packing-dim", o.packing_dim, "Dimension m for the packing bound")->capture_default_str();
  counter->add_option("--packing-constant", o.packing_constant, "Constant C for the packing bound")
      ->capture_default_str();
  counter->add_option("--out", o.out, "Report path (default: stdout)");

  auto* fdd = app.add_subcommand("fdd-demo", "Spiral paste read in the glued no-cotype norm");
  fdd->add_option("--input", o.input, "Metric space JSON")->required();
  fdd->add_option("--epsilon", o.epsilon, "Spiral parameter in (0,1)")->capture_default_str();
  fdd->add_option("--eps-list", o.eps_list, "Per-block eps_i, comma separated (default all 0)");
  fdd->add_option("--samples", o.samples, "Samples for the norm checks")->capture_default_str();
  fdd->add_option("--seed", o.seed, "Sampler seed")->capture_default_str();
  fdd->add_option("--bands", o.bands, "Band count, 0 = smallest that covers the space")->capture_default_str();
  fdd->add_option("--out", o.out, "Report path (default: stdout)");

  auto* spiral = app.add_subcommand("spiral", "Distortion of the logarithmic spiral");
  spiral->add_option("--epsilon", o.epsilon, "Spiral parameter in [0,1)")->capture_default_str();
  spiral->add_option("--tmax", o.t_max, "Largest parameter value")->capture_default_str();
  spiral->add_option("--samples", o.samples, "Geometric samples in (1, tmax]")->default_val(512);
  spiral->add_option("--out", o.out, "Report path (default: stdout)");

  auto* sweep = app.add_subcommand("sweep", "CSV of measured distortion against the bound over a (p, eps) grid");
  sweep->add_option("--input", o.input, "Metric space JSON")->required();
  sweep->add_option("--p", o.p_list, "Comma-separated p values")->capture_default_str();
  sweep->add_option("--epsilon", o.eps_grid, "Comma-separated epsilon values")->capture_default_str();
  sweep->add_option("--bands", o.bands, "Band count, 0 = per-row automatic")->capture_default_str();
  sweep->add_option("--out", o.out, "CSV path (default: stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream msg_out, msg_err;
    const int code = app.exit(e, msg_out, msg_err);
    out << msg_out.str();
    err << msg_err.str();
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (sweep->parsed()) {
      std::string csv;
      const int code = cmd_sweep(o, csv, err);
      write_output(o.out, csv, out);
      return code;
    }
    Json doc;
    int code = kExitOk;
    if (embed->parsed()) code = cmd_embed(o, doc);
    else if (dist->parsed()) code = cmd_distortion(o, doc);
    else if (counter->parsed()) code = cmd_counterexample(o, doc);
    else if (fdd->parsed()) code = cmd_fdd(o, doc);
    else code = cmd_spiral(o, doc);
    write_output(o.out, dump(doc), out);
    if (!o.out.empty()) out << doc["command"].get<std::string>() << ": " << (code == kExitOk ? "pass" : "FAIL") << '\n';
    return code;
  } catch (const ScheduleOverflow& e) {
    err << "error: " << e.what() << '\n';
    return kExitOverflow;
  } catch (const SchemaError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const InvalidMetric& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const ScheduleTooShort& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const IndexOutOfRange& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitContract;
  }
}

}  // namespace spiralpaste
