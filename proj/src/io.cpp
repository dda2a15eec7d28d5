#include "spiralpaste/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "spiralpaste/errors.hpp"

namespace spiralpaste {
namespace {

const Json& require(const Json& doc, const char* key, const std::string& where = "") {
  const std::string field = where.empty() ? key : where + "." + key;
  if (!doc.is_object()) throw SchemaError(where.empty() ? "$" : where, "expected an object");
  auto it = doc.find(key);
  if (it == doc.end()) throw SchemaError(field, "missing required field");
  return *it;
}

double as_number(const Json& v, const std::string& field) {
  if (!v.is_number()) throw SchemaError(field, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw SchemaError(field, "expected a finite number");
  return x;
}

std::string as_string(const Json& v, const std::string& field) {
  if (!v.is_string()) throw SchemaError(field, "expected a string");
  return v.get<std::string>();
}

Eigen::VectorXd as_vector(const Json& v, const std::string& field) {
  if (!v.is_array()) throw SchemaError(field, "expected an array of numbers");
  Eigen::VectorXd out(static_cast<Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Index>(i)) = as_number(v[i], field + "[" + std::to_string(i) + "]");
  return out;
}

}  // namespace

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("$", "cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError("$", std::string("malformed JSON: ") + e.what());
  }
}

PointedMetricSpace space_from_json(const Json& doc) {
  const std::string basepoint = as_string(require(doc, "basepoint"), "basepoint");
  const std::string metric = as_string(require(doc, "metric"), "metric");
  MetricKind kind;
  if (metric == "matrix") kind = MetricKind::Matrix;
  else if (metric == "linf") kind = MetricKind::Linf;
  else if (metric == "l2") kind = MetricKind::L2;
  else throw SchemaError("metric", "expected one of matrix, linf, l2");

  const Json& points = require(doc, "points");
  if (!points.is_array() || points.empty()) throw SchemaError("points", "expected a nonempty array");
  std::vector<std::string> ids;
  std::vector<Eigen::VectorXd> coords;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const std::string where = "points[" + std::to_string(i) + "]";
    ids.push_back(as_string(require(points[i], "id", where), where + ".id"));
    if (kind != MetricKind::Matrix) {
      coords.push_back(as_vector(require(points[i], "coords", where), where + ".coords"));
      if (coords.back().size() == 0) throw SchemaError(where + ".coords", "expected at least one coordinate");
      if (coords.back().size() != coords.front().size())
        throw SchemaError(where + ".coords", "dimension differs from points[0]");
    }
  }

  try {
    if (kind == MetricKind::Matrix) {
      const Json& m = require(doc, "matrix");
      const Index n = static_cast<Index>(ids.size());
      if (!m.is_array() || static_cast<Index>(m.size()) != n)
        throw SchemaError("matrix", "expected " + std::to_string(n) + " rows");
      Eigen::MatrixXd d(n, n);
      for (Index i = 0; i < n; ++i) {
        const std::string where = "matrix[" + std::to_string(i) + "]";
        const Eigen::VectorXd row = as_vector(m[static_cast<std::size_t>(i)], where);
        if (row.size() != n) throw SchemaError(where, "expected " + std::to_string(n) + " entries");
        d.row(i) = row.transpose();
      }
      return PointedMetricSpace::from_matrix(std::move(ids), std::move(d), basepoint);
    }
    Eigen::MatrixXd c(static_cast<Index>(coords.size()), coords.front().size());
    for (std::size_t i = 0; i < coords.size(); ++i) c.row(static_cast<Index>(i)) = coords[i].transpose();
    return PointedMetricSpace::from_coords(std::move(ids), std::move(c), kind, basepoint);
  } catch (const InvalidMetric& e) {
    throw SchemaError(kind == MetricKind::Matrix ? "matrix" : "points", e.what());
  } catch (const InvalidArgument& e) {
    throw SchemaError("basepoint", e.what());
  }
}

PointedMetricSpace load_space(const std::string& path) { return space_from_json(load_json(path)); }

Json space_to_json(const PointedMetricSpace& space) {
  Json doc;
  doc["basepoint"] = space.id(space.basepoint());
  doc["metric"] = to_string(space.kind());
  Json points = Json::array();
  for (Index i = 0; i < space.size(); ++i) {
    Json p;
    p["id"] = space.id(i);
    if (const auto* c = space.coords()) {
      Json row = Json::array();
      for (Index k = 0; k < c->cols(); ++k) row.push_back((*c)(i, k));
      p["coords"] = row;
    }
    points.push_back(p);
  }
  doc["points"] = points;
  if (const auto* m = space.matrix()) {
    Json rows = Json::array();
    for (Index i = 0; i < m->rows(); ++i) {
      Json row = Json::array();
      for (Index j = 0; j < m->cols(); ++j) row.push_back((*m)(i, j));
      rows.push_back(row);
    }
    doc["matrix"] = rows;
  }
  return doc;
}

SumSpaceSpec spec_from_json(const Json& doc) {
  const Json& p = require(doc, "p");
  double pv;
  if (p.is_string()) {
    if (p.get<std::string>() != "sup") throw SchemaError("p", "expected a number >= 1 or \"sup\"");
    pv = std::numeric_limits<double>::infinity();
  } else {
    pv = as_number(p, "p");
  }
  const Json& dims = require(doc, "block_dims");
  if (!dims.is_array() || dims.empty()) throw SchemaError("block_dims", "expected a nonempty array of integers");
  std::vector<int> d;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (!dims[i].is_number_integer()) throw SchemaError("block_dims[" + std::to_string(i) + "]", "expected an integer");
    d.push_back(dims[i].get<int>());
  }
  try {
    return SumSpaceSpec::lp(pv, std::move(d));
  } catch (const InvalidArgument& e) {
    throw SchemaError(pv < 1.0 ? "p" : "block_dims", e.what());
  }
}

BlockVector block_vector_from_json(const Json& blocks, const SumSpaceSpec& spec, const std::string& field) {
  if (!blocks.is_object()) throw SchemaError(field, "expected an object keyed by block index");
  BlockVector v;
  for (const auto& [key, value] : blocks.items()) {
    const std::string where = field + "." + key;
    std::size_t used = 0;
    int k = -1;
    try {
      k = std::stoi(key, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != key.size() || k < 0) throw SchemaError(where, "block keys must be nonnegative integers");
    if (k >= spec.num_blocks()) throw SchemaError(where, "block index beyond block_dims");
    Eigen::VectorXd b = as_vector(value, where);
    if (b.size() != spec.block_dim(k))
      throw SchemaError(where, "expected " + std::to_string(spec.block_dim(k)) + " entries");
    v.set_block(k, std::move(b));
  }
  return v;
}

Json block_vector_to_json(const BlockVector& v) {
  Json out = Json::object();
  for (const auto& [k, b] : v.blocks()) {
    Json arr = Json::array();
    for (Index i = 0; i < b.size(); ++i) arr.push_back(b(i));
    out[std::to_string(k)] = arr;
  }
  return out;
}

ImageSet images_from_json(const Json& doc, const PointedMetricSpace& space) {
  ImageSet out{spec_from_json(doc), {}, std::nullopt};
  const Json& images = require(doc, "images");
  if (!images.is_object()) throw SchemaError("images", "expected an object keyed by point id");
  out.images.resize(static_cast<std::size_t>(space.size()));
  std::vector<bool> seen(static_cast<std::size_t>(space.size()), false);
  for (const auto& [id, value] : images.items()) {
    const auto idx = space.find(id);
    if (!idx) throw SchemaError("images." + id, "unknown point id");
    out.images[static_cast<std::size_t>(*idx)] = block_vector_from_json(value, out.spec, "images." + id);
    seen[static_cast<std::size_t>(*idx)] = true;
  }
  for (Index i = 0; i < space.size(); ++i)
    if (!seen[static_cast<std::size_t>(i)]) throw SchemaError("images." + space.id(i), "missing image");
  if (auto it = doc.find("bound"); it != doc.end() && !it->is_null()) {
    out.bound = as_number(*it, "bound");
    if (*out.bound < 1.0) throw SchemaError("bound", "expected a number >= 1");
  }
  return out;
}

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json report_to_json(const DistortionReport& report) {
  Json out;
  out["distortion"] = number(report.distortion);
  out["scale_r"] = number(report.scale_r);
  out["max_ratio"] = number(report.max_ratio);
  out["max_pair"] = {report.max_pair.first, report.max_pair.second};
  out["min_pair"] = {report.min_pair.first, report.min_pair.second};
  out["analytic_bound"] = report.analytic_bound ? number(*report.analytic_bound) : Json(nullptr);
  out["injective"] = report.injective;
  out["pass"] = report.pass;
  return out;
}

std::string dump(const Json& doc) { return doc.dump(2) + "\n"; }

}  // namespace spiralpaste
