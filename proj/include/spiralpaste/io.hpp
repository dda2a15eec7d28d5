#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "spiralpaste/core_metric.hpp"
#include "spiralpaste/sum_space.hpp"

namespace spiralpaste {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "1.0";

/// Reads a whole file as JSON. Throws SchemaError("$", …) on I/O or syntax errors.
Json load_json(const std::string& path);

/// {"basepoint", "metric": "matrix"|"linf"|"l2", "points": [{"id", "coords"}], "matrix"}.
/// Every failure is a SchemaError naming the offending field.
PointedMetricSpace space_from_json(const Json& doc);
PointedMetricSpace load_space(const std::string& path);
Json space_to_json(const PointedMetricSpace& space);

/// "p" is a number ≥ 1 or the string "sup".
SumSpaceSpec spec_from_json(const Json& doc);

/// {"p", "block_dims", "blocks": {"<index>": [...]}} with 0-based block indices.
BlockVector block_vector_from_json(const Json& blocks, const SumSpaceSpec& spec, const std::string& field = "blocks");
Json block_vector_to_json(const BlockVector& v);

/// Images of every point of a space: {"p", "block_dims", "images": {id: {"<index>": [...]}}, "bound"?}.
struct ImageSet {
  SumSpaceSpec spec;
  std::vector<BlockVector> images;  // aligned with the space's point order
  std::optional<double> bound;
};
ImageSet images_from_json(const Json& doc, const PointedMetricSpace& space);

/// Non-finite values are written as null.
Json number(double v);
Json report_to_json(const DistortionReport& report);

/// Serialises with two-space indentation and a trailing newline.
std::string dump(const Json& doc);

}  // namespace spiralpaste
