#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "baryflow/measure.hpp"

namespace baryflow {

// Measure files are JSON objects {"points": [[...], ...], "weights": [...]}
// with row-major points.

nlohmann::ordered_json to_json(const DiscreteMeasure& m);
/// Throws ParseError on a malformed document. Does not validate().
DiscreteMeasure measure_from_json(const nlohmann::json& j);

DiscreteMeasure read_measure(const std::filesystem::path& path);
void write_measure(const std::filesystem::path& path, const DiscreteMeasure& m);

/// Header "index,x_1,...,x_d,weight", one row per atom, 0-based index.
void write_measure_csv(std::ostream& out, const DiscreteMeasure& m);

/// Shortest round-trip decimal form of a double, as used in all CSV output.
std::string format_number(double v);

}  // namespace baryflow
