#include "baryflow/io.hpp"

#include <charconv>
#include <fstream>
#include <ostream>

#include "baryflow/error.hpp"

namespace baryflow {

nlohmann::ordered_json to_json(const DiscreteMeasure& m) {
  nlohmann::ordered_json points = nlohmann::ordered_json::array();
  for (const Point& x : m.points()) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (Eigen::Index k = 0; k < x.size(); ++k) row.push_back(x[k]);
    points.push_back(std::move(row));
  }
  nlohmann::ordered_json out;
  out["points"] = std::move(points);
  out["weights"] = m.weights();
  return out;
}

DiscreteMeasure measure_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("points") || !j.contains("weights")) {
    throw Error(ErrorCode::ParseError, "expected an object with 'points' and 'weights'");
  }
  const auto& jp = j.at("points");
  const auto& jw = j.at("weights");
  if (!jp.is_array() || !jw.is_array()) {
    throw Error(ErrorCode::ParseError, "'points' and 'weights' must be arrays");
  }
  std::vector<Point> points;
  points.reserve(jp.size());
  for (const auto& row : jp) {
    if (!row.is_array()) throw Error(ErrorCode::ParseError, "each point must be an array");
    Point x(static_cast<Eigen::Index>(row.size()));
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (!row[k].is_number()) throw Error(ErrorCode::ParseError, "coordinate is not a number");
      x[static_cast<Eigen::Index>(k)] = row[k].get<double>();
    }
    points.push_back(std::move(x));
  }
  std::vector<double> weights;
  weights.reserve(jw.size());
  for (const auto& w : jw) {
    if (!w.is_number()) throw Error(ErrorCode::ParseError, "weight is not a number");
    weights.push_back(w.get<double>());
  }
  if (points.size() != weights.size()) {
    throw Error(ErrorCode::ParseError, "points and weights differ in length");
  }
  return DiscreteMeasure(std::move(points), std::move(weights));
}

DiscreteMeasure read_measure(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
  return measure_from_json(j);
}

void write_measure(const std::filesystem::path& path, const DiscreteMeasure& m) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << to_json(m).dump(2) << '\n';
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_measure_csv(std::ostream& out, const DiscreteMeasure& m) {
  out << "index";
  for (std::size_t k = 1; k <= m.dim(); ++k) out << ",x_" << k;
  out << ",weight\n";
  for (std::size_t i = 0; i < m.size(); ++i) {
    out << i;
    const Point& x = m.point(i);
    for (Eigen::Index k = 0; k < x.size(); ++k) out << ',' << format_number(x[k]);
    out << ',' << format_number(m.weight(i)) << '\n';
  }
}

}  // namespace baryflow
