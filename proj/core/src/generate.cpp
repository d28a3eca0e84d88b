#include "baryflow/generate.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "baryflow/error.hpp"

namespace baryflow {
namespace {

// Minimal separation between atoms of one generated measure.
constexpr double kMinSeparation = 1e-6;

double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double standard_normal(std::mt19937_64& rng) {
  // Box-Muller; u1 is shifted away from 0 so the log stays finite.
  const double u1 = 1.0 - unit_uniform(rng);
  const double u2 = unit_uniform(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace

PointDistribution parse_distribution(std::string_view name) {
  if (name == "uniform-box") return PointDistribution::UniformBox;
  if (name == "gaussian") return PointDistribution::Gaussian;
  throw Error(ErrorCode::InvalidProblem, "unknown distribution '" + std::string(name) + "'");
}

std::vector<DiscreteMeasure> generate_instance(const InstanceSpec& spec) {
  if (spec.marginals < 2 || spec.atoms < 1 || spec.dim < 1) {
    throw Error(ErrorCode::InvalidProblem, "need N >= 2, n >= 1 and d >= 1");
  }
  std::mt19937_64 rng(spec.seed);
  const auto d = static_cast<Eigen::Index>(spec.dim);
  std::vector<DiscreteMeasure> out;
  out.reserve(spec.marginals);
  for (std::size_t i = 0; i < spec.marginals; ++i) {
    std::vector<Point> points;
    while (points.size() < spec.atoms) {
      Point x(d);
      for (Eigen::Index k = 0; k < d; ++k) {
        x[k] = spec.distribution == PointDistribution::UniformBox ? unit_uniform(rng)
                                                                  : standard_normal(rng);
      }
      bool distinct = true;
      for (const Point& y : points) {
        if ((x - y).norm() <= kMinSeparation) distinct = false;
      }
      if (distinct) points.push_back(std::move(x));
    }
    out.push_back(DiscreteMeasure::uniform(std::move(points)));
  }
  return out;
}

}  // namespace baryflow
