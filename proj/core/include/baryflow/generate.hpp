#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "baryflow/measure.hpp"

namespace baryflow {

enum class PointDistribution { UniformBox, Gaussian };

/// "uniform-box" or "gaussian"; throws InvalidProblem otherwise.
PointDistribution parse_distribution(std::string_view name);

struct InstanceSpec {
  std::uint64_t seed = 1;
  std::size_t marginals = 3;
  std::size_t atoms = 4;
  std::size_t dim = 2;
  PointDistribution distribution = PointDistribution::UniformBox;
};

/// N measures with `atoms` distinct points each (uniform on [0,1]^d or
/// standard normal) and weights 1/n. The only source of randomness is
/// std::mt19937_64 seeded with spec.seed, and the mapping to doubles is done
/// here, so output is identical across standard libraries.
std::vector<DiscreteMeasure> generate_instance(const InstanceSpec& spec);

}  // namespace baryflow
