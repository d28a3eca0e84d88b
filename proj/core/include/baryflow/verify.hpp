#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "baryflow/infconv.hpp"
#include "baryflow/measure.hpp"
#include "baryflow/mmot.hpp"

namespace baryflow {

// Fixed tolerances of the verification harness. Only the value-chain
// tolerance is configurable.
inline constexpr double kDefaultValueTolerance = 1e-7;
inline constexpr double kStationarityTolerance = 1e-8;
inline constexpr double kMomentumTolerance = 1e-9;
inline constexpr double kContinuityTolerance = 1e-10;
inline constexpr int kContinuityDegree = 4;
inline constexpr double kDualTolerance = 1e-7;
inline constexpr double kTranslationValueTolerance = 1e-8;
inline constexpr double kTranslationPointTolerance = 1e-9;
/// Floor for relative comparisons, so that all-zero instances compare equal.
inline constexpr double kRelativeFloor = 1e-12;

struct CheckResult {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct ProblemValues {
  double C = 0.0;   // multi-marginal LP value
  double WB = 0.0;  // barycentre objective at the extracted barycentre
  double DC = 0.0;  // action of the coupled particle flows
  double PS = 0.0;  // action of the coupling flow
};

struct VerificationReport {
  double p = 2.0;
  std::size_t marginal_count = 0;
  std::size_t dim = 0;
  std::size_t plan_size = 0;
  std::size_t barycenter_size = 0;
  Point shift;
  /// Stationarity tolerance the inner minimizer was run with.
  double infconv_tol = 0.0;
  ProblemValues values;
  std::vector<CheckResult> checks;

  bool all_pass() const;
  /// Name of the first failing check, or nullopt when all pass.
  std::optional<std::string> first_failure() const;
  const CheckResult* find(const std::string& name) const;
};

/// Fixed key order: p, marginals, dimension, plan_size, barycenter_size,
/// shift, infconv_tol, values{C,WB,DC,PS}, differences{C-WB,C-DC,C-PS,WB-DC,WB-PS,DC-PS},
/// checks[{name,residual,tolerance,status}], status.
nlohmann::ordered_json to_json(const VerificationReport& report);

struct VerifyOptions {
  /// Relative tolerance for the spread of {C, WB, DC, PS}.
  double value_tol = kDefaultValueTolerance;
  /// Translation vector; defaults to (1, -1, 1, ...) in dimension d.
  std::optional<Point> shift;
  MmotOptions mmot;
};

/// (1, -1, 1, ...) truncated to dimension d.
Point default_shift(std::size_t d);

/// max{C,WB,DC,PS} - min{...}, relative to max(|C|, kRelativeFloor).
double relative_spread(const ProblemValues& v);

/// Runs the whole chain: solve, extract the barycentre, evaluate WB, build
/// both flows and their actions, then every residual check and the
/// translation test. Errors from the solvers propagate.
VerificationReport verify_instance(std::span<const DiscreteMeasure> mus, Exponent p,
                                   const VerifyOptions& options = {});

}  // namespace baryflow
