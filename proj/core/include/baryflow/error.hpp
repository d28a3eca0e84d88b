#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace baryflow {

enum class ErrorCode {
  NegativeWeight,
  WeightSumMismatch,
  DimensionMismatch,
  NonFiniteCoordinate,
  EmptyMeasure,
  NonFiniteImage,
  IndexOutOfRange,
  TimeOutOfRange,
  InvalidProblem,
  Infeasible,
  Unbounded,
  CycleLimitExceeded,
  InvalidExponent,
  NoConvergence,
  ProductGridTooLarge,
  WrongExponent,
  ParseError,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

// All library failures are reported through this exception; the code is the
// stable part, the message carries context for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace baryflow
