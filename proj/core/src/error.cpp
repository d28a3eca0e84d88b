#include "baryflow/error.hpp"

namespace baryflow {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NegativeWeight: return "NegativeWeight";
    case ErrorCode::WeightSumMismatch: return "WeightSumMismatch";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFiniteCoordinate: return "NonFiniteCoordinate";
    case ErrorCode::EmptyMeasure: return "EmptyMeasure";
    case ErrorCode::NonFiniteImage: return "NonFiniteImage";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::TimeOutOfRange: return "TimeOutOfRange";
    case ErrorCode::InvalidProblem: return "InvalidProblem";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::Unbounded: return "Unbounded";
    case ErrorCode::CycleLimitExceeded: return "CycleLimitExceeded";
    case ErrorCode::InvalidExponent: return "InvalidExponent";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::ProductGridTooLarge: return "ProductGridTooLarge";
    case ErrorCode::WrongExponent: return "WrongExponent";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code) {}

}  // namespace baryflow
