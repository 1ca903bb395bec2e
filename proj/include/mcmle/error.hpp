#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mcmle {

enum class ErrorCode {
  InvalidArgument,
  ZeroSize,
  NonPositiveVariance,
  NonPositiveScale,
  NonPositiveShape,
  NonPositiveRate,
  InvalidParams,
  SupportViolation,
  TooFewObservations,
  DegenerateSample,
  MomentUnavailable,
  NoSignChange,
  MaxIterationsExceeded,
  NonFiniteEvaluation,
  TooFewReplicates,
  ZeroCurvature,
  NotApplicable,
  AllReplicatesDegenerate,
  MismatchedConfig,
  ParseError,
  IoError,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ZeroSize: return "ZeroSize";
    case ErrorCode::NonPositiveVariance: return "NonPositiveVariance";
    case ErrorCode::NonPositiveScale: return "NonPositiveScale";
    case ErrorCode::NonPositiveShape: return "NonPositiveShape";
    case ErrorCode::NonPositiveRate: return "NonPositiveRate";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::SupportViolation: return "SupportViolation";
    case ErrorCode::TooFewObservations: return "TooFewObservations";
    case ErrorCode::DegenerateSample: return "DegenerateSample";
    case ErrorCode::MomentUnavailable: return "MomentUnavailable";
    case ErrorCode::NoSignChange: return "NoSignChange";
    case ErrorCode::MaxIterationsExceeded: return "MaxIterationsExceeded";
    case ErrorCode::NonFiniteEvaluation: return "NonFiniteEvaluation";
    case ErrorCode::TooFewReplicates: return "TooFewReplicates";
    case ErrorCode::ZeroCurvature: return "ZeroCurvature";
    case ErrorCode::NotApplicable: return "NotApplicable";
    case ErrorCode::AllReplicatesDegenerate: return "AllReplicatesDegenerate";
    case ErrorCode::MismatchedConfig: return "MismatchedConfig";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// Exception carrying a machine-checkable code alongside the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mcmle
