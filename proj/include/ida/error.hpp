#pragma once

#include <stdexcept>
#include <string>

namespace ida {

enum class ErrorCode {
  MismatchedBins,
  UnsupportedShift,
  MissingClass,
  DimensionMismatch,
  NonFinite,
  OutOfDomain,
  InvalidConfig,
  DegenerateFitness,
  DegenerateAccuracy,
  ParseError,
  NonMonotoneCDF,
  MissingConditional,
  AssumptionsUnmet,
  InvalidAlpha,
  ConfigError,
  InvariantViolation,
};

const char* to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries one of the codes above so
// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MismatchedBins: return "MismatchedBins";
    case ErrorCode::UnsupportedShift: return "UnsupportedShift";
    case ErrorCode::MissingClass: return "MissingClass";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::DegenerateFitness: return "DegenerateFitness";
    case ErrorCode::DegenerateAccuracy: return "DegenerateAccuracy";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NonMonotoneCDF: return "NonMonotoneCDF";
    case ErrorCode::MissingConditional: return "MissingConditional";
    case ErrorCode::AssumptionsUnmet: return "AssumptionsUnmet";
    case ErrorCode::InvalidAlpha: return "InvalidAlpha";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
  }
  return "Unknown";
}

}  // namespace ida
