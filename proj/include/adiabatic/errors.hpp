#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace adiabatic {

enum class ErrorCode {
  InvalidArgument,
  DomainError,
  HermiticityViolation,
  DegenerateSpectrum,
  TimeOutOfDomain,
  LevelCrossing,
  NormDriftExceeded,
  GaugeImaginaryPartExceeded,
  GridMismatch,
  PreconditionNotMet,
  DimensionNotTwo,
  CrossCheckFailed,
};

constexpr std::string_view error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::HermiticityViolation: return "HermiticityViolation";
    case ErrorCode::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorCode::TimeOutOfDomain: return "TimeOutOfDomain";
    case ErrorCode::LevelCrossing: return "LevelCrossing";
    case ErrorCode::NormDriftExceeded: return "NormDriftExceeded";
    case ErrorCode::GaugeImaginaryPartExceeded: return "GaugeImaginaryPartExceeded";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::PreconditionNotMet: return "PreconditionNotMet";
    case ErrorCode::DimensionNotTwo: return "DimensionNotTwo";
    case ErrorCode::CrossCheckFailed: return "CrossCheckFailed";
  }
  return "Unknown";
}

/// True for failures that arise while computing (as opposed to bad input).
constexpr bool is_numerical_failure(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::HermiticityViolation:
    case ErrorCode::DegenerateSpectrum:
    case ErrorCode::LevelCrossing:
    case ErrorCode::NormDriftExceeded:
    case ErrorCode::GaugeImaginaryPartExceeded:
    case ErrorCode::CrossCheckFailed:
      return true;
    default:
      return false;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

namespace detail {

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) throw Error(code, message);
}

}  // namespace detail
}  // namespace adiabatic
