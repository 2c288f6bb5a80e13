#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wrl {

enum class ErrorCode {
  InvalidArgument,
  EmptyOrUnbounded,
  Degenerate,
  OriginOutside,
  AngleOutOfRange,
  OddNWithAngle,
  ToleranceNotMet,
  Infeasible,
  NoRoot,
  DegenerateDirection,
  NotConverged,
  NoTransitionFound,
  Config,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::EmptyOrUnbounded: return "EmptyOrUnbounded";
    case ErrorCode::Degenerate: return "Degenerate";
    case ErrorCode::OriginOutside: return "OriginOutside";
    case ErrorCode::AngleOutOfRange: return "AngleOutOfRange";
    case ErrorCode::OddNWithAngle: return "OddNWithAngle";
    case ErrorCode::ToleranceNotMet: return "ToleranceNotMet";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::NoRoot: return "NoRoot";
    case ErrorCode::DegenerateDirection: return "DegenerateDirection";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::NoTransitionFound: return "NoTransitionFound";
    case ErrorCode::Config: return "Config";
  }
  return "Unknown";
}

/// True for failures of a numerical procedure (as opposed to bad input).
constexpr bool is_numerical(ErrorCode code) {
  switch (code) {
    case ErrorCode::ToleranceNotMet:
    case ErrorCode::Infeasible:
    case ErrorCode::NoRoot:
    case ErrorCode::NotConverged:
    case ErrorCode::NoTransitionFound:
    case ErrorCode::DegenerateDirection:
      return true;
    default:
      return false;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace wrl
