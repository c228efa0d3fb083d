#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace swp {

enum class ErrorCode {
  Configuration,          // malformed grid or scenario structure
  MissingField,           // required scenario field absent
  InvalidValue,           // out-of-domain number (negative rate, bad units, ...)
  NotNormalizable,        // hiring profile with no mass
  InfeasibleCalibration,  // beta <= 1 with an equilibrium headcount target
  CflViolation,           // time step outside the scheme's stability bound
  Degenerate,             // scenario where a ratio is undefined (zero budget, ...)
  Io,
};

/// Process exit status associated with an error class.
/// 1 validation, 2 infeasible calibration, 3 step-size (CFL).
inline int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::InfeasibleCalibration:
      return 2;
    case ErrorCode::CflViolation:
      return 3;
    default:
      return 1;
  }
}

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Configuration: return "configuration";
    case ErrorCode::MissingField: return "missing-field";
    case ErrorCode::InvalidValue: return "invalid-value";
    case ErrorCode::NotNormalizable: return "not-normalizable";
    case ErrorCode::InfeasibleCalibration: return "infeasible-calibration";
    case ErrorCode::CflViolation: return "cfl-violation";
    case ErrorCode::Degenerate: return "degenerate";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string path = {})
      : std::runtime_error(path.empty() ? message : path + ": " + message),
        code_(code),
        path_(std::move(path)) {}

  ErrorCode code() const noexcept { return code_; }
  /// Scenario field or file the error refers to; empty when not applicable.
  const std::string& path() const noexcept { return path_; }

 private:
  ErrorCode code_;
  std::string path_;
};

}  // namespace swp
