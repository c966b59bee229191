#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kfsi {

enum class ErrorKind {
  OutOfTube,
  DisplacementTooLarge,
  KappaTooLarge,
  SingularMass,
  LinearSolveFailure,
  LiftSolveFailure,
  NotSPD,
  CompatibilityViolation,
  NoConvergence,
  WindowShrunk,
  RestartGeometryInvalid,
  NegativeDensity,
  ParseError,
  ValidationError,
};

std::string_view to_string(ErrorKind kind);

/// Library-wide exception. `kind()` is machine readable and maps to CLI exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace kfsi
