#include "koiter_fsi/error.hpp"

namespace kfsi {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::OutOfTube: return "OutOfTube";
    case ErrorKind::DisplacementTooLarge: return "DisplacementTooLarge";
    case ErrorKind::KappaTooLarge: return "KappaTooLarge";
    case ErrorKind::SingularMass: return "SingularMass";
    case ErrorKind::LinearSolveFailure: return "LinearSolveFailure";
    case ErrorKind::LiftSolveFailure: return "LiftSolveFailure";
    case ErrorKind::NotSPD: return "NotSPD";
    case ErrorKind::CompatibilityViolation: return "CompatibilityViolation";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::WindowShrunk: return "WindowShrunk";
    case ErrorKind::RestartGeometryInvalid: return "RestartGeometryInvalid";
    case ErrorKind::NegativeDensity: return "NegativeDensity";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
  }
  return "Unknown";
}

}  // namespace kfsi
