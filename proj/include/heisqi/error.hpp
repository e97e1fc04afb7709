#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace heisqi {

enum class ErrorKind {
  DimensionMismatch,
  NotADerivation,
  NonDiagonalizable,
  ComplexSpectrum,
  NonPositiveEigenvalue,
  CenterMismatch,
  DegeneratePairing,
  RequiresTwoStepGrading,  // operation needs k >= 2
  NotInSubgroup,
  HypothesisViolated,
  OutOfBox,
  NotEquivalent,
  InvalidArgument,
  SyntaxError,
  SchemaError,
  DimensionError,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotADerivation: return "NotADerivation";
    case ErrorKind::NonDiagonalizable: return "NonDiagonalizable";
    case ErrorKind::ComplexSpectrum: return "ComplexSpectrum";
    case ErrorKind::NonPositiveEigenvalue: return "NonPositiveEigenvalue";
    case ErrorKind::CenterMismatch: return "CenterMismatch";
    case ErrorKind::DegeneratePairing: return "DegeneratePairing";
    case ErrorKind::RequiresTwoStepGrading: return "RequiresTwoStepGrading";
    case ErrorKind::NotInSubgroup: return "NotInSubgroup";
    case ErrorKind::HypothesisViolated: return "HypothesisViolated";
    case ErrorKind::OutOfBox: return "OutOfBox";
    case ErrorKind::NotEquivalent: return "NotEquivalent";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::DimensionError: return "DimensionError";
  }
  return "Unknown";
}

/// Exception carrying a machine-readable kind and, for input errors, the
/// offending field path (e.g. "derivation.matrix[2]").
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::string field = {})
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind),
        message_(message),
        field_(std::move(field)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& field() const noexcept { return field_; }
  /// The message without the kind prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorKind kind_;
  std::string message_;
  std::string field_;
};

}  // namespace heisqi
