#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qentro {

/// Failure categories. Each maps onto one CLI exit code (see exit_code()).
enum class ErrorKind {
  ParseError,
  NotHermitian,
  NotPositive,
  DimMismatch,
  DomainError,
  NotContraction,
  BasisNotOrthonormal,
  PovmIncomplete,
  BadDistribution,
  HypothesisViolated,
  VanishingOutput,
  EmptyInput,
  ScaleExceeded,
  InfeasibleConstraint,
  ConvergenceFailure,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NotPositive: return "NotPositive";
    case ErrorKind::DimMismatch: return "DimMismatch";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::NotContraction: return "NotContraction";
    case ErrorKind::BasisNotOrthonormal: return "BasisNotOrthonormal";
    case ErrorKind::PovmIncomplete: return "PovmIncomplete";
    case ErrorKind::BadDistribution: return "BadDistribution";
    case ErrorKind::HypothesisViolated: return "HypothesisViolated";
    case ErrorKind::VanishingOutput: return "VanishingOutput";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::ScaleExceeded: return "ScaleExceeded";
    case ErrorKind::InfeasibleConstraint: return "InfeasibleConstraint";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
  }
  return "Unknown";
}

/// 0 ok, 1 internal, 2 parse, 3 validation, 4 scale, 5 infeasible.
inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ParseError: return 2;
    case ErrorKind::ScaleExceeded: return 4;
    case ErrorKind::InfeasibleConstraint: return 5;
    case ErrorKind::ConvergenceFailure: return 1;
    default: return 3;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace qentro
