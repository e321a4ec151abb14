#include "clin/error.hpp"

namespace clin {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnsupportedFunction: return "UnsupportedFunction";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::NotPolynomial: return "NotPolynomial";
    case ErrorCode::DegreeTooHigh: return "DegreeTooHigh";
    case ErrorCode::ExpansionTooLarge: return "ExpansionTooLarge";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UndeclaredSymbol: return "UndeclaredSymbol";
    case ErrorCode::WrongLeftSide: return "WrongLeftSide";
    case ErrorCode::DuplicateEquation: return "DuplicateEquation";
    case ErrorCode::PatternMismatch: return "PatternMismatch";
    case ErrorCode::NotSolvableForSecondDerivatives: return "NotSolvableForSecondDerivatives";
    case ErrorCode::VariableMismatch: return "VariableMismatch";
    case ErrorCode::DegenerateSolve: return "DegenerateSolve";
    case ErrorCode::ImmediateBlowup: return "ImmediateBlowup";
    case ErrorCode::AllPointsExcluded: return "AllPointsExcluded";
    case ErrorCode::DegenerateImage: return "DegenerateImage";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::SingularJacobian: return "SingularJacobian";
    case ErrorCode::ImageDegenerate: return "ImageDegenerate";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

ParseError::ParseError(ErrorCode code, const std::string& message, int line, int column,
                       std::vector<std::string> expected)
    : Error(code, message + " at " + std::to_string(line) + ":" + std::to_string(column)),
      line_(line),
      column_(column),
      expected_(std::move(expected)) {}

}  // namespace clin
