#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace clin {

enum class ErrorCode {
  // symexpr
  UnsupportedFunction,
  DomainError,
  NotPolynomial,
  DegreeTooHigh,
  ExpansionTooLarge,
  // eqdsl
  SyntaxError,
  UndeclaredSymbol,
  WrongLeftSide,
  DuplicateEquation,
  // lincheck
  PatternMismatch,
  NotSolvableForSecondDerivatives,
  // symmetry
  VariableMismatch,
  DegenerateSolve,
  // numverify
  ImmediateBlowup,
  AllPointsExcluded,
  DegenerateImage,
  TooFewPoints,
  NoConvergence,
  SingularJacobian,
  ImageDegenerate,
  // generic
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Parse failure with a 1-based source position.
class ParseError : public Error {
 public:
  ParseError(ErrorCode code, const std::string& message, int line, int column,
             std::vector<std::string> expected = {});

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  int line_;
  int column_;
  std::vector<std::string> expected_;
};

}  // namespace clin
