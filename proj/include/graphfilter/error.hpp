#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace graphfilter {

enum class ErrorCode {
  InvalidArgument,
  DuplicateEdge,
  IndexOutOfRange,
  SelfLoopInInput,
  InvalidWeight,
  UnsupportedScheme,
  DimensionMismatch,
  UnknownModel,
  InvalidParam,
  OrderTooLarge,
  SolverDiverged,
  SingularDenominator,
  MethodUnsupported,
  BasisMismatch,
  UnsupportedFamily,
  NotSymmetric,
  TooLarge,
  NotConverged,
  UnsupportedBasis,
  NotDiagonalizableByThisOracle,
  IllConditioned,
  PoleInDomain,
  IsolatedNode,
  BudgetExceeded,
  InvalidConfig,
  ParseError,
  RaggedRows,
  IoError,
};

/// Stable identifier used in `error=<code>` lines.
std::string_view error_code_name(ErrorCode code);

/// The single exception type thrown by the library. `code()` is the
/// machine-readable category; `what()` carries the human detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Parse failure with the 1-based line it happened on.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& reason)
      : Error(ErrorCode::ParseError,
              "line " + std::to_string(line) + ": " + reason),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace graphfilter
