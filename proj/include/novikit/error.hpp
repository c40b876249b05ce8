#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace novikit {

enum class ErrorKind {
  ZeroNotInvertible,
  InfiniteCutoff,
  VariableMismatch,
  NonInvertibleSubstitution,
  DivergentEvaluation,
  DivisionByZero,
  ChartMismatch,
  OutsideOverlap,
  NotSolvable,
  NoRoots,
  SingularJacobian,
  UnsupportedPotential,
  UnknownModel,
  UnknownChart,
  UnknownTransition,
  InvalidArgument,
  ParseError,
};

std::string_view to_string(ErrorKind kind);

// All library failures are reported through this one exception type; callers
// branch on kind() rather than on a class hierarchy.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind),
        detail_(message) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace novikit
