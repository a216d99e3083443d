#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace knotflow {

enum class ErrorKind {
  TooFewVertices,
  DegenerateEdge,
  SelfIntersection,
  CoincidentPoints,
  AdjacentEdges,
  DimensionMismatch,
  SingularSystem,
  NonConvergence,
  AlreadyColliding,
  LineSearchFailure,
  NewtonInnerFailure,
  NotDescentDirection,
  InvalidArgument,
  ParseError,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

}  // namespace knotflow
