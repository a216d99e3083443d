#include "knotflow/error.hpp"

namespace knotflow {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::TooFewVertices: return "TooFewVertices";
    case ErrorKind::DegenerateEdge: return "DegenerateEdge";
    case ErrorKind::SelfIntersection: return "SelfIntersection";
    case ErrorKind::CoincidentPoints: return "CoincidentPoints";
    case ErrorKind::AdjacentEdges: return "AdjacentEdges";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::AlreadyColliding: return "AlreadyColliding";
    case ErrorKind::LineSearchFailure: return "LineSearchFailure";
    case ErrorKind::NewtonInnerFailure: return "NewtonInnerFailure";
    case ErrorKind::NotDescentDirection: return "NotDescentDirection";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace knotflow
