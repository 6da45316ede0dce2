#include "knotrace/error.hpp"

namespace knotrace {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::ParseError: return "PARSE_ERROR";
    case ErrorCode::NotEmbedded: return "NOT_EMBEDDED";
    case ErrorCode::NewtonDiverged: return "NEWTON_DIVERGED";
    case ErrorCode::Degenerate: return "DEGENERATE";
    case ErrorCode::PerturbationFailed: return "PERTURBATION_FAILED";
    case ErrorCode::AmbiguousZ: return "AMBIGUOUS_Z";
    case ErrorCode::MalformedCode: return "MALFORMED_CODE";
    case ErrorCode::StaleSite: return "STALE_SITE";
    case ErrorCode::NotAnIsotopy: return "NOT_AN_ISOTOPY";
    case ErrorCode::EndpointNotGeneric: return "ENDPOINT_NOT_GENERIC";
    case ErrorCode::ResolutionConflict: return "RESOLUTION_CONFLICT";
    case ErrorCode::DegenerateCusp: return "DEGENERATE_CUSP";
    case ErrorCode::DegenerateTangency: return "DEGENERATE_TANGENCY";
    case ErrorCode::DegenerateTriple: return "DEGENERATE_TRIPLE";
  }
  return "UNKNOWN";
}

}  // namespace knotrace
