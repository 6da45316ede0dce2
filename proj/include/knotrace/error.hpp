#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace knotrace {

enum class ErrorCode {
  InvalidArgument,
  ParseError,
  NotEmbedded,
  NewtonDiverged,
  Degenerate,
  PerturbationFailed,
  AmbiguousZ,
  MalformedCode,
  StaleSite,
  NotAnIsotopy,
  EndpointNotGeneric,
  ResolutionConflict,
  DegenerateCusp,
  DegenerateTangency,
  DegenerateTriple,
};

/// Stable upper-case name used in reports, e.g. "NOT_EMBEDDED".
std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// A non-fatal finding attached to a report instead of being thrown.
struct Diagnostic {
  ErrorCode code;
  std::string message;
};

}  // namespace knotrace
