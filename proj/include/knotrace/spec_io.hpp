#pragma once

#include <string>
#include <string_view>

#include "knotrace/fourier_loop.hpp"
#include "knotrace/isotopy.hpp"

namespace knotrace {

// Knot spec text:
//
//   degree N
//   x: c0 a1 b1 ... aN bN
//   y: ...
//   z: ...
//
// An isotopy spec repeats `keyframe t=<float>` followed by a knot spec.
// Blank lines and `#` comments are ignored.  Parse failures throw
// Error(ParseError) with a "line <n>:" prefix in the message.

struct ParseOptions {
  int max_degree = FourierLoop::kDefaultMaxDegree;
};

FourierLoop parse_knot_spec(std::string_view text, const ParseOptions& options = {});
IsotopyFamily parse_isotopy_spec(std::string_view text, const ParseOptions& options = {});

/// Writes with round-trip precision.
std::string format_knot_spec(const FourierLoop& loop);
std::string format_isotopy_spec(const IsotopyFamily& family);

/// Reads a whole file; throws ParseError if it cannot be opened.
std::string read_text_file(const std::string& path);

}  // namespace knotrace
