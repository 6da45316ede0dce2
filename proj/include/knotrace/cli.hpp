#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "knotrace/genericity.hpp"
#include "knotrace/tracer.hpp"

namespace knotrace {

enum class OutputFormat { Text, KeyValue, Svg };

struct RunConfig {
  GenericityConfig genericity;
  /// Its own `genericity` member is replaced by the one above before use.
  TraceConfig trace;
  /// AMBIGUOUS_Z threshold for extraction, × scale.
  double z_rel = 1e-6;
  int max_degree = FourierLoop::kDefaultMaxDegree;
  std::uint64_t seed = 0;
  bool perturb = false;
  double perturb_magnitude = 1e-3;
  OutputFormat format = OutputFormat::Text;
  /// Colorings to report; defaults to trace.colorings.
  std::vector<int> moduli = {3, 5};
};

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;     // validation or verification failed, not an isotopy
inline constexpr int kExitBadInput = 2;   // unreadable or malformed input, bad flags, unwritable output
inline constexpr int kExitConflict = 3;   // events could not be separated in time

/// Checks tolerances > 0 and grid minimums; throws InvalidArgument.
void check_config(const RunConfig& config);

/// The whole tool: `knotrace <command> [options]`.  Reports go to `out`,
/// errors to `err`; returns the exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace knotrace
