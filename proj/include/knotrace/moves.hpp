#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "knotrace/diagram.hpp"

namespace knotrace {

enum class MoveKind { R1Add, R1Remove, R2Add, R2Remove, R3 };

/// "R1_add", "R1_remove", ...
std::string_view to_string(MoveKind kind);

/// Where a move applies.  `data` is kind specific:
///   R1Add     {segment, sign, first passage over (0/1)}
///   R1Remove  {crossing}
///   R2Add     {face, dart position i, dart position j, first strand over (0/1)}
///   R2Remove  {crossing, crossing}
///   R3        {segment, segment, segment}
/// `variant` is "+O", "-U", ... for R1 (sign of the curl crossing, whether
/// the curl starts over), "over"/"under" for R2, and the top/middle/bottom
/// ranks of the three triangle sides for R3, e.g. "TBM".
struct MoveSite {
  MoveKind kind;
  std::vector<int> data;
  std::string variant;
  std::uint64_t fingerprint;
};

std::vector<MoveSite> enumerate_move_sites(const Diagram& d, MoveKind kind);

/// Throws STALE_SITE when `site` was enumerated from a different diagram.
Diagram apply_move(const Diagram& d, const MoveSite& site);

/// Writhe change implied by the site (nonzero only for R1).
int writhe_change(const Diagram& d, const MoveSite& site);

}  // namespace knotrace
