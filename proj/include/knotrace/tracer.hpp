#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "knotrace/diagram.hpp"
#include "knotrace/error.hpp"
#include "knotrace/genericity.hpp"
#include "knotrace/isotopy.hpp"

namespace knotrace {

struct TraceConfig {
  int t_grid = 512;
  double bisect_tol = 1e-8;
  GenericityConfig genericity;
  /// Classification refuses derivative data below this × scale.
  double degenerate_rel = 1e-7;
  /// Halvings of an unresolved grid cell before RESOLUTION_CONFLICT; the
  /// default reaches about isolation_factor × bisect_tol.
  int max_refine = 14;
  /// Events closer in time than this × bisect_tol count as simultaneous.
  double isolation_factor = 10.0;
  std::vector<int> colorings = {3, 5};
};

struct InjectivityResult {
  bool passed = true;
  /// Smallest sampled value of the embedded margin.
  double margin = 0.0;
  /// First violation: time and the two colliding parameters.
  double t = 0.0;
  double u1 = 0.0;
  double u2 = 0.0;
  /// 3D distance |f_t(u1) - f_t(u2)| at the witness.
  double gap = 0.0;
};

/// Samples the embedded margin on the time grid and follows every crossing
/// for a change of its z-gap sign, which is a 3D collision.
InjectivityResult check_injectivity_through_time(const IsotopyFamily& family, const TraceConfig& config = {});

/// The unsigned genericity margins of the loop at time t, plus signed
/// versions whose zeros are the singular events:
///   cusp      at the speed minimum nearest zero, cross(p f'', p f') / |p f''|
///   tangency  signed gap of the closest pair of points with parallel
///             tangents facing each other along their common normal
///   triple    signed distance from a crossing to the opposite side of the
///             closest triangle of crossings
/// Missing features give +inf.
struct Margins {
  double t = 0.0;
  double immersion = 0.0;
  double triple = 0.0;
  double transversality = 0.0;
  double cusp = 0.0;
  double tangency = 0.0;
  double triple_signed = 0.0;
};

Margins margin_functions(const IsotopyFamily& family, double t, const TraceConfig& config = {});

enum class EventKind { Cusp, Tangency, Triple };

/// "cusp", "tangency", "triple".
std::string_view to_string(EventKind kind);

struct EventLocation {
  double t;
  EventKind kind;
  /// One parameter for a cusp, two for a tangency, three for a triple point.
  std::vector<double> params;
};

/// Brackets sign changes of the signed margins on the time grid and bisects
/// each to bisect_tol.  Sorted by time.  Throws ENDPOINT_NOT_GENERIC and
/// RESOLUTION_CONFLICT.
std::vector<EventLocation> localize_events(const IsotopyFamily& family, const TraceConfig& config = {});

enum class MoveDirection { Create, Remove, Slide };

std::string_view to_string(MoveDirection d);

/// In a frame rotated so that p f'' = (b_x, 0) with b_x > 0.
struct CuspData {
  double a_z = 0.0;
  double b_x = 0.0;
  double c_y = 0.0;
  double d_x = 0.0;
  double d_y = 0.0;
  double e_y = 0.0;
};

/// In a frame rotated so that the first tangent is along +x; each strand
/// is locally y = b_i x².
struct TangencyData {
  double b1 = 0.0;
  double b2 = 0.0;
  /// d/dt of (y1 - y2).
  double drift = 0.0;
  bool same_side = false;
  bool antiparallel = false;
  double z1 = 0.0;
  double z2 = 0.0;
};

struct TripleData {
  std::array<Vec2, 3> v{};
  std::array<Vec2, 3> w{};
  std::array<double, 3> z{};
  /// Strand that sweeps across the crossing of the other two once the
  /// drift fixing those two is removed.
  int moving = 0;
};

struct SingularEvent {
  double t = 0.0;
  EventKind kind = EventKind::Cusp;
  std::vector<double> params;
  CuspData cusp;
  TangencyData tangency;
  TripleData triple;
  /// "R1", "R2", "R3".
  std::string move;
  /// R1: crossing sign and whether the curl starts over, e.g. "+O".
  /// R2: "over"/"under" for the strand at the smaller parameter, plus the
  /// parabola configuration, e.g. "over/opposite".
  /// R3: z-ranks T/M/B of the strands in parameter order, e.g. "TBM".
  std::string variant;
  MoveDirection direction = MoveDirection::Slide;
  /// Crossing count change predicted by the local model.
  int delta_crossings = 0;
};

/// Throw DEGENERATE_CUSP / DEGENERATE_TANGENCY / DEGENERATE_TRIPLE when the
/// local model's nondegeneracy conditions fail.
SingularEvent classify_cusp(const IsotopyFamily& family, double t, double u, const TraceConfig& config = {});
SingularEvent classify_tangency(const IsotopyFamily& family, double t, double u1, double u2,
                                const TraceConfig& config = {});
SingularEvent classify_triple(const IsotopyFamily& family, double t, double u1, double u2, double u3,
                              const TraceConfig& config = {});

struct IntervalRecord {
  double t_begin;
  double t_end;
  /// Extracted at the midpoint.
  Diagram diagram;
  /// Diagrams at the quarter points are isomorphic to the midpoint one.
  bool consistent;
};

struct EventRecord {
  SingularEvent event;
  bool classified;
  /// Crossing count after minus before, from the interval diagrams.
  int observed_delta;
  /// The interval diagrams differ by the classified move.
  bool verified;
};

struct ColoringCheck {
  int n;
  std::uint64_t start;
  std::uint64_t end;
};

struct MoveScript {
  std::vector<IntervalRecord> intervals;
  std::vector<EventRecord> events;
  std::vector<ColoringCheck> colorings;
  /// Classification and verification failures, each with its time.
  std::vector<Diagnostic> problems;

  bool ok() const { return problems.empty(); }
};

/// Endpoint check, injectivity, localisation, classification, extraction at
/// interval midpoints and verification.  Throws ENDPOINT_NOT_GENERIC,
/// NOT_AN_ISOTOPY and RESOLUTION_CONFLICT; everything else lands in
/// `problems`.
MoveScript trace(const IsotopyFamily& family, const TraceConfig& config = {});

/// One line per interval and per event, then coloring checks and problems:
///   interval [0.000000000, 0.500000000] gauss: O1- U1-
///   event t=0.500000000 kind=R1 variant=-U direction=remove delta_crossings=-1 verified=yes
std::string format_move_script(const MoveScript& script);

}  // namespace knotrace
