#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "knotrace/error.hpp"
#include "knotrace/fourier_loop.hpp"

namespace knotrace {

/// Thresholds are either absolute or relative to FourierLoop::scale().
struct GenericityConfig {
  int grid = 0;                      // 0 selects default_grid(loop)
  double newton_tol = 1e-10;         // on |p f(u1) - p f(u2)|
  double immersion_rel = 1e-3;       // min |p f'| must exceed this × scale
  double triple_rel = 1e-3;          // crossings closer than this × scale cluster
  double embedded_rel = 1e-3;        // min |f(u1) - f(u2)| / chord must exceed this × scale
  double transversality = 1e-2;      // min |sin angle| at crossings
};

/// max(256, 8N).
int default_grid(const FourierLoop& loop);
int effective_grid(const FourierLoop& loop, const GenericityConfig& config);

struct ParameterPair {
  double u1;
  double u2;
  double value;
};

struct EmbeddingCheck {
  /// min over u1 ≠ u2 of |f(u1) - f(u2)| / chord(u1, u2); tends to |f'| on the diagonal.
  double margin;
  ParameterPair worst;
  /// Refined local minima whose value is below the threshold.
  std::vector<ParameterPair> offenders;
};

/// Grid scan on the torus with Levenberg-Marquardt refinement of local minima.
EmbeddingCheck check_embedded(const FourierLoop& loop, int grid, double threshold);

struct ImmersionCheck {
  double margin;  // min |p f'(u)|
  double worst_u;
  std::vector<double> offenders;
};

ImmersionCheck check_immersion(const FourierLoop& loop, int grid, double threshold);

struct DoublePoint {
  double u1;  // u1 < u2, both in [0, 2π)
  double u2;
  Point2 location;
  double transversality;  // |sin| of the angle between the projected tangents
  double z_gap;           // f_z(u1) - f_z(u2)
};

struct DoublePointSearch {
  std::vector<DoublePoint> points;  // sorted by u1
  std::vector<Diagnostic> diagnostics;
};

/// Roots of the divided difference (p f(u1) - p f(u2)) / (2 sin((u2-u1)/2))
/// over 0 ≤ u1 ≤ u2 ≤ 2π.  The divided difference equals ∓p f' on the
/// diagonal, so it is nonzero there for an immersed curve and no exclusion
/// band is needed.
DoublePointSearch find_double_points(const FourierLoop& loop, int grid, double newton_tol);

struct TripleCheck {
  double margin;  // min distance between crossing locations; +inf with < 2 crossings
  std::vector<std::vector<int>> clusters;  // indices into the double-point list
};

TripleCheck check_no_triple(const std::vector<DoublePoint>& points, double threshold);

struct GenericityReport {
  double scale = 0.0;
  int grid = 0;
  double embedded_margin = 0.0;
  double immersion_margin = 0.0;
  double triple_margin = 0.0;
  double transversality_margin = 0.0;
  double embedded_threshold = 0.0;
  double immersion_threshold = 0.0;
  double triple_threshold = 0.0;
  double transversality_threshold = 0.0;
  std::vector<DoublePoint> double_points;
  std::vector<std::vector<int>> triple_clusters;
  std::vector<Diagnostic> diagnostics;

  bool embedded() const { return embedded_margin > embedded_threshold; }
  bool immersed() const { return immersion_margin > immersion_threshold; }
  bool no_triple() const { return triple_margin > triple_threshold; }
  bool transverse() const { return transversality_margin > transversality_threshold; }
  bool passed() const { return embedded() && immersed() && no_triple() && transverse() && diagnostics.empty(); }
};

GenericityReport validate(const FourierLoop& loop, const GenericityConfig& config = {});

std::string format_report_text(const GenericityReport& report);
/// One `key=value` per line: embedded_margin=..., crossings=..., verdict=PASS, ...
std::string format_report_kv(const GenericityReport& report);

/// Attempt 0 returns the loop itself if it validates; attempts 1..8 add
/// uniform noise in [-m, m] to every coefficient with m = magnitude·2^(k-1).
/// Throws NOT_EMBEDDED if the input is not embedded and PERTURBATION_FAILED
/// when every attempt fails.
FourierLoop perturb_to_generic(const FourierLoop& loop, std::uint64_t seed, double magnitude,
                               const GenericityConfig& config = {});

inline constexpr int kPerturbationAttempts = 8;

}  // namespace knotrace
