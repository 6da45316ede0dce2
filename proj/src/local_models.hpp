#pragma once

// Newton solvers for the local features the tracer follows through time.
// Each takes a seed and a reach; a solve that fails or wanders further than
// the reach from its seed returns nullopt.

#include <array>
#include <optional>
#include <vector>

#include "knotrace/fourier_loop.hpp"
#include "knotrace/genericity.hpp"

namespace knotrace::detail {

struct UPair {
  double u1;
  double u2;
};

/// Local minimum of |p f'| near u (Newton on p f' · p f'').
std::optional<double> speed_minimum(const FourierLoop& loop, double u, double reach);
/// cross(p f'', p f') / |p f''|: ±|p f'| at a speed minimum, zero at a cusp.
double cusp_margin(const FourierLoop& loop, double u);

struct SpeedMinimum {
  double u;
  double margin;  // cusp_margin at u
};

/// All local minima of |p f'| on a grid of m points, polished.
std::vector<SpeedMinimum> speed_minima(const FourierLoop& loop, int m);

/// p f(u1) = p f(u2) near the seed.
std::optional<UPair> double_point(const FourierLoop& loop, double u1, double u2, double reach);

/// Points with parallel tangents whose difference is normal to both.
std::optional<UPair> facing_pair(const FourierLoop& loop, double u1, double u2, double reach);
/// (p f(u2) - p f(u1)) · n1 with n1 the left unit normal at u1.
double facing_gap(const FourierLoop& loop, const UPair& p);
/// Every facing pair, from sign changes on an m × m grid.
std::vector<UPair> facing_pairs(const FourierLoop& loop, int m);

/// Parameter of the point of the curve nearest to x, near u.
std::optional<double> closest_point(const FourierLoop& loop, Point2 x, double u, double reach);

/// Crossing of the strands at (ua, ub) and the signed distance from it to
/// the strand near uc.
struct TriangleProbe {
  double ua;
  double ub;
  double uc;
  double distance;
};

std::optional<TriangleProbe> triangle_probe(const FourierLoop& loop, double ua, double ub, double uc, double reach);

/// A 3-cycle of crossings joined by segments: crossing `vertex` and a
/// parameter on the segment joining the other two.
struct Triangle {
  std::array<int, 3> crossings;  // sorted indices into the double-point list
  double ua;
  double ub;
  double uc;
};

std::vector<Triangle> crossing_triangles(const std::vector<DoublePoint>& points);

/// Circular midpoint of a and b along the shorter arc.
double circle_mid(double a, double b);

}  // namespace knotrace::detail
