#pragma once

#include <vector>

#include "knotrace/diagram.hpp"
#include "knotrace/fourier_loop.hpp"
#include "knotrace/genericity.hpp"

namespace knotrace {

struct Extraction {
  Diagram diagram;
  /// Parameter of every passage, in diagram order (increasing from u = 0).
  std::vector<double> passage_u;
};

/// Reads the diagram off a generic projection: passages in parameter order,
/// the strand with larger z is over, sign = sign of cross(p f' over, p f' under).
/// Throws AMBIGUOUS_Z when a z-gap is below `z_tol`.
Extraction extract_diagram(const FourierLoop& loop, const std::vector<DoublePoint>& points, double z_tol);

/// As above with z_tol = 1e-6 × scale.
Extraction extract_diagram(const FourierLoop& loop, const std::vector<DoublePoint>& points);

}  // namespace knotrace
