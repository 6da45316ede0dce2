#pragma once

#include <string>

#include "knotrace/diagram.hpp"
#include "knotrace/fourier_loop.hpp"

namespace knotrace {

struct SvgStyle {
  double size = 400.0;    // square canvas, pixels
  double margin = 20.0;
  double stroke = 2.0;
  double gap = 12.0;      // half-length of the break in an under-strand, pixels
  int samples = 1024;     // polyline points along a whole loop
};

/// Projection of a generic loop, one <path> per arc: under-strands are cut
/// on both sides of every undercrossing.  A loop without crossings is one
/// closed path.  Output depends only on the inputs.
std::string render_svg(const FourierLoop& loop, const SvgStyle& style = {});

/// Combinatorial drawing from a barycentric (Tutte) layout of the diagram's
/// planar map, with the same one-path-per-arc convention.
std::string render_svg(const Diagram& diagram, const SvgStyle& style = {});

}  // namespace knotrace
