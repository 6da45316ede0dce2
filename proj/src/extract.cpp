#include "knotrace/extract.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace knotrace {

Extraction extract_diagram(const FourierLoop& loop, const std::vector<DoublePoint>& points, double z_tol) {
  struct Visit {
    double u;
    int crossing;
    bool over;
  };
  std::vector<Visit> visits;
  std::vector<int> signs;
  for (int k = 0; k < static_cast<int>(points.size()); ++k) {
    const DoublePoint& p = points[k];
    if (!(std::abs(p.z_gap) >= z_tol)) {
      throw Error(ErrorCode::AmbiguousZ,
                  fmt::format("strands at u={:.9f} and u={:.9f} differ in height by {:.3g}", p.u1, p.u2, p.z_gap));
    }
    const bool first_over = p.z_gap > 0.0;
    const Vec2 t1 = project(loop.derivative(p.u1, 1));
    const Vec2 t2 = project(loop.derivative(p.u2, 1));
    const double c = first_over ? cross(t1, t2) : cross(t2, t1);
    signs.push_back(c > 0.0 ? 1 : -1);
    visits.push_back({p.u1, k, first_over});
    visits.push_back({p.u2, k, !first_over});
  }
  std::sort(visits.begin(), visits.end(), [](const Visit& a, const Visit& b) { return a.u < b.u; });
  Extraction out;
  std::vector<Passage> passages;
  for (const Visit& v : visits) {
    passages.push_back({v.crossing, v.over});
    out.passage_u.push_back(v.u);
  }
  out.diagram = Diagram::from_passages(std::move(passages), std::move(signs));
  return out;
}

Extraction extract_diagram(const FourierLoop& loop, const std::vector<DoublePoint>& points) {
  return extract_diagram(loop, points, 1e-6 * loop.scale());
}

}  // namespace knotrace
