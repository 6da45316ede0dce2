#include "knotrace/render.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "knotrace/extract.hpp"
#include "knotrace/genericity.hpp"

namespace knotrace {

namespace {

// Maps drawing coordinates (y up) onto the canvas (y down), keeping aspect.
class Canvas {
 public:
  Canvas(const std::vector<Point2>& pts, const SvgStyle& style) : style_(style) {
    double x0 = std::numeric_limits<double>::infinity(), y0 = x0;
    double x1 = -x0, y1 = -x0;
    for (const auto& p : pts) {
      x0 = std::min(x0, p.x);
      x1 = std::max(x1, p.x);
      y0 = std::min(y0, p.y);
      y1 = std::max(y1, p.y);
    }
    const double span = std::max({x1 - x0, y1 - y0, 1e-12});
    k_ = (style.size - 2.0 * style.margin) / span;
    cx_ = 0.5 * (x0 + x1);
    cy_ = 0.5 * (y0 + y1);
  }

  Point2 map(const Point2& p) const {
    return {0.5 * style_.size + k_ * (p.x - cx_), 0.5 * style_.size - k_ * (p.y - cy_)};
  }
  double pixels_per_unit() const { return k_; }

 private:
  SvgStyle style_;
  double k_ = 1.0;
  double cx_ = 0.0;
  double cy_ = 0.0;
};

std::string header(const SvgStyle& s) {
  return fmt::format(
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{0:.0f}\" height=\"{0:.0f}\" "
      "viewBox=\"0 0 {0:.0f} {0:.0f}\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
      s.size);
}

// Points already in canvas coordinates.
std::string path(const std::vector<Point2>& pts, bool closed, const SvgStyle& s) {
  std::string d;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    d += fmt::format("{}{:.3f} {:.3f}", i == 0 ? "M" : " L", pts[i].x, pts[i].y);
  }
  if (closed) d += " Z";
  return fmt::format("<path d=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"{:.3f}\" "
                     "stroke-linecap=\"round\" stroke-linejoin=\"round\"/>\n",
                     d, s.stroke);
}

// Catmull-Rom spline through the points, as cubic Beziers.
std::string smooth_path(const std::vector<Point2>& pts, const SvgStyle& s) {
  const int m = static_cast<int>(pts.size());
  std::string d = fmt::format("M{:.3f} {:.3f}", pts[0].x, pts[0].y);
  for (int i = 0; i + 1 < m; ++i) {
    const Point2& p0 = pts[std::max(i - 1, 0)];
    const Point2& p1 = pts[i];
    const Point2& p2 = pts[i + 1];
    const Point2& p3 = pts[std::min(i + 2, m - 1)];
    const Point2 c1 = p1 + (p2 - p0) * (1.0 / 6.0);
    const Point2 c2 = p2 - (p3 - p1) * (1.0 / 6.0);
    d += fmt::format(" C{:.3f} {:.3f} {:.3f} {:.3f} {:.3f} {:.3f}", c1.x, c1.y, c2.x, c2.y, p2.x, p2.y);
  }
  return fmt::format("<path d=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"{:.3f}\" "
                     "stroke-linecap=\"round\" stroke-linejoin=\"round\"/>\n",
                     d, s.stroke);
}

Point2 toward(const Point2& from, const Point2& to, double dist) {
  const Vec2 v = to - from;
  const double len = norm(v);
  if (len == 0.0) return from;
  return from + v * (std::min(dist, 0.45 * len) / len);
}

// Dense linear solve with partial pivoting; a is n×n row-major.
std::vector<double> solve_dense(std::vector<double> a, std::vector<double> b) {
  const int n = static_cast<int>(b.size());
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
    if (piv != col) {
      for (int c = 0; c < n; ++c) std::swap(a[col * n + c], a[piv * n + c]);
      std::swap(b[col], b[piv]);
    }
    const double p = a[col * n + col];
    for (int r = col + 1; r < n; ++r) {
      const double f = a[r * n + col] / p;
      if (f == 0.0) continue;
      for (int c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(static_cast<std::size_t>(n));
  for (int r = n - 1; r >= 0; --r) {
    double s = b[r];
    for (int c = r + 1; c < n; ++c) s -= a[r * n + c] * x[c];
    x[r] = s / a[r * n + r];
  }
  return x;
}

std::vector<Point2> unit_circle(int samples) {
  std::vector<Point2> pts;
  for (int i = 0; i < samples; ++i) {
    const double a = kTwoPi * i / samples;
    pts.push_back({std::cos(a), std::sin(a)});
  }
  return pts;
}

}  // namespace

std::string render_svg(const FourierLoop& loop, const SvgStyle& style) {
  const int samples = std::max(16, style.samples);
  std::vector<Point2> outline;
  for (int i = 0; i < samples; ++i) outline.push_back(project(loop.eval(kTwoPi * i / samples)));
  const Canvas canvas(outline, style);
  std::string svg = header(style);

  const auto points = find_double_points(loop, default_grid(loop), 1e-10).points;
  const Extraction ex = extract_diagram(loop, points);
  std::vector<double> cuts;  // parameters of undercrossings, increasing
  std::vector<double> half;  // parameter half-width of each break
  const auto& passages = ex.diagram.passages();
  const int n = static_cast<int>(passages.size());
  for (int p = 0; p < n; ++p) {
    if (passages[p].over) continue;
    const double u = ex.passage_u[p];
    const double speed = norm(project(loop.derivative(u, 1))) * canvas.pixels_per_unit();
    // Stay well inside the neighbouring passages.
    const double room = 0.25 * std::min(wrap_angle(ex.passage_u[(p + 1) % n] - u), wrap_angle(u - ex.passage_u[(p - 1 + n) % n]));
    cuts.push_back(u);
    half.push_back(std::min(style.gap / std::max(speed, 1e-12), room > 0.0 ? room : kTwoPi));
  }

  if (cuts.empty()) {
    std::vector<Point2> pts;
    for (const auto& p : outline) pts.push_back(canvas.map(p));
    svg += path(pts, true, style);
  } else {
    const int m = static_cast<int>(cuts.size());
    for (int k = 0; k < m; ++k) {
      const double a = cuts[k] + half[k];
      double b = cuts[(k + 1) % m] - half[(k + 1) % m];
      if (k + 1 >= m) b += kTwoPi;
      const int steps = std::max(2, static_cast<int>(std::ceil((b - a) / kTwoPi * samples)));
      std::vector<Point2> pts;
      for (int i = 0; i <= steps; ++i) pts.push_back(canvas.map(project(loop.eval(a + (b - a) * i / steps))));
      svg += path(pts, false, style);
    }
  }
  svg += "</svg>\n";
  return svg;
}

std::string render_svg(const Diagram& d, const SvgStyle& style) {
  const int c = d.crossing_count();
  std::string svg;
  if (c == 0) {
    const auto circle = unit_circle(std::max(16, style.samples / 4));
    const Canvas canvas(circle, style);
    std::vector<Point2> pts;
    for (const auto& p : circle) pts.push_back(canvas.map(p));
    return header(style) + path(pts, true, style) + "</svg>\n";
  }

  // Vertices: crossings, two points inside every segment, one per face.
  const int n = d.segment_count();
  const auto& faces = d.faces();
  const int nf = static_cast<int>(faces.size());
  auto sub = [c](int s, int k) { return c + 2 * s + k; };
  auto centre = [c, n](int f) { return c + 2 * n + f; };
  const int nv = c + 2 * n + nf;
  auto crossing_at = [&d, n](int p) { return d.passages()[((p % n) + n) % n].crossing; };

  std::vector<std::vector<int>> boundary(static_cast<std::size_t>(nf));
  for (int f = 0; f < nf; ++f) {
    for (int dart : faces[f].darts) {
      const int s = dart / 2;
      if (dart % 2 == 0) {
        boundary[f].insert(boundary[f].end(), {crossing_at(s), sub(s, 0), sub(s, 1)});
      } else {
        boundary[f].insert(boundary[f].end(), {crossing_at(s + 1), sub(s, 1), sub(s, 0)});
      }
    }
  }
  // The largest face goes outside.  Its boundary is tied to a ring of fixed
  // anchors, so crossings on it still sit inside the drawing.
  int outer = 0;
  for (int f = 1; f < nf; ++f)
    if (boundary[f].size() > boundary[outer].size()) outer = f;
  const int ring = static_cast<int>(boundary[outer].size());
  const int total = nv + ring;

  std::vector<std::vector<int>> adj(static_cast<std::size_t>(total));
  auto link = [&adj](int a, int b) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  };
  for (int s = 0; s < n; ++s) {
    link(crossing_at(s), sub(s, 0));
    link(sub(s, 0), sub(s, 1));
    link(sub(s, 1), crossing_at(s + 1));
  }
  for (int f = 0; f < nf; ++f) {
    if (f == outer) continue;
    for (int v : boundary[f]) link(centre(f), v);
  }
  std::vector<Point2> pos(static_cast<std::size_t>(total));
  std::vector<int> fixed(static_cast<std::size_t>(total), 0);
  for (int k = 0; k < ring; ++k) {
    // The outer face lies on the left of its darts, so its boundary runs clockwise.
    const double a = -kTwoPi * k / ring;
    pos[nv + k] = {std::cos(a), std::sin(a)};
    fixed[nv + k] = 1;
    link(nv + k, boundary[outer][k]);
  }
  fixed[centre(outer)] = 1;  // isolated; never drawn
  std::vector<int> index(static_cast<std::size_t>(total), -1);
  int free_count = 0;
  for (int v = 0; v < total; ++v)
    if (!fixed[v]) index[v] = free_count++;
  if (free_count > 0) {
    std::vector<double> a(static_cast<std::size_t>(free_count) * free_count, 0.0);
    std::vector<double> bx(static_cast<std::size_t>(free_count), 0.0);
    std::vector<double> by(static_cast<std::size_t>(free_count), 0.0);
    for (int v = 0; v < total; ++v) {
      const int i = index[v];
      if (i < 0) continue;
      for (int w : adj[v]) {
        a[i * free_count + i] += 1.0;
        if (index[w] >= 0) {
          a[i * free_count + index[w]] -= 1.0;
        } else {
          bx[i] += pos[w].x;
          by[i] += pos[w].y;
        }
      }
    }
    const auto x = solve_dense(a, bx);
    const auto y = solve_dense(a, by);
    for (int v = 0; v < total; ++v)
      if (index[v] >= 0) pos[v] = {x[index[v]], y[index[v]]};
  }

  std::vector<Point2> drawn(pos.begin(), pos.begin() + c + 2 * n);
  const Canvas canvas(drawn, style);
  svg = header(style);
  int first_under = 0;
  while (d.passages()[first_under].over) ++first_under;
  for (int k = 0; k < n;) {
    // One arc: from an under passage through over passages to the next under passage.
    const int start = first_under + k;
    std::vector<Point2> pts{canvas.map(pos[crossing_at(start)])};
    int p = start;
    do {
      pts.push_back(canvas.map(pos[sub(p % n, 0)]));
      pts.push_back(canvas.map(pos[sub(p % n, 1)]));
      ++p;
      pts.push_back(canvas.map(pos[crossing_at(p)]));
    } while (d.passages()[p % n].over);
    pts.front() = toward(pts[0], pts[1], style.gap);
    pts.back() = toward(pts[pts.size() - 1], pts[pts.size() - 2], style.gap);
    svg += smooth_path(pts, style);
    k += p - start;
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace knotrace
