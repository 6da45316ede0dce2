#include "local_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "knotrace/detail/numeric.hpp"

namespace knotrace::detail {

namespace {

constexpr int kMaxIter = 50;
constexpr double kMaxStep = 0.1;

double clamp_step(double s) { return std::clamp(s, -kMaxStep, kMaxStep); }

}  // namespace

double circle_mid(double a, double b) { return wrap_angle(a + 0.5 * std::remainder(b - a, kTwoPi)); }

std::optional<double> speed_minimum(const FourierLoop& loop, double u, double reach) {
  const double start = u;
  for (int it = 0; it < kMaxIter; ++it) {
    const LoopJet j = loop.jet(u);
    const Vec2 v1 = project(j.d1);
    const Vec2 v2 = project(j.d2);
    const Vec2 v3 = project(j.d3);
    const double h = dot(v1, v2);
    const double dh = dot(v2, v2) + dot(v1, v3);
    if (!(dh > 0.0)) return std::nullopt;
    const double step = clamp_step(-h / dh);
    u += step;
    if (std::abs(u - start) > reach) return std::nullopt;
    if (std::abs(step) < 1e-14) break;
  }
  return wrap_angle(u);
}

double cusp_margin(const FourierLoop& loop, double u) {
  const Vec2 v = project(loop.derivative(u, 1));
  const Vec2 a = project(loop.derivative(u, 2));
  const double na = norm(a);
  if (na == 0.0) return norm(v);
  return cross(a, v) / na;
}

std::vector<SpeedMinimum> speed_minima(const FourierLoop& loop, int m) {
  std::vector<double> val(static_cast<std::size_t>(m));
  auto at = [m](int i) { return kTwoPi * static_cast<double>(i) / static_cast<double>(m); };
  for (int i = 0; i < m; ++i) {
    const Vec2 v = project(loop.derivative(at(i), 1));
    val[i] = dot(v, v);
  }
  auto slope = [&loop](double u) {
    const LoopJet j = loop.jet(u);
    const Vec2 v1 = project(j.d1);
    const Vec2 v2 = project(j.d2);
    const Vec2 v3 = project(j.d3);
    return std::pair<double, double>{dot(v1, v2), dot(v2, v2) + dot(v1, v3)};
  };
  std::vector<SpeedMinimum> out;
  for (int i = 0; i < m; ++i) {
    if (!(val[i] <= val[(i + m - 1) % m] && val[i] < val[(i + 1) % m])) continue;
    double u = at(i);
    const double a = at(i - 1);
    const double b = at(i + 1);
    if (slope(a).first < 0.0 && slope(b).first > 0.0) u = bracketed_newton(slope, a, b, 1e-14);
    u = wrap_angle(u);
    out.push_back({u, cusp_margin(loop, u)});
  }
  return out;
}

std::optional<UPair> double_point(const FourierLoop& loop, double u1, double u2, double reach) {
  const double s1 = u1;
  const double s2 = u2;
  const double tol = 1e-12 * std::max(1.0, loop.scale());
  for (int it = 0; it < kMaxIter; ++it) {
    const Vec2 f = project(loop.eval(u1)) - project(loop.eval(u2));
    const Vec2 t1 = project(loop.derivative(u1, 1));
    const Vec2 t2 = project(loop.derivative(u2, 1));
    const auto step = solve2(t1.x, -t2.x, t1.y, -t2.y, -f.x, -f.y);
    if (!step) return std::nullopt;
    const double a = clamp_step((*step)[0]);
    const double b = clamp_step((*step)[1]);
    u1 += a;
    u2 += b;
    if (std::abs(u1 - s1) > reach || std::abs(u2 - s2) > reach) return std::nullopt;
    if (std::abs(a) + std::abs(b) < 1e-14) break;
  }
  if (norm(project(loop.eval(u1)) - project(loop.eval(u2))) > tol) return std::nullopt;
  if (circle_distance(u1, u2) < 1e-6) return std::nullopt;
  return UPair{wrap_angle(u1), wrap_angle(u2)};
}

namespace {

struct FacingResidual {
  double h1, h2;
  double j11, j12, j21, j22;
};

FacingResidual facing_residual(const FourierLoop& loop, double u1, double u2) {
  const LoopJet a = loop.jet(u1);
  const LoopJet b = loop.jet(u2);
  const Vec2 t1 = project(a.d1);
  const Vec2 t2 = project(b.d1);
  const Vec2 a1 = project(a.d2);
  const Vec2 a2 = project(b.d2);
  const Vec2 d = project(b.f) - project(a.f);
  return {cross(t1, t2), dot(d, t1), cross(a1, t2), cross(t1, a2), -dot(t1, t1) + dot(d, a1), dot(t2, t1)};
}

}  // namespace

std::optional<UPair> facing_pair(const FourierLoop& loop, double u1, double u2, double reach) {
  const double s1 = u1;
  const double s2 = u2;
  for (int it = 0; it < kMaxIter; ++it) {
    const FacingResidual r = facing_residual(loop, u1, u2);
    const auto step = solve2(r.j11, r.j12, r.j21, r.j22, -r.h1, -r.h2);
    if (!step) return std::nullopt;
    const double a = clamp_step((*step)[0]);
    const double b = clamp_step((*step)[1]);
    u1 += a;
    u2 += b;
    if (std::abs(u1 - s1) > reach || std::abs(u2 - s2) > reach) return std::nullopt;
    if (std::abs(a) + std::abs(b) < 1e-14) break;
  }
  const FacingResidual r = facing_residual(loop, u1, u2);
  const double t1 = norm(project(loop.derivative(u1, 1)));
  const double t2 = norm(project(loop.derivative(u2, 1)));
  if (std::abs(r.h1) > 1e-9 * t1 * t2 || std::abs(r.h2) > 1e-9 * t1 * std::max(1.0, loop.scale())) return std::nullopt;
  if (circle_distance(u1, u2) < 1e-6) return std::nullopt;
  return UPair{wrap_angle(u1), wrap_angle(u2)};
}

double facing_gap(const FourierLoop& loop, const UPair& p) {
  const Vec2 t1 = project(loop.derivative(p.u1, 1));
  const Vec2 n1 = Vec2{-t1.y, t1.x} * (1.0 / norm(t1));
  return dot(project(loop.eval(p.u2)) - project(loop.eval(p.u1)), n1);
}

std::vector<UPair> facing_pairs(const FourierLoop& loop, int m) {
  const double h = kTwoPi / m;
  std::vector<Point2> p(static_cast<std::size_t>(m));
  std::vector<Vec2> t(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    p[i] = project(loop.eval(i * h));
    t[i] = project(loop.derivative(i * h, 1));
  }
  auto residual = [&](int i, int j) {
    i %= m;
    j %= m;
    return Vec2{cross(t[i], t[j]), dot(p[j] - p[i], t[i])};
  };
  std::vector<UPair> out;
  for (int i = 0; i < m; ++i) {
    for (int j = i + 2; j < m + i - 2; ++j) {
      if (j >= m) break;
      const Vec2 c[4] = {residual(i, j), residual(i + 1, j), residual(i, j + 1), residual(i + 1, j + 1)};
      bool straddles = true;
      for (int comp = 0; comp < 2 && straddles; ++comp) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (const Vec2& v : c) {
          lo = std::min(lo, comp == 0 ? v.x : v.y);
          hi = std::max(hi, comp == 0 ? v.x : v.y);
        }
        straddles = lo <= 0.0 && hi >= 0.0;
      }
      if (!straddles) continue;
      const auto r = facing_pair(loop, (i + 0.5) * h, (j + 0.5) * h, 2.0 * h);
      if (!r) continue;
      const bool seen = std::any_of(out.begin(), out.end(), [&](const UPair& q) {
        return (circle_distance(q.u1, r->u1) < 1e-7 && circle_distance(q.u2, r->u2) < 1e-7) ||
               (circle_distance(q.u1, r->u2) < 1e-7 && circle_distance(q.u2, r->u1) < 1e-7);
      });
      if (!seen) out.push_back(*r);
    }
  }
  return out;
}

std::optional<double> closest_point(const FourierLoop& loop, Point2 x, double u, double reach) {
  const double start = u;
  for (int it = 0; it < kMaxIter; ++it) {
    const LoopJet j = loop.jet(u);
    const Vec2 d = project(j.f) - x;
    const Vec2 t = project(j.d1);
    const double q = dot(d, t);
    const double dq = dot(t, t) + dot(d, project(j.d2));
    if (!(dq > 0.0)) return std::nullopt;
    const double step = clamp_step(-q / dq);
    u += step;
    if (std::abs(u - start) > reach) return std::nullopt;
    if (std::abs(step) < 1e-14) break;
  }
  return wrap_angle(u);
}

std::optional<TriangleProbe> triangle_probe(const FourierLoop& loop, double ua, double ub, double uc, double reach) {
  const auto x = double_point(loop, ua, ub, reach);
  if (!x) return std::nullopt;
  const Point2 where = project(loop.eval(x->u1));
  const auto c = closest_point(loop, where, uc, reach);
  if (!c) return std::nullopt;
  // Slid onto the vertex's own strands: not a triangle any more.
  if (circle_distance(*c, x->u1) < 1e-3 || circle_distance(*c, x->u2) < 1e-3) return std::nullopt;
  const Vec2 t = project(loop.derivative(*c, 1));
  const double d = cross(t, where - project(loop.eval(*c))) / norm(t);
  return TriangleProbe{x->u1, x->u2, *c, d};
}

std::vector<Triangle> crossing_triangles(const std::vector<DoublePoint>& points) {
  const int c = static_cast<int>(points.size());
  if (c < 3) return {};
  struct Visit {
    double u;
    int crossing;
  };
  std::vector<Visit> visits;
  for (int k = 0; k < c; ++k) {
    visits.push_back({points[k].u1, k});
    visits.push_back({points[k].u2, k});
  }
  std::sort(visits.begin(), visits.end(), [](const Visit& a, const Visit& b) { return a.u < b.u; });
  const int n = static_cast<int>(visits.size());
  // Shortest segment joining each ordered pair of crossings: its midpoint
  // parameter and the visits it starts and ends at.
  struct Side {
    double len = std::numeric_limits<double>::infinity();
    double mid = 0.0;
    int from = -1;
    int to = -1;
  };
  std::vector<Side> side(static_cast<std::size_t>(c * c));
  for (int i = 0; i < n; ++i) {
    const int j = (i + 1) % n;
    const int a = visits[i].crossing;
    const int b = visits[j].crossing;
    if (a == b) continue;
    const double l = j > i ? visits[j].u - visits[i].u : visits[j].u + kTwoPi - visits[i].u;
    const double mid = wrap_angle(visits[i].u + 0.5 * l);
    if (l < side[a * c + b].len) side[a * c + b] = {l, mid, i, j};
    if (l < side[b * c + a].len) side[b * c + a] = {l, mid, j, i};
  }
  auto joined = [&](int a, int b) { return side[a * c + b].from >= 0; };
  std::vector<Triangle> out;
  for (int a = 0; a < c; ++a) {
    for (int b = a + 1; b < c; ++b) {
      if (!joined(a, b)) continue;
      for (int d = b + 1; d < c; ++d) {
        if (!joined(a, d) || !joined(b, d)) continue;
        const Side& ab = side[a * c + b];
        const Side& bd = side[b * c + d];
        const Side& ad = side[a * c + d];
        // At every corner the two sides must leave along different strands.
        if (ab.from == ad.from || ab.to == bd.from || bd.to == ad.to) continue;
        out.push_back({{a, b, d}, points[a].u1, points[a].u2, bd.mid});
      }
    }
  }
  return out;
}

}  // namespace knotrace::detail
