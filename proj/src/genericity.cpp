#include "knotrace/genericity.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "knotrace/detail/numeric.hpp"

namespace knotrace {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double grid_u(int i, int m) { return kTwoPi * static_cast<double>(i) / static_cast<double>(m); }

// Minimum of a speed |v(u)|.  `speed.norm2(u)` gives |v|², `speed.slope(u)`
// gives v·v' and its derivative.  Each discrete local minimum on the grid is
// polished by Newton on v·v'.
template <class Speed>
void speed_minima(int m, Speed&& speed, double threshold, double& margin, double& worst,
                  std::vector<double>* offenders) {
  std::vector<double> val(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) val[i] = speed.norm2(grid_u(i, m));
  margin = kInf;
  worst = 0.0;
  for (int i = 0; i < m; ++i) {
    const double here = val[i];
    const double prev = val[(i + m - 1) % m];
    const double next = val[(i + 1) % m];
    if (!(here <= prev && here <= next)) continue;
    double u = grid_u(i, m);
    double best = here;
    const double a = grid_u(i - 1, m);
    const double b = grid_u(i + 1, m);
    const double ga = speed.slope(a).first;
    const double gb = speed.slope(b).first;
    if (ga < 0.0 && gb > 0.0) {
      const double r = detail::bracketed_newton([&](double x) { return speed.slope(x); }, a, b, 1e-14);
      const double v = speed.norm2(r);
      if (v < best) {
        best = v;
        u = r;
      }
    }
    best = std::sqrt(std::max(best, 0.0));
    if (best < margin) {
      margin = best;
      worst = wrap_angle(u);
    }
    if (offenders && best < threshold) offenders->push_back(wrap_angle(u));
  }
  if (offenders) {
    std::sort(offenders->begin(), offenders->end());
    offenders->erase(std::unique(offenders->begin(), offenders->end(),
                                 [m](double x, double y) { return circle_distance(x, y) < kTwoPi / m; }),
                     offenders->end());
  }
}

struct ProjectedSpeed {
  const FourierLoop& loop;
  double norm2(double u) const {
    const Vec2 v = project(loop.derivative(u, 1));
    return dot(v, v);
  }
  std::pair<double, double> slope(double u) const {
    const LoopJet j = loop.jet(u);
    const Vec2 v1 = project(j.d1);
    const Vec2 v2 = project(j.d2);
    const Vec2 v3 = project(j.d3);
    return {dot(v1, v2), dot(v2, v2) + dot(v1, v3)};
  }
};

struct SpatialSpeed {
  const FourierLoop& loop;
  double norm2(double u) const {
    const Vec3 v = loop.derivative(u, 1);
    return dot(v, v);
  }
  std::pair<double, double> slope(double u) const {
    const LoopJet j = loop.jet(u);
    return {dot(j.d1, j.d2), dot(j.d2, j.d2) + dot(j.d1, j.d3)};
  }
};

// Residual (f(u1) - f(u2)) / (2 sin((u2-u1)/2)) and its Jacobian columns.
struct ChordResidual {
  Vec3 r;
  Vec3 j1;
  Vec3 j2;
};

ChordResidual chord_residual(const FourierLoop& loop, double u1, double u2) {
  const double half = 0.5 * (u2 - u1);
  const double s = 2.0 * std::sin(half);
  const double c = std::cos(half);
  ChordResidual out;
  out.r = (loop.eval(u1) - loop.eval(u2)) * (1.0 / s);
  out.j1 = loop.derivative(u1, 1) * (1.0 / s) + out.r * (c / s);
  out.j2 = loop.derivative(u2, 1) * (-1.0 / s) - out.r * (c / s);
  return out;
}

// Levenberg-Marquardt on |chord_residual|² starting from (u1, u1 + d).
// Returns false if the iterate runs into the diagonal.
bool refine_pair(const FourierLoop& loop, double& u1, double& d, double& value) {
  const double diag_guard = 1e-4;
  ChordResidual cur = chord_residual(loop, u1, u1 + d);
  double cost = dot(cur.r, cur.r);
  double lambda = 1e-3;
  for (int it = 0; it < 60; ++it) {
    // J = [j1, j2] in (u1, u2); reparametrise to (u1, d): u2 = u1 + d.
    const Vec3 a = cur.j1 + cur.j2;  // ∂/∂u1 at fixed d
    const Vec3 b = cur.j2;           // ∂/∂d
    const double aa = dot(a, a);
    const double ab = dot(a, b);
    const double bb = dot(b, b);
    const double ga = dot(a, cur.r);
    const double gb = dot(b, cur.r);
    bool improved = false;
    for (int tries = 0; tries < 12 && !improved; ++tries) {
      const auto step = detail::solve2(aa * (1 + lambda) + 1e-300, ab, ab, bb * (1 + lambda) + 1e-300, -ga, -gb);
      if (!step) {
        lambda *= 10;
        continue;
      }
      const double nu1 = u1 + (*step)[0];
      const double nd = d + (*step)[1];
      if (nd < diag_guard || nd > kTwoPi - diag_guard) {
        lambda *= 10;
        continue;
      }
      const ChordResidual trial = chord_residual(loop, nu1, nu1 + nd);
      const double tcost = dot(trial.r, trial.r);
      if (tcost < cost) {
        const double change = std::abs((*step)[0]) + std::abs((*step)[1]);
        u1 = nu1;
        d = nd;
        cur = trial;
        const double old = cost;
        cost = tcost;
        lambda = std::max(lambda * 0.1, 1e-12);
        improved = true;
        if (change < 1e-14 || old - tcost < 1e-30) it = 1000;
      } else {
        lambda *= 10;
      }
    }
    if (!improved) break;
  }
  value = std::sqrt(cost);
  return d >= diag_guard && d <= kTwoPi - diag_guard;
}

}  // namespace

int default_grid(const FourierLoop& loop) { return std::max(256, 8 * loop.degree()); }

int effective_grid(const FourierLoop& loop, const GenericityConfig& config) {
  if (config.grid <= 0) return default_grid(loop);
  return config.grid;
}

EmbeddingCheck check_embedded(const FourierLoop& loop, int grid, double threshold) {
  if (grid < 4 * loop.degree() || grid < 8) {
    throw Error(ErrorCode::InvalidArgument, fmt::format("grid {} is below 4N = {}", grid, 4 * loop.degree()));
  }
  const int m = grid;
  const int half = m / 2;
  std::vector<Point3> pts(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) pts[i] = loop.eval(grid_u(i, m));
  std::vector<double> chords(static_cast<std::size_t>(half + 1));
  for (int d = 1; d <= half; ++d) chords[d] = chord(0.0, grid_u(d, m));

  // ratio(i, d) for d in [1, half].
  auto ratio = [&](int i, int d) {
    const int j = (i + d) % m;
    return norm(pts[i] - pts[j]) / chords[d];
  };
  std::vector<double> table(static_cast<std::size_t>(m) * (half + 1), kInf);
  for (int i = 0; i < m; ++i)
    for (int d = 1; d <= half; ++d) table[static_cast<std::size_t>(i) * (half + 1) + d] = ratio(i, d);
  auto at = [&](int i, int d) { return table[static_cast<std::size_t>((i % m + m) % m) * (half + 1) + d]; };

  struct Candidate {
    double value;
    int i;
    int d;
  };
  std::vector<Candidate> minima;
  for (int i = 0; i < m; ++i) {
    for (int d = 1; d <= half; ++d) {
      const double v = at(i, d);
      bool is_min = true;
      for (int di = -1; di <= 1 && is_min; ++di) {
        for (int dd = -1; dd <= 1; ++dd) {
          if (di == 0 && dd == 0) continue;
          const int nd = d + dd;
          if (nd < 1 || nd > half) continue;
          if (at(i + di, nd) < v) {
            is_min = false;
            break;
          }
        }
      }
      if (is_min) minima.push_back({v, i, d});
    }
  }
  std::sort(minima.begin(), minima.end(), [](const Candidate& a, const Candidate& b) { return a.value < b.value; });

  EmbeddingCheck out{kInf, {0.0, 0.0, kInf}, {}};
  std::size_t refined = 0;
  for (const auto& c : minima) {
    if (refined >= 32 && c.value > 10.0 * threshold) break;
    if (refined >= 256) break;
    ++refined;
    double u1 = grid_u(c.i, m);
    double d = grid_u(c.d, m);
    double value = c.value;
    const bool off_diagonal = refine_pair(loop, u1, d, value);
    if (!off_diagonal) value = std::min(value, c.value);
    ParameterPair p{wrap_angle(u1), wrap_angle(u1 + d), value};
    if (p.u1 > p.u2) std::swap(p.u1, p.u2);
    if (value < out.margin) {
      out.margin = value;
      out.worst = p;
    }
    if (off_diagonal && value < threshold) {
      const bool seen = std::any_of(out.offenders.begin(), out.offenders.end(), [&](const ParameterPair& q) {
        return circle_distance(q.u1, p.u1) < 2 * kTwoPi / m && circle_distance(q.u2, p.u2) < 2 * kTwoPi / m;
      });
      if (!seen) out.offenders.push_back(p);
    }
  }

  // On the diagonal the ratio tends to |f'|.
  double speed_margin = kInf;
  double speed_u = 0.0;
  std::vector<double> stalls;
  speed_minima(m, SpatialSpeed{loop}, threshold, speed_margin, speed_u, &stalls);
  if (speed_margin < out.margin) {
    out.margin = speed_margin;
    out.worst = {speed_u, speed_u, speed_margin};
  }
  for (double u : stalls) out.offenders.push_back({u, u, norm(loop.derivative(u, 1))});
  std::sort(out.offenders.begin(), out.offenders.end(),
            [](const ParameterPair& a, const ParameterPair& b) { return a.u1 < b.u1; });
  return out;
}

ImmersionCheck check_immersion(const FourierLoop& loop, int grid, double threshold) {
  if (grid < 4 * loop.degree() || grid < 8) {
    throw Error(ErrorCode::InvalidArgument, fmt::format("grid {} is below 4N = {}", grid, 4 * loop.degree()));
  }
  ImmersionCheck out{kInf, 0.0, {}};
  speed_minima(grid, ProjectedSpeed{loop}, threshold, out.margin, out.worst_u, &out.offenders);
  return out;
}

namespace {

struct DividedDifference {
  Vec2 g;
  Vec2 j1;
  Vec2 j2;
  Vec2 f_diff;  // p f(u1) - p f(u2)
};

// G(u1, u2) = (p f(u1) - p f(u2)) / (2 sin((u2-u1)/2)), continued onto the
// diagonal by its limits.
DividedDifference divided_difference(const FourierLoop& loop, double u1, double u2) {
  const double half = 0.5 * (u2 - u1);
  const double s = 2.0 * std::sin(half);
  const double c = std::cos(half);
  const LoopJet a = loop.jet(u1);
  const LoopJet b = loop.jet(u2);
  DividedDifference out;
  out.f_diff = project(a.f) - project(b.f);
  if (std::abs(s) < 1e-7) {
    // First-order expansion in the offset e from the nearest multiple of 2π;
    // accurate enough to steer Newton off the diagonal.
    const double h = std::remainder(u2 - u1, kTwoPi);
    const double sign = c >= 0.0 ? -1.0 : 1.0;
    const Vec2 v = project(a.d1);
    const Vec2 acc = project(a.d2);
    out.g = (v + acc * (0.5 * h)) * sign;
    out.j1 = acc * (0.5 * sign);
    out.j2 = acc * (0.5 * sign);
    return out;
  }
  out.g = out.f_diff * (1.0 / s);
  out.j1 = project(a.d1) * (1.0 / s) + out.g * (c / s);
  out.j2 = project(b.d1) * (-1.0 / s) - out.g * (c / s);
  return out;
}

enum class CellTest { None, Relaxed, Strict };

CellTest classify_cell(const Vec2 (&corner)[4]) {
  bool strict = true;
  bool relaxed = true;
  for (int comp = 0; comp < 2; ++comp) {
    double lo = kInf;
    double hi = -kInf;
    for (const auto& v : corner) {
      const double x = comp == 0 ? v.x : v.y;
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    if (!(lo <= 0.0 && hi >= 0.0)) strict = false;
    const double w = hi - lo;
    if (!(lo - w <= 0.0 && hi + w >= 0.0)) relaxed = false;
  }
  if (strict) return CellTest::Strict;
  if (relaxed) return CellTest::Relaxed;
  return CellTest::None;
}

struct NewtonResult {
  bool converged;
  double u1;
  double u2;
};

// Close pairs must also have a small divided difference, or a slow stretch
// of curve passes for a crossing with itself.
bool converged(const DividedDifference& dd, double u1, double u2, double tol) {
  const double chord = std::min(1.0, std::abs(2.0 * std::sin(0.5 * (u2 - u1))));
  return norm(dd.f_diff) < tol * chord;
}

NewtonResult newton_double_point(const FourierLoop& loop, double u1, double u2, double max_step, double tol) {
  for (int it = 0; it < 60; ++it) {
    const DividedDifference dd = divided_difference(loop, u1, u2);
    if (converged(dd, u1, u2, tol) && it > 0) return {true, u1, u2};
    const auto step = detail::solve2(dd.j1.x, dd.j2.x, dd.j1.y, dd.j2.y, -dd.g.x, -dd.g.y);
    if (!step) return {false, u1, u2};
    double s1 = (*step)[0];
    double s2 = (*step)[1];
    const double len = std::hypot(s1, s2);
    if (len > max_step) {
      s1 *= max_step / len;
      s2 *= max_step / len;
    }
    u1 += s1;
    u2 += s2;
    if (len < 1e-15) break;
  }
  const DividedDifference dd = divided_difference(loop, u1, u2);
  return {converged(dd, u1, u2, tol), u1, u2};
}

// True if zeros of G are excluded from the square [a, a+w] × [b, b+w].  A
// square is cleared when |G(centre)| exceeds twice the Jacobian norm times
// its radius, or, once small enough for G to be nearly affine, when its
// corner values no longer straddle zero in both components.  Otherwise it is
// split, down to kMaxLevel.
bool root_free(const FourierLoop& loop, double a, double b, double w, int level = 0) {
  constexpr int kMaxLevel = 10;
  constexpr int kAffineLevel = 3;
  const DividedDifference dd = divided_difference(loop, a + 0.5 * w, b + 0.5 * w);
  const double lip = norm(dd.j1) + norm(dd.j2);
  if (norm(dd.g) > 2.0 * lip * (0.5 * w * std::sqrt(2.0))) return true;
  if (level >= kAffineLevel) {
    const Vec2 corner[4] = {divided_difference(loop, a, b).g, divided_difference(loop, a + w, b).g,
                            divided_difference(loop, a, b + w).g, divided_difference(loop, a + w, b + w).g};
    if (classify_cell(corner) != CellTest::Strict) return true;
  }
  if (level == kMaxLevel) return false;
  const double hw = 0.5 * w;
  return root_free(loop, a, b, hw, level + 1) && root_free(loop, a + hw, b, hw, level + 1) &&
         root_free(loop, a, b + hw, hw, level + 1) && root_free(loop, a + hw, b + hw, hw, level + 1);
}

}  // namespace

DoublePointSearch find_double_points(const FourierLoop& loop, int grid, double newton_tol) {
  if (grid < 4 * loop.degree() || grid < 8) {
    throw Error(ErrorCode::InvalidArgument, fmt::format("grid {} is below 4N = {}", grid, 4 * loop.degree()));
  }
  const int m = grid;
  const double h = kTwoPi / m;
  std::vector<Point2> pp(static_cast<std::size_t>(m) + 1);
  std::vector<Vec2> pv(static_cast<std::size_t>(m) + 1);
  for (int i = 0; i <= m; ++i) {
    const double u = grid_u(i, m);
    pp[i] = project(loop.eval(u));
    pv[i] = project(loop.derivative(u, 1));
  }
  pp[m] = pp[0];
  pv[m] = pv[0];
  const std::size_t stride = static_cast<std::size_t>(m) + 1;
  std::vector<Vec2> g(stride * stride);
  for (int i = 0; i <= m; ++i) {
    for (int j = i; j <= m; ++j) {
      Vec2 v;
      if (j == i) {
        v = -pv[i];
      } else if (j - i == m) {
        v = pv[i];
      } else {
        v = (pp[i] - pp[j]) * (1.0 / (2.0 * std::sin(0.5 * h * (j - i))));
      }
      g[i * stride + j] = v;
      g[j * stride + i] = v;  // G is symmetric
    }
  }

  DoublePointSearch out;
  struct Raw {
    double u1;
    double u2;
    double residual;
  };
  std::vector<Raw> roots;

  // A converged root is recorded wherever it lies; a sign-change cell is only
  // suspicious if Newton fails to converge at all.
  enum class Outcome { Found, Elsewhere, Failed };
  auto accept = [&](const NewtonResult& r, double cu1, double cu2, double reach) {
    if (!r.converged) return Outcome::Failed;
    double a = wrap_angle(r.u1);
    double b = wrap_angle(r.u2);
    if (circle_distance(a, b) < 1e-9) return Outcome::Failed;
    if (a > b) std::swap(a, b);
    roots.push_back({a, b, norm(divided_difference(loop, a, b).f_diff)});
    const bool near = std::abs(r.u1 - cu1) <= reach && std::abs(r.u2 - cu2) <= reach;
    return near ? Outcome::Found : Outcome::Elsewhere;
  };

  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      const Vec2 corner[4] = {g[i * stride + j], g[(i + 1) * stride + j], g[i * stride + j + 1],
                              g[(i + 1) * stride + j + 1]};
      const CellTest test = classify_cell(corner);
      if (test == CellTest::None) continue;
      const double cu1 = (i + 0.5) * h;
      const double cu2 = (j + 0.5) * h;
      const Outcome first = accept(newton_double_point(loop, cu1, cu2, 2.0 * h, newton_tol), cu1, cu2, 1.5 * h);
      if (first != Outcome::Failed || test != CellTest::Strict) continue;
      // Corner signs also straddle zero where G turns quickly without vanishing.
      if (root_free(loop, i * h, j * h, h)) continue;
      // One retry on the four quarter cells.
      bool found = false;
      for (int q = 0; q < 4 && !found; ++q) {
        const double a0 = i * h + (q & 1) * 0.5 * h;
        const double b0 = j * h + (q >> 1) * 0.5 * h;
        const double qh = 0.5 * h;
        const Vec2 sub[4] = {divided_difference(loop, a0, b0).g, divided_difference(loop, a0 + qh, b0).g,
                             divided_difference(loop, a0, b0 + qh).g, divided_difference(loop, a0 + qh, b0 + qh).g};
        if (classify_cell(sub) == CellTest::None) continue;
        const NewtonResult rq = newton_double_point(loop, a0 + 0.5 * qh, b0 + 0.5 * qh, qh, newton_tol);
        found = accept(rq, cu1, cu2, 1.5 * h) != Outcome::Failed;
      }
      if (!found) {
        out.diagnostics.push_back({ErrorCode::NewtonDiverged,
                                   fmt::format("no root found in cell u1=[{:.6f}, {:.6f}] u2=[{:.6f}, {:.6f}]",
                                               i * h, (i + 1) * h, j * h, (j + 1) * h)});
      }
    }
  }

  // Converged roots agree far better than this; distinct crossings near a
  // sharp turn can be much closer than one cell.
  constexpr double kSameRoot = 1e-7;
  std::sort(roots.begin(), roots.end(), [](const Raw& a, const Raw& b) { return a.u1 < b.u1; });
  std::vector<Raw> merged;
  for (const Raw& r : roots) {
    auto same = std::find_if(merged.begin(), merged.end(), [&](const Raw& q) {
      return (circle_distance(q.u1, r.u1) < kSameRoot && circle_distance(q.u2, r.u2) < kSameRoot) ||
             (circle_distance(q.u1, r.u2) < kSameRoot && circle_distance(q.u2, r.u1) < kSameRoot);
    });
    if (same == merged.end()) {
      merged.push_back(r);
    } else if (r.residual < same->residual) {
      *same = r;
    }
  }

  for (const Raw& r : merged) {
    const LoopJet a = loop.jet(r.u1);
    const LoopJet b = loop.jet(r.u2);
    const Vec2 t1 = project(a.d1);
    const Vec2 t2 = project(b.d1);
    DoublePoint dp;
    dp.u1 = r.u1;
    dp.u2 = r.u2;
    dp.location = project(a.f);
    const double denom = norm(t1) * norm(t2);
    dp.transversality = denom > 0.0 ? std::abs(cross(t1, t2)) / denom : 0.0;
    dp.z_gap = a.f.z - b.f.z;
    if (dp.transversality < 1e-6) {
      out.diagnostics.push_back({ErrorCode::Degenerate, fmt::format("tangential double point at u1={:.9f} u2={:.9f}",
                                                                    dp.u1, dp.u2)});
    }
    out.points.push_back(dp);
  }
  std::sort(out.points.begin(), out.points.end(),
            [](const DoublePoint& a, const DoublePoint& b) { return a.u1 < b.u1; });
  return out;
}

TripleCheck check_no_triple(const std::vector<DoublePoint>& points, double threshold) {
  TripleCheck out{kInf, {}};
  const int n = static_cast<int>(points.size());
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      const double d = norm(points[a].location - points[b].location);
      out.margin = std::min(out.margin, d);
      if (d < threshold) parent[find(a)] = find(b);
    }
  }
  std::vector<std::vector<int>> groups(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) groups[find(a)].push_back(a);
  for (auto& grp : groups)
    if (grp.size() > 1) out.clusters.push_back(std::move(grp));
  std::sort(out.clusters.begin(), out.clusters.end());
  return out;
}

GenericityReport validate(const FourierLoop& loop, const GenericityConfig& config) {
  GenericityReport rep;
  rep.scale = loop.scale();
  rep.grid = effective_grid(loop, config);
  rep.embedded_threshold = config.embedded_rel * rep.scale;
  rep.immersion_threshold = config.immersion_rel * rep.scale;
  rep.triple_threshold = config.triple_rel * rep.scale;
  rep.transversality_threshold = config.transversality;

  const EmbeddingCheck emb = check_embedded(loop, rep.grid, rep.embedded_threshold);
  rep.embedded_margin = emb.margin;
  if (!rep.embedded()) {
    rep.diagnostics.push_back({ErrorCode::NotEmbedded, fmt::format("|f(u1) - f(u2)| / chord = {:.3g} at u1={:.9f} u2={:.9f}",
                                                                   emb.worst.value, emb.worst.u1, emb.worst.u2)});
  }
  const ImmersionCheck imm = check_immersion(loop, rep.grid, rep.immersion_threshold);
  rep.immersion_margin = imm.margin;

  DoublePointSearch dps = find_double_points(loop, rep.grid, config.newton_tol);
  rep.double_points = std::move(dps.points);
  for (auto& d : dps.diagnostics) rep.diagnostics.push_back(std::move(d));

  const TripleCheck tri = check_no_triple(rep.double_points, rep.triple_threshold);
  rep.triple_margin = tri.margin;
  rep.triple_clusters = tri.clusters;

  rep.transversality_margin = kInf;
  for (const auto& dp : rep.double_points) rep.transversality_margin = std::min(rep.transversality_margin, dp.transversality);
  return rep;
}

namespace {

const char* verdict(bool ok) { return ok ? "PASS" : "FAIL"; }

}  // namespace

std::string format_report_text(const GenericityReport& r) {
  std::string s;
  s += fmt::format("genericity report (grid {}, curve scale {:.6g}; thresholds are engineering choices)\n", r.grid,
                   r.scale);
  s += fmt::format("  embedded in 3D     {}  margin {:.6g} (threshold {:.3g})\n", verdict(r.embedded()),
                   r.embedded_margin, r.embedded_threshold);
  s += fmt::format("  immersed projection {} margin {:.6g} (threshold {:.3g})\n", verdict(r.immersed()),
                   r.immersion_margin, r.immersion_threshold);
  s += fmt::format("  no triple points   {}  margin {:.6g} (threshold {:.3g})\n", verdict(r.no_triple()),
                   r.triple_margin, r.triple_threshold);
  s += fmt::format("  transverse crossings {} margin {:.6g} (threshold {:.3g})\n", verdict(r.transverse()),
                   r.transversality_margin, r.transversality_threshold);
  s += fmt::format("  crossings={}\n", r.double_points.size());
  for (const auto& dp : r.double_points) {
    s += fmt::format("    u1={:.9f} u2={:.9f} at ({:.6f}, {:.6f}) |sin|={:.4f} z_gap={:.6g}\n", dp.u1, dp.u2,
                     dp.location.x, dp.location.y, dp.transversality, dp.z_gap);
  }
  for (const auto& c : r.triple_clusters) s += fmt::format("  cluster of {} crossings\n", c.size());
  for (const auto& d : r.diagnostics) s += fmt::format("  {}: {}\n", to_string(d.code), d.message);
  s += fmt::format("verdict: {}\n", verdict(r.passed()));
  return s;
}

std::string format_report_kv(const GenericityReport& r) {
  std::string s;
  s += fmt::format("grid={}\n", r.grid);
  s += fmt::format("scale={}\n", r.scale);
  s += fmt::format("embedded_margin={}\n", r.embedded_margin);
  s += fmt::format("immersion_margin={}\n", r.immersion_margin);
  s += fmt::format("triple_margin={}\n", r.triple_margin);
  s += fmt::format("transversality_margin={}\n", r.transversality_margin);
  s += fmt::format("embedded={}\n", verdict(r.embedded()));
  s += fmt::format("immersion={}\n", verdict(r.immersed()));
  s += fmt::format("no_triple={}\n", verdict(r.no_triple()));
  s += fmt::format("transversality={}\n", verdict(r.transverse()));
  s += fmt::format("crossings={}\n", r.double_points.size());
  for (const auto& dp : r.double_points) {
    s += fmt::format("double_point={},{},{},{},{},{}\n", dp.u1, dp.u2, dp.location.x, dp.location.y,
                     dp.transversality, dp.z_gap);
  }
  s += fmt::format("triple_clusters={}\n", r.triple_clusters.size());
  for (const auto& d : r.diagnostics) s += fmt::format("diagnostic={}: {}\n", to_string(d.code), d.message);
  s += "thresholds=engineering\n";
  s += fmt::format("verdict={}\n", verdict(r.passed()));
  return s;
}

FourierLoop perturb_to_generic(const FourierLoop& loop, std::uint64_t seed, double magnitude,
                               const GenericityConfig& config) {
  if (!(magnitude > 0.0)) throw Error(ErrorCode::InvalidArgument, "perturbation magnitude must be positive");
  const GenericityReport first = validate(loop, config);
  if (!first.embedded()) {
    throw Error(ErrorCode::NotEmbedded, "cannot perturb a loop that is not embedded in 3D");
  }
  if (first.passed()) return loop;

  std::mt19937_64 rng(seed);
  const auto base = loop.coefficients();
  double m = magnitude;
  for (int attempt = 1; attempt <= kPerturbationAttempts; ++attempt, m *= 2.0) {
    std::uniform_real_distribution<double> noise(-m, m);
    std::vector<double> c(base.begin(), base.end());
    for (auto& v : c) v += noise(rng);
    FourierLoop candidate(loop.degree(), std::move(c));
    if (validate(candidate, config).passed()) return candidate;
  }
  throw Error(ErrorCode::PerturbationFailed,
              fmt::format("no generic loop within {} attempts (last magnitude {:.3g})", kPerturbationAttempts,
                          m / 2.0));
}

}  // namespace knotrace
