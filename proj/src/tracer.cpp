#include "knotrace/tracer.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>

#include "knotrace/detail/numeric.hpp"
#include "knotrace/extract.hpp"
#include "knotrace/moves.hpp"
#include "local_models.hpp"

namespace knotrace {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// How far a continued feature may move in parameter between neighbouring samples.
constexpr double kReach = 0.3;
// Unmatched speed minima below this × scale might hide a cusp.
constexpr double kWatchRel = 0.05;
// Largest parameter separation of two crossings born or dying together.
constexpr double kPairReach = 1.0;
// A cusp's curl is looked for this many bisection tolerances from it.
constexpr double kCurlStart = 100.0;
// Cells where a triangle gains or loses a corner are narrowed to this many
// bisection tolerances.
constexpr double kBirthWindow = 1e3;

struct Sample {
  double t = 0.0;
  FourierLoop loop{1};
  FourierLoop rate{1};
  std::vector<detail::SpeedMinimum> minima;
  std::vector<DoublePoint> points;
  std::vector<int> sides;  // sign of cross(p f'(u1), p f'(u2))
  std::vector<detail::Triangle> triangles;
  std::vector<double> distances;  // NaN where the probe failed
  bool clean = true;
  double embedded = kInf;
  ParameterPair worst{0.0, 0.0, 0.0};
};

Sample make_sample(const IsotopyFamily& family, double t, const TraceConfig& config, bool embedding) {
  Sample s;
  s.t = t;
  s.loop = family.at(t);
  s.rate = family.rate_at(t);
  const int grid = effective_grid(s.loop, config.genericity);
  s.minima = detail::speed_minima(s.loop, grid);
  DoublePointSearch dps = find_double_points(s.loop, grid, config.genericity.newton_tol);
  if (!dps.diagnostics.empty()) dps = find_double_points(s.loop, 2 * grid, config.genericity.newton_tol);
  // A cell without a root is harmless here: a crossing really missed shows
  // up as one without a partner in the bookkeeping.
  s.clean = std::none_of(dps.diagnostics.begin(), dps.diagnostics.end(),
                         [](const Diagnostic& d) { return d.code != ErrorCode::NewtonDiverged; });
  s.points = std::move(dps.points);
  for (const auto& dp : s.points) {
    s.sides.push_back(cross(project(s.loop.derivative(dp.u1, 1)), project(s.loop.derivative(dp.u2, 1))) > 0.0 ? 1 : -1);
  }
  s.triangles = detail::crossing_triangles(s.points);
  for (auto& tri : s.triangles) {
    const auto probe = detail::triangle_probe(s.loop, tri.ua, tri.ub, tri.uc, kReach);
    if (probe) tri.uc = probe->uc;
    s.distances.push_back(probe ? probe->distance : std::numeric_limits<double>::quiet_NaN());
  }
  if (embedding) {
    const EmbeddingCheck e = check_embedded(s.loop, grid, config.genericity.embedded_rel * s.loop.scale());
    s.embedded = e.margin;
    s.worst = e.worst;
  }
  return s;
}

// A signed quantity followed through time; `probe` re-solves its feature on
// a loop starting from `params` and updates them.
using Probe = std::function<std::optional<double>(const FourierLoop&, std::vector<double>&)>;

struct Root {
  double t;
  std::vector<double> params;
};

Probe cusp_probe() {
  return [](const FourierLoop& loop, std::vector<double>& p) -> std::optional<double> {
    const auto u = detail::speed_minimum(loop, p[0], kReach);
    if (!u) return std::nullopt;
    p[0] = *u;
    return detail::cusp_margin(loop, *u);
  };
}

Probe tangency_probe() {
  return [](const FourierLoop& loop, std::vector<double>& p) -> std::optional<double> {
    const auto r = detail::facing_pair(loop, p[0], p[1], kReach);
    if (!r) return std::nullopt;
    p = {r->u1, r->u2};
    return detail::facing_gap(loop, *r);
  };
}

Probe triple_probe() {
  return [](const FourierLoop& loop, std::vector<double>& p) -> std::optional<double> {
    const auto r = detail::triangle_probe(loop, p[0], p[1], p[2], kReach);
    if (!r) return std::nullopt;
    p = {r->ua, r->ub, r->uc};
    return r->distance;
  };
}

Probe z_gap_probe() {
  return [](const FourierLoop& loop, std::vector<double>& p) -> std::optional<double> {
    const auto r = detail::double_point(loop, p[0], p[1], kReach);
    if (!r) return std::nullopt;
    // Keep the caller's orientation of the pair.
    if (circle_distance(r->u1, p[0]) + circle_distance(r->u2, p[1]) <=
        circle_distance(r->u2, p[0]) + circle_distance(r->u1, p[1])) {
      p = {r->u1, r->u2};
    } else {
      p = {r->u2, r->u1};
    }
    return loop.eval(p[0]).z - loop.eval(p[1]).z;
  };
}

// Bisection on a sign change of `probe` between (ta, va) and (tb, vb).  The
// result must be a genuine zero: a jump between branches is refused, and
// `jumped` tells it apart from a probe that lost its feature.
std::optional<Root> bisect(const IsotopyFamily& family, const Probe& probe, double ta, double va,
                           std::vector<double> pa, double tb, double vb, std::vector<double> pb, double tol,
                           bool* jumped = nullptr) {
  if (jumped) *jumped = false;
  const double accept = 1e-4 * family.scale();
  while (tb - ta > tol) {
    const double tm = 0.5 * (ta + tb);
    const FourierLoop loop = family.at(tm);
    std::vector<double> p = pa;
    std::optional<double> v = probe(loop, p);
    if (!v) {
      p = pb;
      v = probe(loop, p);
    }
    if (!v) return std::nullopt;
    if ((*v > 0.0) == (va > 0.0)) {
      ta = tm;
      va = *v;
      pa = std::move(p);
    } else {
      tb = tm;
      vb = *v;
      pb = std::move(p);
    }
  }
  if (std::min(std::abs(va), std::abs(vb)) > accept) {
    if (jumped) *jumped = true;
    return std::nullopt;
  }
  return std::abs(va) <= std::abs(vb) ? Root{ta, pa} : Root{tb, pb};
}

struct Collision {
  double t;
  double u1;
  double u2;
  double gap;
};

struct CellFindings {
  std::vector<EventLocation> events;
  std::vector<Collision> collisions;
};

bool same_pair(double a1, double a2, double b1, double b2, double tol, bool* swapped = nullptr) {
  const bool direct = circle_distance(a1, b1) + circle_distance(a2, b2) < tol;
  const bool flipped = circle_distance(a1, b2) + circle_distance(a2, b1) < tol;
  if (swapped) *swapped = !direct && flipped;
  return direct || flipped;
}

// The little loop a cusp at (tc, uc) has on one side of it in time.
struct CurlTrack {
  // Parameter width of its crossing at the starting offset.
  double width;
  // The crossing followed out to the sample, unless the sample lies
  // closer to the cusp than the starting offset.
  std::optional<detail::UPair> at_sample;
};

// Looks for the curl at `start` from the cusp towards `to`, then follows it
// out to `to`.  The loop's size grows like the square root of the time
// offset, so steps double in time.  Nullopt if there is no loop on that side
// or it is lost on the way.
std::optional<CurlTrack> follow_curl(const IsotopyFamily& family, double tc, double uc, double to, double start) {
  const double span = std::abs(to - tc);
  const double dir = to > tc ? 1.0 : -1.0;
  // Smallest crossing around uc at offset d, as an unwrapped interval.
  auto around = [&](double d) -> std::optional<std::pair<double, double>> {
    const FourierLoop at = family.at(tc + dir * d);
    for (double e = 1e-4; e < 0.5; e *= 1.3) {
      const auto r = detail::double_point(at, uc - e, uc + e, kReach);
      if (!r) continue;
      double x = uc + std::remainder(r->u1 - uc, kTwoPi);
      double y = uc + std::remainder(r->u2 - uc, kTwoPi);
      if (x > y) std::swap(x, y);
      if (x < uc && uc < y && y - x < 6.0 * e) return std::pair{x, y};
    }
    return std::nullopt;
  };
  const auto outer = around(start);
  if (!outer) return std::nullopt;
  // A true curl is half as wide at a quarter of the offset; a crossing that
  // just happens to straddle uc is not.
  const auto inner = around(0.25 * start);
  if (!inner) return std::nullopt;
  const double ratio = (inner->second - inner->first) / (outer->second - outer->first);
  if (ratio < 0.35 || ratio > 0.65) return std::nullopt;
  double lo = outer->first;
  double hi = outer->second;
  CurlTrack track{hi - lo, std::nullopt};
  if (span <= start) return track;
  double step = start;
  while (step < span) {
    step = std::min(2.0 * step, span);
    const FourierLoop loop = family.at(tc + dir * step);
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo) * std::sqrt(2.0);
    const auto r = detail::double_point(loop, mid - half, mid + half, std::max(kReach, hi - lo));
    if (!r) return std::nullopt;
    const double x = mid - half + std::remainder(r->u1 - (mid - half), kTwoPi);
    const double y = mid + half + std::remainder(r->u2 - (mid + half), kTwoPi);
    if (!(x < y)) return std::nullopt;
    lo = x;
    hi = y;
  }
  track.at_sample = detail::UPair{wrap_angle(lo), wrap_angle(hi)};
  return track;
}

class Sweep {
 public:
  Sweep(const IsotopyFamily& family, const TraceConfig& config, bool embedding)
      : family_(family), config_(config), embedding_(embedding), scale_(family.scale()) {
    if (config.t_grid < 2) throw Error(ErrorCode::InvalidArgument, "t_grid must be at least 2");
    if (!(config.bisect_tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "bisect_tol must be positive");
    Sample prev = sample(0.0);
    for (int i = 1; i < config.t_grid; ++i) {
      Sample next = sample(static_cast<double>(i) / (config.t_grid - 1));
      process(prev, next, 0);
      prev = std::move(next);
    }
    finish();
  }

  std::vector<EventLocation> events;
  std::vector<Collision> collisions;
  double min_embedded = kInf;
  // First sample whose embedded margin is at or below the threshold.
  std::optional<Collision> first_thin;

 private:
  Sample sample(double t) {
    Sample s = make_sample(family_, t, config_, embedding_);
    if (embedding_) {
      min_embedded = std::min(min_embedded, s.embedded);
      const double thr = config_.genericity.embedded_rel * s.loop.scale();
      if (s.embedded <= thr && (!first_thin || t < first_thin->t)) {
        const double gap = norm(s.loop.eval(s.worst.u1) - s.loop.eval(s.worst.u2));
        first_thin = Collision{t, s.worst.u1, s.worst.u2, gap};
      }
    }
    return s;
  }

  void process(const Sample& a, const Sample& b, int depth) {
    CellFindings found;
    std::string why;
    if (examine(a, b, found, why)) {
      for (auto& e : found.events) events.push_back(std::move(e));
      for (auto& c : found.collisions) collisions.push_back(c);
      return;
    }
    if (depth >= config_.max_refine) {
      throw Error(ErrorCode::ResolutionConflict,
                  fmt::format("cannot separate events in t=[{:.9f}, {:.9f}]: {}; refine the time grid", a.t, b.t, why));
    }
    const Sample mid = sample(0.5 * (a.t + b.t));
    process(a, mid, depth + 1);
    process(mid, b, depth + 1);
  }

  // Brackets every event of the cell and bisects it; false with a reason if
  // the cell's bookkeeping does not close.
  bool examine(const Sample& a, const Sample& b, CellFindings& out, std::string& why) {
    if (!a.clean || !b.clean) {
      why = "crossing search reported problems";
      return false;
    }
    const double tol = config_.bisect_tol;
    const double watch = kWatchRel * scale_;

    // Speed minima.
    const int na = static_cast<int>(a.minima.size());
    const int nb = static_cast<int>(b.minima.size());
    auto follow_min = [](const Sample& from, int i, const Sample& to) {
      const auto u = detail::speed_minimum(to.loop, from.minima[i].u, kReach);
      if (!u) return -1;
      for (int j = 0; j < static_cast<int>(to.minima.size()); ++j)
        if (circle_distance(*u, to.minima[j].u) < 1e-6) return j;
      return -1;
    };
    std::vector<int> min_ab(na), min_ba(nb);
    for (int i = 0; i < na; ++i) min_ab[i] = follow_min(a, i, b);
    for (int j = 0; j < nb; ++j) min_ba[j] = follow_min(b, j, a);
    struct Cusp {
      double t;
      double u;
    };
    std::vector<Cusp> cusps;
    for (int i = 0; i < na; ++i) {
      const int j = min_ab[i];
      if (j < 0 || min_ba[j] != i) {
        if (std::abs(a.minima[i].margin) < watch) {
          why = "a speed minimum near zero lost its continuation";
          return false;
        }
        continue;
      }
      const double va = a.minima[i].margin;
      const double vb = b.minima[j].margin;
      if ((va > 0.0) == (vb > 0.0)) continue;
      bool jumped = false;
      const auto r = bisect(family_, cusp_probe(), a.t, va, {a.minima[i].u}, b.t, vb, {b.minima[j].u}, tol, &jumped);
      // The margin's sign follows p f'', which can turn over while the speed
      // stays well above zero.
      if (jumped) continue;
      if (!r) {
        why = "cusp margin changes sign without a zero";
        return false;
      }
      out.events.push_back({r->t, EventKind::Cusp, r->params});
      cusps.push_back({r->t, r->params[0]});
    }
    for (int j = 0; j < nb; ++j) {
      const int i = min_ba[j];
      if ((i < 0 || min_ab[i] != j) && std::abs(b.minima[j].margin) < watch) {
        why = "a speed minimum near zero lost its continuation";
        return false;
      }
    }

    // Crossings, continued with a first-order prediction.
    const int ca = static_cast<int>(a.points.size());
    const int cb = static_cast<int>(b.points.size());
    auto follow_point = [](const Sample& from, int i, const Sample& to, bool* swapped) {
      const DoublePoint& dp = from.points[i];
      double u1 = dp.u1;
      double u2 = dp.u2;
      const Vec2 t1 = project(from.loop.derivative(u1, 1));
      const Vec2 t2 = project(from.loop.derivative(u2, 1));
      const Vec2 ft = project(from.rate.eval(u1)) - project(from.rate.eval(u2));
      if (const auto du = detail::solve2(t1.x, -t2.x, t1.y, -t2.y, -ft.x, -ft.y)) {
        const double dt = to.t - from.t;
        u1 += std::clamp((*du)[0] * dt, -kReach, kReach);
        u2 += std::clamp((*du)[1] * dt, -kReach, kReach);
      }
      const auto r = detail::double_point(to.loop, u1, u2, kReach);
      if (!r) return -1;
      for (int j = 0; j < static_cast<int>(to.points.size()); ++j)
        if (same_pair(r->u1, r->u2, to.points[j].u1, to.points[j].u2, 1e-6, swapped)) return j;
      return -1;
    };
    std::vector<int> pt_ab(ca), pt_ba(cb);
    std::vector<char> flip(ca, 0);
    for (int i = 0; i < ca; ++i) {
      bool swapped = false;
      pt_ab[i] = follow_point(a, i, b, &swapped);
      flip[i] = swapped;
    }
    for (int j = 0; j < cb; ++j) {
      bool swapped = false;
      pt_ba[j] = follow_point(b, j, a, &swapped);
    }
    std::vector<int> dead, born;
    for (int i = 0; i < ca; ++i) {
      const int j = pt_ab[i];
      if (j < 0 || pt_ba[j] != i) {
        dead.push_back(i);
        continue;
      }
      const double s = flip[i] ? -1.0 : 1.0;
      if (a.sides[i] != static_cast<int>(s) * b.sides[j]) {
        why = "a crossing reversed its handedness";
        return false;
      }
      const double za = a.points[i].z_gap;
      const double zb = s * b.points[j].z_gap;
      if ((za > 0.0) != (zb > 0.0)) {
        std::vector<double> pb = flip[i] ? std::vector<double>{b.points[j].u2, b.points[j].u1}
                                         : std::vector<double>{b.points[j].u1, b.points[j].u2};
        const auto r = bisect(family_, z_gap_probe(), a.t, za, {a.points[i].u1, a.points[i].u2}, b.t, zb, pb, tol);
        if (!r) {
          why = "z-gap changes sign without a zero";
          return false;
        }
        const FourierLoop at = family_.at(r->t);
        out.collisions.push_back({r->t, r->params[0], r->params[1], norm(at.eval(r->params[0]) - at.eval(r->params[1]))});
      }
    }
    for (int j = 0; j < cb; ++j)
      if (pt_ba[j] < 0 || pt_ab[pt_ba[j]] != j) born.push_back(j);

    // A cusp opens or closes one curl crossing, on one side of it in time.
    for (const Cusp& c : cusps) {
      int hits = 0;
      for (int side = 0; side < 2; ++side) {
        auto& list = side == 0 ? dead : born;
        const Sample& s = side == 0 ? a : b;
        const auto curl = follow_curl(family_, c.t, c.u, s.t, kCurlStart * tol);
        if (!curl) continue;
        ++hits;
        if (!curl->at_sample) {
          // The sample is nearly at the cusp: its curl, if big enough to
          // be seen at all, is no wider than at the starting offset.
          const auto it = std::find_if(list.begin(), list.end(), [&](int k) {
            const double w = circle_distance(s.points[k].u1, s.points[k].u2);
            return w <= curl->width && circle_distance(detail::circle_mid(s.points[k].u1, s.points[k].u2), c.u) < w;
          });
          if (it != list.end()) list.erase(it);
          continue;
        }
        const detail::UPair& at = *curl->at_sample;
        const auto it = std::find_if(list.begin(), list.end(), [&](int k) {
          return same_pair(at.u1, at.u2, s.points[k].u1, s.points[k].u2, 1e-6);
        });
        if (it == list.end()) {
          why = "a cusp's curl crossing is not among the crossings that come and go";
          return false;
        }
        list.erase(it);
      }
      if (hits != 1) {
        why = hits == 0 ? "a cusp without a curl crossing" : "a cusp with curl crossings on both sides";
        return false;
      }
    }

    // Whatever is left appears or disappears in pairs at tangencies.
    for (int side = 0; side < 2; ++side) {
      auto& list = side == 0 ? dead : born;
      const Sample& s = side == 0 ? a : b;
      while (!list.empty()) {
        double best = kPairReach;
        std::size_t bi = 0, bj = 0;
        bool swap_best = false;
        for (std::size_t i = 0; i < list.size(); ++i) {
          for (std::size_t j = i + 1; j < list.size(); ++j) {
            const DoublePoint& p = s.points[list[i]];
            const DoublePoint& q = s.points[list[j]];
            const double direct = circle_distance(p.u1, q.u1) + circle_distance(p.u2, q.u2);
            const double flipped = circle_distance(p.u1, q.u2) + circle_distance(p.u2, q.u1);
            const double sign_q = direct <= flipped ? 1 : -1;
            if (s.sides[list[i]] != -static_cast<int>(sign_q) * s.sides[list[j]]) continue;
            if (std::min(direct, flipped) < best) {
              best = std::min(direct, flipped);
              bi = i;
              bj = j;
              swap_best = direct > flipped;
            }
          }
        }
        if (best >= kPairReach) {
          why = "a crossing appears or vanishes without a partner";
          return false;
        }
        const DoublePoint& p = s.points[list[bi]];
        const DoublePoint& q = s.points[list[bj]];
        std::vector<double> seed = {detail::circle_mid(p.u1, swap_best ? q.u2 : q.u1),
                                    detail::circle_mid(p.u2, swap_best ? q.u1 : q.u2)};
        std::vector<double> pa = seed, pb = seed;
        const auto va = tangency_probe()(a.loop, pa);
        const auto vb = tangency_probe()(b.loop, pb);
        if (!va || !vb || ((*va > 0.0) == (*vb > 0.0))) {
          why = "a pair of crossings without a tangency between them";
          return false;
        }
        const auto r = bisect(family_, tangency_probe(), a.t, *va, pa, b.t, *vb, pb, tol);
        if (!r) {
          why = "tangency gap changes sign without a zero";
          return false;
        }
        out.events.push_back({r->t, EventKind::Tangency, r->params});
        list.erase(list.begin() + static_cast<long>(bj));
        list.erase(list.begin() + static_cast<long>(bi));
      }
    }

    // Triangles of crossings whose vertex passes the opposite side.  A
    // triangle with a corner that comes or goes cannot be compared across
    // the cell, so such cells are narrowed first.
    for (int side = 0; side < 2; ++side) {
      const Sample& from = side == 0 ? a : b;
      const auto& match = side == 0 ? pt_ab : pt_ba;
      const auto& back = side == 0 ? pt_ba : pt_ab;
      for (const auto& tri : from.triangles) {
        for (const int c : tri.crossings) {
          if ((match[c] < 0 || back[match[c]] != c) && b.t - a.t > kBirthWindow * tol) {
            why = "a triangle has a corner that comes or goes";
            return false;
          }
        }
      }
    }
    for (int side = 0; side < 2; ++side) {
      const Sample& from = side == 0 ? a : b;
      const Sample& to = side == 0 ? b : a;
      for (std::size_t k = 0; k < from.triangles.size(); ++k) {
        const double v0 = from.distances[k];
        if (std::isnan(v0)) continue;
        const auto& tri = from.triangles[k];
        std::vector<double> p0 = {tri.ua, tri.ub, tri.uc};
        std::vector<double> p1 = p0;
        // Start from the matched crossing when there is one: neighbouring
        // crossings of a small triangle are easily confused by Newton.
        const auto& match = side == 0 ? pt_ab : pt_ba;
        const auto& back = side == 0 ? pt_ba : pt_ab;
        const int v = tri.crossings[0];
        if (const int m = match[v]; m >= 0 && back[m] == v) {
          const DoublePoint& q = to.points[m];
          const bool direct = circle_distance(q.u1, tri.ua) + circle_distance(q.u2, tri.ub) <=
                              circle_distance(q.u2, tri.ua) + circle_distance(q.u1, tri.ub);
          p1[0] = direct ? q.u1 : q.u2;
          p1[1] = direct ? q.u2 : q.u1;
        }
        const auto v1 = triple_probe()(to.loop, p1);
        if (!v1 || ((*v1 > 0.0) == (v0 > 0.0))) continue;
        bool jumped = false;
        const auto r = side == 0 ? bisect(family_, triple_probe(), a.t, v0, p0, b.t, *v1, p1, tol, &jumped)
                                 : bisect(family_, triple_probe(), a.t, *v1, p1, b.t, v0, p0, tol, &jumped);
        // The foot of the distance can hop across a cusp tip while the strand
        // stays well away from the crossing: no triple point there.
        if (jumped) continue;
        if (!r) {
          why = "triangle distance changes sign without a zero";
          return false;
        }
        const bool seen = std::any_of(out.events.begin(), out.events.end(), [&](const EventLocation& e) {
          if (e.kind != EventKind::Triple || std::abs(e.t - r->t) > 1e3 * tol) return false;
          std::vector<double> x = e.params, y = r->params;
          std::sort(x.begin(), x.end());
          std::sort(y.begin(), y.end());
          for (int i = 0; i < 3; ++i)
            if (circle_distance(x[i], y[i]) > 1e-4) return false;
          return true;
        });
        if (!seen) out.events.push_back({r->t, EventKind::Triple, r->params});
      }
    }
    return true;
  }

  void finish() {
    std::sort(events.begin(), events.end(), [](const EventLocation& x, const EventLocation& y) { return x.t < y.t; });
    std::sort(collisions.begin(), collisions.end(), [](const Collision& x, const Collision& y) { return x.t < y.t; });
    const double gap = config_.isolation_factor * config_.bisect_tol;
    for (std::size_t k = 1; k < events.size(); ++k) {
      if (events[k].t - events[k - 1].t <= gap) {
        throw Error(ErrorCode::ResolutionConflict,
                    fmt::format("{} at t={:.9f} and {} at t={:.9f} are simultaneous at the bisection tolerance",
                                to_string(events[k - 1].kind), events[k - 1].t, to_string(events[k].kind), events[k].t));
      }
    }
  }

  const IsotopyFamily& family_;
  const TraceConfig& config_;
  bool embedding_;
  double scale_;
};

// Error text without its "CODE: " prefix.
std::string bare_message(const Error& e) {
  const std::string_view what = e.what();
  const std::size_t skip = to_string(e.code()).size() + 2;
  return std::string(what.size() >= skip ? what.substr(skip) : what);
}

void require_generic_endpoints(const IsotopyFamily& family, const TraceConfig& config) {
  for (const double t : {0.0, 1.0}) {
    const GenericityReport rep = validate(family.at(t), config.genericity);
    if (rep.passed()) continue;
    std::string why;
    if (!rep.embedded()) why += " not embedded;";
    if (!rep.immersed()) why += fmt::format(" immersion margin {:.3g};", rep.immersion_margin);
    if (!rep.no_triple()) why += fmt::format(" triple margin {:.3g};", rep.triple_margin);
    if (!rep.transverse()) why += fmt::format(" transversality margin {:.3g};", rep.transversality_margin);
    for (const auto& d : rep.diagnostics) why += fmt::format(" {};", to_string(d.code));
    why.pop_back();
    throw Error(ErrorCode::EndpointNotGeneric, fmt::format("loop at t={} is not generic:{}", t, why));
  }
}

InjectivityResult injectivity_of(const Sweep& sweep) {
  InjectivityResult r;
  r.margin = sweep.min_embedded;
  // A refined collision is the better witness; a thin sample only shows the
  // margin fell below the threshold.
  std::optional<Collision> first = sweep.first_thin;
  if (!sweep.collisions.empty()) first = sweep.collisions.front();
  if (first) {
    r.passed = false;
    r.t = first->t;
    r.u1 = first->u1;
    r.u2 = first->u2;
    r.gap = first->gap;
  }
  return r;
}

// Diagram of the loop at time t with a doubled parameter grid.
Diagram diagram_at(const IsotopyFamily& family, double t, const TraceConfig& config) {
  const FourierLoop loop = family.at(t);
  const int grid = 2 * effective_grid(loop, config.genericity);
  DoublePointSearch dps = find_double_points(loop, grid, config.genericity.newton_tol);
  if (!dps.diagnostics.empty()) dps = find_double_points(loop, 2 * grid, config.genericity.newton_tol);
  // Rootless cells are tolerated as in the sweep; verification against the
  // events catches a crossing that was really missed.
  for (const Diagnostic& d : dps.diagnostics)
    if (d.code != ErrorCode::NewtonDiverged) throw Error(d.code, d.message);
  return extract_diagram(loop, dps.points).diagram;
}

// The interval diagrams around an event differ by the classified move.
bool verify_event(const SingularEvent& ev, const Diagram& before, const Diagram& after) {
  const int delta = after.crossing_count() - before.crossing_count();
  if (delta != ev.delta_crossings) return false;
  if (ev.kind == EventKind::Triple) {
    for (const MoveSite& s : enumerate_move_sites(before, MoveKind::R3))
      if (isomorphic(apply_move(before, s), after)) return true;
    return false;
  }
  const Diagram& big = delta > 0 ? after : before;
  const Diagram& small = delta > 0 ? before : after;
  const MoveKind kind = ev.kind == EventKind::Cusp ? MoveKind::R1Remove : MoveKind::R2Remove;
  for (const MoveSite& s : enumerate_move_sites(big, kind)) {
    if (kind == MoveKind::R1Remove && s.variant != ev.variant) continue;
    if (isomorphic(apply_move(big, s), small)) return true;
  }
  return false;
}

}  // namespace

InjectivityResult check_injectivity_through_time(const IsotopyFamily& family, const TraceConfig& config) {
  const Sweep sweep(family, config, true);
  return injectivity_of(sweep);
}

Margins margin_functions(const IsotopyFamily& family, double t, const TraceConfig& config) {
  Margins m;
  m.t = t;
  const FourierLoop loop = family.at(t);
  const GenericityReport rep = validate(loop, config.genericity);
  m.immersion = rep.immersion_margin;
  m.triple = rep.triple_margin;
  m.transversality = rep.transversality_margin;
  auto closest = [](double& best, double v) {
    if (std::abs(v) < std::abs(best)) best = v;
  };
  m.cusp = kInf;
  for (const auto& s : detail::speed_minima(loop, rep.grid)) closest(m.cusp, s.margin);
  m.tangency = kInf;
  for (const auto& p : detail::facing_pairs(loop, rep.grid)) closest(m.tangency, detail::facing_gap(loop, p));
  m.triple_signed = kInf;
  for (const auto& tri : detail::crossing_triangles(rep.double_points)) {
    if (const auto probe = detail::triangle_probe(loop, tri.ua, tri.ub, tri.uc, kReach)) closest(m.triple_signed, probe->distance);
  }
  return m;
}

std::vector<EventLocation> localize_events(const IsotopyFamily& family, const TraceConfig& config) {
  require_generic_endpoints(family, config);
  return Sweep(family, config, false).events;
}

MoveScript trace(const IsotopyFamily& family, const TraceConfig& config) {
  require_generic_endpoints(family, config);
  const Sweep sweep(family, config, true);
  const InjectivityResult inj = injectivity_of(sweep);
  if (!inj.passed) {
    throw Error(ErrorCode::NotAnIsotopy, fmt::format("strands meet in 3D at t={:.9f} u1={:.9f} u2={:.9f} (distance {:.3g})",
                                                     inj.t, inj.u1, inj.u2, inj.gap));
  }

  MoveScript script;
  auto problem = [&script](double t, ErrorCode code, const std::string& what) {
    script.problems.push_back({code, fmt::format("t={:.9f}: {}", t, what)});
  };

  std::vector<double> cuts = {0.0};
  for (const auto& e : sweep.events) cuts.push_back(e.t);
  cuts.push_back(1.0);
  std::vector<bool> extracted;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double a = cuts[k];
    const double b = cuts[k + 1];
    IntervalRecord rec{a, b, Diagram(), false};
    try {
      rec.diagram = diagram_at(family, 0.5 * (a + b), config);
      rec.consistent = true;
      for (const double q : {0.25, 0.75}) {
        const double tq = a + q * (b - a);
        if (!isomorphic(diagram_at(family, tq, config), rec.diagram)) {
          rec.consistent = false;
          problem(tq, ErrorCode::Degenerate, fmt::format("diagram differs from the one at the midpoint of [{:.9f}, {:.9f}]", a, b));
        }
      }
      extracted.push_back(true);
    } catch (const Error& e) {
      problem(0.5 * (a + b), e.code(), bare_message(e));
      extracted.push_back(false);
    }
    script.intervals.push_back(std::move(rec));
  }

  for (std::size_t k = 0; k < sweep.events.size(); ++k) {
    const EventLocation& loc = sweep.events[k];
    EventRecord rec{SingularEvent{}, false, 0, false};
    rec.event.t = loc.t;
    rec.event.kind = loc.kind;
    rec.event.params = loc.params;
    try {
      switch (loc.kind) {
        case EventKind::Cusp: rec.event = classify_cusp(family, loc.t, loc.params[0], config); break;
        case EventKind::Tangency: rec.event = classify_tangency(family, loc.t, loc.params[0], loc.params[1], config); break;
        case EventKind::Triple:
          rec.event = classify_triple(family, loc.t, loc.params[0], loc.params[1], loc.params[2], config);
          break;
      }
      rec.classified = true;
    } catch (const Error& e) {
      problem(loc.t, e.code(), bare_message(e));
    }
    const Diagram& before = script.intervals[k].diagram;
    const Diagram& after = script.intervals[k + 1].diagram;
    rec.observed_delta = after.crossing_count() - before.crossing_count();
    if (rec.classified && extracted[k] && extracted[k + 1]) {
      rec.verified = verify_event(rec.event, before, after);
      if (!rec.verified) {
        problem(loc.t, ErrorCode::Degenerate,
                fmt::format("{} {} does not relate the neighbouring diagrams (crossings {} -> {})", rec.event.move,
                            rec.event.variant, before.crossing_count(), after.crossing_count()));
      }
    }
    script.events.push_back(std::move(rec));
  }

  try {
    const Diagram start = diagram_at(family, 0.0, config);
    const Diagram end = diagram_at(family, 1.0, config);
    for (const int n : config.colorings) {
      const ColoringCheck c{n, fox_colorings(start, n), fox_colorings(end, n)};
      if (c.start != c.end) problem(1.0, ErrorCode::Degenerate, fmt::format("colorings mod {} changed: {} -> {}", n, c.start, c.end));
      script.colorings.push_back(c);
    }
  } catch (const Error& e) {
    problem(0.0, e.code(), bare_message(e));
  }
  return script;
}

std::string format_move_script(const MoveScript& script) {
  std::string out;
  for (std::size_t k = 0; k < script.intervals.size(); ++k) {
    const IntervalRecord& iv = script.intervals[k];
    out += fmt::format("interval [{:.9f}, {:.9f}] gauss: {}\n", iv.t_begin, iv.t_end,
                       format_gauss(canonical_form(iv.diagram)));
    if (k < script.events.size()) {
      const EventRecord& e = script.events[k];
      if (e.classified) {
        out += fmt::format("event t={:.9f} kind={} variant={} direction={} delta_crossings={} verified={}\n", e.event.t,
                           e.event.move, e.event.variant, to_string(e.event.direction), e.observed_delta,
                           e.verified ? "yes" : "no");
      } else {
        out += fmt::format("event t={:.9f} kind=unclassified {} delta_crossings={} verified=no\n", e.event.t,
                           to_string(e.event.kind), e.observed_delta);
      }
    }
  }
  for (const auto& c : script.colorings) out += fmt::format("colorings n={} start={} end={}\n", c.n, c.start, c.end);
  for (const auto& p : script.problems) out += fmt::format("problem {}: {}\n", to_string(p.code), p.message);
  return out;
}

}  // namespace knotrace
