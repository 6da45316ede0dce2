#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>

#include "knotrace/detail/numeric.hpp"
#include "knotrace/tracer.hpp"

namespace knotrace {

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Cusp: return "cusp";
    case EventKind::Tangency: return "tangency";
    case EventKind::Triple: return "triple";
  }
  return "?";
}

std::string_view to_string(MoveDirection d) {
  switch (d) {
    case MoveDirection::Create: return "create";
    case MoveDirection::Remove: return "remove";
    case MoveDirection::Slide: return "slide";
  }
  return "?";
}

namespace {

// Data is taken at the event itself; points further than this from the
// singular configuration are refused.
constexpr double kLocateRel = 1e-3;

int sgn(double x) { return x > 0.0 ? 1 : -1; }

// Rotation taking the direction of v to +x.
Vec2 align(const Vec2& x, const Vec2& v) {
  const double n = norm(v);
  const double c = v.x / n;
  const double s = v.y / n;
  return rotate(x, c, -s);
}

}  // namespace

SingularEvent classify_cusp(const IsotopyFamily& family, double t, double u, const TraceConfig& config) {
  const double scale = family.scale();
  const double tol = config.degenerate_rel * scale;
  const FamilyPartials p = family.partials(u, t);
  if (norm(project(p.f_u)) > kLocateRel * scale) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("|p f'| = {:.3g} at t={:.9f} u={:.9f} is not a cusp", norm(project(p.f_u)), t, u));
  }
  SingularEvent ev;
  ev.t = t;
  ev.kind = EventKind::Cusp;
  ev.params = {wrap_angle(u)};
  ev.move = "R1";
  CuspData& c = ev.cusp;
  const Vec2 acc = project(p.f_uu);
  c.a_z = p.f_u.z;
  c.b_x = norm(acc);
  if (c.b_x <= tol) {
    throw Error(ErrorCode::DegenerateCusp, fmt::format("b_x = {:.3g} at t={:.9f} u={:.9f}", c.b_x, t, u));
  }
  c.c_y = align(project(p.f_uuu), acc).y;
  c.e_y = align(project(p.f_ut), acc).y;
  const Vec2 d = align(project(p.f_t), acc);
  c.d_x = d.x;
  c.d_y = d.y;
  for (const auto& [name, value] : {std::pair{"a_z", c.a_z}, std::pair{"c_y", c.c_y}, std::pair{"e_y", c.e_y}}) {
    if (std::abs(value) <= tol) {
      throw Error(ErrorCode::DegenerateCusp, fmt::format("{} = {:.3g} at t={:.9f} u={:.9f}", name, value, t, u));
    }
  }
  // x = b_x ε²/2, y = c_y ε³/6 + e_y δ ε: the curl closes at ε² = -6 e_y δ / c_y.
  const bool curl_after = c.e_y * c.c_y < 0.0;
  ev.direction = curl_after ? MoveDirection::Create : MoveDirection::Remove;
  ev.delta_crossings = curl_after ? 1 : -1;
  // z ≈ a_z ε, so the later strand is over when a_z > 0; the tangents there
  // make the crossing sign that of a_z c_y.
  const int sign = sgn(c.a_z) * sgn(c.c_y);
  const bool first_over = c.a_z < 0.0;
  ev.variant = fmt::format("{}{}", sign > 0 ? '+' : '-', first_over ? 'O' : 'U');
  return ev;
}

SingularEvent classify_tangency(const IsotopyFamily& family, double t, double u1, double u2,
                                const TraceConfig& config) {
  const double scale = family.scale();
  const double tol = config.degenerate_rel * scale;
  u1 = wrap_angle(u1);
  u2 = wrap_angle(u2);
  if (u1 > u2) std::swap(u1, u2);
  const FamilyPartials p1 = family.partials(u1, t);
  const FamilyPartials p2 = family.partials(u2, t);
  const Vec2 t1 = project(p1.f_u);
  const Vec2 t2 = project(p2.f_u);
  const double gap = norm(project(p1.f) - project(p2.f));
  const double sine = std::abs(cross(t1, t2)) / (norm(t1) * norm(t2));
  if (gap > kLocateRel * scale || sine > kLocateRel) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("t={:.9f} u1={:.9f} u2={:.9f} is not a tangency (gap {:.3g}, sin {:.3g})", t, u1, u2,
                            gap, sine));
  }
  SingularEvent ev;
  ev.t = t;
  ev.kind = EventKind::Tangency;
  ev.params = {u1, u2};
  ev.move = "R2";
  TangencyData& d = ev.tangency;
  d.antiparallel = dot(t1, t2) < 0.0;
  d.b1 = align(project(p1.f_uu), t1).y / (2.0 * dot(t1, t1));
  d.b2 = align(project(p2.f_uu), t1).y / (2.0 * dot(t2, t2));
  d.drift = align(project(p1.f_t) - project(p2.f_t), t1).y;
  d.same_side = d.b1 * d.b2 > 0.0;
  d.z1 = p1.f.z;
  d.z2 = p2.f.z;
  if (std::abs(d.b1 - d.b2) * scale <= config.degenerate_rel) {
    throw Error(ErrorCode::DegenerateTangency,
                fmt::format("equal curvatures b1 = b2 = {:.6g} at t={:.9f}", d.b1, t));
  }
  if (std::abs(d.drift) <= tol) {
    throw Error(ErrorCode::DegenerateTangency, fmt::format("relative drift {:.3g} at t={:.9f}", d.drift, t));
  }
  if (std::abs(d.z1 - d.z2) <= tol) {
    throw Error(ErrorCode::DegenerateTangency, fmt::format("strands meet in 3D at t={:.9f}", t));
  }
  // y1 - y2 = (b1 - b2) x² + drift δ: two crossings exactly when this changes sign in x.
  const bool after = d.drift * (d.b1 - d.b2) < 0.0;
  ev.direction = after ? MoveDirection::Create : MoveDirection::Remove;
  ev.delta_crossings = after ? 2 : -2;
  ev.variant = fmt::format("{}/{}", d.z1 > d.z2 ? "over" : "under", d.same_side ? "same" : "opposite");
  return ev;
}

SingularEvent classify_triple(const IsotopyFamily& family, double t, double u1, double u2, double u3,
                              const TraceConfig& config) {
  const double scale = family.scale();
  const double tol = config.degenerate_rel * scale;
  std::array<double, 3> u{wrap_angle(u1), wrap_angle(u2), wrap_angle(u3)};
  std::sort(u.begin(), u.end());
  std::array<FamilyPartials, 3> p;
  for (int i = 0; i < 3; ++i) p[i] = family.partials(u[i], t);
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      const double gap = norm(project(p[i].f) - project(p[j].f));
      if (gap > kLocateRel * scale) {
        throw Error(ErrorCode::InvalidArgument,
                    fmt::format("strands at u={:.9f} and u={:.9f} are {:.3g} apart at t={:.9f}", u[i], u[j], gap, t));
      }
    }
  }
  SingularEvent ev;
  ev.t = t;
  ev.kind = EventKind::Triple;
  ev.params = {u[0], u[1], u[2]};
  ev.move = "R3";
  ev.direction = MoveDirection::Slide;
  ev.delta_crossings = 0;
  TripleData& d = ev.triple;
  std::array<Vec2, 3> n;
  for (int i = 0; i < 3; ++i) {
    d.v[i] = project(p[i].f_u);
    d.w[i] = project(p[i].f_t);
    d.z[i] = p[i].f.z;
    n[i] = Vec2{-d.v[i].y, d.v[i].x} * (1.0 / norm(d.v[i]));
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      if (std::abs(cross(n[i], n[j])) <= config.degenerate_rel) {
        throw Error(ErrorCode::DegenerateTriple,
                    fmt::format("strands {} and {} are parallel at t={:.9f}", i, j, t));
      }
      if (std::abs(d.z[i] - d.z[j]) <= tol) {
        throw Error(ErrorCode::DegenerateTriple, fmt::format("strands {} and {} meet in 3D at t={:.9f}", i, j, t));
      }
    }
  }
  // Line i moves along its normal at speed n_i·w_i.  Remove the translation
  // that holds the other two lines still; what is left of line i's speed is
  // its sweep across their crossing.
  std::array<double, 3> sweep{};
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3;
    const int k = (i + 2) % 3;
    const auto g = detail::solve2(n[j].x, n[j].y, n[k].x, n[k].y, dot(n[j], d.w[j]), dot(n[k], d.w[k]));
    if (!g) throw Error(ErrorCode::DegenerateTriple, fmt::format("strands {} and {} are parallel at t={:.9f}", j, k, t));
    sweep[i] = dot(n[i], d.w[i]) - dot(n[i], Vec2{(*g)[0], (*g)[1]});
  }
  d.moving = static_cast<int>(std::max_element(sweep.begin(), sweep.end(),
                                               [](double a, double b) { return std::abs(a) < std::abs(b); }) -
                              sweep.begin());
  if (std::abs(sweep[d.moving]) <= tol) {
    throw Error(ErrorCode::DegenerateTriple, fmt::format("the strands stay concurrent at t={:.9f}", t));
  }
  std::array<int, 3> order{0, 1, 2};
  std::sort(order.begin(), order.end(), [&](int a, int b) { return d.z[a] > d.z[b]; });
  ev.variant = "???";
  ev.variant[order[0]] = 'T';
  ev.variant[order[1]] = 'M';
  ev.variant[order[2]] = 'B';
  return ev;
}

}  // namespace knotrace
