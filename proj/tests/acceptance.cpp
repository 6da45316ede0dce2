// Desk-scale acceptance suite: one PASS/FAIL line per criterion, with the
// measured value and the wall time against its budget.  Exit status is the
// number of failed criteria.

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <string>

#include "knotrace/diagram.hpp"
#include "knotrace/extract.hpp"
#include "knotrace/genericity.hpp"
#include "knotrace/moves.hpp"
#include "knotrace/tracer.hpp"
#include "support/diagram_oracles.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace knotrace;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

// Counts failed checks and keeps the first message.
struct Tally {
  std::string first;
  int failures = 0;
  void check(bool ok, const std::string& why) {
    if (ok) return;
    if (failures++ == 0) first = why;
  }
};

Diagram extract(const FourierLoop& loop) {
  return extract_diagram(loop, find_double_points(loop, default_grid(loop), 1e-10).points).diagram;
}

double max_abs(const Vec3& a, const Vec3& b) {
  return std::max({std::abs(a.x - b.x), std::abs(a.y - b.y), std::abs(a.z - b.z)});
}

Outcome oracle_equivalence() {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> degree(1, 6);
  Tally tally;
  int crossings = 0;
  double worst = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    const FourierLoop loop = fixtures::random_loop(rng, degree(rng));
    const auto got = find_double_points(loop, default_grid(loop), 1e-10);
    const auto want = oracles::dense_double_points(loop, 4096);
    tally.check(got.diagnostics.empty(), fmt::format("loop {} has search diagnostics", rep));
    tally.check(got.points.size() == want.size(),
                fmt::format("loop {}: {} crossings, oracle {}", rep, got.points.size(), want.size()));
    crossings += static_cast<int>(want.size());
    std::vector<bool> used(want.size(), false);
    for (const auto& p : got.points) {
      double best = INFINITY;
      std::size_t at = 0;
      for (std::size_t k = 0; k < want.size(); ++k) {
        if (used[k]) continue;
        const double d = std::max(circle_distance(p.u1, want[k].u1), circle_distance(p.u2, want[k].u2));
        if (d < best) best = d, at = k;
      }
      if (best < INFINITY) used[at] = true;
      worst = std::max(worst, best);
      tally.check(best < 1e-4, fmt::format("loop {}: crossing at u1={:.6f} off by {:.2e}", rep, p.u1, best));
    }
  }
  if (tally.failures) return {false, tally.first};
  return {true, fmt::format("20 loops, {} crossings, worst parameter error {:.1e}", crossings, worst)};
}

Outcome standard_knots() {
  Tally tally;
  const FourierLoop t = fixtures::trefoil();
  const auto points = find_double_points(t, default_grid(t), 1e-10).points;
  tally.check(points.size() == 3, fmt::format("trefoil has {} crossings", points.size()));
  double min_sin = INFINITY;
  for (const auto& p : points) min_sin = std::min(min_sin, p.transversality);
  tally.check(min_sin > 0.1, fmt::format("trefoil transversality {:.3f}", min_sin));
  const Diagram td = extract(t);
  const auto t3 = fox_colorings(td, 3);
  tally.check(t3 == 9 && oracles::brute_force_colorings(td, 3) == 9, fmt::format("trefoil 3-colorings {}", t3));
  const Diagram fd = extract(fixtures::figure_eight_knot());
  const auto f3 = fox_colorings(fd, 3), f5 = fox_colorings(fd, 5);
  tally.check(f3 == 3 && oracles::brute_force_colorings(fd, 3) == 3, fmt::format("figure-eight 3-colorings {}", f3));
  tally.check(f5 == 25 && oracles::brute_force_colorings(fd, 5) == 25,
              fmt::format("figure-eight 5-colorings {}", f5));
  if (tally.failures) return {false, tally.first};
  return {true, fmt::format("trefoil 3 crossings, min |sin| {:.3f}, col3=9; figure-eight col3=3 col5=25", min_sin)};
}

Outcome move_invariance() {
  std::mt19937_64 rng(5);
  const MoveKind kinds[] = {MoveKind::R1Add, MoveKind::R1Remove, MoveKind::R2Add, MoveKind::R2Remove, MoveKind::R3};
  const Diagram starts[] = {extract(fixtures::trefoil()), extract(fixtures::figure_eight_knot())};
  const int ns[] = {2, 3, 5, 7};
  Tally tally;
  int moves = 0;
  for (int rep = 0; rep < 100; ++rep) {
    Diagram d = starts[rep % 2];
    std::array<std::uint64_t, 4> want{};
    for (int k = 0; k < 4; ++k) want[k] = fox_colorings(d, ns[k]);
    const int length = 1 + static_cast<int>(rng() % 10);
    for (int step = 0; step < length; ++step, ++moves) {
      std::vector<MoveSite> sites;
      for (MoveKind kind : kinds) {
        auto more = enumerate_move_sites(d, kind);
        sites.insert(sites.end(), more.begin(), more.end());
      }
      const MoveSite s = sites[rng() % sites.size()];
      const Diagram e = apply_move(d, s);
      for (int k = 0; k < 4; ++k) {
        tally.check(fox_colorings(e, ns[k]) == want[k],
                    fmt::format("sequence {} step {} ({}): colorings mod {} changed", rep, step, to_string(s.kind), ns[k]));
      }
      // Variant labels start with the curl's crossing sign.
      int expected = 0;
      if (s.kind == MoveKind::R1Add) expected = s.variant[0] == '+' ? 1 : -1;
      if (s.kind == MoveKind::R1Remove) expected = s.variant[0] == '+' ? -1 : 1;
      tally.check(writhe(e) - writhe(d) == expected,
                  fmt::format("sequence {} step {} ({} {}): writhe {} -> {}", rep, step, to_string(s.kind), s.variant,
                              writhe(d), writhe(e)));
      d = e;
    }
  }
  if (tally.failures) return {false, tally.first};
  return {true, fmt::format("100 sequences, {} moves, colorings mod 2,3,5,7 kept", moves)};
}

const EventRecord* single_event(const MoveScript& s, Tally& tally, const std::string& name) {
  tally.check(s.events.size() == 1, fmt::format("{}: {} events", name, s.events.size()));
  tally.check(s.ok(), fmt::format("{}: {}", name, s.ok() ? "" : s.problems.front().message));
  return s.events.size() == 1 ? &s.events.front() : nullptr;
}

Outcome model_families() {
  struct Model {
    const char* name;
    IsotopyFamily family;
    EventKind kind;
    const char* move;
    int delta;
  };
  const Model models[] = {{"cusp", fixtures::curl_removal(), EventKind::Cusp, "R1", 1},
                          {"parabolas", fixtures::pinch(), EventKind::Tangency, "R2", 2},
                          {"three lines", fixtures::three_strands(), EventKind::Triple, "R3", 0}};
  Tally tally;
  std::string seen;
  for (const auto& m : models) {
    const MoveScript s = trace(m.family);
    const EventRecord* e = single_event(s, tally, m.name);
    if (!e) continue;
    tally.check(e->event.kind == m.kind && e->event.move == m.move,
                fmt::format("{}: got {} {}", m.name, to_string(e->event.kind), e->event.move));
    tally.check(std::abs(e->event.delta_crossings) == m.delta && std::abs(e->observed_delta) == m.delta,
                fmt::format("{}: delta {} observed {}", m.name, e->event.delta_crossings, e->observed_delta));
    tally.check(e->classified && e->verified, fmt::format("{}: not verified", m.name));
    seen += fmt::format("{}{} {} at t={:.6f} delta {}", seen.empty() ? "" : "; ", m.name, e->event.move, e->event.t,
                        e->observed_delta);
  }
  if (tally.failures) return {false, tally.first};
  return {true, seen};
}

Outcome curl_removal_witness() {
  Tally tally;
  const MoveScript s = trace(fixtures::curl_removal());
  const EventRecord* e = single_event(s, tally, "curl removal");
  if (e) tally.check(e->event.move == "R1" && e->verified, "event is not a verified R1");
  tally.check(!s.intervals.empty() && s.intervals.back().diagram.crossing_count() == 0, "final diagram has crossings");
  tally.check(!s.colorings.empty(), "no coloring checks");
  for (const auto& c : s.colorings)
    tally.check(c.start == c.end, fmt::format("{}-colorings {} -> {}", c.n, c.start, c.end));
  if (tally.failures) return {false, tally.first};
  return {true, fmt::format("one R1 ({}) at t={:.6f}, final diagram crossingless, colorings agree", e->event.variant,
                            e->event.t)};
}

Outcome genericity_statistics() {
  std::mt19937_64 rng(7);
  const TraceConfig config;
  int conflicts = 0, unclassified = 0, crowded = 0, other = 0, events = 0;
  double closest = INFINITY;
  std::string first;
  for (int rep = 0; rep < 100; ++rep) {
    const IsotopyFamily family = fixtures::random_rotation_isotopy(rng);
    try {
      const MoveScript s = trace(family, config);
      for (std::size_t k = 0; k < s.events.size(); ++k) {
        const auto& e = s.events[k];
        ++events;
        if (!e.classified || !e.verified) {
          ++unclassified;
          if (first.empty()) first = fmt::format("family {}: unverified {} at t={:.9f}", rep, e.event.move, e.event.t);
        }
        if (k > 0) {
          const double gap = e.event.t - s.events[k - 1].event.t;
          closest = std::min(closest, gap);
          if (gap <= config.isolation_factor * config.bisect_tol) ++crowded;
        }
      }
      if (!s.ok() && first.empty()) first = fmt::format("family {}: {}", rep, s.problems.front().message);
      unclassified += s.ok() ? 0 : static_cast<int>(s.problems.size());
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ResolutionConflict) {
        ++conflicts;
      } else {
        ++other;
      }
      if (first.empty()) first = fmt::format("family {}: {}", rep, e.what());
    }
  }
  const std::string counts =
      fmt::format("100 isotopies, {} events, {} conflicts, {} unclassified, {} closer than {:.0e}, {} other errors; "
                  "closest pair {:.2e}",
                  events, conflicts, unclassified, crowded, config.isolation_factor * config.bisect_tol, other, closest);
  const bool pass = conflicts == 0 && unclassified == 0 && crowded == 0 && other == 0;
  return {pass, pass ? counts : counts + "; " + first};
}

Outcome non_isotopy() {
  const IsotopyFamily family = fixtures::two_frames(fixtures::trefoil(), fixtures::mirror(fixtures::trefoil()));
  const InjectivityResult r = check_injectivity_through_time(family);
  if (r.passed) return {false, "family passed the injectivity check"};
  const FourierLoop at = family.at(r.t);
  const double gap = norm(at.eval(r.u1) - at.eval(r.u2));
  if (gap > 1e-6 || circle_distance(r.u1, r.u2) < 0.1)
    return {false, fmt::format("witness t={} u1={} u2={} is {:.2e} apart", r.t, r.u1, r.u2, gap)};
  try {
    trace(family);
    return {false, "trace accepted the family"};
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotAnIsotopy) return {false, e.what()};
  }
  return {true, fmt::format("NOT_AN_ISOTOPY, collision at t={:.9f} u1={:.9f} u2={:.9f} (3D gap {:.1e})", r.t, r.u1,
                            r.u2, gap)};
}

Outcome derivative_hygiene() {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> angle(0.0, kTwoPi);
  std::uniform_real_distribution<double> time(0.02, 0.98);
  const double h = 1e-5, tol = 1e-5;
  double worst = 0.0;
  std::string where;
  auto note = [&](double err, const char* what) {
    if (err > worst) worst = err, where = what;
  };
  const FourierLoop loop = fixtures::random_loop(rng, 6);
  const IsotopyFamily fam({{0.0, fixtures::random_loop(rng, 4)},
                           {0.3, fixtures::random_loop(rng, 4)},
                           {0.7, fixtures::random_loop(rng, 4)},
                           {1.0, fixtures::random_loop(rng, 4)}});
  for (int i = 0; i < 100; ++i) {
    const double u = angle(rng), t = time(rng);
    note(max_abs(loop.derivative(u, 1), oracles::fd_derivative(loop, u, 1, h)), "f'");
    note(max_abs(loop.derivative(u, 2), oracles::fd_derivative(loop, u, 2, h)), "f''");
    note(max_abs(loop.derivative(u, 3), oracles::fd_derivative(loop, u, 3, h)), "f'''");
    const LoopJet j = loop.jet(u);
    note(max_abs(j.d1, oracles::fd_derivative(loop, u, 1, h)), "jet d1");
    note(max_abs(j.d2, oracles::fd_derivative(loop, u, 2, h)), "jet d2");
    note(max_abs(j.d3, oracles::fd_derivative(loop, u, 3, h)), "jet d3");
    const FamilyPartials p = fam.partials(u, t);
    const FamilyPartials fd = oracles::fd_partials(fam, u, t, h);
    note(max_abs(p.f_u, fd.f_u), "f_u");
    note(max_abs(p.f_t, fd.f_t), "f_t");
    note(max_abs(p.f_uu, fd.f_uu), "f_uu");
    note(max_abs(p.f_ut, fd.f_ut), "f_ut");
    note(max_abs(p.f_uuu, fd.f_uuu), "f_uuu");
    const FourierLoop rate = fam.rate_at(t);
    note(max_abs(rate.eval(u) - Point3{}, fd.f_t), "rate");
  }
  const std::string detail = fmt::format("12 derivatives x 100 points, worst |analytic - FD| {:.1e} ({})", worst, where);
  return {worst < tol, detail};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget;  // seconds; 0 means none stated
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {1, "crossing search matches dense-grid oracle", 30, oracle_equivalence},
      {2, "standard knots", 5, standard_knots},
      {3, "move invariance", 10, move_invariance},
      {4, "event classification fixtures", 20, model_families},
      {5, "curl removal end to end", 10, curl_removal_witness},
      {6, "genericity statistics", 300, genericity_statistics},
      {7, "non-isotopy detection", 30, non_isotopy},
      {8, "derivatives vs finite differences", 0, derivative_hygiene},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, fmt::format("threw {}", e.what())};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.budget == 0 || secs < c.budget;
    const bool pass = o.pass && in_time;
    failed += pass ? 0 : 1;
    const std::string budget = c.budget == 0 ? "" : fmt::format(" / {:.0f} s", c.budget);
    fmt::print("criterion {}: {} {} [{:.2f} s{}{}] {}\n", c.id, pass ? "PASS" : "FAIL", c.name, secs, budget,
               in_time ? "" : " over budget", o.detail);
    std::fflush(stdout);
  }
  return failed;
}
