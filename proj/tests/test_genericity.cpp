#include <doctest.h>

#include <cmath>
#include <random>

#include "knotrace/genericity.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace knotrace;

namespace {

// Every library point pairs with one oracle point within tol in both parameters.
bool matches_oracle(const std::vector<DoublePoint>& got, const std::vector<oracles::OraclePoint>& want, double tol) {
  if (got.size() != want.size()) return false;
  std::vector<bool> used(want.size(), false);
  for (const auto& p : got) {
    bool hit = false;
    for (std::size_t k = 0; k < want.size(); ++k) {
      if (used[k]) continue;
      if (circle_distance(p.u1, want[k].u1) < tol && circle_distance(p.u2, want[k].u2) < tol) {
        used[k] = true;
        hit = true;
        break;
      }
    }
    if (!hit) return false;
  }
  return true;
}

std::vector<DoublePoint> double_points(const FourierLoop& loop) {
  return find_double_points(loop, default_grid(loop), 1e-10).points;
}

}  // namespace

TEST_CASE("circle is embedded with unit margin") {
  const FourierLoop c = fixtures::circle();
  const EmbeddingCheck e = check_embedded(c, 256, 1e-3);
  CHECK(e.margin == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(e.offenders.empty());
  const ImmersionCheck i = check_immersion(c, 256, 1e-3);
  CHECK(i.margin == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(i.offenders.empty());
  CHECK(double_points(c).empty());
  const GenericityReport r = validate(c);
  CHECK(r.passed());
  CHECK(r.double_points.empty());
  CHECK(std::isinf(r.triple_margin));
}

TEST_CASE("trefoil margins agree with dense grids") {
  const FourierLoop t = fixtures::trefoil();
  const EmbeddingCheck e = check_embedded(t, default_grid(t), 1e-3 * t.scale());
  const double dense = oracles::dense_embedding_ratio(t);
  CHECK(e.margin > 0.0);
  CHECK(e.margin <= dense + 1e-12);
  CHECK(e.margin == doctest::Approx(dense).epsilon(1e-4));
  const ImmersionCheck i = check_immersion(t, default_grid(t), 1e-3 * t.scale());
  CHECK(i.margin > 0.0);
  CHECK(i.margin == doctest::Approx(oracles::dense_projected_speed(t)).epsilon(1e-6));
}

TEST_CASE("trefoil has three transverse crossings") {
  const FourierLoop t = fixtures::trefoil();
  const auto pts = double_points(t);
  REQUIRE(pts.size() == 3);
  for (const auto& p : pts) {
    CHECK(p.transversality > 0.1);
    CHECK(p.u1 < p.u2);
    CHECK(norm(project(t.eval(p.u1)) - project(t.eval(p.u2))) < 1e-10);
    CHECK(std::abs(p.z_gap) > 1e-3);
  }
  CHECK(matches_oracle(pts, oracles::dense_double_points(t), 1e-4));
  const TripleCheck tc = check_no_triple(pts, 1e-3 * t.scale());
  CHECK(tc.clusters.empty());
  CHECK(tc.margin > 1.0);
  const GenericityReport r = validate(t);
  CHECK(r.passed());
  CHECK(r.double_points.size() == 3);
}

TEST_CASE("flat figure-eight is not embedded") {
  const FourierLoop f = fixtures::flat_figure_eight();
  const EmbeddingCheck e = check_embedded(f, 256, 1e-3 * f.scale());
  CHECK(e.margin < 1e-9);
  REQUIRE(!e.offenders.empty());
  bool found = false;
  for (const auto& p : e.offenders) {
    found = found || (circle_distance(p.u1, 0.0) < 1e-6 && circle_distance(p.u2, kPi) < 1e-6);
  }
  CHECK(found);
  const GenericityReport r = validate(f);
  CHECK_FALSE(r.embedded());
  CHECK_FALSE(r.passed());
  REQUIRE_FALSE(r.diagnostics.empty());
  CHECK(r.diagnostics.front().code == ErrorCode::NotEmbedded);
}

TEST_CASE("vertical tangent is an immersion offender") {
  const FourierLoop v = fixtures::vertical_tangent_loop();
  const ImmersionCheck i = check_immersion(v, 256, 1e-3 * v.scale());
  CHECK(i.margin < 1e-12);
  REQUIRE(i.offenders.size() == 1);
  CHECK(circle_distance(i.offenders[0], 0.0) < 1e-6);
  const GenericityReport r = validate(v);
  CHECK(r.embedded());
  CHECK_FALSE(r.immersed());
}

TEST_CASE("figure-eight knot crossings match the dense oracle") {
  const FourierLoop f = fixtures::figure_eight_knot();
  const auto pts = double_points(f);
  const auto want = oracles::dense_double_points(f);
  CHECK(want.size() >= 4);
  CHECK(matches_oracle(pts, want, 1e-4));
}

TEST_CASE("concurrent strands form one cluster of three") {
  const FourierLoop c = fixtures::concurrent_triple_loop();
  const GenericityReport r = validate(c);
  REQUIRE(r.triple_clusters.size() == 1);
  CHECK(r.triple_clusters[0].size() == 3);
  CHECK_FALSE(r.no_triple());
  CHECK(check_no_triple({}, 1.0).margin == std::numeric_limits<double>::infinity());
}

TEST_CASE("double points follow a reparametrisation") {
  const FourierLoop t = fixtures::trefoil();
  const double shift = 0.7;
  const auto base = double_points(t);
  const auto moved = double_points(fixtures::phase_shift(t, shift));
  REQUIRE(base.size() == moved.size());
  for (const auto& p : base) {
    double a = wrap_angle(p.u1 - shift);
    double b = wrap_angle(p.u2 - shift);
    if (a > b) std::swap(a, b);
    bool hit = false;
    for (const auto& q : moved) hit = hit || (std::abs(q.u1 - a) < 1e-9 && std::abs(q.u2 - b) < 1e-9);
    CHECK(hit);
  }
}

TEST_CASE("verdicts are threshold functions of the margins") {
  const FourierLoop t = fixtures::trefoil();
  GenericityConfig loose;
  loose.immersion_rel = 1e-6;
  loose.triple_rel = 1e-6;
  loose.embedded_rel = 1e-6;
  loose.transversality = 1e-6;
  const GenericityReport a = validate(t);
  const GenericityReport b = validate(t, loose);
  CHECK(a.embedded_margin == b.embedded_margin);
  CHECK(a.transversality_margin == b.transversality_margin);
  CHECK(b.passed());
  GenericityConfig strict;
  strict.transversality = 0.999;
  CHECK_FALSE(validate(t, strict).transverse());
  CHECK(validate(t, strict).embedded());
}

TEST_CASE("random loops match the dense oracle") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> degree(1, 6);
  for (int rep = 0; rep < 4; ++rep) {
    const FourierLoop loop = fixtures::random_loop(rng, degree(rng));
    const DoublePointSearch s = find_double_points(loop, default_grid(loop), 1e-10);
    CHECK(s.diagnostics.empty());
    CHECK(matches_oracle(s.points, oracles::dense_double_points(loop), 1e-4));
  }
}

TEST_CASE("report serialisation") {
  const GenericityReport r = validate(fixtures::trefoil());
  const std::string kv = format_report_kv(r);
  CHECK(kv.find("crossings=3\n") != std::string::npos);
  CHECK(kv.find("verdict=PASS\n") != std::string::npos);
  CHECK(kv.find("embedded_margin=") != std::string::npos);
  CHECK(kv.find("thresholds=engineering") != std::string::npos);
  const std::string text = format_report_text(r);
  CHECK(text.find("crossings=3") != std::string::npos);
  CHECK(format_report_kv(validate(fixtures::circle())).find("crossings=0\n") != std::string::npos);
}

TEST_CASE("perturbation leaves generic loops alone") {
  const FourierLoop t = fixtures::trefoil();
  const FourierLoop p = perturb_to_generic(t, 1, 1e-3);
  CHECK(p == t);
  CHECK(p.coefficient_distance(t) <= 1e-3);
}

TEST_CASE("perturbation removes a vertical tangent") {
  const FourierLoop v = fixtures::vertical_tangent_loop();
  const FourierLoop p = perturb_to_generic(v, 7, 1e-3);
  CHECK_FALSE(p == v);
  CHECK(check_immersion(p, default_grid(p), 1e-3 * p.scale()).offenders.empty());
  CHECK(validate(p).passed());
}

TEST_CASE("perturbation splits a triple point") {
  const FourierLoop c = fixtures::concurrent_triple_loop();
  const FourierLoop p = perturb_to_generic(c, 7, 1e-3);
  const auto pts = double_points(p);
  CHECK(pts.size() == 3);
  const TripleCheck tc = check_no_triple(pts, 1e-3 * p.scale());
  CHECK(tc.clusters.empty());
}

TEST_CASE("perturbation refuses non-embedded input") {
  CHECK_THROWS_AS(perturb_to_generic(fixtures::flat_figure_eight(), 1, 1e-3), Error);
}

TEST_CASE("perturbation succeeds on random loops") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> degree(1, 6);
  int ok = 0;
  for (int rep = 0; rep < 50; ++rep) {
    const FourierLoop loop = fixtures::random_loop(rng, degree(rng));
    try {
      const FourierLoop p = perturb_to_generic(loop, static_cast<std::uint64_t>(rep), 1e-3);
      ok += validate(p).passed() ? 1 : 0;
    } catch (const Error&) {
    }
  }
  CHECK(ok >= 49);
}
