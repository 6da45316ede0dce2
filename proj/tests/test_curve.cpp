#include <doctest.h>

#include <cmath>
#include <random>

#include "knotrace/error.hpp"
#include "knotrace/spec_io.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace knotrace;

namespace {

void check_close(const Point3& a, const Point3& b, double tol) {
  CHECK(std::abs(a.x - b.x) < tol);
  CHECK(std::abs(a.y - b.y) < tol);
  CHECK(std::abs(a.z - b.z) < tol);
}

void check_close(const Vec3& a, const Vec3& b, double tol) {
  CHECK(std::abs(a.x - b.x) < tol);
  CHECK(std::abs(a.y - b.y) < tol);
  CHECK(std::abs(a.z - b.z) < tol);
}

IsotopyFamily three_keyframe_family(std::mt19937_64& rng) {
  return IsotopyFamily({{0.0, fixtures::random_loop(rng, 3)},
                        {0.35, fixtures::random_loop(rng, 3)},
                        {0.8, fixtures::random_loop(rng, 3)},
                        {1.0, fixtures::random_loop(rng, 3)}});
}

}  // namespace

TEST_CASE("eval on the circle and trefoil") {
  check_close(fixtures::circle().eval(0.0), {1, 0, 0}, 1e-15);
  check_close(fixtures::circle().eval(kPi), {-1, 0, 0}, 1e-15);
  check_close(fixtures::trefoil().eval(0.0), {0, -1, 0}, 1e-15);
}

TEST_CASE("analytic derivatives of the circle") {
  check_close(fixtures::circle().derivative(0.0, 1), {0, 1, 0}, 1e-15);
  check_close(fixtures::circle().derivative(0.0, 2), {-1, 0, 0}, 1e-15);
  CHECK_THROWS_AS(fixtures::circle().derivative(0.0, 0), Error);
}

TEST_CASE("derivatives agree with central differences") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> angle(0.0, kTwoPi);
  for (int rep = 0; rep < 5; ++rep) {
    const FourierLoop loop = fixtures::random_loop(rng, 6);
    for (int i = 0; i < 100; ++i) {
      const double u = angle(rng);
      for (int order = 1; order <= 3; ++order) {
        const Vec3 fd = oracles::fd_derivative(loop, u, order, 1e-5);
        check_close(loop.derivative(u, order), fd, 1e-5);
      }
      const LoopJet j = loop.jet(u);
      check_close(j.f, loop.eval(u), 1e-13);
      check_close(j.d1, loop.derivative(u, 1), 1e-12);
      check_close(j.d2, loop.derivative(u, 2), 1e-12);
      check_close(j.d3, loop.derivative(u, 3), 1e-11);
    }
  }
}

TEST_CASE("periodicity") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> angle(0.0, kTwoPi);
  const FourierLoop loop = fixtures::random_loop(rng, 8);
  for (int i = 0; i < 100; ++i) {
    const double u = angle(rng);
    check_close(loop.eval(u), loop.eval(u + kTwoPi), 1e-12);
  }
}

TEST_CASE("projection") {
  CHECK(project(Point3{1, 2, 3}) == Point2{1, 2});
  CHECK(project(Vec3{0, 0, 5}) == Vec2{0, 0});
  // The planar part of a loop differentiates to the planar part of the derivative.
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> angle(0.0, kTwoPi);
  FourierLoop loop = fixtures::random_loop(rng, 4);
  FourierLoop flat = loop;
  for (int k = 0; k <= 4; ++k) {
    if (k == 0) {
      flat.set_constant(2, 0.0);
    } else {
      flat.set_cos(2, k, 0.0);
      flat.set_sin(2, k, 0.0);
    }
  }
  for (int i = 0; i < 100; ++i) {
    const double u = angle(rng);
    const Vec2 a = project(loop.derivative(u, 1));
    const Vec2 b = project(flat.derivative(u, 1));
    CHECK(a == b);
  }
}

TEST_CASE("loop construction is validated") {
  CHECK_THROWS_AS(FourierLoop(0), Error);
  CHECK_THROWS_AS(FourierLoop(2, std::vector<double>(7, 0.0)), Error);
  CHECK(fixtures::trefoil().scale() == doctest::Approx(2.0));
}

TEST_CASE("keyframes are reproduced exactly") {
  std::mt19937_64 rng(7);
  const IsotopyFamily fam = three_keyframe_family(rng);
  for (const auto& k : fam.keyframes()) {
    CHECK(fam.at(k.t) == k.loop);
    const FamilyPartials p = fam.partials(1.3, k.t);
    CHECK(p.f == k.loop.eval(1.3));
  }
}

TEST_CASE("two keyframes give a linear family") {
  std::mt19937_64 rng(8);
  const FourierLoop a = fixtures::random_loop(rng, 2);
  const FourierLoop b = fixtures::random_loop(rng, 2);
  const IsotopyFamily fam({{0.0, a}, {1.0, b}});
  const FourierLoop mid = fam.at(0.25);
  for (std::size_t i = 0; i < a.coefficients().size(); ++i) {
    CHECK(mid.coefficients()[i] == doctest::Approx(0.75 * a.coefficients()[i] + 0.25 * b.coefficients()[i]));
  }
}

TEST_CASE("constant family has zero time derivative") {
  const IsotopyFamily fam = IsotopyFamily::constant(fixtures::trefoil());
  for (double u : {0.0, 1.0, 2.5}) {
    for (double t : {0.0, 0.3, 1.0}) {
      const FamilyPartials p = fam.partials(u, t);
      CHECK(p.f_t == Vec3{0, 0, 0});
      CHECK(p.f_ut == Vec3{0, 0, 0});
    }
  }
}

TEST_CASE("family partials agree with finite differences") {
  std::mt19937_64 rng(9);
  const IsotopyFamily fam = three_keyframe_family(rng);
  std::uniform_real_distribution<double> angle(0.0, kTwoPi);
  std::uniform_real_distribution<double> time(0.01, 0.99);
  for (int i = 0; i < 50; ++i) {
    const double u = angle(rng);
    const double t = time(rng);
    const FamilyPartials p = fam.partials(u, t);
    const auto fd = oracles::fd_partials(fam, u, t, 1e-5);
    check_close(p.f, fd.f, 1e-12);
    check_close(p.f_u, fd.f_u, 1e-5);
    check_close(p.f_t, fd.f_t, 1e-5);
    check_close(p.f_uu, fd.f_uu, 1e-5);
    check_close(p.f_ut, fd.f_ut, 1e-5);
    check_close(p.f_uuu, fd.f_uuu, 1e-5);
  }
}

TEST_CASE("interpolation is C1 at interior keyframes") {
  std::mt19937_64 rng(10);
  const IsotopyFamily fam = three_keyframe_family(rng);
  const double h = 1e-6;
  for (std::size_t j = 1; j + 1 < fam.keyframes().size(); ++j) {
    const double tj = fam.keyframes()[j].t;
    for (double u : {0.2, 2.0, 4.4}) {
      const Point3 f0 = fam.at(tj).eval(u);
      const Point3 fp1 = fam.at(tj + h).eval(u);
      const Point3 fp2 = fam.at(tj + 2 * h).eval(u);
      const Point3 fm1 = fam.at(tj - h).eval(u);
      const Point3 fm2 = fam.at(tj - 2 * h).eval(u);
      // Second-order one-sided differences.
      const Vec3 right = ((fp1 - f0) * 4.0 - (fp2 - f0)) * (1.0 / (2 * h));
      const Vec3 left = ((f0 - fm1) * 4.0 - (f0 - fm2)) * (1.0 / (2 * h));
      check_close(right, left, 1e-6);
    }
  }
}

TEST_CASE("family rejects bad input") {
  const FourierLoop c = fixtures::circle();
  CHECK_THROWS_AS(IsotopyFamily({{0.0, c}}), Error);
  CHECK_THROWS_AS(IsotopyFamily({{0.0, c}, {0.9, c}}), Error);
  CHECK_THROWS_AS(IsotopyFamily({{0.0, c}, {0.5, c}, {0.5, c}, {1.0, c}}), Error);
  CHECK_THROWS_AS(IsotopyFamily({{0.0, c}, {1.0, fixtures::trefoil()}}), Error);
  const IsotopyFamily fam = IsotopyFamily::constant(c);
  CHECK_THROWS_AS(fam.partials(0.0, 1.5), Error);
  CHECK_THROWS_AS(fam.at(-0.1), Error);
}

TEST_CASE("knot spec round trip") {
  std::mt19937_64 rng(12);
  const FourierLoop loop = fixtures::random_loop(rng, 3);
  CHECK(parse_knot_spec(format_knot_spec(loop)) == loop);

  const std::string text =
      "# circle\n"
      "degree 1\n"
      "\n"
      "x: 0 1 0   # cos u\n"
      "y: 0 0 1\n"
      "z: 0 0 0\n";
  CHECK(parse_knot_spec(text) == fixtures::circle());
}

TEST_CASE("isotopy spec round trip") {
  std::mt19937_64 rng(13);
  const IsotopyFamily fam = three_keyframe_family(rng);
  const IsotopyFamily back = parse_isotopy_spec(format_isotopy_spec(fam));
  REQUIRE(back.keyframes().size() == fam.keyframes().size());
  for (std::size_t j = 0; j < fam.keyframes().size(); ++j) {
    CHECK(back.keyframes()[j].t == fam.keyframes()[j].t);
    CHECK(back.keyframes()[j].loop == fam.keyframes()[j].loop);
  }
}

TEST_CASE("parse errors carry line numbers") {
  auto message = [](const std::string& text) {
    try {
      parse_knot_spec(text);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ParseError);
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message("degree 1\nx: 0 1 0\ny: 0 0 1\n").find("line 4") != std::string::npos);
  CHECK(message("degree 1\nx: 0 1 0\ny: 0 0\nz: 0 0 0\n").find("line 3") != std::string::npos);
  CHECK(message("degree 1\nx: 0 1 zz\ny: 0 0 1\nz: 0 0 0\n").find("line 2") != std::string::npos);
  CHECK(message("degree two\n").find("line 1") != std::string::npos);
  CHECK(message("degree 65\n").find("cap") != std::string::npos);
  CHECK_THROWS_AS(parse_knot_spec("degree 3\n", ParseOptions{2}), Error);
  CHECK_THROWS_AS(parse_isotopy_spec("keyframe t=0\ndegree 1\nx: 0 1 0\ny: 0 0 1\nz: 0 0 0\n"), Error);
}
