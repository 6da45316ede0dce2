#pragma once

// Loops and families shared by the test suites.

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "knotrace/fourier_loop.hpp"
#include "knotrace/genericity.hpp"
#include "knotrace/isotopy.hpp"

namespace fixtures {

using knotrace::FourierLoop;

// Rows are [c0, a1, b1, a2, b2, ...].
inline FourierLoop circle() {
  return knotrace::make_loop(std::vector<double>{0, 1, 0}, std::vector<double>{0, 0, 1},
                             std::vector<double>{0, 0, 0});
}

// x = sin u + 2 sin 2u, y = cos u - 2 cos 2u, z = -sin 3u
inline FourierLoop trefoil() {
  return knotrace::make_loop(std::vector<double>{0, 0, 1, 0, 2, 0, 0},
                             std::vector<double>{0, 1, 0, -2, 0, 0, 0},
                             std::vector<double>{0, 0, 0, 0, 0, 0, -1});
}

inline FourierLoop mirror(const FourierLoop& loop) {
  std::vector<double> c(loop.coefficients().begin(), loop.coefficients().end());
  for (int j = 0; j < loop.axis_size(); ++j) c[2 * loop.axis_size() + j] = -c[2 * loop.axis_size() + j];
  return FourierLoop(loop.degree(), std::move(c));
}

// x = (2 + cos 2u) cos 3u, y = (2 + cos 2u) sin 3u, z = sin 4u
inline FourierLoop figure_eight_knot() {
  FourierLoop l(5);
  l.set_cos(0, 3, 2.0);
  l.set_cos(0, 1, 0.5);
  l.set_cos(0, 5, 0.5);
  l.set_sin(1, 3, 2.0);
  l.set_sin(1, 5, 0.5);
  l.set_sin(1, 1, 0.5);
  l.set_sin(2, 4, 1.0);
  return l;
}

// Planar figure-eight curve with z = 0: f(0) = f(π).
inline FourierLoop flat_figure_eight() {
  FourierLoop l(2);
  l.set_sin(0, 2, 1.0);
  l.set_sin(1, 1, 1.0);
  return l;
}

// Cardioid-like curve with a cusp at u = 0 lifted by z = sin u.
// x = 2 cos u - cos 2u, y = 2 sin u - sin 2u.
inline FourierLoop vertical_tangent_loop() {
  FourierLoop l(2);
  l.set_cos(0, 1, 2.0);
  l.set_cos(0, 2, -1.0);
  l.set_sin(1, 1, 2.0);
  l.set_sin(1, 2, -1.0);
  l.set_sin(2, 1, 1.0);
  return l;
}

// Three strands of (cos u - cos 2u, sin u + sin 2u) pass through the origin
// at u = 0, 2π/3, 4π/3.
inline FourierLoop concurrent_triple_loop() {
  FourierLoop l(2);
  l.set_cos(0, 1, 1.0);
  l.set_cos(0, 2, -1.0);
  l.set_sin(1, 1, 1.0);
  l.set_sin(1, 2, 1.0);
  l.set_sin(2, 1, std::cos(0.3));
  l.set_cos(2, 1, std::sin(0.3));
  return l;
}

inline FourierLoop random_loop(std::mt19937_64& rng, int degree) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<double> c(static_cast<std::size_t>(3 * (2 * degree + 1)));
  for (auto& v : c) v = d(rng);
  return FourierLoop(degree, std::move(c));
}

}  // namespace fixtures

namespace fixtures {

/// The same curve reparametrised by u -> u + c.
inline FourierLoop phase_shift(const FourierLoop& loop, double c) {
  FourierLoop out = loop;
  for (int a = 0; a < 3; ++a) {
    for (int k = 1; k <= loop.degree(); ++k) {
      const double ca = loop.cos_coeff(a, k);
      const double sb = loop.sin_coeff(a, k);
      out.set_cos(a, k, ca * std::cos(k * c) + sb * std::sin(k * c));
      out.set_sin(a, k, sb * std::cos(k * c) - ca * std::sin(k * c));
    }
  }
  return out;
}

}  // namespace fixtures

namespace fixtures {

using knotrace::IsotopyFamily;
using knotrace::Keyframe;

inline IsotopyFamily two_frames(const FourierLoop& a, const FourierLoop& b, bool reverse = false) {
  if (reverse) return IsotopyFamily({Keyframe{0.0, b}, Keyframe{1.0, a}});
  return IsotopyFamily({Keyframe{0.0, a}, Keyframe{1.0, b}});
}

// x = cos u, y = sin u ((1-s) cos u + s), z = ±sin u, s = t.  One curl
// crossing at cos u = -s/(1-s) while s < 1/2; the curl closes into a cusp
// at u = π, s = 1/2, and the loop is a round circle at s = 1.
inline IsotopyFamily curl_removal(double z_sign = 1.0, bool reverse = false) {
  FourierLoop curl(2), circle(2);
  for (FourierLoop* l : {&curl, &circle}) {
    l->set_cos(0, 1, 1.0);
    l->set_sin(2, 1, z_sign);
  }
  curl.set_sin(1, 2, 0.5);
  circle.set_sin(1, 1, 1.0);
  return two_frames(curl, circle, reverse);
}

// x = cos u, y = sin u (h + cos² u) + m cos² u, z = sin u, with h running
// from 1/2 to -1/2.  The arcs near u = π/2 and u = 3π/2 touch at h = 0
// (t = 1/2) and cross twice afterwards, at cos² u = -h.  m = 0 gives
// opposite parabolas, m = 2 bends both the same way.
inline IsotopyFamily pinch(double m = 0.0, bool reverse = false) {
  auto at = [m](double h) {
    FourierLoop l(3);
    l.set_cos(0, 1, 1.0);
    l.set_sin(1, 1, h + 0.25);  // sin u cos² u = (sin u + sin 3u) / 4
    l.set_sin(1, 3, 0.25);
    l.set_constant(1, 0.5 * m);
    l.set_cos(1, 2, 0.5 * m);
    l.set_sin(2, 1, 1.0);
    return l;
  };
  return two_frames(at(0.5), at(-0.5), reverse);
}

// (cos u - cos 2u + d cos u, sin u + sin 2u) has three strands through the
// origin at u = 0, 2π/3, 4π/3 when d = 0; d runs from -0.2 to 0.2 and
// slides the vertical strand at u = 0 across the crossing of the other two.
// z takes the given levels at the three strands.
inline IsotopyFamily three_strands(std::array<double, 3> z = {1.0, 0.0, -1.0}) {
  auto at = [&z](double d) {
    FourierLoop l(2);
    l.set_cos(0, 1, 1.0 + d);
    l.set_cos(0, 2, -1.0);
    l.set_sin(1, 1, 1.0);
    l.set_sin(1, 2, 1.0);
    // c0 + a cos u + b sin u through the three levels.
    const double c0 = (z[0] + z[1] + z[2]) / 3.0;
    double a = 0.0, b = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double u = 2.0 * M_PI * i / 3.0;
      a += 2.0 / 3.0 * z[i] * std::cos(u);
      b += 2.0 / 3.0 * z[i] * std::sin(u);
    }
    l.set_constant(2, c0);
    l.set_cos(2, 1, a);
    l.set_sin(2, 1, b);
    return l;
  };
  return two_frames(at(-0.2), at(0.2));
}

}  // namespace fixtures

namespace fixtures {

// x = cos u, y = sin u g(cos u), z = sin u with g(c) = k c² + p c + h, one
// keyframe per (k, p, h).  Crossings sit at u and -u for each root c = cos u
// of g in (-1, 1); a root leaving through ±1 is a cusp, a double root a
// tangency.  The family stays embedded since z = ±sin u at a crossing.
inline FourierLoop quadratic_fold_loop(double k, double p, double h) {
  FourierLoop l(3);
  l.set_cos(0, 1, 1.0);
  // sin u (k cos² u + p cos u + h) = (h + k/4) sin u + (p/2) sin 2u + (k/4) sin 3u
  l.set_sin(1, 1, h + 0.25 * k);
  l.set_sin(1, 2, 0.5 * p);
  l.set_sin(1, 3, 0.25 * k);
  l.set_sin(2, 1, 1.0);
  return l;
}

inline IsotopyFamily quadratic_fold(const std::vector<std::array<double, 3>>& kph) {
  std::vector<Keyframe> frames;
  for (std::size_t i = 0; i < kph.size(); ++i) {
    frames.push_back({static_cast<double>(i) / static_cast<double>(kph.size() - 1),
                      quadratic_fold_loop(kph[i][0], kph[i][1], kph[i][2])});
  }
  return IsotopyFamily(std::move(frames));
}

// (k, p, h) of a quadratic_fold loop, read back from its coefficients.
inline std::array<double, 3> quadratic_fold_params(const FourierLoop& l) {
  const double k = 4.0 * l.sin_coeff(1, 3);
  return {k, 2.0 * l.sin_coeff(1, 2), l.sin_coeff(1, 1) - 0.25 * k};
}

// Rotation by `angle` about the unit axis, applied to every coefficient triple.
inline FourierLoop rotated(const FourierLoop& loop, std::array<double, 3> axis, double angle) {
  const double c = std::cos(angle), s = std::sin(angle), k = 1.0 - c;
  const auto [x, y, z] = axis;
  const double r[3][3] = {{c + x * x * k, x * y * k - z * s, x * z * k + y * s},
                          {y * x * k + z * s, c + y * y * k, y * z * k - x * s},
                          {z * x * k - y * s, z * y * k + x * s, c + z * z * k}};
  FourierLoop out = loop;
  const int n = loop.axis_size();
  std::vector<double> cf(loop.coefficients().begin(), loop.coefficients().end());
  for (int j = 0; j < n; ++j) {
    const double v[3] = {cf[j], cf[n + j], cf[2 * n + j]};
    for (int a = 0; a < 3; ++a) cf[a * n + j] = r[a][0] * v[0] + r[a][1] * v[1] + r[a][2] * v[2];
  }
  return FourierLoop(loop.degree(), std::move(cf));
}

// The unit circle turned about the x axis through the vertical: at t = 1/2
// the projection is a doubled segment with two cusps at once.
inline IsotopyFamily edge_on_circle() {
  std::vector<Keyframe> frames;
  for (int j = 0; j <= 8; ++j) frames.push_back({j / 8.0, rotated(circle(), {1.0, 0.0, 0.0}, M_PI / 2 + 0.6 * (j / 4.0 - 1.0))});
  return IsotopyFamily(std::move(frames));
}

// A random loop of degree 2..4 turned rigidly about a random axis, sampled
// as nine keyframes.  Both ends pass validation.  Degree 1 is left out: such
// a loop is a plane ellipse, and turning it edge-on makes two cusps at once.
inline IsotopyFamily random_rotation_isotopy(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> degree(2, 4);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> turn(0.5, 2.0);
  for (;;) {
    const FourierLoop base = random_loop(rng, degree(rng));
    std::array<double, 3> axis{gauss(rng), gauss(rng), gauss(rng)};
    const double len = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
    for (double& v : axis) v /= len;
    const double angle = turn(rng);
    std::vector<Keyframe> frames;
    for (int j = 0; j <= 8; ++j) frames.push_back({j / 8.0, rotated(base, axis, angle * j / 8.0)});
    if (!knotrace::validate(frames.front().loop).passed() || !knotrace::validate(frames.back().loop).passed()) continue;
    return IsotopyFamily(std::move(frames));
  }
}

}  // namespace fixtures
