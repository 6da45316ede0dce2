#pragma once

// Small dense solves and a bracketed 1D root finder shared by the numerical
// modules.

#include <array>
#include <cmath>
#include <optional>
#include <tuple>
#include <utility>

namespace knotrace::detail {

/// Solves [a b; c d] x = r.  Returns nullopt when the determinant is
/// negligible relative to the matrix entries.
inline std::optional<std::array<double, 2>> solve2(double a, double b, double c, double d, double r0, double r1,
                                                   double rel_eps = 1e-14) {
  const double det = a * d - b * c;
  const double size = std::max({std::abs(a) * std::abs(d), std::abs(b) * std::abs(c), 1e-300});
  if (!(std::abs(det) > rel_eps * size)) return std::nullopt;
  return std::array<double, 2>{(r0 * d - b * r1) / det, (a * r1 - c * r0) / det};
}

using Mat3 = std::array<std::array<double, 3>, 3>;

/// Gaussian elimination with partial pivoting.
inline std::optional<std::array<double, 3>> solve3(Mat3 m, std::array<double, 3> r, double rel_eps = 1e-14) {
  double size = 0.0;
  for (const auto& row : m)
    for (double v : row) size = std::max(size, std::abs(v));
  if (size == 0.0) return std::nullopt;
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int i = col + 1; i < 3; ++i)
      if (std::abs(m[i][col]) > std::abs(m[piv][col])) piv = i;
    if (std::abs(m[piv][col]) <= rel_eps * size) return std::nullopt;
    std::swap(m[piv], m[col]);
    std::swap(r[piv], r[col]);
    for (int i = col + 1; i < 3; ++i) {
      const double f = m[i][col] / m[col][col];
      for (int j = col; j < 3; ++j) m[i][j] -= f * m[col][j];
      r[i] -= f * r[col];
    }
  }
  std::array<double, 3> x{};
  for (int i = 2; i >= 0; --i) {
    double s = r[i];
    for (int j = i + 1; j < 3; ++j) s -= m[i][j] * x[j];
    x[i] = s / m[i][i];
  }
  return x;
}

/// Root of g on [a, b] given g(a)·g(b) ≤ 0, by Newton safeguarded with
/// bisection.  `eval(x)` returns {g(x), g'(x)}.
template <class F>
double bracketed_newton(F&& eval, double a, double b, double xtol, int max_iter = 100) {
  const auto [ga, da] = eval(a);
  const auto [gb, db] = eval(b);
  (void)da;
  (void)db;
  if (ga == 0.0) return a;
  if (gb == 0.0) return b;
  // Orient so g(lo) < 0 < g(hi).
  double lo = ga < 0.0 ? a : b;
  double hi = ga < 0.0 ? b : a;
  double x = 0.5 * (a + b);
  double dx_old = std::abs(b - a);
  double dx = dx_old;
  auto [g, dg] = eval(x);
  for (int it = 0; it < max_iter; ++it) {
    const bool out_of_range = ((x - hi) * dg - g) * ((x - lo) * dg - g) > 0.0;
    if (out_of_range || std::abs(2.0 * g) > std::abs(dx_old * dg)) {
      dx_old = dx;
      dx = 0.5 * (hi - lo);
      x = lo + dx;
    } else {
      dx_old = dx;
      dx = g / dg;
      x -= dx;
    }
    if (std::abs(dx) < xtol) return x;
    std::tie(g, dg) = eval(x);
    if (g == 0.0) return x;
    if (g < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
  }
  return x;
}

}  // namespace knotrace::detail
