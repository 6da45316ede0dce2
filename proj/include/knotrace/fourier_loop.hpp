#pragma once

#include <array>
#include <span>
#include <vector>

#include "knotrace/geometry.hpp"

namespace knotrace {

/// f(u) and its first three u-derivatives at one parameter value.
struct LoopJet {
  Point3 f;
  Vec3 d1;
  Vec3 d2;
  Vec3 d3;
};

/// A smooth closed curve S¹ → R³ given per coordinate by a truncated Fourier
/// series  c0 + Σ_{k=1..N} (a_k cos ku + b_k sin ku).
///
/// Coefficients are stored flat, axis by axis, in the order of the text
/// format: [c0, a1, b1, ..., aN, bN] for x, then y, then z.  All derivatives
/// are computed term by term.
class FourierLoop {
 public:
  static constexpr int kDefaultMaxDegree = 64;

  /// All-zero loop of the given degree (degree ≥ 1).
  explicit FourierLoop(int degree);
  /// Takes ownership of a flat coefficient vector of size 3·(2N+1).
  FourierLoop(int degree, std::vector<double> coefficients);

  int degree() const { return degree_; }
  /// Number of coefficients per axis, 2N+1.
  int axis_size() const { return 2 * degree_ + 1; }

  std::span<const double> coefficients() const { return coeffs_; }
  std::span<const double> axis(int a) const;

  double constant(int a) const { return coeffs_[index(a, 0)]; }
  double cos_coeff(int a, int k) const { return coeffs_[index(a, 2 * k - 1)]; }
  double sin_coeff(int a, int k) const { return coeffs_[index(a, 2 * k)]; }
  void set_constant(int a, double v) { coeffs_[index(a, 0)] = v; }
  void set_cos(int a, int k, double v) { coeffs_[index(a, 2 * k - 1)] = v; }
  void set_sin(int a, int k, double v) { coeffs_[index(a, 2 * k)] = v; }

  Point3 eval(double u) const;
  /// order ≥ 1; throws InvalidArgument otherwise.
  Vec3 derivative(double u, int order) const;
  LoopJet jet(double u) const;

  /// Largest coefficient magnitude; the length unit for relative tolerances.
  double scale() const;

  /// Max-norm distance between coefficient vectors of equal degree.
  double coefficient_distance(const FourierLoop& other) const;

  friend bool operator==(const FourierLoop&, const FourierLoop&) = default;

 private:
  std::size_t index(int a, int j) const { return static_cast<std::size_t>(a * axis_size() + j); }

  int degree_;
  std::vector<double> coeffs_;
};

/// Builds a loop from three axis rows [c0, a1, b1, ..., aN, bN].
FourierLoop make_loop(std::span<const double> x, std::span<const double> y, std::span<const double> z);

}  // namespace knotrace
