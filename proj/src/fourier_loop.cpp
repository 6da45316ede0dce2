#include "knotrace/fourier_loop.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "knotrace/error.hpp"

namespace knotrace {

namespace {

// d^n/du^n [a cos ku + b sin ku] = k^n [a cos(ku + nπ/2) + b sin(ku + nπ/2)].
// Returns the coefficients of (cos ku, sin ku) after n differentiations, before k^n.
inline void rotate_quarter_turns(double a, double b, int n, double& ca, double& cb) {
  switch (n & 3) {
    case 0: ca = a; cb = b; break;
    case 1: ca = b; cb = -a; break;
    case 2: ca = -a; cb = -b; break;
    default: ca = -b; cb = a; break;
  }
}

}  // namespace

FourierLoop::FourierLoop(int degree) : FourierLoop(degree, std::vector<double>(3 * (2 * std::max(degree, 0) + 1), 0.0)) {}

FourierLoop::FourierLoop(int degree, std::vector<double> coefficients)
    : degree_(degree), coeffs_(std::move(coefficients)) {
  if (degree < 1) throw Error(ErrorCode::InvalidArgument, "loop degree must be >= 1");
  if (coeffs_.size() != static_cast<std::size_t>(3 * (2 * degree + 1))) {
    throw Error(ErrorCode::InvalidArgument,
                "expected " + std::to_string(3 * (2 * degree + 1)) + " coefficients, got " +
                    std::to_string(coeffs_.size()));
  }
}

std::span<const double> FourierLoop::axis(int a) const {
  return std::span<const double>(coeffs_).subspan(index(a, 0), static_cast<std::size_t>(axis_size()));
}

Point3 FourierLoop::eval(double u) const {
  const double c1 = std::cos(u);
  const double s1 = std::sin(u);
  double acc[3] = {constant(0), constant(1), constant(2)};
  double ck = c1;
  double sk = s1;
  for (int k = 1; k <= degree_; ++k) {
    if (k > 1) {
      // Angle addition keeps one trig call per evaluation; drift stays O(N·eps).
      const double cn = ck * c1 - sk * s1;
      sk = sk * c1 + ck * s1;
      ck = cn;
    }
    for (int a = 0; a < 3; ++a) acc[a] += cos_coeff(a, k) * ck + sin_coeff(a, k) * sk;
  }
  return {acc[0], acc[1], acc[2]};
}

Vec3 FourierLoop::derivative(double u, int order) const {
  if (order < 1) throw Error(ErrorCode::InvalidArgument, "derivative order must be >= 1");
  const double c1 = std::cos(u);
  const double s1 = std::sin(u);
  double acc[3] = {0.0, 0.0, 0.0};
  double ck = c1;
  double sk = s1;
  for (int k = 1; k <= degree_; ++k) {
    if (k > 1) {
      const double cn = ck * c1 - sk * s1;
      sk = sk * c1 + ck * s1;
      ck = cn;
    }
    const double kn = std::pow(static_cast<double>(k), order);
    for (int a = 0; a < 3; ++a) {
      double ca = 0.0;
      double cb = 0.0;
      rotate_quarter_turns(cos_coeff(a, k), sin_coeff(a, k), order, ca, cb);
      acc[a] += kn * (ca * ck + cb * sk);
    }
  }
  return {acc[0], acc[1], acc[2]};
}

LoopJet FourierLoop::jet(double u) const {
  const double c1 = std::cos(u);
  const double s1 = std::sin(u);
  double f[3] = {constant(0), constant(1), constant(2)};
  double d1[3] = {0, 0, 0};
  double d2[3] = {0, 0, 0};
  double d3[3] = {0, 0, 0};
  double ck = c1;
  double sk = s1;
  for (int k = 1; k <= degree_; ++k) {
    if (k > 1) {
      const double cn = ck * c1 - sk * s1;
      sk = sk * c1 + ck * s1;
      ck = cn;
    }
    const double kd = static_cast<double>(k);
    const double k2 = kd * kd;
    for (int a = 0; a < 3; ++a) {
      const double ca = cos_coeff(a, k);
      const double sb = sin_coeff(a, k);
      const double even = ca * ck + sb * sk;  // a cos + b sin
      const double odd = sb * ck - ca * sk;   // b cos - a sin
      f[a] += even;
      d1[a] += kd * odd;
      d2[a] -= k2 * even;
      d3[a] -= k2 * kd * odd;
    }
  }
  return {{f[0], f[1], f[2]}, {d1[0], d1[1], d1[2]}, {d2[0], d2[1], d2[2]}, {d3[0], d3[1], d3[2]}};
}

double FourierLoop::scale() const {
  double m = 0.0;
  for (double c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

double FourierLoop::coefficient_distance(const FourierLoop& other) const {
  if (other.degree_ != degree_) throw Error(ErrorCode::InvalidArgument, "degree mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) m = std::max(m, std::abs(coeffs_[i] - other.coeffs_[i]));
  return m;
}

FourierLoop make_loop(std::span<const double> x, std::span<const double> y, std::span<const double> z) {
  if (x.size() != y.size() || x.size() != z.size() || x.size() < 3 || x.size() % 2 == 0) {
    throw Error(ErrorCode::InvalidArgument, "axis rows must share an odd length >= 3");
  }
  const int degree = static_cast<int>((x.size() - 1) / 2);
  std::vector<double> flat;
  flat.reserve(3 * x.size());
  flat.insert(flat.end(), x.begin(), x.end());
  flat.insert(flat.end(), y.begin(), y.end());
  flat.insert(flat.end(), z.begin(), z.end());
  return FourierLoop(degree, std::move(flat));
}

}  // namespace knotrace
