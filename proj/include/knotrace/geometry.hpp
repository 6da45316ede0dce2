#pragma once

#include <cmath>

namespace knotrace {

// Points and vectors are kept as distinct types: a difference of points is a
// vector, derivatives are vectors, and only vectors scale.

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
  constexpr Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
  constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
  friend constexpr Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
  friend constexpr Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
  friend constexpr Vec2 operator-(const Vec2& a) { return {-a.x, -a.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return a *= s; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return a *= s; }
  friend constexpr bool operator==(const Vec2&, const Vec2&) = default;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  constexpr Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
  constexpr Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }
  friend constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
  friend constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
  friend constexpr Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
  friend constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
  friend constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator-(const Point2& a, const Point2& b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Point2 operator+(const Point2& p, const Vec2& v) { return {p.x + v.x, p.y + v.y}; }
  friend constexpr Point2 operator-(const Point2& p, const Vec2& v) { return {p.x - v.x, p.y - v.y}; }
  friend constexpr bool operator==(const Point2&, const Point2&) = default;
};

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend constexpr Vec3 operator-(const Point3& a, const Point3& b) {
    return {a.x - b.x, a.y - b.y, a.z - b.z};
  }
  friend constexpr Point3 operator+(const Point3& p, const Vec3& v) {
    return {p.x + v.x, p.y + v.y, p.z + v.z};
  }
  friend constexpr bool operator==(const Point3&, const Point3&) = default;
};

constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
/// z-component of the 3D cross product; positive when b is counterclockwise of a.
constexpr double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& v) { return std::hypot(v.x, v.y); }
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

/// Vertical projection: forgets the z coordinate.
constexpr Point2 project(const Point3& p) { return {p.x, p.y}; }
constexpr Vec2 project(const Vec3& v) { return {v.x, v.y}; }

/// Rotates v by the angle whose cosine and sine are (c, s).
constexpr Vec2 rotate(const Vec2& v, double c, double s) {
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

inline constexpr double kTwoPi = 6.283185307179586476925286766559;
inline constexpr double kPi = 3.14159265358979323846264338327950;

/// Reduces an angle into [0, 2π).
inline double wrap_angle(double u) {
  double r = std::fmod(u, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r -= kTwoPi;
  return r;
}

/// Shortest distance between two angles on the circle.
inline double circle_distance(double a, double b) {
  const double d = wrap_angle(a - b);
  return d > kPi ? kTwoPi - d : d;
}

/// Chordal distance between two angles: |e^{ia} - e^{ib}|.
inline double chord(double a, double b) { return 2.0 * std::abs(std::sin(0.5 * (a - b))); }

}  // namespace knotrace
