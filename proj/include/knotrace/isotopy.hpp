#pragma once

#include <vector>

#include "knotrace/fourier_loop.hpp"

namespace knotrace {

struct Keyframe {
  double t;
  FourierLoop loop;
};

/// Space-time partial derivatives of f(u, t).
struct FamilyPartials {
  Point3 f;
  Vec3 f_u;
  Vec3 f_t;
  Vec3 f_uu;
  Vec3 f_ut;
  Vec3 f_uuu;
};

/// Time-parametrized family of loops, t ∈ [0, 1].
///
/// Every coefficient is interpolated between keyframes by a cubic Hermite
/// spline with Catmull-Rom tangents; the end tangents are the one-sided
/// secants.  Two keyframes therefore give an exactly linear family.  The
/// coefficients are C¹ in t, so ∂²f/∂u∂t exists and is continuous.
class IsotopyFamily {
 public:
  /// Requires ≥ 2 keyframes, t strictly increasing from 0 to 1, equal degrees.
  explicit IsotopyFamily(std::vector<Keyframe> keyframes);

  /// Two identical keyframes at t = 0 and t = 1.
  static IsotopyFamily constant(const FourierLoop& loop);

  int degree() const { return keyframes_.front().loop.degree(); }
  const std::vector<Keyframe>& keyframes() const { return keyframes_; }

  /// The loop f_t.  Throws InvalidArgument for t outside [0, 1].
  FourierLoop at(double t) const;
  /// ∂f_t/∂t as a loop: its eval is ∂f/∂t and its derivatives are the mixed partials.
  FourierLoop rate_at(double t) const;

  FamilyPartials partials(double u, double t) const;

  /// Largest keyframe scale.
  double scale() const;

 private:
  void coefficients(double t, std::vector<double>* value, std::vector<double>* rate) const;

  std::vector<Keyframe> keyframes_;
  std::vector<std::vector<double>> tangents_;
};

}  // namespace knotrace
