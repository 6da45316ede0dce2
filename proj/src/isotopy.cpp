#include "knotrace/isotopy.hpp"

#include <algorithm>
#include <string>

#include "knotrace/error.hpp"

namespace knotrace {

IsotopyFamily::IsotopyFamily(std::vector<Keyframe> keyframes) : keyframes_(std::move(keyframes)) {
  if (keyframes_.size() < 2) throw Error(ErrorCode::InvalidArgument, "an isotopy needs at least two keyframes");
  if (keyframes_.front().t != 0.0 || keyframes_.back().t != 1.0) {
    throw Error(ErrorCode::InvalidArgument, "keyframes must start at t=0 and end at t=1");
  }
  const int degree = keyframes_.front().loop.degree();
  for (std::size_t j = 0; j < keyframes_.size(); ++j) {
    if (keyframes_[j].loop.degree() != degree) {
      throw Error(ErrorCode::InvalidArgument, "keyframe " + std::to_string(j) + " has a different degree");
    }
    if (j > 0 && !(keyframes_[j].t > keyframes_[j - 1].t)) {
      throw Error(ErrorCode::InvalidArgument, "keyframe times must be strictly increasing");
    }
  }

  const std::size_t n = keyframes_.size();
  const std::size_t m = keyframes_.front().loop.coefficients().size();
  tangents_.assign(n, std::vector<double>(m, 0.0));
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t lo = j == 0 ? 0 : j - 1;
    const std::size_t hi = j + 1 == n ? j : j + 1;
    const auto a = keyframes_[lo].loop.coefficients();
    const auto b = keyframes_[hi].loop.coefficients();
    const double dt = keyframes_[hi].t - keyframes_[lo].t;
    for (std::size_t i = 0; i < m; ++i) tangents_[j][i] = (b[i] - a[i]) / dt;
  }
}

IsotopyFamily IsotopyFamily::constant(const FourierLoop& loop) {
  return IsotopyFamily({{0.0, loop}, {1.0, loop}});
}

void IsotopyFamily::coefficients(double t, std::vector<double>* value, std::vector<double>* rate) const {
  if (!(t >= 0.0 && t <= 1.0)) throw Error(ErrorCode::InvalidArgument, "t must lie in [0, 1]");
  // Interval j with t_j <= t < t_{j+1}; t = 1 falls into the last interval.
  auto it = std::upper_bound(keyframes_.begin(), keyframes_.end(), t,
                             [](double v, const Keyframe& k) { return v < k.t; });
  std::size_t j = static_cast<std::size_t>(std::distance(keyframes_.begin(), it));
  j = j == 0 ? 0 : j - 1;
  if (j + 1 >= keyframes_.size()) j = keyframes_.size() - 2;

  const double h = keyframes_[j + 1].t - keyframes_[j].t;
  const double s = (t - keyframes_[j].t) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1;
  const double h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2;
  const double h11 = s3 - s2;
  const double d00 = 6 * s2 - 6 * s;
  const double d10 = 3 * s2 - 4 * s + 1;
  const double d01 = -6 * s2 + 6 * s;
  const double d11 = 3 * s2 - 2 * s;

  const auto p0 = keyframes_[j].loop.coefficients();
  const auto p1 = keyframes_[j + 1].loop.coefficients();
  const auto& m0 = tangents_[j];
  const auto& m1 = tangents_[j + 1];
  const std::size_t n = p0.size();
  if (value) {
    value->resize(n);
    for (std::size_t i = 0; i < n; ++i) (*value)[i] = h00 * p0[i] + h10 * h * m0[i] + h01 * p1[i] + h11 * h * m1[i];
  }
  if (rate) {
    rate->resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      (*rate)[i] = (d00 * p0[i] + d01 * p1[i]) / h + d10 * m0[i] + d11 * m1[i];
    }
  }
}

FourierLoop IsotopyFamily::at(double t) const {
  std::vector<double> c;
  coefficients(t, &c, nullptr);
  return FourierLoop(degree(), std::move(c));
}

FourierLoop IsotopyFamily::rate_at(double t) const {
  std::vector<double> r;
  coefficients(t, nullptr, &r);
  return FourierLoop(degree(), std::move(r));
}

FamilyPartials IsotopyFamily::partials(double u, double t) const {
  std::vector<double> c;
  std::vector<double> r;
  coefficients(t, &c, &r);
  const FourierLoop loop(degree(), std::move(c));
  const FourierLoop rate(degree(), std::move(r));
  const LoopJet j = loop.jet(u);
  FamilyPartials p;
  p.f = j.f;
  p.f_u = j.d1;
  p.f_uu = j.d2;
  p.f_uuu = j.d3;
  const Point3 ft = rate.eval(u);
  p.f_t = {ft.x, ft.y, ft.z};
  p.f_ut = rate.derivative(u, 1);
  return p;
}

double IsotopyFamily::scale() const {
  double s = 0.0;
  for (const auto& k : keyframes_) s = std::max(s, k.loop.scale());
  return s;
}

}  // namespace knotrace
