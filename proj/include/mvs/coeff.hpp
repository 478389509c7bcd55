#pragma once

#include <algorithm>
#include <utility>

#include "mvs/error.hpp"
#include "mvs/point.hpp"

namespace mvs {

// Cumulative integral of the even bump rho(t) = (15/16)(1 - t^2)^2 on [-1, 1].
// sigma(-1) = 0, sigma(0) = 1/2, sigma(1) = 1; C^2 at the endpoints.
constexpr double mollifier_cdf(double t) {
  if (t <= -1.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double t2 = t * t;
  return 0.5 + (15.0 / 16.0) * t * (1.0 - 2.0 * t2 / 3.0 + t2 * t2 / 5.0);
}

constexpr double mollifier_density(double t) {
  if (t <= -1.0 || t >= 1.0) return 0.0;
  const double u = 1.0 - t * t;
  return (15.0 / 16.0) * u * u;
}

/// Scalar coefficient field a(x) = f(x) I of the two-phase operator div(a grad u).
///
/// Sharp medium (moll_radius == 0): alpha above the interface y = 0, beta below.
/// Mollified medium: the jump is smoothed over the band |y| <= moll_radius.
class Medium {
 public:
  Medium(double alpha, double beta, double moll_radius = 0.0)
      : alpha_(alpha), beta_(beta), moll_radius_(moll_radius) {
    if (!(alpha > 0.0) || !(beta > 0.0))
      throw ConfigError("medium: alpha and beta must be positive");
    if (!(moll_radius >= 0.0)) throw ConfigError("medium: moll_radius must be nonnegative");
  }

  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }
  double moll_radius() const noexcept { return moll_radius_; }
  bool sharp() const noexcept { return moll_radius_ == 0.0; }

  /// Coefficient at a point. Only the y coordinate matters.
  double eval_f(Point p) const {
    if (sharp()) {
      if (p.y > 0.0) return alpha_;
      if (p.y < 0.0) return beta_;
      throw SingularityError("medium: sharp coefficient is undefined on the interface y = 0");
    }
    return beta_ + (alpha_ - beta_) * mollifier_cdf(p.y / moll_radius_);
  }

  /// (lambda, Lambda) = (min, max) of the two phase constants.
  std::pair<double, double> ellipticity_bounds() const noexcept {
    return {std::min(alpha_, beta_), std::max(alpha_, beta_)};
  }

  /// Same geometry with the phases exchanged; used for the y -> -y mirror.
  Medium swapped() const { return Medium(beta_, alpha_, moll_radius_); }

  friend bool operator==(const Medium&, const Medium&) = default;

 private:
  double alpha_;
  double beta_;
  double moll_radius_;
};

inline double eval_f(const Medium& medium, Point p) { return medium.eval_f(p); }
inline std::pair<double, double> ellipticity_bounds(const Medium& medium) {
  return medium.ellipticity_bounds();
}

}  // namespace mvs
