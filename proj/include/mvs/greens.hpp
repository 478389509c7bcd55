#pragma once

#include <cmath>
#include <numbers>

#include "mvs/coeff.hpp"
#include "mvs/error.hpp"
#include "mvs/point.hpp"

namespace mvs {

/// Planar fundamental solution of -Laplace: -(1/2pi) ln|x - y|.
inline double fundamental(Point x, Point y) {
  const double r = distance(x, y);
  if (r == 0.0) throw SingularityError("fundamental: x coincides with the pole");
  return -std::log(r) / (2.0 * std::numbers::pi);
}

/// Fundamental solution evaluated at the mirror image of x across the interface.
inline double reflected(Point x, Point y) { return fundamental(Point{x.x, -x.y}, y); }

/// Whole-plane Green's function of the sharp two-phase operator with a fixed pole.
///
/// Pole above the interface:
///   G = Gamma/alpha + (alpha - beta)/(alpha (alpha + beta)) * (Gamma~  if x.y >= 0,
///                                                              Gamma   if x.y <= 0)
/// Pole below: the same with the phases exchanged. The image term Gamma~ only
/// appears on the side of the pole, so its singularity (the mirror of the pole)
/// is never reached; the two branches agree on y = 0 and satisfy
/// alpha dG/dy(0+) = beta dG/dy(0-).
class GreensEval {
 public:
  GreensEval(const Medium& medium, Point pole) : medium_(medium), pole_(pole) {
    if (!medium.sharp()) throw ConfigError("greens: closed form exists only for a sharp medium");
    if (pole.y == 0.0) throw ConfigError("greens: pole on the interface is not supported");
  }

  const Medium& medium() const noexcept { return medium_; }
  Point pole() const noexcept { return pole_; }

  double operator()(Point x) const {
    const double a = medium_.alpha();
    const double b = medium_.beta();
    if (pole_.y > 0.0) {
      const double c = (a - b) / (a * (a + b));
      const double g = fundamental(x, pole_);
      return g / a + c * (x.y >= 0.0 ? reflected(x, pole_) : g);
    }
    const double c = (b - a) / (b * (a + b));
    const double g = fundamental(x, pole_);
    return g / b + c * (x.y <= 0.0 ? reflected(x, pole_) : g);
  }

 private:
  Medium medium_;
  Point pole_;
};

inline double green(const GreensEval& g, Point x) { return g(x); }

}  // namespace mvs
