#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mvs/coeff.hpp"
#include "mvs/error.hpp"
#include "mvs/geometry.hpp"
#include "mvs/height_field.hpp"
#include "mvs/point.hpp"

namespace mvs {

// ---------------------------------------------------------------------------
// Weiss energy

/// Factor that turns a solved height (sink density 1/(pi R^2)) into a solution
/// of div(f grad w) = 1/2 on {w > 0}.
inline double weiss_scale(const ProblemSpec& spec) { return 0.5 / spec.sink_density(); }

inline HeightField weiss_normalized(const HeightField& v) {
  if (!v.spec()) throw ConfigError("weiss_normalized: height field carries no problem spec");
  return v.scaled(weiss_scale(*v.spec()));
}

/// Phi(r) = r^-4 int_{B_r} (f |grad w|^2 + w) - 2 r^-5 int_{dB_r} f w^2 around an
/// interface point. Interior cells use the midpoint rule; cells cut by the circle are split
/// into sub-cells weighted by exact overlap. The circle uses `boundary_samples` equispaced
/// bilinear samples.
inline double weiss_phi(const HeightField& w, const Medium& medium, Point base, double r,
                        int boundary_samples = 720) {
  const Grid& g = w.grid();
  const double h = g.spacing();
  if (!(r > 0.0)) throw ConfigError("weiss_phi: radius must be positive");
  if (std::abs(base.y) > 1e-12 * g.half_width())
    throw ConfigError("weiss_phi: base point must lie on the interface");
  if (std::abs(base.x) + r > g.half_width() || r > g.half_width())
    throw ConfigError("weiss_phi: disk leaves the domain");

  const auto first = static_cast<std::size_t>(
      std::max(0.0, std::floor(g.fractional_index(base.x - r))));
  const auto last = std::min<std::size_t>(
      g.cells_per_side() - 1, static_cast<std::size_t>(std::ceil(g.fractional_index(base.x + r))));
  const auto jfirst = static_cast<std::size_t>(std::max(0.0, std::floor(g.fractional_index(-r))));
  const auto jlast = std::min<std::size_t>(
      g.cells_per_side() - 1, static_cast<std::size_t>(std::ceil(g.fractional_index(r))));

  double bulk = 0.0;
  for (std::size_t j = jfirst; j <= jlast; ++j) {
    for (std::size_t i = first; i <= last; ++i) {
      const double x0 = g.coord(i) - base.x, y0 = g.coord(j) - base.y;
      const double x1 = x0 + h, y1 = y0 + h;
      const double nx = std::max({x0, 0.0, -x1}), ny = std::max({y0, 0.0, -y1});
      if (nx * nx + ny * ny >= r * r) continue;
      const double fx = std::max(std::abs(x0), std::abs(x1));
      const double fy = std::max(std::abs(y0), std::abs(y1));
      const double v00 = w.at(i, j), v10 = w.at(i + 1, j);
      const double v01 = w.at(i, j + 1), v11 = w.at(i + 1, j + 1);
      const double f = medium.eval_f(g.cell_center(i, j));
      // bilinear interpolant at local coordinates (a, b) in [0, 1]^2
      auto integrand = [&](double a, double b) {
        const double gx = ((v10 - v00) * (1 - b) + (v11 - v01) * b) / h;
        const double gy = ((v01 - v00) * (1 - a) + (v11 - v10) * a) / h;
        const double val = v00 * (1 - a) * (1 - b) + v10 * a * (1 - b) + v01 * (1 - a) * b + v11 * a * b;
        return f * (gx * gx + gy * gy) + val;
      };
      if (fx * fx + fy * fy <= r * r) {
        bulk += h * h * integrand(0.5, 0.5);
        continue;
      }
      // cut by the circle: sub-cells with exact overlap keep the rim error O(h^2)
      constexpr int sub = 8;
      const double hs = h / sub;
      for (int b = 0; b < sub; ++b)
        for (int a = 0; a < sub; ++a) {
          const double sx = x0 + a * hs, sy = y0 + b * hs;
          const double weight = disk_rect_area(r, sx, sx + hs, sy, sy + hs);
          if (weight > 0.0) bulk += weight * integrand((a + 0.5) / sub, (b + 0.5) / sub);
        }
    }
  }

  double shell = 0.0;
  const double dtheta = 2.0 * std::numbers::pi / boundary_samples;
  for (int k = 0; k < boundary_samples; ++k) {
    const double t = (k + 0.5) * dtheta;
    const Point p{base.x + r * std::cos(t), base.y + r * std::sin(t)};
    const double val = w.value_at(p);
    shell += medium.eval_f(p) * val * val;
  }
  shell *= r * dtheta;

  const double r2 = r * r;
  return bulk / (r2 * r2) - 2.0 * shell / (r2 * r2 * r);
}

struct WeissProfile {
  Point base;
  std::vector<std::pair<double, double>> samples;  // (r, Phi(r))
  std::string normalization;

  /// Number of adjacent pairs with Phi(r_{k+1}) < Phi(r_k) - tol.
  int monotonicity_violations(double tol) const {
    int count = 0;
    for (std::size_t k = 0; k + 1 < samples.size(); ++k)
      if (samples[k + 1].second < samples[k].second - tol) ++count;
    return count;
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& s : samples) m = std::max(m, std::abs(s.second));
    return m;
  }

  double spread() const {
    if (samples.empty()) return 0.0;
    auto [lo, hi] = std::minmax_element(samples.begin(), samples.end(),
                                        [](auto& a, auto& b) { return a.second < b.second; });
    return hi->second - lo->second;
  }
};

inline WeissProfile weiss_profile(const HeightField& w, const Medium& medium, Point base,
                                  const std::vector<double>& radii, int boundary_samples = 720) {
  for (std::size_t k = 0; k + 1 < radii.size(); ++k)
    if (!(radii[k + 1] > radii[k])) throw ConfigError("weiss_profile: radii must increase strictly");
  WeissProfile p{base, {}, "height scaled so that div(f grad w) = 1/2 on {w > 0}"};
  for (double r : radii) p.samples.emplace_back(r, weiss_phi(w, medium, base, r, boundary_samples));
  return p;
}

/// Evenly spaced radii a, ..., b (n >= 2 values).
inline std::vector<double> radius_ladder(double a, double b, int n) {
  if (n < 2 || !(b > a)) throw ConfigError("radius ladder needs n >= 2 and b > a");
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) out[static_cast<std::size_t>(k)] = a + (b - a) * k / (n - 1);
  return out;
}

// ---------------------------------------------------------------------------
// Angle condition and blowup catalog

/// Root theta1 in (0, pi/2] of cos(2 theta1) = (beta - alpha)/(beta + alpha), and theta1 + pi/2.
inline std::pair<double, double> predicted_angles(double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0)) throw ConfigError("predicted_angles: alpha, beta must be positive");
  const double t1 = 0.5 * std::acos((beta - alpha) / (beta + alpha));
  return {t1, t1 + 0.5 * std::numbers::pi};
}

/// g = c0 + c_cos cos(2 theta) + c_sin sin(2 theta) on [lo, hi], 0 <= lo < hi <= 2 pi.
struct TrigPiece {
  double lo, hi;
  double c0, c_cos, c_sin;

  double value(double t) const { return c0 + c_cos * std::cos(2 * t) + c_sin * std::sin(2 * t); }
  double derivative(double t) const {
    return 2.0 * (c_sin * std::cos(2 * t) - c_cos * std::sin(2 * t));
  }
};

enum class BlowupKind { wedge, upper_half_plane, lower_half_plane, whole_plane };
/// Side of the origin on which the contact set sits along the interface.
enum class ContactSide { left, right, none };

/// Degree-2 homogeneous global solution w = r^2 g(theta) of div(f grad w) = 1/2 on {w > 0}.
struct BlowupProfile {
  int id = 0;
  std::string label;
  BlowupKind kind = BlowupKind::wedge;
  ContactSide side = ContactSide::none;
  std::optional<double> theta1, theta2;
  double alpha = 1.0, beta = 1.0;
  std::vector<TrigPiece> pieces;

  double g(double theta) const {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double t = std::fmod(theta, two_pi);
    if (t < 0) t += two_pi;
    for (const auto& p : pieces)
      if (t >= p.lo && t <= p.hi) return std::max(0.0, p.value(t));
    // the pieces of a wrapped profile end exactly at 2 pi
    if (t == 0.0)
      for (const auto& p : pieces)
        if (p.hi == two_pi) return std::max(0.0, p.value(two_pi));
    return 0.0;
  }
};

inline double eval_blowup(const BlowupProfile& profile, double r, double theta) {
  return r * r * profile.g(theta);
}

inline double eval_blowup(const BlowupProfile& profile, Point p) {
  double t = std::atan2(p.y, p.x);
  if (t < 0) t += 2.0 * std::numbers::pi;
  return eval_blowup(profile, norm(p), t);
}

namespace detail {

constexpr double pi = std::numbers::pi;

// Pieces of the wedge with the contact set on the right.
inline std::vector<TrigPiece> right_wedge(double alpha, double beta, double t1, double t2) {
  return {{pi - t1, pi, 1 / (8 * alpha), -std::cos(2 * t1) / (8 * alpha), std::sin(2 * t1) / (8 * alpha)},
          {pi, pi + t2, 1 / (8 * beta), -std::cos(2 * t2) / (8 * beta), -std::sin(2 * t2) / (8 * beta)}};
}

// Contact set on the left: same coefficients, supported on [0, pi - t1] and [pi + t2, 2 pi].
inline std::vector<TrigPiece> left_wedge(double alpha, double beta, double t1, double t2) {
  return {{0, pi - t1, 1 / (8 * alpha), -std::cos(2 * t1) / (8 * alpha), std::sin(2 * t1) / (8 * alpha)},
          {pi + t2, 2 * pi, 1 / (8 * beta), -std::cos(2 * t2) / (8 * beta), -std::sin(2 * t2) / (8 * beta)}};
}

// theta -> map(theta) with map an orientation-reversing reflection; pieces may wrap.
inline std::vector<TrigPiece> reflect(const std::vector<TrigPiece>& in, double axis_sum) {
  // reflection theta -> axis_sum - theta: cos(2t) unchanged (axis_sum multiple of pi),
  // sin(2t) changes sign
  std::vector<TrigPiece> out;
  for (const auto& p : in) {
    double lo = axis_sum - p.hi, hi = axis_sum - p.lo;
    while (hi <= 0) lo += 2 * pi, hi += 2 * pi;
    while (lo >= 2 * pi) lo -= 2 * pi, hi -= 2 * pi;
    const TrigPiece q{0, 0, p.c0, p.c_cos, -p.c_sin};
    if (lo < 0) {
      out.push_back({0, hi, q.c0, q.c_cos, q.c_sin});
      out.push_back({lo + 2 * pi, 2 * pi, q.c0, q.c_cos, q.c_sin});
    } else if (hi > 2 * pi) {
      out.push_back({lo, 2 * pi, q.c0, q.c_cos, q.c_sin});
      out.push_back({0, hi - 2 * pi, q.c0, q.c_cos, q.c_sin});
    } else {
      out.push_back({lo, hi, q.c0, q.c_cos, q.c_sin});
    }
  }
  std::sort(out.begin(), out.end(), [](auto& a, auto& b) { return a.lo < b.lo; });
  return out;
}

inline double root_angle(double alpha, double beta) { return predicted_angles(alpha, beta).first; }

}  // namespace detail

/// The nine degree-2 blowups at an interface free-boundary point for fixed (alpha, beta):
///   1 contact right, theta1 in (0, pi/2]        2 contact left, theta1 in (0, pi/2]
///   3 y-mirror of case 1 for (beta, alpha)      4 y-mirror of case 2 for (beta, alpha)
///   5 upper half plane   6 lower half plane   7 whole plane
///   8 x-mirror of case 1                        9 x-mirror of case 2
/// Cases 3 and 4 realize the theta1 > pi/2 root of the angle condition.
inline std::vector<BlowupProfile> blowup_catalog(double alpha, double beta) {
  using detail::pi;
  const double a = detail::root_angle(alpha, beta);
  const double b = detail::root_angle(beta, alpha);  // root for the swapped medium
  std::vector<BlowupProfile> out;

  auto wedge = [&](int id, std::string label, ContactSide side, double t1, double t2,
                   std::vector<TrigPiece> pieces) {
    BlowupProfile p;
    p.id = id;
    p.label = std::move(label);
    p.kind = BlowupKind::wedge;
    p.side = side;
    p.theta1 = t1;
    p.theta2 = t2;
    p.alpha = alpha;
    p.beta = beta;
    p.pieces = std::move(pieces);
    return p;
  };

  out.push_back(wedge(1, "wedge, contact right", ContactSide::right, a, a + pi / 2,
                      detail::right_wedge(alpha, beta, a, a + pi / 2)));
  out.push_back(wedge(2, "wedge, contact left", ContactSide::left, a, a + pi / 2,
                      detail::left_wedge(alpha, beta, a, a + pi / 2)));
  // y -> -y maps the solution for (beta, alpha) to one for (alpha, beta).
  out.push_back(wedge(3, "y-mirror of swapped-phase wedge, contact right", ContactSide::right,
                      pi - a, pi / 2 - a,
                      detail::reflect(detail::right_wedge(beta, alpha, b, b + pi / 2), 2 * pi)));
  out.push_back(wedge(4, "y-mirror of swapped-phase wedge, contact left", ContactSide::left,
                      pi - a, pi / 2 - a,
                      detail::reflect(detail::left_wedge(beta, alpha, b, b + pi / 2), 2 * pi)));

  auto plane = [&](int id, std::string label, BlowupKind kind) {
    BlowupProfile p;
    p.id = id;
    p.label = std::move(label);
    p.kind = kind;
    p.alpha = alpha;
    p.beta = beta;
    // y^2/(4c) = r^2 (1 - cos 2 theta)/(8c)
    if (kind != BlowupKind::lower_half_plane)
      p.pieces.push_back({0, pi, 1 / (8 * alpha), -1 / (8 * alpha), 0});
    if (kind != BlowupKind::upper_half_plane)
      p.pieces.push_back({pi, 2 * pi, 1 / (8 * beta), -1 / (8 * beta), 0});
    return p;
  };
  out.push_back(plane(5, "upper half plane", BlowupKind::upper_half_plane));
  out.push_back(plane(6, "lower half plane", BlowupKind::lower_half_plane));
  out.push_back(plane(7, "whole plane", BlowupKind::whole_plane));

  // x -> -x maps theta -> pi - theta.
  out.push_back(wedge(8, "x-mirror of case 1, contact left", ContactSide::left, pi - a, pi / 2 - a,
                      detail::reflect(out[0].pieces, pi)));
  out.push_back(wedge(9, "x-mirror of case 2, contact right", ContactSide::right, pi - a,
                      pi / 2 - a, detail::reflect(out[1].pieces, pi)));
  return out;
}

// ---------------------------------------------------------------------------
// Transmission diagnostic

/// max |alpha (v(x,h) - v(x,0))/h - beta (v(x,0) - v(x,-h))/h| over interface nodes whose
/// five-point stencil lies in {v > threshold}, divided by the largest one-sided flux there.
/// Nodes within 2h of the pole (where the point source sits) are skipped.
inline double transmission_residual(const HeightField& v, const Medium& medium,
                                    double threshold = -1.0) {
  if (!medium.sharp()) throw ConfigError("transmission_residual: requires a sharp medium");
  const Grid& g = v.grid();
  const double h = g.spacing();
  if (threshold < 0.0) threshold = 1e-12 * v.max_value();
  const std::size_t row = g.interface_row();
  double worst = 0.0, scale = 0.0;
  bool any = false;
  for (std::size_t i = 1; i + 1 < g.nodes_per_side(); ++i) {
    const double c = v.at(i, row), up = v.at(i, row + 1), dn = v.at(i, row - 1);
    if (!(c > threshold && up > threshold && dn > threshold && v.at(i - 1, row) > threshold &&
          v.at(i + 1, row) > threshold))
      continue;
    if (v.spec() && distance(g.node(i, row), v.spec()->x0) < 2.0 * h) continue;
    const double upper = medium.alpha() * (up - c) / h;
    const double lower = medium.beta() * (c - dn) / h;
    worst = std::max(worst, std::abs(upper - lower));
    scale = std::max({scale, std::abs(upper), std::abs(lower)});
    any = true;
  }
  if (!any) throw MeasurementError("transmission_residual: no interface nodes inside the set");
  return scale > 0.0 ? worst / scale : 0.0;
}

/// Free-boundary points on the interface row, located between the last positive and
/// first zero node by extrapolating sqrt(v), which is linear in the distance to a
/// nondegenerate free boundary.
inline std::vector<double> interface_free_boundary_points(const HeightField& v,
                                                          double threshold = -1.0) {
  const Grid& g = v.grid();
  const double h = g.spacing();
  if (threshold < 0.0) threshold = 1e-12 * v.max_value();
  const std::size_t row = g.interface_row();
  const std::size_t n = g.nodes_per_side();
  std::vector<double> xs;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const bool here = v.at(i, row) > threshold;
    const bool next = v.at(i + 1, row) > threshold;
    if (here == next) continue;
    // inner = positive node, outer = zero node, prev = one further inside
    const std::size_t inner = here ? i : i + 1;
    const double dir = here ? 1.0 : -1.0;
    const std::size_t prev = here ? i - 1 : i + 2;
    const double s1 = std::sqrt(v.at(inner, row));
    const double s0 = std::sqrt(std::max(0.0, v.at(prev, row)));
    double offset = 0.5 * h;
    if (s1 - s0 < 0.0 && s0 > threshold) offset = std::min(h, h * s1 / (s0 - s1));
    xs.push_back(g.coord(inner) + dir * offset);
  }
  return xs;
}

}  // namespace mvs
