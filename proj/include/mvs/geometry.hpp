#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "mvs/error.hpp"
#include "mvs/grid.hpp"
#include "mvs/mean_value_set.hpp"
#include "mvs/point.hpp"

namespace mvs {

// ---------------------------------------------------------------------------
// Disk clipping

namespace detail {

// Primitive of sqrt(r^2 - x^2).
inline double half_chord_primitive(double r, double x) {
  x = std::clamp(x, -r, r);
  return 0.5 * (x * std::sqrt(std::max(0.0, r * r - x * x)) + r * r * std::asin(x / r));
}

}  // namespace detail

/// Exact area of the disk of radius r centred at the origin intersected with
/// the rectangle [x0, x1] x [y0, y1].
inline double disk_rect_area(double r, double x0, double x1, double y0, double y1) {
  x0 = std::max(x0, -r);
  x1 = std::min(x1, r);
  y0 = std::max(y0, -r);
  y1 = std::min(y1, r);
  if (x0 >= x1 || y0 >= y1) return 0.0;
  double cuts[6];
  std::size_t nc = 0;
  cuts[nc++] = x0;
  for (double y : {y0, y1}) {
    if (std::abs(y) < r) {
      const double c = std::sqrt(r * r - y * y);
      if (c > x0 && c < x1) cuts[nc++] = c;
      if (-c > x0 && -c < x1) cuts[nc++] = -c;
    }
  }
  cuts[nc++] = x1;
  std::sort(cuts, cuts + nc);
  double area = 0.0;
  for (std::size_t k = 0; k + 1 < nc; ++k) {
    const double a = cuts[k], b = cuts[k + 1];
    if (b <= a) continue;
    const double m = 0.5 * (a + b);
    const double s = std::sqrt(std::max(0.0, r * r - m * m));
    // no chord end lies inside (a, b), so the comparison at m holds on the whole strip
    const bool top_is_circle = s <= y1;
    const bool bottom_is_circle = -s >= y0;
    const double top = top_is_circle ? s : y1;
    const double bottom = bottom_is_circle ? -s : y0;
    if (top <= bottom) continue;
    const double arc = detail::half_chord_primitive(r, b) - detail::half_chord_primitive(r, a);
    area += (top_is_circle ? arc : y1 * (b - a)) - (bottom_is_circle ? -arc : y0 * (b - a));
  }
  return area;
}

/// Area of the part of the disk (center, radius) lying to the left of the
/// directed line through a and b. Circular-segment formula r^2 acos(d/r) - d sqrt(r^2 - d^2).
inline double disk_halfplane_area(Point center, double radius, Point a, Point b) {
  const Point dir = b - a;
  const double len = norm(dir);
  if (len == 0.0) throw ConfigError("disk_halfplane_area: degenerate line");
  // signed distance of the centre to the right of the line
  const double d = -cross(dir, center - a) / len;
  if (d >= radius) return 0.0;
  if (d <= -radius) return std::numbers::pi * radius * radius;
  const double seg = radius * radius * std::acos(d / radius) - d * std::sqrt(radius * radius - d * d);
  return seg;
}

/// sum over cells of h^2 |chi_set - area fraction of the cell inside the disk|.
inline double symmetric_difference_disk(const MeanValueSet& set, Point center, double radius) {
  if (!(radius > 0.0)) throw ConfigError("symmetric_difference_disk: radius must be positive");
  const Grid& g = set.grid();
  const double h = g.spacing();
  const double cell_area = h * h;
  const std::size_t nc = g.cells_per_side();
  double total = 0.0;
  for (std::size_t j = 0; j < nc; ++j) {
    const double y0 = g.coord(j) - center.y;
    const double y1 = y0 + h;
    for (std::size_t i = 0; i < nc; ++i) {
      const double x0 = g.coord(i) - center.x;
      const double x1 = x0 + h;
      const double nx = std::max({x0, 0.0, -x1});
      const double ny = std::max({y0, 0.0, -y1});
      const double fx = std::max(std::abs(x0), std::abs(x1));
      const double fy = std::max(std::abs(y0), std::abs(y1));
      double inside;
      if (nx * nx + ny * ny >= radius * radius)
        inside = 0.0;
      else if (fx * fx + fy * fy <= radius * radius)
        inside = cell_area;
      else
        inside = disk_rect_area(radius, x0, x1, y0, y1);
      total += set.cell(i, j) ? cell_area - inside : inside;
    }
  }
  return total;
}

// ---------------------------------------------------------------------------
// Convexity

/// Convex hull by Andrew's monotone chain, counter-clockwise, collinear points dropped.
inline std::vector<Point> convex_hull(std::vector<Point> pts) {
  std::sort(pts.begin(), pts.end(),
            [](Point a, Point b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Point> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

/// (hull area - set area) / set area for a nonempty single-component set.
inline double convexity_deficiency(const MeanValueSet& set) {
  if (set.empty()) throw MeasurementError("convexity_deficiency: empty set");
  if (set.component_count() != 1)
    throw MeasurementError("convexity_deficiency: set has more than one component");
  std::vector<Point> pts;
  for (const auto& loop : set.boundary())
    pts.insert(pts.end(), loop.vertices.begin(), loop.vertices.end());
  const std::vector<Point> hull = convex_hull(std::move(pts));
  const double hull_area = shoelace_area(hull);
  return std::max(0.0, (hull_area - set.area()) / set.area());
}

// ---------------------------------------------------------------------------
// Containment

/// True iff every cell of inner lies in the slack_cells (Chebyshev) dilation of outer.
inline bool contains(const MeanValueSet& outer, const MeanValueSet& inner, int slack_cells) {
  if (!(outer.grid() == inner.grid())) throw ConfigError("contains: sets live on different grids");
  if (slack_cells < 0) throw ConfigError("contains: slack must be nonnegative");
  const std::size_t nc = outer.grid().cells_per_side();
  const auto s = static_cast<std::size_t>(slack_cells);
  // separable max filter: rows then columns
  std::vector<std::uint8_t> rows(nc * nc, 0), dil(nc * nc, 0);
  for (std::size_t j = 0; j < nc; ++j)
    for (std::size_t i = 0; i < nc; ++i) {
      if (!outer.cell(i, j)) continue;
      for (std::size_t q = i >= s ? i - s : 0; q <= std::min(nc - 1, i + s); ++q) rows[j * nc + q] = 1;
    }
  for (std::size_t j = 0; j < nc; ++j)
    for (std::size_t i = 0; i < nc; ++i) {
      if (!rows[j * nc + i]) continue;
      for (std::size_t q = j >= s ? j - s : 0; q <= std::min(nc - 1, j + s); ++q) dil[q * nc + i] = 1;
    }
  for (std::size_t k = 0; k < nc * nc; ++k)
    if (inner.cells()[k] && !dil[k]) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Interface crossings

/// x positions where boundary loops pass from y <= 0 to y > 0 or back.
inline std::vector<double> interface_crossings(const MeanValueSet& set) {
  const Grid& g = set.grid();
  const double level = g.coord(g.interface_row());
  std::vector<double> xs;
  for (const auto& loop : set.boundary()) {
    const auto& v = loop.vertices;
    for (std::size_t k = 0; k < v.size(); ++k) {
      const Point p = v[k], q = v[(k + 1) % v.size()];
      if ((p.y > level) != (q.y > level)) xs.push_back(p.x);  // edges are axis-aligned
    }
  }
  std::sort(xs.begin(), xs.end());
  return xs;
}

struct CrossingAngles {
  double theta_up;
  double theta_down;
  double crossing_x;
};

namespace detail {

// Principal direction of a point cloud, oriented away from origin_point.
inline Point principal_direction(std::span<const Point> pts, Point origin_point) {
  Point c{0, 0};
  for (Point p : pts) c = c + p;
  c = (1.0 / static_cast<double>(pts.size())) * c;
  double sxx = 0, syy = 0, sxy = 0;
  for (Point p : pts) {
    const Point d = p - c;
    sxx += d.x * d.x;
    syy += d.y * d.y;
    sxy += d.x * d.y;
  }
  const double phi = 0.5 * std::atan2(2.0 * sxy, sxx - syy);
  Point dir{std::cos(phi), std::sin(phi)};
  if (dot(dir, c - origin_point) < 0.0) dir = -1.0 * dir;
  return dir;
}

}  // namespace detail

/// Angles between the fitted free-boundary rays above and below the interface
/// and the interface direction pointing into the set, at the crossing nearest
/// crossing_x. Boundary vertices with 2h <= |y| <= window and |x - xc| <= window
/// are fitted by total least squares on each side.
inline CrossingAngles crossing_angles(const MeanValueSet& set, double crossing_x, double window) {
  const Grid& g = set.grid();
  const double h = g.spacing();
  if (window < 10.0 * h - 1e-12) throw ConfigError("crossing_angles: window must be at least 10h");
  const std::vector<double> xs = interface_crossings(set);
  double xc = 0.0, best = window;
  bool found = false;
  for (double x : xs)
    if (std::abs(x - crossing_x) <= best) {
      best = std::abs(x - crossing_x);
      xc = x;
      found = true;
    }
  if (!found) throw MeasurementError("crossing_angles: no interface crossing near the given x");

  const double eps = 1e-9 * h;
  std::vector<Point> up, down;
  // loops keep corners only; walk every lattice node along each edge
  for (const auto& loop : set.boundary()) {
    const auto& v = loop.vertices;
    const std::size_t edges = loop.closed ? v.size() : v.size() - 1;
    for (std::size_t k = 0; k < edges; ++k) {
      const Point a = v[k], b = v[(k + 1) % v.size()];
      const auto steps = std::max<long>(1, std::lround(norm(b - a) / h));
      for (long t = 0; t < steps; ++t) {
        const Point p = a + (static_cast<double>(t) / static_cast<double>(steps)) * (b - a);
        const double ay = std::abs(p.y);
        if (ay < 2.0 * h - eps || ay > window + eps || std::abs(p.x - xc) > window + eps) continue;
        (p.y > 0 ? up : down).push_back(p);
      }
    }
  }
  if (up.size() < 4 || down.size() < 4)
    throw MeasurementError("crossing_angles: too few boundary vertices to fit a side");

  // Which way along the interface is the set?
  const std::size_t nc = g.cells_per_side();
  const std::size_t row = g.interface_row();
  double side = 0.0;
  for (std::size_t j : {row - 1, row})
    for (std::size_t i = 0; i < nc; ++i) {
      const Point c = g.cell_center(i, j);
      if (std::abs(c.x - xc) > window || !set.cell(i, j)) continue;
      side += c.x > xc ? 1.0 : -1.0;
    }
  if (side == 0.0) throw MeasurementError("crossing_angles: cannot tell the interior side");
  const Point into{side > 0 ? 1.0 : -1.0, 0.0};

  const Point origin{xc, 0.0};
  const Point du = detail::principal_direction(up, origin);
  const Point dd = detail::principal_direction(down, origin);
  auto angle = [&](Point d) { return std::acos(std::clamp(dot(d, into), -1.0, 1.0)); };
  return {angle(du), angle(dd), xc};
}

}  // namespace mvs
