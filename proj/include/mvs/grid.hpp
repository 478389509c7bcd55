#pragma once

#include <cmath>
#include <cstddef>

#include "mvs/error.hpp"
#include "mvs/point.hpp"

namespace mvs {

/// Structured square grid on [-M, M]^2 with spacing h and M/h = N integral.
///
/// Nodes are (-M + i h, -M + j h) for 0 <= i, j <= 2N, so row j = N lies on the
/// interface. Unknowns live on the (2N-1)^2 interior nodes, ordered row-major
/// (i fastest). Cells are indexed by their lower-left node, 0 <= i, j < 2N.
class Grid {
 public:
  Grid(double half_width, double spacing) : half_width_(half_width), spacing_(spacing) {
    if (!(half_width > 0.0) || !(spacing > 0.0))
      throw ConfigError("grid: half-width and spacing must be positive");
    const double ratio = half_width / spacing;
    const double rounded = std::round(ratio);
    if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * ratio)
      throw ConfigError("grid: half-width / spacing must be a positive integer");
    n_ = static_cast<std::size_t>(rounded);
  }

  double half_width() const noexcept { return half_width_; }
  double spacing() const noexcept { return spacing_; }
  /// N = M / h.
  std::size_t cells_per_half() const noexcept { return n_; }
  /// Nodes per side, 2N + 1.
  std::size_t nodes_per_side() const noexcept { return 2 * n_ + 1; }
  /// Interior nodes per side, 2N - 1.
  std::size_t interior_per_side() const noexcept { return 2 * n_ - 1; }
  std::size_t interior_count() const noexcept { return interior_per_side() * interior_per_side(); }
  std::size_t cells_per_side() const noexcept { return 2 * n_; }
  std::size_t cell_count() const noexcept { return cells_per_side() * cells_per_side(); }
  std::size_t interface_row() const noexcept { return n_; }

  double coord(std::size_t index) const noexcept {
    return -half_width_ + static_cast<double>(index) * spacing_;
  }
  Point node(std::size_t i, std::size_t j) const noexcept { return {coord(i), coord(j)}; }
  Point cell_center(std::size_t i, std::size_t j) const noexcept {
    return {coord(i) + 0.5 * spacing_, coord(j) + 0.5 * spacing_};
  }

  /// Fractional node index of a coordinate, snapped to the nearest integer when
  /// within round-off of it.
  double fractional_index(double c) const noexcept {
    const double t = (c + half_width_) / spacing_;
    const double r = std::round(t);
    return std::abs(t - r) < 1e-9 ? r : t;
  }

  /// Exact inverse of node(): returns false when p is not a node.
  bool node_index(Point p, std::size_t& i, std::size_t& j) const noexcept {
    const double fi = fractional_index(p.x);
    const double fj = fractional_index(p.y);
    if (fi != std::floor(fi) || fj != std::floor(fj)) return false;
    if (fi < 0 || fj < 0 || fi > 2.0 * n_ || fj > 2.0 * n_) return false;
    i = static_cast<std::size_t>(fi);
    j = static_cast<std::size_t>(fj);
    return true;
  }

  bool is_boundary(std::size_t i, std::size_t j) const noexcept {
    return i == 0 || j == 0 || i == 2 * n_ || j == 2 * n_;
  }

  /// Interior unknown index of node (i, j); requires !is_boundary(i, j).
  std::size_t interior_index(std::size_t i, std::size_t j) const noexcept {
    return (j - 1) * interior_per_side() + (i - 1);
  }

  bool contains(Point p) const noexcept {
    return std::abs(p.x) <= half_width_ && std::abs(p.y) <= half_width_;
  }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.n_ == b.n_ && a.spacing_ == b.spacing_ && a.half_width_ == b.half_width_;
  }

 private:
  double half_width_;
  double spacing_;
  std::size_t n_ = 0;
};

inline Grid build_grid(double half_width, double spacing) { return Grid(half_width, spacing); }

}  // namespace mvs
