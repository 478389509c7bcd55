#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "mvs/coeff.hpp"
#include "mvs/error.hpp"
#include "mvs/grid.hpp"

namespace mvs {

/// How the conductance of horizontal edges lying on the interface row is formed
/// for a sharp medium. Such an edge borders an alpha half-cell and a beta half-cell.
enum class InterfaceAveraging { harmonic, arithmetic };

/// Five-point finite-volume discretization of -div(f grad u) with homogeneous
/// Dirichlet data eliminated. Symmetric M-matrix over the interior nodes.
///
/// Each grid edge carries a conductance c; the matrix entry between neighbours is
/// -c/h^2 and the diagonal is the sum of incident conductances over h^2.
class DiscreteOperator {
 public:
  DiscreteOperator(const Grid& grid, const Medium& medium,
                   InterfaceAveraging averaging = InterfaceAveraging::harmonic)
      : grid_(grid), medium_(medium), averaging_(averaging) {
    const std::size_t n = grid.interior_per_side();
    const double inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
    east_.resize(n * n);
    west_.resize(n * n);
    north_.resize(n * n);
    south_.resize(n * n);
    diag_.resize(n * n);
    for (std::size_t j = 1; j <= n; ++j) {
      for (std::size_t i = 1; i <= n; ++i) {
        const std::size_t k = grid.interior_index(i, j);
        east_[k] = horizontal_conductance(i, j) * inv_h2;
        west_[k] = horizontal_conductance(i - 1, j) * inv_h2;
        north_[k] = vertical_conductance(i, j) * inv_h2;
        south_[k] = vertical_conductance(i, j - 1) * inv_h2;
        diag_[k] = east_[k] + west_[k] + north_[k] + south_[k];
      }
    }
  }

  const Grid& grid() const noexcept { return grid_; }
  const Medium& medium() const noexcept { return medium_; }
  InterfaceAveraging averaging() const noexcept { return averaging_; }

  std::size_t size() const noexcept { return diag_.size(); }
  std::size_t side() const noexcept { return grid_.interior_per_side(); }

  /// Conductance of the edge (i, j) -- (i+1, j), full-grid node indices.
  double horizontal_conductance(std::size_t i, std::size_t j) const {
    const double h = grid_.spacing();
    const Point mid{grid_.coord(i) + 0.5 * h, grid_.coord(j)};
    if (j == grid_.interface_row() && medium_.sharp()) {
      const double a = medium_.alpha();
      const double b = medium_.beta();
      return averaging_ == InterfaceAveraging::harmonic ? 2.0 * a * b / (a + b) : 0.5 * (a + b);
    }
    return medium_.eval_f(mid);
  }

  /// Conductance of the edge (i, j) -- (i, j+1). Its midpoint is never on the interface.
  double vertical_conductance(std::size_t i, std::size_t j) const {
    const double h = grid_.spacing();
    return medium_.eval_f(Point{grid_.coord(i), grid_.coord(j) + 0.5 * h});
  }

  double diagonal(std::size_t k) const noexcept { return diag_[k]; }

  /// Off-diagonal coefficient magnitudes of row k (the matrix entries are their negatives).
  double east(std::size_t k) const noexcept { return east_[k]; }
  double west(std::size_t k) const noexcept { return west_[k]; }
  double north(std::size_t k) const noexcept { return north_[k]; }
  double south(std::size_t k) const noexcept { return south_[k]; }

  /// Sum over j != k of A_kj v_j.
  double offdiag_dot(std::size_t k, std::span<const double> v) const noexcept {
    const std::size_t n = side();
    const std::size_t i = k % n;
    const std::size_t j = k / n;
    double s = 0.0;
    if (i + 1 < n) s -= east_[k] * v[k + 1];
    if (i > 0) s -= west_[k] * v[k - 1];
    if (j + 1 < n) s -= north_[k] * v[k + n];
    if (j > 0) s -= south_[k] * v[k - n];
    return s;
  }

  /// Structural M-matrix check: positive diagonal, nonpositive off-diagonal,
  /// weak diagonal dominance, strict somewhere.
  bool is_m_matrix() const noexcept {
    bool strict = false;
    const std::size_t n = side();
    for (std::size_t k = 0; k < size(); ++k) {
      if (!(diag_[k] > 0.0)) return false;
      if (east_[k] < 0.0 || west_[k] < 0.0 || north_[k] < 0.0 || south_[k] < 0.0) return false;
      const std::size_t i = k % n;
      const std::size_t j = k / n;
      double off = 0.0;
      if (i + 1 < n) off += east_[k];
      if (i > 0) off += west_[k];
      if (j + 1 < n) off += north_[k];
      if (j > 0) off += south_[k];
      if (off > diag_[k] * (1.0 + 1e-14)) return false;
      if (off < diag_[k] * (1.0 - 1e-14)) strict = true;
    }
    return strict;
  }

 private:
  Grid grid_;
  Medium medium_;
  InterfaceAveraging averaging_;
  std::vector<double> east_, west_, north_, south_, diag_;
};

inline DiscreteOperator assemble_operator(
    const Grid& grid, const Medium& medium,
    InterfaceAveraging averaging = InterfaceAveraging::harmonic) {
  return DiscreteOperator(grid, medium, averaging);
}

/// y = A v.
inline std::vector<double> apply_operator(const DiscreteOperator& a, std::span<const double> v) {
  if (v.size() != a.size()) throw ConfigError("apply_operator: field size does not match operator");
  std::vector<double> out(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) out[k] = a.diagonal(k) * v[k] + a.offdiag_dot(k, v);
  return out;
}

/// Unit point mass at x0 spread over the corners of its cell with bilinear weights.
/// Nodal values sum to 1/h^2, so the lumped integral sum(value * h^2) is 1.
inline std::vector<double> discrete_delta(const Grid& grid, Point x0) {
  const double fi = grid.fractional_index(x0.x);
  const double fj = grid.fractional_index(x0.y);
  const double last = static_cast<double>(grid.nodes_per_side() - 1);
  if (!(fi > 0.0 && fj > 0.0 && fi < last && fj < last))
    throw ConfigError("discrete_delta: pole must lie strictly inside the domain");
  const auto i0 = static_cast<std::size_t>(std::floor(fi));
  const auto j0 = static_cast<std::size_t>(std::floor(fj));
  const double tx = fi - std::floor(fi);
  const double ty = fj - std::floor(fj);
  const double inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
  std::vector<double> out(grid.interior_count(), 0.0);
  const double weights[2][2] = {{(1 - tx) * (1 - ty), tx * (1 - ty)}, {(1 - tx) * ty, tx * ty}};
  for (std::size_t dj = 0; dj < 2; ++dj) {
    for (std::size_t di = 0; di < 2; ++di) {
      const double w = weights[dj][di];
      if (w == 0.0) continue;
      if (grid.is_boundary(i0 + di, j0 + dj))
        throw ConfigError("discrete_delta: pole too close to the outer boundary");
      out[grid.interior_index(i0 + di, j0 + dj)] += w * inv_h2;
    }
  }
  return out;
}

}  // namespace mvs
