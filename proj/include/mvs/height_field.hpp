#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "mvs/coeff.hpp"
#include "mvs/error.hpp"
#include "mvs/grid.hpp"
#include "mvs/point.hpp"

namespace mvs {

/// Inputs of one mean-value-set solve.
///
/// The height v = G(., x0) - w solves the obstacle problem on [-M, M]^2 with
/// unit point source at x0 and uniform sink of density 1/(pi R^2) on {v > 0}.
struct ProblemSpec {
  Medium medium;
  Point x0;
  double radius;
  Grid grid;

  ProblemSpec(const Medium& m, Point pole, double r, const Grid& g)
      : medium(m), x0(pole), radius(r), grid(g) {
    if (!(r > 0.0)) throw ConfigError("problem: R must be positive");
    const double reach = std::max(std::abs(pole.x), std::abs(pole.y)) + 3.0 * r;
    if (reach > g.half_width())
      throw ConfigError("problem: domain too small, need max(|x0|, |y0|) + 3R <= M");
  }

  /// Sink density on the noncontact set, 1/|B_R|.
  double sink_density() const noexcept { return 1.0 / (std::numbers::pi * radius * radius); }
};

/// Nonnegative nodal height over the interior nodes of a grid (row-major, i fastest).
/// Boundary nodes carry the homogeneous Dirichlet value 0.
class HeightField {
 public:
  struct Diagnostics {
    long iterations = 0;
    double projected_residual = 0.0;
    double complementarity = 0.0;
    double min_slack = 0.0;
  };

  HeightField(const Grid& grid, std::vector<double> values)
      : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.interior_count())
      throw ConfigError("height field: value count does not match grid");
  }

  const Grid& grid() const noexcept { return grid_; }
  const std::vector<double>& values() const noexcept { return values_; }
  const std::optional<ProblemSpec>& spec() const noexcept { return spec_; }
  const Diagnostics& diagnostics() const noexcept { return diag_; }

  void set_spec(const ProblemSpec& spec) { spec_ = spec; }
  void set_diagnostics(const Diagnostics& d) { diag_ = d; }

  /// Value at full-grid node (i, j); 0 on the outer boundary.
  double at(std::size_t i, std::size_t j) const noexcept {
    if (grid_.is_boundary(i, j)) return 0.0;
    return values_[grid_.interior_index(i, j)];
  }

  /// Bilinear interpolant. Points outside the domain are an error.
  double value_at(Point p) const {
    const double fi = grid_.fractional_index(p.x);
    const double fj = grid_.fractional_index(p.y);
    const double last = static_cast<double>(grid_.nodes_per_side() - 1);
    if (fi < 0.0 || fj < 0.0 || fi > last || fj > last)
      throw ConfigError("height field: interpolation point outside the domain");
    auto i0 = static_cast<std::size_t>(std::min(std::floor(fi), last - 1.0));
    auto j0 = static_cast<std::size_t>(std::min(std::floor(fj), last - 1.0));
    const double tx = fi - static_cast<double>(i0);
    const double ty = fj - static_cast<double>(j0);
    const double v00 = at(i0, j0), v10 = at(i0 + 1, j0);
    const double v01 = at(i0, j0 + 1), v11 = at(i0 + 1, j0 + 1);
    if (tx == 0.0 && ty == 0.0) return v00;
    return (1 - ty) * ((1 - tx) * v00 + tx * v10) + ty * ((1 - tx) * v01 + tx * v11);
  }

  double max_value() const noexcept {
    double m = 0.0;
    for (double x : values_) m = std::max(m, x);
    return m;
  }

  HeightField scaled(double factor) const {
    std::vector<double> out(values_);
    for (double& x : out) x *= factor;
    HeightField h(grid_, std::move(out));
    h.spec_ = spec_;
    h.diag_ = diag_;
    return h;
  }

 private:
  Grid grid_;
  std::vector<double> values_;
  std::optional<ProblemSpec> spec_;
  Diagnostics diag_;
};

/// Samples a function of position at the interior nodes.
template <class F>
HeightField sample_field(const Grid& grid, F&& f) {
  std::vector<double> v(grid.interior_count());
  const std::size_t n = grid.interior_per_side();
  for (std::size_t j = 1; j <= n; ++j)
    for (std::size_t i = 1; i <= n; ++i) v[grid.interior_index(i, j)] = f(grid.node(i, j));
  return HeightField(grid, std::move(v));
}

}  // namespace mvs
