#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "mvs/error.hpp"
#include "mvs/grid.hpp"
#include "mvs/height_field.hpp"
#include "mvs/lcp.hpp"
#include "mvs/mean_value_set.hpp"
#include "mvs/operator.hpp"

namespace mvs {

struct SolveOptions {
  LcpOptions lcp;
  InterfaceAveraging averaging = InterfaceAveraging::harmonic;
  /// Noncontact threshold relative to max(v).
  double relative_threshold = 1e-12;
};

struct MvsResult {
  HeightField height;
  MeanValueSet set;
};

/// Right-hand side of the height LCP: unit discrete point mass at x0 minus the
/// uniform sink density (lumped, one value per node).
inline std::vector<double> height_rhs(const ProblemSpec& spec) {
  std::vector<double> b = discrete_delta(spec.grid, spec.x0);
  const double sink = spec.sink_density();
  for (double& x : b) x -= sink;
  return b;
}

/// Solves the obstacle problem for the height v = G - w and extracts {v > 0}.
inline MvsResult solve_mvs(const ProblemSpec& spec, const SolveOptions& options = {}) {
  const DiscreteOperator a(spec.grid, spec.medium, options.averaging);
  const std::vector<double> b = height_rhs(spec);
  LcpSolution s = solve_lcp(a, b, options.lcp);
  HeightField v(spec.grid, std::move(s.v));
  v.set_spec(spec);
  v.set_diagnostics({s.iterations, s.projected_residual, s.complementarity, s.min_slack});
  MeanValueSet set = noncontact_set(v, options.relative_threshold * v.max_value());
  return {std::move(v), std::move(set)};
}

/// Blowup rescaling v_rho(x) = v(base + rho x) / rho^2 sampled onto zoom_grid.
inline HeightField rescale_blowup(const HeightField& v, Point base, double rho,
                                  const Grid& zoom_grid) {
  if (!(rho > 0.0)) throw ConfigError("rescale_blowup: rho must be positive");
  const double reach = rho * zoom_grid.half_width();
  const Grid& g = v.grid();
  const double slack = 1e-12 * g.half_width();
  if (std::abs(base.x) + reach > g.half_width() + slack ||
      std::abs(base.y) + reach > g.half_width() + slack)
    throw ConfigError("rescale_blowup: zoom window leaves the domain");
  const double inv = 1.0 / (rho * rho);
  return sample_field(zoom_grid, [&](Point p) {
    Point q = base + rho * p;
    q.x = std::clamp(q.x, -g.half_width(), g.half_width());
    q.y = std::clamp(q.y, -g.half_width(), g.half_width());
    return v.value_at(q) * inv;
  });
}

}  // namespace mvs
