#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "mvs/error.hpp"
#include "mvs/grid.hpp"
#include "mvs/height_field.hpp"
#include "mvs/point.hpp"

namespace mvs {

/// Ordered vertex list; closed polylines repeat no vertex at the end.
struct Polyline {
  std::vector<Point> vertices;
  bool closed = true;
};

/// Signed shoelace area of a closed polyline (counter-clockwise positive).
inline double shoelace_area(std::span<const Point> pts) {
  double s = 0.0;
  for (std::size_t k = 0; k < pts.size(); ++k) s += cross(pts[k], pts[(k + 1) % pts.size()]);
  return 0.5 * s;
}

namespace detail {

// Chains the boundary edges of a cell union into closed loops. Edges are directed
// with the set on their left; at a vertex shared by two diagonal-only cells the
// leftmost turn is taken so loops follow 4-connectivity.
inline std::vector<Polyline> trace_cell_boundary(const Grid& grid,
                                                 const std::vector<std::uint8_t>& cells) {
  const std::size_t nc = grid.cells_per_side();
  const std::size_t nv = grid.nodes_per_side();
  auto inside = [&](long i, long j) {
    return i >= 0 && j >= 0 && i < static_cast<long>(nc) && j < static_cast<long>(nc) &&
           cells[static_cast<std::size_t>(j) * nc + static_cast<std::size_t>(i)] != 0;
  };
  struct Edge {
    std::size_t from, to;
    int dx, dy;
    bool used;
  };
  std::vector<Edge> edges;
  std::vector<std::array<int, 2>> out(nv * nv, {-1, -1});
  auto add = [&](std::size_t fi, std::size_t fj, int dx, int dy) {
    const std::size_t from = fj * nv + fi;
    const std::size_t to = (fj + dy) * nv + (fi + dx);
    auto& slot = out[from];
    (slot[0] < 0 ? slot[0] : slot[1]) = static_cast<int>(edges.size());
    edges.push_back({from, to, dx, dy, false});
  };
  for (std::size_t j = 0; j < nc; ++j) {
    for (std::size_t i = 0; i < nc; ++i) {
      if (!cells[j * nc + i]) continue;
      const long li = static_cast<long>(i), lj = static_cast<long>(j);
      if (!inside(li, lj - 1)) add(i, j, 1, 0);
      if (!inside(li + 1, lj)) add(i + 1, j, 0, 1);
      if (!inside(li, lj + 1)) add(i + 1, j + 1, -1, 0);
      if (!inside(li - 1, lj)) add(i, j + 1, 0, -1);
    }
  }

  std::vector<Polyline> loops;
  for (std::size_t start = 0; start < edges.size(); ++start) {
    if (edges[start].used) continue;
    std::vector<std::size_t> chain;
    std::size_t e = start;
    while (!edges[e].used) {
      edges[e].used = true;
      chain.push_back(e);
      const auto& slot = out[edges[e].to];
      int next = -1;
      int best_turn = -2;
      for (int cand : slot) {
        if (cand < 0 || edges[static_cast<std::size_t>(cand)].used) continue;
        const auto& c = edges[static_cast<std::size_t>(cand)];
        // +1 left, 0 straight, -1 right
        const int turn = edges[e].dx * c.dy - edges[e].dy * c.dx;
        if (turn > best_turn) {
          best_turn = turn;
          next = cand;
        }
      }
      if (next < 0) break;
      e = static_cast<std::size_t>(next);
    }
    // Keep corner vertices only.
    Polyline loop;
    const std::size_t m = chain.size();
    for (std::size_t k = 0; k < m; ++k) {
      const auto& prev = edges[chain[(k + m - 1) % m]];
      const auto& cur = edges[chain[k]];
      if (prev.dx == cur.dx && prev.dy == cur.dy) continue;
      loop.vertices.push_back(grid.node(cur.from % nv, cur.from / nv));
    }
    if (loop.vertices.size() >= 3) loops.push_back(std::move(loop));
  }
  return loops;
}

inline int count_components(std::size_t nc, const std::vector<std::uint8_t>& cells) {
  std::vector<std::uint8_t> seen(cells.size(), 0);
  std::vector<std::size_t> stack;
  int count = 0;
  for (std::size_t s = 0; s < cells.size(); ++s) {
    if (!cells[s] || seen[s]) continue;
    ++count;
    seen[s] = 1;
    stack.push_back(s);
    while (!stack.empty()) {
      const std::size_t k = stack.back();
      stack.pop_back();
      const std::size_t i = k % nc, j = k / nc;
      const std::size_t nbr[4] = {i > 0 ? k - 1 : k, i + 1 < nc ? k + 1 : k,
                                  j > 0 ? k - nc : k, j + 1 < nc ? k + nc : k};
      for (std::size_t q : nbr) {
        if (q != k && cells[q] && !seen[q]) {
          seen[q] = 1;
          stack.push_back(q);
        }
      }
    }
  }
  return count;
}

}  // namespace detail

/// Cell-based noncontact set. A cell is in the set when all four of its corner
/// nodes carry a strictly positive height; area, components and boundary loops
/// are all derived from this one indicator.
class MeanValueSet {
 public:
  MeanValueSet(const Grid& grid, std::vector<std::uint8_t> cells)
      : grid_(grid), cells_(std::move(cells)) {
    if (cells_.size() != grid_.cell_count())
      throw ConfigError("mean value set: indicator size does not match grid");
    std::size_t count = 0;
    for (auto c : cells_) count += c != 0;
    area_ = static_cast<double>(count) * grid_.spacing() * grid_.spacing();
    components_ = detail::count_components(grid_.cells_per_side(), cells_);
    boundary_ = detail::trace_cell_boundary(grid_, cells_);
  }

  const Grid& grid() const noexcept { return grid_; }
  const std::vector<std::uint8_t>& cells() const noexcept { return cells_; }
  const std::vector<Polyline>& boundary() const noexcept { return boundary_; }
  double area() const noexcept { return area_; }
  int component_count() const noexcept { return components_; }
  bool empty() const noexcept { return area_ == 0.0; }

  bool cell(std::size_t i, std::size_t j) const noexcept {
    return cells_[j * grid_.cells_per_side() + i] != 0;
  }

  /// Average of u over the set by the cell-midpoint rule.
  template <class F>
  double average(F&& u) const {
    const std::size_t nc = grid_.cells_per_side();
    double s = 0.0;
    std::size_t count = 0;
    for (std::size_t j = 0; j < nc; ++j)
      for (std::size_t i = 0; i < nc; ++i)
        if (cells_[j * nc + i]) {
          s += u(grid_.cell_center(i, j));
          ++count;
        }
    if (count == 0) throw MeasurementError("mean value set: average over an empty set");
    return s / static_cast<double>(count);
  }

 private:
  Grid grid_;
  std::vector<std::uint8_t> cells_;
  std::vector<Polyline> boundary_;
  double area_ = 0.0;
  int components_ = 0;
};

/// Rasterizes a predicate on cell centres.
template <class Pred>
MeanValueSet rasterize(const Grid& grid, Pred&& in) {
  const std::size_t nc = grid.cells_per_side();
  std::vector<std::uint8_t> cells(nc * nc, 0);
  for (std::size_t j = 0; j < nc; ++j)
    for (std::size_t i = 0; i < nc; ++i) cells[j * nc + i] = in(grid.cell_center(i, j)) ? 1 : 0;
  return MeanValueSet(grid, std::move(cells));
}

/// {v > threshold} as a cell set.
inline MeanValueSet noncontact_set(const HeightField& v, double threshold) {
  if (!(threshold >= 0.0)) throw ConfigError("noncontact_set: threshold must be nonnegative");
  const Grid& g = v.grid();
  const std::size_t nc = g.cells_per_side();
  std::vector<std::uint8_t> cells(nc * nc, 0);
  for (std::size_t j = 0; j < nc; ++j)
    for (std::size_t i = 0; i < nc; ++i)
      cells[j * nc + i] = v.at(i, j) > threshold && v.at(i + 1, j) > threshold &&
                          v.at(i, j + 1) > threshold && v.at(i + 1, j + 1) > threshold;
  return MeanValueSet(g, std::move(cells));
}

}  // namespace mvs
