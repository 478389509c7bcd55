#pragma once

#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mvs/error.hpp"
#include "mvs/mean_value_set.hpp"
#include "mvs/solver.hpp"

namespace mvs::io {

using json = nlohmann::ordered_json;

/// Shortest-round-trip is not needed for CSV; 17 significant digits reload exactly.
inline std::string number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline json spec_json(const ProblemSpec& s) {
  return {{"alpha", s.medium.alpha()},
          {"beta", s.medium.beta()},
          {"moll_radius", s.medium.moll_radius()},
          {"x0", {s.x0.x, s.x0.y}},
          {"R", s.radius}};
}

inline json grid_json(const Grid& g) {
  return {{"M", g.half_width()}, {"h", g.spacing()}, {"n_side", g.nodes_per_side()}};
}

/// Solution artifact. "height" covers all (n_side)^2 nodes, row-major with x fastest,
/// boundary nodes included as zeros; "indicator" covers all cells the same way.
inline json solution_json(const MvsResult& r) {
  const Grid& g = r.height.grid();
  const std::size_t n = g.nodes_per_side();
  json height = json::array();
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) height.push_back(r.height.at(i, j));
  json indicator = json::array();
  for (auto c : r.set.cells()) indicator.push_back(c ? 1 : 0);
  const auto& d = r.height.diagnostics();
  json out;
  if (r.height.spec()) out["spec"] = spec_json(*r.height.spec());
  out["grid"] = grid_json(g);
  out["height"] = std::move(height);
  out["indicator"] = std::move(indicator);
  out["residual"] = {{"iterations", d.iterations},
                     {"projected", d.projected_residual},
                     {"complementarity", d.complementarity},
                     {"min_slack", d.min_slack}};
  return out;
}

inline json boundary_json(const MeanValueSet& set) {
  json loops = json::array();
  for (const auto& p : set.boundary()) {
    json verts = json::array();
    for (Point v : p.vertices) verts.push_back({v.x, v.y});
    loops.push_back({{"closed", p.closed}, {"vertices", std::move(verts)}});
  }
  return {{"grid", grid_json(set.grid())}, {"polylines", std::move(loops)}};
}

inline MvsResult solution_from_json(const json& j) {
  try {
    const Grid g(j.at("grid").at("M").get<double>(), j.at("grid").at("h").get<double>());
    const std::size_t n = g.nodes_per_side();
    if (j.at("grid").at("n_side").get<std::size_t>() != n)
      throw ConfigError("solution file: n_side does not match M/h");
    const auto& height = j.at("height");
    if (height.size() != n * n) throw ConfigError("solution file: height has the wrong length");
    std::vector<double> interior(g.interior_count());
    for (std::size_t jj = 1; jj + 1 < n; ++jj)
      for (std::size_t i = 1; i + 1 < n; ++i)
        interior[g.interior_index(i, jj)] = height[jj * n + i].get<double>();
    HeightField v(g, std::move(interior));
    if (j.contains("spec")) {
      const auto& s = j.at("spec");
      const Medium m(s.at("alpha").get<double>(), s.at("beta").get<double>(),
                     s.at("moll_radius").get<double>());
      const Point x0{s.at("x0").at(0).get<double>(), s.at("x0").at(1).get<double>()};
      v.set_spec(ProblemSpec(m, x0, s.at("R").get<double>(), g));
    }
    if (j.contains("residual")) {
      const auto& r = j.at("residual");
      v.set_diagnostics({r.at("iterations").get<long>(), r.at("projected").get<double>(),
                         r.at("complementarity").get<double>(), r.at("min_slack").get<double>()});
    }
    const auto& ind = j.at("indicator");
    if (ind.size() != g.cell_count()) throw ConfigError("solution file: indicator has the wrong length");
    std::vector<std::uint8_t> cells(ind.size());
    for (std::size_t k = 0; k < ind.size(); ++k) cells[k] = ind[k].get<int>() != 0;
    MeanValueSet set(g, std::move(cells));
    return {std::move(v), std::move(set)};
  } catch (const json::exception& e) {
    throw ConfigError(std::string("solution file: ") + e.what());
  }
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open " + path + " for writing");
  f << text;
  if (!f) throw ConfigError("write failed: " + path);
}

inline json read_json(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open " + path);
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

inline void save_solution(const std::string& prefix, const MvsResult& r) {
  write_text(prefix + ".solution.json", solution_json(r).dump() + "\n");
  write_text(prefix + ".boundary.json", boundary_json(r.set).dump() + "\n");
}

inline MvsResult load_solution(const std::string& path) { return solution_from_json(read_json(path)); }

}  // namespace mvs::io
