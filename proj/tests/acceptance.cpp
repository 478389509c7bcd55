// Acceptance suite: one PASS/FAIL line per criterion. Exit status is nonzero when any
// selected criterion fails. Usage: acceptance [criterion numbers...]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "mvs/cli.hpp"
#include "mvs/mvs.hpp"

using namespace mvs;

namespace {

constexpr double pi = std::numbers::pi;

struct Verdict {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---------------------------------------------------------------------------
// Solve cache shared by all criteria; also feeds the structural checks of 10.

struct Key {
  double alpha, beta, s, x, y, radius, half_width, spacing;
  auto tie() const { return std::tie(alpha, beta, s, x, y, radius, half_width, spacing); }
  bool operator<(const Key& o) const { return tie() < o.tie(); }
};

struct Solved {
  ProblemSpec spec;
  MvsResult result;
  double seconds;
};

std::map<Key, Solved> cache;

const Solved& solve(double alpha, double beta, double s, Point x0, double radius, double half_width, double h) {
  const Key key{alpha, beta, s, x0.x, x0.y, radius, half_width, h};
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  const ProblemSpec spec(Medium(alpha, beta, s), x0, radius, Grid(half_width, h));
  const auto t0 = std::chrono::steady_clock::now();
  MvsResult r = solve_mvs(spec);
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return cache.emplace(key, Solved{spec, std::move(r), dt}).first->second;
}

// ---------------------------------------------------------------------------

Verdict criterion1() {
  const Solved& a = solve(1, 1, 0, {0, 0.3}, 1, 4, 1.0 / 64);
  const Solved& b = solve(1, 1, 0, {0, 0.3}, 1, 4, 1.0 / 128);
  const double ra = symmetric_difference_disk(a.result.set, {0, 0.3}, 1) / pi;
  const double rb = symmetric_difference_disk(b.result.set, {0, 0.3}, 1) / pi;
  const bool pass = ra <= 0.05 && ra / rb >= 1.5 && a.seconds <= 60.0;
  return {pass, fmt("|D/B|/pi = %.4f at h=1/64 (<= 0.05), %.4f at h=1/128, ratio %.2f (>= 1.5), solve %.1f s (<= 60)",
                    ra, rb, ra / rb, a.seconds)};
}

Verdict criterion2() {
  // (alpha, beta) = (2, 1): u = y/alpha above, y/beta below is L-harmonic, and
  // |x|^2 is L-subharmonic (no singular part on the interface since z = 0).
  const Point x0{0, 0.3};
  const Solved& s1 = solve(2, 1, 0, x0, 1.0, 4, 1.0 / 64);
  const MeanValueSet& set = s1.result.set;
  const double avg1 = set.average([](Point) { return 1.0; });
  auto tr = [](Point p) { return p.y >= 0 ? p.y / 2.0 : p.y / 1.0; };
  double lo = 1e300, hi = -1e300;
  const Grid& g = s1.spec.grid;
  for (std::size_t j = 0; j < g.cells_per_side(); ++j)
    for (std::size_t i = 0; i < g.cells_per_side(); ++i)
      if (set.cell(i, j)) {
        lo = std::min(lo, tr(g.cell_center(i, j)));
        hi = std::max(hi, tr(g.cell_center(i, j)));
      }
  const double rel = std::abs(set.average(tr) - tr(x0)) / (hi - lo);
  std::vector<double> q;
  for (double r : {0.5, 0.75, 1.0})
    q.push_back(solve(2, 1, 0, x0, r, 4, 1.0 / 64).result.set.average([](Point p) { return dot(p, p); }));
  const bool mono = q[0] <= q[1] && q[1] <= q[2];
  const bool pass = std::abs(avg1 - 1.0) <= 1e-12 && rel <= 0.02 && mono;
  return {pass, fmt("avg(1) - 1 = %.1e; transmission |avg - u(x0)|/osc = %.4f (<= 0.02); avg|x|^2 over R=0.5,0.75,1: "
                    "%.5f %.5f %.5f (nondecreasing)",
                    avg1 - 1.0, rel, q[0], q[1], q[2])};
}

Verdict criterion3() {
  const Medium m(2, 1);
  const double a = transmission_residual(solve(2, 1, 0, {0, 0.3}, 1, 4, 1.0 / 64).result.height, m);
  const double b = transmission_residual(solve(2, 1, 0, {0, 0.3}, 1, 4, 1.0 / 128).result.height, m);
  return {a <= 0.05 && a / b >= 1.5,
          fmt("relative residual %.4f at h=1/64 (<= 0.05), %.4f at h=1/128, ratio %.2f (>= 1.5)", a, b, a / b)};
}

Verdict criterion4() {
  const double h = 1.0 / 128;
  const Grid grid(1.0, h);
  const Point pole{0.1, 0.3};
  const Medium m(2, 1);
  const DiscreteOperator op(grid, m);
  const GreensEval gr(m, pole);
  // Sample G on all nodes (boundary included) and evaluate the stencil at interior
  // nodes at distance >= 4h from the pole.
  const std::size_t n = grid.nodes_per_side();
  std::vector<double> gv(n * n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) gv[j * n + i] = green(gr, grid.node(i, j));
  double worst = 0.0;
  for (std::size_t j = 1; j + 1 < n; ++j)
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (distance(grid.node(i, j), pole) < 4 * h) continue;
      const double c = gv[j * n + i];
      const double terms[4] = {op.horizontal_conductance(i, j) * (gv[j * n + i + 1] - c),
                               op.horizontal_conductance(i - 1, j) * (gv[j * n + i - 1] - c),
                               op.vertical_conductance(i, j) * (gv[(j + 1) * n + i] - c),
                               op.vertical_conductance(i, j - 1) * (gv[(j - 1) * n + i] - c)};
      double res = 0.0, scale = 0.0;
      for (double t : terms) res += t, scale += std::abs(t);
      worst = std::max(worst, std::abs(res) / scale);
    }
  const GreensEval unit(Medium(1, 1), pole);
  bool exact = true;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      const Point p = grid.node(i, j);
      if (p == pole) continue;
      exact = exact && green(unit, p) == fundamental(p, pole);
    }
  return {worst <= 0.02 && exact,
          fmt("max relative residual %.4f at h=1/128 (<= 0.02); alpha=beta=1 equals Gamma at all nodes: %s", worst,
              exact ? "yes" : "no")};
}

Verdict criterion5() {
  // sampled profiles carry an O((h/r)^2) interpolation bias; 1/256 keeps it under the spread bound at r = 0.2
  const Grid fine(1.0, 1.0 / 256);
  const Grid g(1.0, 1.0 / 128);
  const auto radii = radius_ladder(0.2, 0.8, 7);
  const auto unit = blowup_catalog(1, 1);
  auto sample = [&](const BlowupProfile& p) { return sample_field(fine, [&](Point q) { return eval_blowup(p, q); }); };
  const WeissProfile half = weiss_profile(sample(unit[4]), Medium(1, 1), {0, 0}, radii);
  double half_err = 0.0;
  for (const auto& [r, phi] : half.samples) half_err = std::max(half_err, std::abs(phi - pi / 64) / (pi / 64));

  double worst_spread = 0.0;
  int worst_id = 0;
  for (const auto& p : blowup_catalog(2, 1)) {
    const double s = weiss_profile(sample(p), Medium(2, 1), {0, 0}, radii).spread();
    if (s > worst_spread) worst_spread = s, worst_id = p.id;
  }

  const Solved& sol = solve(2, 1, 0, {0, 0.3}, 1, 4, 1.0 / 128);
  const auto fb = interface_free_boundary_points(sol.result.height);
  const Point base{fb.back(), 0.0};
  const double rho = 0.5;
  const HeightField zoom = rescale_blowup(weiss_normalized(sol.result.height), base, rho, g);
  const WeissProfile prof = weiss_profile(zoom, Medium(2, 1), {0, 0}, radius_ladder(0.1, 0.8, 8));
  double worst_drop = 0.0;
  for (std::size_t k = 0; k + 1 < prof.samples.size(); ++k)
    worst_drop = std::max(worst_drop, prof.samples[k].second - prof.samples[k + 1].second);
  const double drop_tol = 1e-3 * prof.max_abs();

  const bool pass = half_err <= 0.02 && worst_spread <= 1e-3 * pi / 64 && worst_drop <= drop_tol;
  return {pass, fmt("half plane max |Phi - pi/64|/(pi/64) = %.4f (<= 0.02); catalog max spread %.2e at case %d "
                    "(<= %.2e); solution at x=%.4f: largest decrease %.2e (<= %.2e)",
                    half_err, worst_spread, worst_id, 1e-3 * pi / 64, base.x, worst_drop, drop_tol)};
}

Verdict criterion6() {
  const double h256 = 1.0 / 256;
  const auto cat = blowup_catalog(2, 1);
  const MeanValueSet wedge = rasterize(Grid(1.0, h256), [&](Point p) { return eval_blowup(cat[0], p) > 0.0; });
  const CrossingAngles syn = crossing_angles(wedge, 0.0, 12 * h256);
  const bool syn_ok = std::abs(syn.theta_up - 0.9553) <= 0.05 && std::abs(syn.theta_down - 2.5261) <= 0.05;

  // Computed set: compare against the nearest of the two admissible angle pairs
  // (acute root, catalog case 1; obtuse root, catalog case 3).
  const double h = 1.0 / 128;
  const Solved& sol = solve(2, 1, 0, {0, 0.3}, 1, 4, h);
  const auto xs = interface_crossings(sol.result.set);
  const CrossingAngles c = crossing_angles(sol.result.set, xs.back(), 12 * h);
  const auto [a1, a2] = predicted_angles(2, 1);
  const std::pair<double, double> roots[2] = {{a1, a2}, {*cat[2].theta1, *cat[2].theta2}};
  double best = 1e300;
  std::pair<double, double> nearest{};
  for (const auto& r : roots) {
    const double d = std::max(std::abs(c.theta_up - r.first), std::abs(c.theta_down - r.second));
    if (d < best) best = d, nearest = r;
  }
  return {syn_ok && best <= 0.15,
          fmt("synthetic wedge (%.4f, %.4f) vs (0.9553, 2.5261) within 0.05; computed set at x=%.4f: (%.4f, %.4f), "
              "nearest admissible (%.4f, %.4f), max deviation %.3f (<= 0.15)",
              syn.theta_up, syn.theta_down, c.crossing_x, c.theta_up, c.theta_down, nearest.first, nearest.second, best)};
}

Verdict deficiency_check(double s) {
  const double h = 1.0 / 128;
  const double base = convexity_deficiency(solve(1, 1, 0, {0, 0}, 1, 4, h).result.set);
  const double d = convexity_deficiency(solve(1.2, 0.8, s, {0, 0}, 1, 4, h).result.set);
  return {d > 3 * base, fmt("deficiency %.5f vs 3 x baseline %.5f (baseline alpha=beta=1: %.5f), ratio %.2f", d,
                            3 * base, base, d / base)};
}

Verdict criterion7() {
  Verdict v = deficiency_check(0.0);
  const double cap = disk_halfplane_area({0, 0}, 1.0, {-1, 0}, {0, 1});
  const bool cap_ok = std::abs(cap - (pi - 2) / 4) <= 1e-6;
  v.detail += fmt("; obstruction cap %.8f vs (pi-2)/4 = %.8f", cap, (pi - 2) / 4);
  v.pass = v.pass && cap_ok;
  return v;
}

Verdict criterion8() {
  Verdict v = deficiency_check(4.0 / 128);
  v.detail = "s = 4h: " + v.detail;
  return v;
}

Verdict criterion9() {
  cli::JobConfig c;
  c.radius = 1.0;
  c.x0 = {0, 0};
  c.half_width = 4.0;
  c.spacing = 1.0 / 64;
  c.rule_a = 0.5;
  c.k_min = 2;
  c.k_max = 16;
  const auto rows = cli::run_sweep(c);
  bool mono = true, solved = true;
  std::string col;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    solved = solved && rows[k].solved && rows[k].error.empty();
    if (k > 0 && rows[k].symdiff_area > 1.1 * rows[k - 1].symdiff_area) mono = false;
    col += fmt("%s%.4f", k ? " " : "", rows[k].symdiff_area);
  }
  const double first = rows.front().symdiff_area, last = rows.back().symdiff_area;
  return {solved && mono && last < 0.5 * first,
          fmt("symdiff k=2..16: %s; nonincreasing within 10%%: %s; final/initial %.3f (< 0.5)", col.c_str(),
              mono ? "yes" : "no", last / first)};
}

Verdict criterion10() {
  // Ladder at (2, 1), same pole as criterion 2.
  for (double r : {0.5, 0.75, 1.0}) solve(2, 1, 0, {0, 0.3}, r, 4, 1.0 / 64);
  const MeanValueSet& a = solve(2, 1, 0, {0, 0.3}, 0.5, 4, 1.0 / 64).result.set;
  const MeanValueSet& b = solve(2, 1, 0, {0, 0.3}, 0.75, 4, 1.0 / 64).result.set;
  const MeanValueSet& c = solve(2, 1, 0, {0, 0.3}, 1.0, 4, 1.0 / 64).result.set;
  const bool ladder = contains(b, a, 1) && contains(c, b, 1);
  int bad_components = 0;
  double worst_res = 0.0, worst_comp = 0.0;
  for (const auto& [key, s] : cache) {
    bad_components += s.result.set.component_count() != 1;
    worst_res = std::max(worst_res, s.result.height.diagnostics().projected_residual);
    worst_comp = std::max(worst_comp, s.result.height.diagnostics().complementarity);
  }
  const bool pass = ladder && bad_components == 0 && worst_res <= 1e-10 && worst_comp <= 1e-10;
  return {pass, fmt("%zu solves: runs with != 1 component: %d; R-ladder containment (slack 1): %s; max projected "
                    "residual %.1e, max v.(Av-b)/(|v||Av-b|) %.1e (<= 1e-10)",
                    cache.size(), bad_components, ladder ? "yes" : "no", worst_res, worst_comp)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Verdict()>> criteria{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                       criterion6, criterion7, criterion8, criterion9, criterion10};
  std::set<int> selected;
  for (int k = 1; k < argc; ++k) selected.insert(std::atoi(argv[k]));
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k + 1);
    if (!selected.empty() && !selected.count(id)) continue;
    Verdict v{false, ""};
    try {
      v = criteria[k]();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failures += !v.pass;
    std::printf("criterion %2d: %s | %s\n", id, v.pass ? "PASS" : "FAIL", v.detail.c_str());
    std::fflush(stdout);
  }
  return failures ? 1 : 0;
}
