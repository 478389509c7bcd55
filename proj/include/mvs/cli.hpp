#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mvs/error.hpp"
#include "mvs/freeboundary.hpp"
#include "mvs/geometry.hpp"
#include "mvs/io.hpp"
#include "mvs/solver.hpp"

namespace mvs::cli {

enum ExitCode : int { ok = 0, config_error = 2, numerical_failure = 3 };

/// Everything a command may read. Flags map one-to-one onto these fields and onto
/// the keys of a `--job` file.
struct JobConfig {
  std::string command;
  double alpha = 1.0;
  double beta = 1.0;
  double moll_radius = 0.0;
  Point x0{0.0, 0.0};
  std::optional<double> radius;
  double half_width = 4.0;
  double spacing = 1.0 / 64.0;
  std::string out = "mvs";
  double omega = 1.8;
  double tol = 1e-10;
  long max_iter = 0;

  // sweep
  double rule_a = 0.5;
  int k_min = 2;
  int k_max = 16;
  std::vector<std::pair<double, double>> pairs;  // overrides the rule when nonempty
  std::vector<double> s_list;                    // one row per s; empty means {moll_radius}
  unsigned threads = 0;                          // 0: hardware concurrency
  double window_cells = 12.0;

  // catalog
  int samples = 360;

  // analyze
  std::string input;
  bool angles = false;
  bool weiss = false;
  bool symdiff = false;
  bool deficiency = false;
  bool mvp = false;
  std::optional<Point> base;
  std::vector<double> radii;
  std::string test_fn = "const";
  std::optional<Point> z;

  ProblemSpec problem(double a, double b, double s) const {
    if (!radius) throw ConfigError("--R is required");
    return ProblemSpec(Medium(a, b, s), x0, *radius, Grid(half_width, spacing));
  }

  SolveOptions solve_options() const {
    SolveOptions o;
    o.lcp.omega = omega;
    o.lcp.tol = tol;
    o.lcp.max_iter = max_iter;
    return o;
  }
};

// ---------------------------------------------------------------------------
// Argument parsing helpers

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

inline double to_double(const std::string& s) {
  try {
    std::size_t used = 0;
    const double x = std::stod(s, &used);
    if (used != s.size()) throw ConfigError("not a number: '" + s + "'");
    return x;
  } catch (const std::logic_error&) {
    throw ConfigError("not a number: '" + s + "'");
  }
}

inline Point parse_point(const std::string& s) {
  const auto parts = split(s, ',');
  if (parts.size() != 2) throw ConfigError("expected x,y but got '" + s + "'");
  return {to_double(parts[0]), to_double(parts[1])};
}

/// "a:b:n" -> n evenly spaced values.
inline std::vector<double> parse_ladder(const std::string& s) {
  const auto parts = split(s, ':');
  if (parts.size() != 3) throw ConfigError("expected a:b:n but got '" + s + "'");
  const double n = to_double(parts[2]);
  if (n != std::floor(n)) throw ConfigError("ladder count must be an integer");
  return radius_ladder(to_double(parts[0]), to_double(parts[1]), static_cast<int>(n));
}

/// "a1:b1,a2:b2,..."
inline std::vector<std::pair<double, double>> parse_pairs(const std::string& s) {
  std::vector<std::pair<double, double>> out;
  for (const auto& item : split(s, ',')) {
    const auto ab = split(item, ':');
    if (ab.size() != 2) throw ConfigError("expected alpha:beta but got '" + item + "'");
    out.emplace_back(to_double(ab[0]), to_double(ab[1]));
  }
  return out;
}

inline std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& item : split(s, ',')) out.push_back(to_double(item));
  return out;
}

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"solve", "sweep", "catalog", "analyze"};
  return names;
}

inline bool is_command(const std::string& s) {
  const auto& n = command_names();
  return std::find(n.begin(), n.end(), s) != n.end();
}

/// Splices the keys of a --job file into the argument list. Flags given on the
/// command line win over the file.
inline std::vector<std::string> expand_job(std::vector<std::string> args) {
  std::string job;
  for (std::size_t k = 0; k < args.size(); ++k) {
    if (args[k] == "--job" && k + 1 < args.size()) {
      job = args[k + 1];
      args.erase(args.begin() + static_cast<long>(k), args.begin() + static_cast<long>(k) + 2);
      break;
    }
    if (args[k].rfind("--job=", 0) == 0) {
      job = args[k].substr(6);
      args.erase(args.begin() + static_cast<long>(k));
      break;
    }
  }
  if (job.empty()) return args;
  const io::json j = io::read_json(job);
  if (!j.is_object()) throw ConfigError(job + ": job file must hold a JSON object");

  auto given = [&](const std::string& flag) {
    for (const auto& a : args)
      if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    return false;
  };
  std::vector<std::string> extra;
  bool has_command = std::any_of(args.begin(), args.end(), is_command);
  for (const auto& [key, value] : j.items()) {
    if (key == "command") {
      if (!value.is_string()) throw ConfigError(job + ": command must be a string");
      if (!has_command) {
        args.insert(args.begin(), value.get<std::string>());
        has_command = true;
      }
      continue;
    }
    const std::string flag = "--" + key;
    if (given(flag)) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) extra.push_back(flag);
      continue;
    }
    extra.push_back(flag);
    if (value.is_string()) {
      extra.push_back(value.get<std::string>());
    } else if (value.is_array()) {
      std::string joined;
      for (const auto& e : value) {
        if (!joined.empty()) joined += ",";
        joined += e.is_string() ? e.get<std::string>() : e.dump();
      }
      extra.push_back(joined);
    } else {
      extra.push_back(value.dump());
    }
  }
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Sweep

struct SweepRow {
  int k = 0;
  double alpha = 0.0;
  double beta = 0.0;
  double s = 0.0;
  double symdiff_area = std::numeric_limits<double>::quiet_NaN();
  double deficiency = std::numeric_limits<double>::quiet_NaN();
  double theta_up = std::numeric_limits<double>::quiet_NaN();
  double theta_down = std::numeric_limits<double>::quiet_NaN();
  int phi_monotone_violations = -1;
  std::string error;
  bool solved = false;
};

struct SweepTask {
  int k;
  double alpha;
  double beta;
  double s;
};

inline std::vector<SweepTask> sweep_schedule(const JobConfig& c) {
  std::vector<std::pair<int, std::pair<double, double>>> base;
  if (!c.pairs.empty()) {
    for (std::size_t n = 0; n < c.pairs.size(); ++n) base.push_back({static_cast<int>(n + 1), c.pairs[n]});
  } else {
    if (c.k_min < 1 || c.k_max < c.k_min) throw ConfigError("sweep: need 1 <= k_min <= k_max");
    for (int k = c.k_min; k <= c.k_max; ++k) base.push_back({k, {1.0 + c.rule_a / k, 1.0 - c.rule_a / k}});
  }
  const std::vector<double> ss = c.s_list.empty() ? std::vector<double>{c.moll_radius} : c.s_list;
  std::vector<SweepTask> out;
  for (const auto& [k, ab] : base)
    for (double s : ss) out.push_back({k, ab.first, ab.second, s});
  if (out.empty()) throw ConfigError("sweep: empty schedule");
  return out;
}

/// One solve plus the measurements reported per sweep row. Measurement failures are
/// recorded in `error` and leave the affected columns NaN.
inline SweepRow sweep_row(const JobConfig& c, const SweepTask& t) {
  SweepRow row;
  row.k = t.k;
  row.alpha = t.alpha;
  row.beta = t.beta;
  row.s = t.s;
  std::vector<std::string> errors;
  try {
    const ProblemSpec spec = c.problem(t.alpha, t.beta, t.s);
    const MvsResult r = solve_mvs(spec, c.solve_options());
    row.solved = true;
    const double h = spec.grid.spacing();
    row.symdiff_area = symmetric_difference_disk(r.set, spec.x0, spec.radius);
    try {
      row.deficiency = convexity_deficiency(r.set);
    } catch (const std::exception& e) {
      errors.emplace_back(e.what());
    }
    try {
      const auto xs = interface_crossings(r.set);
      if (xs.empty()) throw MeasurementError("crossing_angles: set does not cross the interface");
      const CrossingAngles a = crossing_angles(r.set, xs.back(), c.window_cells * h);
      row.theta_up = a.theta_up;
      row.theta_down = a.theta_down;
    } catch (const std::exception& e) {
      errors.emplace_back(e.what());
    }
    try {
      const auto fb = interface_free_boundary_points(r.height);
      if (fb.empty()) throw MeasurementError("weiss: no free-boundary point on the interface");
      const HeightField w = weiss_normalized(r.height);
      const auto radii = radius_ladder(0.05 * spec.radius, 0.4 * spec.radius, 8);
      const WeissProfile p = weiss_profile(w, spec.medium, Point{fb.back(), 0.0}, radii);
      row.phi_monotone_violations = p.monotonicity_violations(1e-3 * p.max_abs());
    } catch (const std::exception& e) {
      errors.emplace_back(e.what());
    }
  } catch (const std::exception& e) {
    errors.emplace_back(e.what());
  }
  for (const auto& e : errors) row.error += (row.error.empty() ? "" : "; ") + e;
  return row;
}

/// Runs every row, at most `threads` at a time; rows come back in schedule order.
inline std::vector<SweepRow> run_sweep(const JobConfig& c) {
  const std::vector<SweepTask> tasks = sweep_schedule(c);
  std::vector<SweepRow> rows(tasks.size());
  unsigned nt = c.threads ? c.threads : std::max(1u, std::thread::hardware_concurrency());
  nt = std::min<unsigned>(nt, static_cast<unsigned>(tasks.size()));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < tasks.size(); k = next++) rows[k] = sweep_row(c, tasks[k]);
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < nt; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return rows;
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out =
      "k,alpha,beta,s,symdiff_area,deficiency,theta_up,theta_down,phi_monotone_violations,error\n";
  for (const auto& r : rows) {
    std::string err = r.error;
    std::replace(err.begin(), err.end(), '"', '\'');
    out += std::to_string(r.k) + "," + io::number(r.alpha) + "," + io::number(r.beta) + "," +
           io::number(r.s) + "," + io::number(r.symdiff_area) + "," + io::number(r.deficiency) +
           "," + io::number(r.theta_up) + "," + io::number(r.theta_down) + "," +
           std::to_string(r.phi_monotone_violations) + ",\"" + err + "\"\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Catalog

inline io::json catalog_json(double alpha, double beta) {
  io::json cases = io::json::array();
  for (const auto& p : blowup_catalog(alpha, beta)) {
    io::json c = {{"case_id", p.id}, {"label", p.label}};
    c["side"] = p.side == ContactSide::left ? "left" : p.side == ContactSide::right ? "right" : "none";
    c["theta1"] = p.theta1 ? io::json(*p.theta1) : io::json(nullptr);
    c["theta2"] = p.theta2 ? io::json(*p.theta2) : io::json(nullptr);
    io::json pieces = io::json::array();
    for (const auto& q : p.pieces)
      pieces.push_back({{"lo", q.lo}, {"hi", q.hi}, {"c0", q.c0}, {"c_cos2", q.c_cos}, {"c_sin2", q.c_sin}});
    c["pieces"] = std::move(pieces);
    cases.push_back(std::move(c));
  }
  return {{"alpha", alpha}, {"beta", beta}, {"cases", std::move(cases)}};
}

inline std::string catalog_csv(double alpha, double beta, int samples) {
  if (samples < 1) throw ConfigError("catalog: samples must be positive");
  std::string out = "case_id,theta,g\n";
  for (const auto& p : blowup_catalog(alpha, beta))
    for (int k = 0; k < samples; ++k) {
      const double t = 2.0 * std::numbers::pi * k / samples;
      out += std::to_string(p.id) + "," + io::number(t) + "," + io::number(p.g(t)) + "\n";
    }
  return out;
}

// ---------------------------------------------------------------------------
// Analysis of a stored solution

inline double mvp_test_value(const std::string& fn, const Medium& m, Point z, Point p) {
  if (fn == "const") return 1.0;
  if (fn == "linear") return p.x;
  if (fn == "transmission") return p.y >= 0.0 ? p.y / m.alpha() : p.y / m.beta();
  if (fn == "quadratic") return dot(p - z, p - z);
  throw ConfigError("unknown --test-fn '" + fn + "' (const, linear, transmission, quadratic)");
}

inline io::json analyze(const JobConfig& c) {
  if (c.input.empty()) throw ConfigError("analyze: --in <file.solution.json> is required");
  const MvsResult r = io::load_solution(c.input);
  if (!r.height.spec()) throw ConfigError("analyze: solution file carries no spec");
  const ProblemSpec& spec = *r.height.spec();
  const double h = spec.grid.spacing();
  io::json out = {{"input", c.input}, {"area", r.set.area()}, {"components", r.set.component_count()}};

  if (c.symdiff) out["symdiff_area"] = symmetric_difference_disk(r.set, spec.x0, spec.radius);
  if (c.deficiency) out["deficiency"] = convexity_deficiency(r.set);
  if (c.angles) {
    io::json list = io::json::array();
    for (double x : interface_crossings(r.set)) {
      const CrossingAngles a = crossing_angles(r.set, x, c.window_cells * h);
      list.push_back({{"crossing_x", a.crossing_x}, {"theta_up", a.theta_up}, {"theta_down", a.theta_down}});
    }
    const auto [t1, t2] = predicted_angles(spec.medium.alpha(), spec.medium.beta());
    out["angles"] = {{"predicted", {t1, t2}}, {"measured", std::move(list)}};
  }
  if (c.weiss) {
    Point base;
    if (c.base) {
      base = *c.base;
    } else {
      const auto fb = interface_free_boundary_points(r.height);
      if (fb.empty()) throw MeasurementError("weiss: no free-boundary point on the interface");
      base = {fb.back(), 0.0};
    }
    const auto radii = c.radii.empty() ? radius_ladder(0.05, 0.4, 8) : c.radii;
    const WeissProfile p = weiss_profile(weiss_normalized(r.height), spec.medium, base, radii);
    io::json samples = io::json::array();
    for (const auto& [rr, phi] : p.samples) samples.push_back({rr, phi});
    out["weiss"] = {{"base", {base.x, base.y}},
                    {"normalization", p.normalization},
                    {"samples", std::move(samples)},
                    {"monotone_violations", p.monotonicity_violations(1e-3 * p.max_abs())}};
  }
  if (c.mvp) {
    const Point z = c.z.value_or(spec.x0);
    auto u = [&](Point p) { return mvp_test_value(c.test_fn, spec.medium, z, p); };
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    const std::size_t nc = spec.grid.cells_per_side();
    for (std::size_t j = 0; j < nc; ++j)
      for (std::size_t i = 0; i < nc; ++i)
        if (r.set.cell(i, j)) {
          const double x = u(spec.grid.cell_center(i, j));
          lo = std::min(lo, x);
          hi = std::max(hi, x);
        }
    const double avg = r.set.average(u);
    const double at = u(spec.x0);
    out["mvp"] = {{"test_fn", c.test_fn},
                  {"average", avg},
                  {"value_at_x0", at},
                  {"oscillation", hi - lo},
                  {"relative_error", hi > lo ? std::abs(avg - at) / (hi - lo) : std::abs(avg - at)}};
  }
  return out;
}

// ---------------------------------------------------------------------------
// Entry point

inline int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  JobConfig c;
  CLI::App app{"Mean value sets of two-phase divergence-form operators"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.fallthrough();
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all commands");

  std::string x0_s, base_s, radii_s, pairs_s, s_list_s, k_range_s, z_s;
  double radius = 0.0;
  app.add_option("--alpha", c.alpha, "Coefficient above the interface");
  app.add_option("--beta", c.beta, "Coefficient below the interface");
  app.add_option("--s", c.moll_radius, "Mollification half-width (0: sharp)");
  app.add_option("--x0", x0_s, "Pole x,y");
  auto* r_opt = app.add_option("--R", radius, "Radius parameter");
  app.add_option("--M", c.half_width, "Domain half-width");
  app.add_option("--h", c.spacing, "Grid spacing");
  app.add_option("--out", c.out, "Output path prefix");
  app.add_option("--omega", c.omega, "SOR relaxation factor in (0,2)");
  app.add_option("--tol", c.tol, "LCP tolerance");
  app.add_option("--max-iter", c.max_iter, "Sweep cap (0: 200 per node along a side)");
  app.add_option("--window", c.window_cells, "Angle fit window in cells");

  auto* solve = app.add_subcommand("solve", "Solve one obstacle problem and write artifacts");
  auto* sweep = app.add_subcommand("sweep", "Solve along a coefficient schedule, write a CSV");
  sweep->add_option("--a", c.rule_a, "Rule alpha_k = 1 + a/k, beta_k = 1 - a/k");
  sweep->add_option("--k-range", k_range_s, "kmin:kmax");
  sweep->add_option("--pairs", pairs_s, "Explicit schedule alpha:beta,...");
  sweep->add_option("--s-list", s_list_s, "Mollification widths s1,s2,...");
  sweep->add_option("--threads", c.threads, "Concurrent rows (0: all cores)");
  auto* catalog = app.add_subcommand("catalog", "Write the nine blowup profiles");
  catalog->add_option("--samples", c.samples, "Samples of g per profile");
  auto* an = app.add_subcommand("analyze", "Measure a stored solution");
  an->add_option("--in", c.input, "Path to <prefix>.solution.json");
  an->add_flag("--angles", c.angles, "Crossing angles at the interface");
  an->add_flag("--weiss", c.weiss, "Weiss energy profile");
  an->add_option("--base", base_s, "Weiss base point x,y");
  an->add_option("--radii", radii_s, "Weiss radii a:b:n");
  an->add_flag("--symdiff", c.symdiff, "Symmetric difference with B_R(x0)");
  an->add_flag("--deficiency", c.deficiency, "Convexity deficiency");
  an->add_flag("--mvp", c.mvp, "Mean value property check");
  an->add_option("--test-fn", c.test_fn, "const, linear, transmission or quadratic");
  an->add_option("--z", z_s, "Centre of the quadratic test function");

  try {
    std::vector<std::string> args = detail::expand_job(raw_args);
    std::reverse(args.begin(), args.end());  // CLI11 consumes a reversed vector
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return config_error;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return config_error;
  }

  try {
    if (r_opt->count() > 0) c.radius = radius;
    if (!x0_s.empty()) c.x0 = detail::parse_point(x0_s);
    if (!base_s.empty()) c.base = detail::parse_point(base_s);
    if (!z_s.empty()) c.z = detail::parse_point(z_s);
    if (!radii_s.empty()) c.radii = detail::parse_ladder(radii_s);
    if (!pairs_s.empty()) c.pairs = detail::parse_pairs(pairs_s);
    if (!s_list_s.empty()) c.s_list = detail::parse_list(s_list_s);
    if (!k_range_s.empty()) {
      const auto kk = detail::split(k_range_s, ':');
      if (kk.size() != 2) throw ConfigError("--k-range expects kmin:kmax");
      c.k_min = static_cast<int>(detail::to_double(kk[0]));
      c.k_max = static_cast<int>(detail::to_double(kk[1]));
    }

    if (solve->parsed()) {
      c.command = "solve";
      if (!c.radius) {
        err << "error: --R is required\n" << app.help();
        return config_error;
      }
      const ProblemSpec spec = c.problem(c.alpha, c.beta, c.moll_radius);
      const MvsResult r = solve_mvs(spec, c.solve_options());
      io::save_solution(c.out, r);
      std::string def = "n/a";
      if (!r.set.empty() && r.set.component_count() == 1) def = io::number(convexity_deficiency(r.set));
      out << "area=" << io::number(r.set.area()) << " components=" << r.set.component_count()
          << " deficiency=" << def << " iterations=" << r.height.diagnostics().iterations << "\n";
      return ok;
    }
    if (sweep->parsed()) {
      c.command = "sweep";
      if (!c.radius) throw ConfigError("--R is required");
      const auto rows = run_sweep(c);
      io::write_text(c.out + ".sweep.csv", sweep_csv(rows));
      const auto good = std::count_if(rows.begin(), rows.end(), [](auto& r) { return r.solved; });
      out << "rows=" << rows.size() << " solved=" << good << " csv=" << c.out << ".sweep.csv\n";
      return good > 0 ? ok : numerical_failure;
    }
    if (catalog->parsed()) {
      c.command = "catalog";
      const io::json meta = catalog_json(c.alpha, c.beta);
      io::write_text(c.out + ".catalog.json", meta.dump(2) + "\n");
      io::write_text(c.out + ".catalog.csv", catalog_csv(c.alpha, c.beta, c.samples));
      const auto [t1, t2] = predicted_angles(c.alpha, c.beta);
      out << "theta1=" << io::number(t1) << " theta2=" << io::number(t2) << " cases=9\n";
      return ok;
    }
    c.command = "analyze";
    out << analyze(c).dump(2) << "\n";
    return ok;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return config_error;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return numerical_failure;
  }
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int k = 1; k < argc; ++k) args.emplace_back(argv[k]);
  return run(args, out, err);
}

}  // namespace mvs::cli
