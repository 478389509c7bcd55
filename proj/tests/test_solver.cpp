#include <algorithm>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mvs/lcp.hpp"
#include "mvs/geometry.hpp"
#include "mvs/solver.hpp"

using namespace mvs;

constexpr double pi = std::numbers::pi;

namespace {

// Brute-force LCP oracle: try every active set, solve the free block by Gaussian
// elimination, keep the one that is feasible.
std::vector<double> enumerate_lcp(const DenseMatrix& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    std::vector<std::size_t> free;
    for (std::size_t k = 0; k < n; ++k)
      if (mask & (1u << k)) free.push_back(k);
    const std::size_t m = free.size();
    std::vector<double> mat(m * (m + 1));
    for (std::size_t r = 0; r < m; ++r) {
      for (std::size_t c = 0; c < m; ++c) mat[r * (m + 1) + c] = a(free[r], free[c]);
      mat[r * (m + 1) + m] = b[free[r]];
    }
    for (std::size_t c = 0; c < m; ++c)
      for (std::size_t r = c + 1; r < m; ++r) {
        const double f = mat[r * (m + 1) + c] / mat[c * (m + 1) + c];
        for (std::size_t q = c; q <= m; ++q) mat[r * (m + 1) + q] -= f * mat[c * (m + 1) + q];
      }
    std::vector<double> z(m);
    for (std::size_t r = m; r-- > 0;) {
      double s = mat[r * (m + 1) + m];
      for (std::size_t q = r + 1; q < m; ++q) s -= mat[r * (m + 1) + q] * z[q];
      z[r] = s / mat[r * (m + 1) + r];
    }
    std::vector<double> v(n, 0.0);
    bool ok = true;
    for (std::size_t r = 0; r < m; ++r) {
      v[free[r]] = z[r];
      ok = ok && z[r] >= -1e-12;
    }
    for (std::size_t k = 0; k < n && ok; ++k) {
      double w = -b[k];
      for (std::size_t c = 0; c < n; ++c) w += a(k, c) * v[c];
      if (!(mask & (1u << k))) ok = w >= -1e-12;
    }
    if (ok) return v;
  }
  ADD_FAILURE() << "no complementary solution found";
  return {};
}

// Hides the grid specialization so the generic full sweep is used.
struct PlainOperator {
  const DiscreteOperator& a;
  std::size_t size() const { return a.size(); }
  double diagonal(std::size_t k) const { return a.diagonal(k); }
  double offdiag_dot(std::size_t k, std::span<const double> v) const { return a.offdiag_dot(k, v); }
  bool is_m_matrix() const { return a.is_m_matrix(); }
};

ProblemSpec small_spec(double alpha, double beta, double radius = 0.5, Point x0 = {0, 0.3},
                       double h = 1.0 / 32) {
  return ProblemSpec(Medium(alpha, beta), x0, radius, Grid(2.0, h));
}

}  // namespace

TEST(Lcp, OneNodeExamples) {
  const auto s = solve_lcp(DenseMatrix(1, {2.0}), std::vector<double>{1.0});
  EXPECT_NEAR(s.v[0], 0.5, 1e-9);
  const auto t = solve_lcp(DenseMatrix(1, {2.0}), std::vector<double>{-1.0});
  EXPECT_EQ(t.v[0], 0.0);
  EXPECT_NEAR(2.0 * t.v[0] + 1.0, 1.0, 0.0);
}

TEST(Lcp, NonpositiveRightHandSideGivesZero) {
  const Grid g(1.0, 1.0 / 8);
  const DiscreteOperator a(g, Medium(2, 1));
  std::vector<double> b(a.size(), -1.0);
  b[5] = 0.0;
  const auto s = solve_lcp(a, b);
  for (double x : s.v) EXPECT_EQ(x, 0.0);
}

TEST(Lcp, MatchesActiveSetEnumeration) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 5;
    std::vector<double> e(n * n, 0.0);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = r + 1; c < n; ++c) e[r * n + c] = e[c * n + r] = -u(rng);
    for (std::size_t r = 0; r < n; ++r) {
      double off = 0.0;
      for (std::size_t c = 0; c < n; ++c) off -= e[r * n + c];
      e[r * n + r] = off + 0.1 + u(rng);
    }
    const DenseMatrix a(n, e);
    std::vector<double> b(n);
    for (auto& x : b) x = 2.0 * u(rng) - 1.0;
    const auto s = solve_lcp(a, b, {.omega = 1.3, .tol = 1e-13});
    const auto ref = enumerate_lcp(a, b);
    for (std::size_t k = 0; k < n; ++k) EXPECT_NEAR(s.v[k], ref[k], 1e-10);
    // ratio test, or no contact at all
    EXPECT_TRUE(s.complementarity <= 1e-13 || s.slack_norm <= 1e-13 * std::max(1.0, std::abs(*std::max_element(b.begin(), b.end(), [](double p, double q) { return std::abs(p) < std::abs(q); }))));
  }
}

TEST(Lcp, ValidatesInputs) {
  const DenseMatrix good(2, {2, -1, -1, 2});
  const std::vector<double> b{1, 1};
  EXPECT_THROW(solve_lcp(good, b, {.omega = 2.0}), ConfigError);
  EXPECT_THROW(solve_lcp(good, b, {.omega = 0.0}), ConfigError);
  EXPECT_THROW(solve_lcp(good, b, {.tol = 0.0}), ConfigError);
  EXPECT_THROW(solve_lcp(good, std::vector<double>{1.0}), ConfigError);
  EXPECT_THROW(solve_lcp(DenseMatrix(2, {2, 1, 1, 2}), b), ConfigError);
  EXPECT_THROW(DenseMatrix(2, {1, 2, 3}), ConfigError);
}

TEST(Lcp, ReportsNonConvergenceWithLastResidual) {
  const Grid g(1.0, 1.0 / 16);
  const DiscreteOperator a(g, Medium(1, 1));
  std::vector<double> b(a.size(), 1.0);
  try {
    solve_lcp(a, b, {.max_iter = 3});
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_GT(e.last_residual(), 1e-10);
    EXPECT_EQ(e.iterations(), 3);
  }
}

TEST(Lcp, WindowedSweepAgreesWithFullSweep) {
  const ProblemSpec spec = small_spec(2, 1);
  const DiscreteOperator a(spec.grid, spec.medium);
  const auto b = height_rhs(spec);
  const auto fast = solve_lcp(a, b);
  const auto full = solve_lcp(PlainOperator{a}, b);
  double vmax = 0.0;
  for (double x : full.v) vmax = std::max(vmax, x);
  for (std::size_t k = 0; k < b.size(); ++k) EXPECT_NEAR(fast.v[k], full.v[k], 1e-9 * vmax);
}

TEST(SolveMvs, ConvergedRunSatisfiesInvariants) {
  for (const auto& [al, be] : {std::pair{1.0, 1.0}, {2.0, 1.0}, {0.8, 1.2}}) {
    const ProblemSpec spec = small_spec(al, be);
    const MvsResult r = solve_mvs(spec);
    for (double x : r.height.values()) EXPECT_GE(x, 0.0);
    EXPECT_LE(r.height.diagnostics().projected_residual, 1e-10);
    EXPECT_LE(r.height.diagnostics().complementarity, 1e-10);
    EXPECT_EQ(r.set.component_count(), 1);
    const Grid& g = spec.grid;
    const auto ci = static_cast<std::size_t>(std::floor(g.fractional_index(spec.x0.x)));
    const auto cj = static_cast<std::size_t>(std::floor(g.fractional_index(spec.x0.y)));
    EXPECT_TRUE(r.set.cell(ci, cj));
    EXPECT_NEAR(r.set.area(), pi * 0.25, 2 * pi * 0.5 * g.spacing() * 2);
    EXPECT_DOUBLE_EQ(r.set.average([](Point) { return 1.0; }), 1.0);
  }
}

TEST(SolveMvs, RadiusLadderIsIncreasing) {
  const MvsResult small = solve_mvs(small_spec(2, 1, 0.4));
  const MvsResult large = solve_mvs(small_spec(2, 1, 0.5));
  EXPECT_TRUE(contains(large.set, small.set, 1));
  EXPECT_LT(small.set.area(), large.set.area());
}

TEST(SolveMvs, Deterministic) {
  const MvsResult a = solve_mvs(small_spec(1.5, 0.5));
  const MvsResult b = solve_mvs(small_spec(1.5, 0.5));
  EXPECT_EQ(a.height.values(), b.height.values());
  EXPECT_EQ(a.set.cells(), b.set.cells());
}

TEST(ProblemSpec, RequiresRoomAroundThePole) {
  EXPECT_THROW(ProblemSpec(Medium(1, 1), {0, 0.3}, 1.0, Grid(3.0, 0.25)), ConfigError);
  EXPECT_THROW(ProblemSpec(Medium(1, 1), {0, 0}, 0.0, Grid(3.0, 0.25)), ConfigError);
  EXPECT_NO_THROW(ProblemSpec(Medium(1, 1), {0, 0}, 1.0, Grid(3.0, 0.25)));
}

TEST(NoncontactSet, ZeroFieldIsEmpty) {
  const Grid g(1.0, 0.125);
  const MeanValueSet s = noncontact_set(HeightField(g, std::vector<double>(g.interior_count(), 0.0)), 0.0);
  EXPECT_TRUE(s.empty());
  EXPECT_EQ(s.area(), 0.0);
  EXPECT_EQ(s.component_count(), 0);
  EXPECT_THROW(noncontact_set(HeightField(g, std::vector<double>(g.interior_count(), 0.0)), -1.0), ConfigError);
}

TEST(NoncontactSet, NodeBlockGivesCellCount) {
  const Grid g(1.0, 0.125);
  for (std::size_t k = 1; k <= 6; ++k) {
    std::vector<double> v(g.interior_count(), 0.0);
    for (std::size_t j = 3; j < 3 + k; ++j)
      for (std::size_t i = 4; i < 4 + k; ++i) v[g.interior_index(i, j)] = 1.0;
    const MeanValueSet s = noncontact_set(HeightField(g, v), 0.0);
    EXPECT_DOUBLE_EQ(s.area(), double((k - 1) * (k - 1)) * 0.125 * 0.125);
  }
}

TEST(NoncontactSet, ParaboloidAreaWithinPerimeterBound) {
  const double radius = 0.6;
  for (double h : {1.0 / 16, 1.0 / 32, 1.0 / 64}) {
    const Grid g(1.0, h);
    const Point c{0.1, -0.05};
    const HeightField v = sample_field(g, [&](Point p) { return std::max(0.0, radius * radius - dot(p - c, p - c)); });
    const MeanValueSet s = noncontact_set(v, 0.0);
    EXPECT_LE(std::abs(s.area() - pi * radius * radius), 2 * pi * radius * h * 2);
    for (const auto& loop : s.boundary()) EXPECT_NEAR(shoelace_area(loop.vertices), s.area(), 1e-12);
  }
}

TEST(HeightField, InterpolationAndScaling) {
  const Grid g(1.0, 0.25);
  const HeightField v = sample_field(g, [](Point p) { return 1.0 + p.x + 2 * p.y; });
  EXPECT_DOUBLE_EQ(v.value_at({0.1, 0.3}), 1.0 + 0.1 + 0.6);
  EXPECT_EQ(v.value_at({1.0, 0.3}), 0.0);  // boundary carries the Dirichlet value
  EXPECT_THROW(v.value_at({1.5, 0.0}), ConfigError);
  EXPECT_DOUBLE_EQ(v.scaled(3.0).value_at({0.1, 0.3}), 3 * (1.0 + 0.1 + 0.6));
  EXPECT_THROW(HeightField(g, {1.0, 2.0}), ConfigError);
}

TEST(RescaleBlowup, IdentityAtUnitScale) {
  const Grid g(1.0, 1.0 / 16);
  const HeightField v = sample_field(g, [](Point p) { return std::sin(3 * p.x) + p.y * p.y; });
  const HeightField w = rescale_blowup(v, {0, 0}, 1.0, g);
  EXPECT_EQ(v.values(), w.values());
}

TEST(RescaleBlowup, HomogeneousProfileIsFixed) {
  const Grid g(1.0, 1.0 / 16);
  auto profile = [](Point p) { return p.y > 0 ? p.y * p.y / 4 : 0.0; };
  const HeightField v = sample_field(g, profile);
  const Grid zoom(0.5, 1.0 / 32);
  for (double rho : {0.25, 0.5, 1.0}) {
    const HeightField w = rescale_blowup(v, {0.2, 0}, rho, zoom);
    for (std::size_t j = 1; j + 1 < zoom.nodes_per_side(); ++j)
      for (std::size_t i = 1; i + 1 < zoom.nodes_per_side(); ++i)
        EXPECT_NEAR(w.at(i, j), profile(zoom.node(i, j)), g.spacing() * g.spacing() / (4 * rho * rho));
  }
  EXPECT_THROW(rescale_blowup(v, {0.8, 0}, 1.0, zoom), ConfigError);
  EXPECT_THROW(rescale_blowup(v, {0.0, 0}, 0.0, zoom), ConfigError);
}
