#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mvs/error.hpp"
#include "mvs/operator.hpp"

namespace mvs {

/// Minimal matrix surface needed by projected SOR.
template <class Op>
concept LcpOperator = requires(const Op& a, std::size_t k, std::span<const double> v) {
  { a.size() } -> std::convertible_to<std::size_t>;
  { a.diagonal(k) } -> std::convertible_to<double>;
  { a.offdiag_dot(k, v) } -> std::convertible_to<double>;
  { a.is_m_matrix() } -> std::convertible_to<bool>;
};

/// Small dense matrix, row-major. Used for hand-built systems.
class DenseMatrix {
 public:
  DenseMatrix(std::size_t n, std::vector<double> entries) : n_(n), a_(std::move(entries)) {
    if (a_.size() != n * n) throw ConfigError("dense matrix: entry count must be n*n");
  }

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return a_[r * n_ + c]; }
  double diagonal(std::size_t k) const noexcept { return (*this)(k, k); }

  double offdiag_dot(std::size_t k, std::span<const double> v) const noexcept {
    double s = 0.0;
    for (std::size_t c = 0; c < n_; ++c)
      if (c != k) s += (*this)(k, c) * v[c];
    return s;
  }

  bool is_m_matrix() const noexcept {
    bool strict = false;
    for (std::size_t r = 0; r < n_; ++r) {
      if (!(diagonal(r) > 0.0)) return false;
      double off = 0.0;
      for (std::size_t c = 0; c < n_; ++c) {
        if (c == r) continue;
        if ((*this)(r, c) > 0.0) return false;
        off -= (*this)(r, c);
      }
      if (off > diagonal(r)) return false;
      if (off < diagonal(r)) strict = true;
    }
    return strict;
  }

 private:
  std::size_t n_;
  std::vector<double> a_;
};

struct LcpOptions {
  double omega = 1.8;
  double tol = 1e-10;
  long max_iter = 0;  // 0: 200 sweeps per node along one side of the problem
};

struct LcpSolution {
  std::vector<double> v;
  long iterations = 0;
  /// ||min(v, Av - b)||_inf / max(1, ||b||_inf).
  double projected_residual = 0.0;
  /// v.(Av - b) / (||v|| ||Av - b||), 0 when either factor vanishes.
  double complementarity = 0.0;
  /// Most negative component of Av - b (0 when Av >= b holds exactly).
  double min_slack = 0.0;
  /// ||Av - b||_2.
  double slack_norm = 0.0;
};

namespace detail {

template <LcpOperator Op>
double psor_update(const Op& a, std::span<double> v, std::span<const double> b, std::size_t k,
                   double omega) {
  const double r = b[k] - a.diagonal(k) * v[k] - a.offdiag_dot(k, v);
  const double projected = std::abs(std::min(v[k], -r));
  v[k] = std::max(0.0, v[k] + omega * r / a.diagonal(k));
  return projected;
}

}  // namespace detail

/// Default sweep: lexicographic Gauss-Seidel over every unknown.
template <class Op>
class SweepPolicy {
 public:
  SweepPolicy(const Op&, std::span<const double>) {}

  double sweep(const Op& a, std::span<double> v, std::span<const double> b, double omega) {
    double worst = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
      worst = std::max(worst, detail::psor_update(a, v, b, k, omega));
    return worst;
  }

  long default_max_iter(const Op& a) const {
    return 200 * static_cast<long>(std::ceil(std::sqrt(static_cast<double>(a.size()))) + 1);
  }
};

/// Grid sweep restricted to a window around the current support.
///
/// With v = 0 outside the window and b <= 0 there, every node outside the
/// window already satisfies the complementarity conditions and a full sweep
/// would leave it at zero. The window is the bounding box of {v > 0} and
/// {b > 0}, grown by one node per sweep, so the sweep is a projected SOR
/// sweep over all nodes that can change.
template <>
class SweepPolicy<DiscreteOperator> {
 public:
  SweepPolicy(const DiscreteOperator& a, std::span<const double> b) : n_(a.side()) {
    for (std::size_t k = 0; k < b.size(); ++k)
      if (b[k] > 0.0) extend(seed_, k);
    box_ = seed_;
  }

  double sweep(const DiscreteOperator& a, std::span<double> v, std::span<const double> b,
               double omega) {
    if (box_.empty()) return 0.0;
    if (relax_.empty() || omega != omega_) {
      omega_ = omega;
      relax_.resize(a.size());
      for (std::size_t k = 0; k < a.size(); ++k) relax_[k] = omega / a.diagonal(k);
    }
    const Box win = box_.grown(1, n_);
    Box support = seed_;
    double worst = 0.0;
    for (std::size_t j = win.j0; j <= win.j1; ++j) {
      for (std::size_t i = win.i0; i <= win.i1; ++i) {
        const std::size_t k = j * n_ + i;
        double pull = 0.0;
        if (i + 1 < n_) pull += a.east(k) * v[k + 1];
        if (i > 0) pull += a.west(k) * v[k - 1];
        if (j + 1 < n_) pull += a.north(k) * v[k + n_];
        if (j > 0) pull += a.south(k) * v[k - n_];
        const double r = b[k] + pull - a.diagonal(k) * v[k];
        worst = std::max(worst, std::abs(std::min(v[k], -r)));
        v[k] = std::max(0.0, v[k] + relax_[k] * r);
        if (v[k] > 0.0) extend(support, k);
      }
    }
    box_ = support;
    return worst;
  }

  long default_max_iter(const DiscreteOperator& a) const {
    return 200 * static_cast<long>(a.grid().nodes_per_side());
  }

 private:
  struct Box {
    std::size_t i0 = 1, i1 = 0, j0 = 1, j1 = 0;
    bool empty() const noexcept { return i0 > i1 || j0 > j1; }
    Box grown(std::size_t d, std::size_t n) const noexcept {
      return {i0 >= d ? i0 - d : 0, std::min(i1 + d, n - 1), j0 >= d ? j0 - d : 0,
              std::min(j1 + d, n - 1)};
    }
  };

  void extend(Box& box, std::size_t k) const noexcept {
    const std::size_t i = k % n_;
    const std::size_t j = k / n_;
    if (box.empty()) {
      box = {i, i, j, j};
      return;
    }
    box.i0 = std::min(box.i0, i);
    box.i1 = std::max(box.i1, i);
    box.j0 = std::min(box.j0, j);
    box.j1 = std::max(box.j1, j);
  }

  std::size_t n_;
  Box seed_;
  Box box_;
  double omega_ = 0.0;
  std::vector<double> relax_;
};

/// Full residual diagnostics of a candidate LCP solution.
template <LcpOperator Op>
void measure_lcp(const Op& a, std::span<const double> b, LcpSolution& s) {
  double bmax = 0.0;
  for (double x : b) bmax = std::max(bmax, std::abs(x));
  double worst = 0.0, dotp = 0.0, nv = 0.0, nw = 0.0, min_slack = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double w = a.diagonal(k) * s.v[k] + a.offdiag_dot(k, s.v) - b[k];
    worst = std::max(worst, std::abs(std::min(s.v[k], w)));
    dotp += s.v[k] * w;
    nv += s.v[k] * s.v[k];
    nw += w * w;
    min_slack = std::min(min_slack, w);
  }
  s.projected_residual = worst / std::max(1.0, bmax);
  const double denom = std::sqrt(nv) * std::sqrt(nw);
  s.complementarity = denom > 0.0 ? std::abs(dotp) / denom : 0.0;
  s.min_slack = min_slack;
  s.slack_norm = std::sqrt(nw);
}

/// Projected SOR for the LCP  v >= 0,  Av - b >= 0,  v.(Av - b) = 0  with A an M-matrix.
///
/// Sweeps v_k <- max(0, v_k + omega (b - Av)_k / A_kk) until the projected
/// residual ||min(v, Av - b)||_inf drops below tol * max(1, ||b||_inf) and
/// v.(Av - b) <= tol ||v|| ||Av - b||. The second test is void when Av - b itself is
/// below tol * max(1, ||b||_inf) (no contact: the ratio is round-off over round-off).
template <LcpOperator Op>
LcpSolution solve_lcp(const Op& a, std::span<const double> b, const LcpOptions& options = {}) {
  if (b.size() != a.size()) throw ConfigError("solve_lcp: right-hand side size mismatch");
  if (!(options.omega > 0.0 && options.omega < 2.0))
    throw ConfigError("solve_lcp: relaxation factor must lie in (0, 2)");
  if (!(options.tol > 0.0)) throw ConfigError("solve_lcp: tolerance must be positive");
  if (!a.is_m_matrix()) throw ConfigError("solve_lcp: operator is not an M-matrix");

  double bmax = 0.0;
  for (double x : b) bmax = std::max(bmax, std::abs(x));
  const double target = options.tol * std::max(1.0, bmax);

  SweepPolicy<Op> policy(a, b);
  const long max_iter = options.max_iter > 0 ? options.max_iter : policy.default_max_iter(a);

  LcpSolution s;
  s.v.assign(a.size(), 0.0);
  double last = 0.0;
  for (long it = 1; it <= max_iter; ++it) {
    last = policy.sweep(a, s.v, b, options.omega);
    s.iterations = it;
    if (last <= target) {
      measure_lcp(a, b, s);
      if (s.projected_residual <= options.tol &&
          (s.complementarity <= options.tol || s.slack_norm <= target))
        return s;
    }
  }
  measure_lcp(a, b, s);
  throw ConvergenceError("solve_lcp: no convergence after " + std::to_string(max_iter) +
                             " sweeps (projected residual " +
                             std::to_string(s.projected_residual) + ")",
                         s.projected_residual, s.iterations);
}

}  // namespace mvs
