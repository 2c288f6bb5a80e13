#pragma once

// One-dimensional Gauss-Legendre building blocks and deterministic reductions.

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace wrl::quad {

/// Nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Cached Gauss-Legendre rule (Newton iteration on P_n); thread safe.
const GaussRule& gauss_legendre(int order);

template <typename F>
double fixed(const F& f, double a, double b, const GaussRule& rule) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) sum += rule.weights[k] * f(mid + half * rule.nodes[k]);
  return half * sum;
}

struct Estimate {
  double value = 0.0;
  double error = 0.0;     // sum over accepted leaves of |coarse - fine|
  bool converged = true;  // false if a leaf hit the depth limit above tolerance
  int evaluations = 0;

  Estimate& operator+=(const Estimate& o) {
    value += o.value;
    error += o.error;
    converged = converged && o.converged;
    evaluations += o.evaluations;
    return *this;
  }
};

namespace detail {
template <typename F>
void adaptive_step(const F& f, double a, double b, double coarse, const GaussRule& rule, int depth,
                   double tol, Estimate& out) {
  const double m = 0.5 * (a + b);
  const double left = fixed(f, a, m, rule);
  const double right = fixed(f, m, b, rule);
  out.evaluations += 2 * static_cast<int>(rule.nodes.size());
  const double fine = left + right;
  const double diff = std::abs(fine - coarse);
  if (diff <= tol || depth <= 0) {
    if (diff > tol) out.converged = false;
    out.value += fine;
    out.error += diff;
    return;
  }
  adaptive_step(f, a, m, left, rule, depth - 1, 0.5 * tol, out);
  adaptive_step(f, m, b, right, rule, depth - 1, 0.5 * tol, out);
}
}  // namespace detail

/// Adaptive bisection: a panel is accepted when the one-level refinement
/// changes it by at most `abs_tol` (split in half per level); `max_depth`
/// caps the number of bisection levels.
template <typename F>
Estimate adaptive(const F& f, double a, double b, int order, int max_depth, double abs_tol) {
  Estimate out;
  if (a == b) return out;
  const GaussRule& rule = gauss_legendre(order);
  const double coarse = fixed(f, a, b, rule);
  out.evaluations += static_cast<int>(rule.nodes.size());
  detail::adaptive_step(f, a, b, coarse, rule, max_depth, abs_tol, out);
  return out;
}

/// Same as `adaptive` with a tolerance relative to a first coarse estimate.
template <typename F>
Estimate adaptive_relative(const F& f, double a, double b, int order, int max_depth, double rel_tol,
                           double abs_floor = 0.0) {
  Estimate out;
  if (a == b) return out;
  const GaussRule& rule = gauss_legendre(order);
  const double coarse = fixed(f, a, b, rule);
  out.evaluations += static_cast<int>(rule.nodes.size());
  const double tol = std::max(rel_tol * std::abs(coarse), abs_floor);
  detail::adaptive_step(f, a, b, coarse, rule, max_depth, tol, out);
  return out;
}

/// Pairwise (tree) summation in index order; the result depends only on the
/// input sequence, never on how it was produced.
double pairwise_sum(std::span<const double> values);

/// Worker count: WRL_THREADS when set (1..256), hardware concurrency otherwise.
unsigned worker_count();

/// Runs task(i) for i in [0, n) on up to worker_count() threads. Each index
/// is written by exactly one task, so callers reduce results in index order.
/// Nested calls from inside a worker run serially.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& task);

}  // namespace wrl::quad
