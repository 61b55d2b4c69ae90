#pragma once

// Best non-decreasing approximation under the modular objective
//
//     minimize  sum_i w_i Phi(|f_i - g_i|)   subject to  g_1 <= g_2 <= ... <= g_n
//
// by pool-adjacent-violators. Each pooled block is a one-dimensional convex
// problem whose optimality condition is H(c) = sum_i w_i psi(c - f_i) = 0,
// with psi the (odd, non-decreasing) score; H is non-decreasing in c, so the
// zero set is an interval found by two bisections.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "orlicz_iso/error.hpp"
#include "orlicz_iso/grid.hpp"
#include "orlicz_iso/orlicz.hpp"

namespace oiso {

enum class TieBreak { Midpoint, Leftmost, Rightmost };

inline const char* to_string(TieBreak t) {
  switch (t) {
    case TieBreak::Leftmost:
      return "leftmost";
    case TieBreak::Rightmost:
      return "rightmost";
    default:
      return "midpoint";
  }
}

struct SolverOptions {
  /// Absolute bisection tolerance. When unset: 1e-15 * (1 + max |f|) over the block.
  std::optional<double> block_tol;
  TieBreak tie_break = TieBreak::Midpoint;
  int max_bisection_iters = 200;
};

struct BlockSolution {
  double c_lo;
  double c_hi;
  double c;
};

struct Block {
  std::size_t start_cell;
  std::size_t end_cell;  // inclusive
  double level;
  double c_lo;
  double c_hi;

  std::size_t size() const noexcept { return end_cell - start_cell + 1; }
};

struct MonotoneFit {
  std::vector<Block> blocks;
  MonotoneStepFunction g_star;
  double modular_value = 0.0;
  long merges = 0;
  long block_solves = 0;
};

namespace detail {

inline double block_tolerance(const SolverOptions& opts, std::span<const double> values) {
  if (opts.block_tol) {
    if (!(*opts.block_tol > 0.0)) throw DomainError("block_tol must be positive");
    return *opts.block_tol;
  }
  double scale = 0.0;
  for (double v : values) scale = std::max(scale, std::fabs(v));
  return 1e-15 * (1.0 + scale);
}

}  // namespace detail

/// Minimizer interval [c_lo, c_hi] of c -> sum_i w_i Phi(|f_i - c|), plus the
/// representative selected by the tie-break policy.
inline BlockSolution block_minimize(const OrliczSpec& spec, std::span<const double> values,
                                    std::span<const double> weights, const SolverOptions& opts = {}) {
  if (values.empty()) throw StructuralError("block_minimize: empty block");
  if (values.size() != weights.size()) {
    throw StructuralError("block_minimize: values/weights size mismatch");
  }
  double vmin = values[0];
  double vmax = values[0];
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) throw DomainError("block_minimize: non-finite value");
    if (!(weights[i] > 0.0)) throw DomainError("block_minimize: weights must be positive");
    vmin = std::min(vmin, values[i]);
    vmax = std::max(vmax, values[i]);
  }
  if (vmin == vmax) return {vmin, vmin, vmin};

  const double tol = detail::block_tolerance(opts, values);
  auto H = [&](double c) {
    double h = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) h += weights[i] * spec.score(c - values[i]);
    return h;
  };

  // Leftmost zero: inf{c : H(c) >= 0}; rightmost zero: sup{c : H(c) <= 0}.
  auto bisect = [&](auto&& go_right) {
    double lo = vmin;
    double hi = vmax;
    int it = 0;
    while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (++it > opts.max_bisection_iters) {
        throw NumericalError("block_minimize: bisection did not converge", lo, hi);
      }
      if (go_right(H(mid))) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  };

  double c_lo = H(vmin) >= 0.0 ? vmin : bisect([](double h) { return h < 0.0; });
  double c_hi = H(vmax) <= 0.0 ? vmax : bisect([](double h) { return h <= 0.0; });
  if (c_hi < c_lo) c_hi = c_lo;

  double c = 0.5 * (c_lo + c_hi);
  if (opts.tie_break == TieBreak::Leftmost) c = c_lo;
  if (opts.tie_break == TieBreak::Rightmost) c = c_hi;
  return {c_lo, c_hi, c};
}

/// Pool-adjacent-violators with a monotone-root block solver.
inline MonotoneFit fit_isotone(const OrliczSpec& spec, const CellGrid& grid, const StepFunction& f,
                               const SolverOptions& opts = {}) {
  require_on_grid(grid, f.size(), "fit_isotone");
  for (double v : f.values) {
    if (!std::isfinite(v)) throw DomainError("fit_isotone: non-finite data value");
  }
  const auto w = grid.weights();
  const double merge_tol = detail::block_tolerance(opts, f.values);

  MonotoneFit fit;
  std::vector<Block> stack;
  stack.reserve(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    stack.push_back({i, i, f.values[i], f.values[i], f.values[i]});
    while (stack.size() >= 2 && stack.back().level <= stack[stack.size() - 2].level + merge_tol) {
      const Block top = stack.back();
      stack.pop_back();
      Block& prev = stack.back();
      prev.end_cell = top.end_cell;
      const std::size_t len = prev.size();
      const auto sol = block_minimize(spec, std::span(f.values).subspan(prev.start_cell, len),
                                      w.subspan(prev.start_cell, len), opts);
      prev.level = sol.c;
      prev.c_lo = sol.c_lo;
      prev.c_hi = sol.c_hi;
      ++fit.merges;
      ++fit.block_solves;
    }
  }

  std::vector<double> g(f.size());
  for (const auto& b : stack) {
    std::fill(g.begin() + static_cast<std::ptrdiff_t>(b.start_cell),
              g.begin() + static_cast<std::ptrdiff_t>(b.end_cell) + 1, b.level);
  }
  fit.blocks = std::move(stack);
  fit.g_star = MonotoneStepFunction(std::move(g));
  fit.modular_value = modular(spec, grid, subtract(f, fit.g_star.values()));
  return fit;
}

}  // namespace oiso
