#pragma once

// Slow, independent oracles for testing the solver. Nothing here calls into
// isotone.hpp: the DP searches over level-restricted monotone functions and the
// scalar routines minimize objective values directly (no score root-finding).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "orlicz_iso/error.hpp"
#include "orlicz_iso/grid.hpp"
#include "orlicz_iso/orlicz.hpp"

namespace oiso::reference {

/// Strictly increasing candidate levels.
struct LevelGrid {
  std::vector<double> levels;
};

namespace detail {

template <typename BigPhi>
double block_objective(const BigPhi& big_phi, std::span<const double> values,
                       std::span<const double> weights, double c) {
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) total += weights[i] * big_phi(std::fabs(values[i] - c));
  return total;
}

inline std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace detail

/// Golden-section search for the minimum of a convex objective on [lo, hi].
template <typename Objective>
double golden_section_minimize(const Objective& obj, double lo, double hi, int iterations = 200) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = obj(c);
  double fd = obj(d);
  for (int it = 0; it < iterations && b - a > 0.0; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = obj(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = obj(d);
    }
    if (!(c > a && d < b && c <= d)) break;
  }
  // Return the best of the sampled points; convexity makes the final bracket contain a minimizer.
  double best = a;
  double best_val = obj(a);
  for (double x : {c, d, b, 0.5 * (a + b)}) {
    const double v = obj(x);
    if (v < best_val) {
      best = x;
      best_val = v;
    }
  }
  return best;
}

/// Level grid: all data values, midpoints between consecutive sorted data values,
/// optional extra candidates, then a uniform fill over [min f, max f] until at least
/// `target_count` levels exist (exactly that many unless fill points collide).
inline LevelGrid make_level_grid(std::span<const double> f, std::size_t target_count,
                                 std::span<const double> extra = {}) {
  if (f.empty()) throw StructuralError("make_level_grid: empty data");
  std::vector<double> data = detail::sorted_unique({f.begin(), f.end()});
  std::vector<double> levels = data;
  for (std::size_t i = 1; i < data.size(); ++i) levels.push_back(0.5 * (data[i - 1] + data[i]));
  for (double e : extra) {
    if (e >= data.front() && e <= data.back()) levels.push_back(e);
  }
  const std::vector<double> base = detail::sorted_unique(std::move(levels));
  levels = base;
  if (data.front() < data.back()) {
    // Uniform fill; grow the fill count until collisions with base levels are absorbed.
    for (std::size_t k = target_count > base.size() ? target_count - base.size() : 0;
         levels.size() < target_count; ++k) {
      levels = base;
      for (std::size_t j = 1; j <= k; ++j) {
        levels.push_back(data.front() + (data.back() - data.front()) * static_cast<double>(j) /
                                            static_cast<double>(k + 1));
      }
      levels = detail::sorted_unique(std::move(levels));
    }
  }
  return {std::move(levels)};
}

/// Minimizers of the block objective for every contiguous index range of f,
/// found by golden-section on objective values. Every level of an optimal
/// monotone fit minimizes the objective of the cells sharing that level, so
/// adding these to a level grid lets the DP reach the optimum.
template <typename BigPhi>
std::vector<double> contiguous_block_minimizers(const BigPhi& big_phi, const CellGrid& grid,
                                                const StepFunction& f) {
  require_on_grid(grid, f.size(), "contiguous_block_minimizers");
  const auto w = grid.weights();
  std::vector<double> out;
  for (std::size_t i = 0; i < f.size(); ++i) {
    for (std::size_t j = i + 1; j < f.size(); ++j) {
      const auto vals = std::span(f.values).subspan(i, j - i + 1);
      const auto ws = w.subspan(i, j - i + 1);
      const auto [lo, hi] = std::minmax_element(vals.begin(), vals.end());
      if (*lo == *hi) continue;
      out.push_back(golden_section_minimize(
          [&](double c) { return detail::block_objective(big_phi, vals, ws, c); }, *lo, *hi));
    }
  }
  return out;
}

inline std::vector<double> contiguous_block_minimizers(const OrliczSpec& spec, const CellGrid& grid,
                                                       const StepFunction& f) {
  return contiguous_block_minimizers([&spec](double x) { return spec.big_phi_unchecked(x); }, grid, f);
}

struct BruteForceFit {
  MonotoneStepFunction g;
  double value;
};

/// Exact DP over cells x levels:
///   D(i, j) = w_i Phi(|f_i - L_j|) + min_{j' <= j} D(i-1, j'),
/// evaluated with running prefix minima in O(n |L|).
template <typename BigPhi>
BruteForceFit brute_force_fit(const BigPhi& big_phi, const CellGrid& grid, const StepFunction& f,
                              const LevelGrid& levels) {
  require_on_grid(grid, f.size(), "brute_force_fit");
  const auto& L = levels.levels;
  if (L.empty()) throw StructuralError("brute_force_fit: empty level grid");
  const std::size_t n = f.size();
  const std::size_t m = L.size();
  const auto w = grid.weights();

  std::vector<double> prev(m, 0.0);
  std::vector<double> cur(m);
  // choice[i][j]: level index used by cell i-1 on the best path ending at (i, j)
  std::vector<std::vector<std::size_t>> choice(n, std::vector<std::size_t>(m, 0));
  for (std::size_t i = 0; i < n; ++i) {
    double run_min = std::numeric_limits<double>::infinity();
    std::size_t run_arg = 0;
    for (std::size_t j = 0; j < m; ++j) {
      if (i > 0 && prev[j] < run_min) {
        run_min = prev[j];
        run_arg = j;
      }
      const double base = i == 0 ? 0.0 : run_min;
      cur[j] = w[i] * big_phi(std::fabs(f.values[i] - L[j])) + base;
      choice[i][j] = run_arg;
    }
    std::swap(prev, cur);
  }
  std::size_t best = 0;
  for (std::size_t j = 1; j < m; ++j) {
    if (prev[j] < prev[best]) best = j;
  }
  const double value = prev[best];
  std::vector<double> g(n);
  std::size_t j = best;
  for (std::size_t i = n; i-- > 0;) {
    g[i] = L[j];
    j = choice[i][j];
  }
  return {MonotoneStepFunction(std::move(g)), value};
}

inline BruteForceFit brute_force_fit(const OrliczSpec& spec, const CellGrid& grid,
                                     const StepFunction& f, const LevelGrid& levels) {
  return brute_force_fit([&spec](double x) { return spec.big_phi_unchecked(x); }, grid, f, levels);
}

/// Phi(t) = |t|. Not an admissible Orlicz function (phi(0+) = 1); comparison use only.
inline double l1_big_phi(double x) { return std::fabs(x); }

struct ScanResult {
  double c;
  double value;
};

/// Exhaustive scan of c -> sum_i w_i Phi(|v_i - c|) over lo, lo + step, ..., <= hi.
template <typename BigPhi>
ScanResult scalar_scan_minimize(const BigPhi& big_phi, std::span<const double> values,
                                std::span<const double> weights, double lo, double hi, double step) {
  if (!(lo < hi)) throw DomainError("scalar_scan_minimize requires lo < hi");
  if (!(step > 0.0)) throw DomainError("scalar_scan_minimize requires step > 0");
  if (values.size() != weights.size()) throw StructuralError("scalar_scan_minimize: size mismatch");
  const auto count = static_cast<long long>(std::floor((hi - lo) / step + 1e-9));
  ScanResult best{lo, std::numeric_limits<double>::infinity()};
  for (long long k = 0; k <= count; ++k) {
    const double c = lo + static_cast<double>(k) * step;
    const double v = detail::block_objective(big_phi, values, weights, c);
    if (v < best.value) best = {c, v};
  }
  return best;
}

inline ScanResult scalar_scan_minimize(const OrliczSpec& spec, std::span<const double> values,
                                       std::span<const double> weights, double lo, double hi,
                                       double step) {
  return scalar_scan_minimize([&spec](double x) { return spec.big_phi_unchecked(x); }, values,
                              weights, lo, hi, step);
}

/// Classical weighted-mean pool-adjacent-violators for the squared loss.
inline std::vector<double> classical_pava(std::span<const double> values, std::span<const double> weights) {
  if (values.size() != weights.size()) throw StructuralError("classical_pava: size mismatch");
  struct Pool {
    double sum_w;
    double sum_wx;
    std::size_t count;
    double mean() const { return sum_wx / sum_w; }
  };
  std::vector<Pool> pools;
  for (std::size_t i = 0; i < values.size(); ++i) {
    pools.push_back({weights[i], weights[i] * values[i], 1});
    while (pools.size() >= 2 && pools[pools.size() - 2].mean() >= pools.back().mean()) {
      const Pool top = pools.back();
      pools.pop_back();
      pools.back().sum_w += top.sum_w;
      pools.back().sum_wx += top.sum_wx;
      pools.back().count += top.count;
    }
  }
  std::vector<double> out;
  out.reserve(values.size());
  for (const auto& p : pools) out.insert(out.end(), p.count, p.mean());
  return out;
}

}  // namespace oiso::reference
