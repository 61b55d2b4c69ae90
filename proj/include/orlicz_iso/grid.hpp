#pragma once

// Piecewise-constant data model on a partition of [a, b].
//
// Every function the solver touches (the data f, candidate approximants g,
// residual scores) is a step function on a CellGrid, so every integral
// against Lebesgue measure reduces to a finite weighted sum.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "orlicz_iso/error.hpp"

namespace oiso {

/// Partition a = x_0 < x_1 < ... < x_n = b with cell weights w_i = x_i - x_{i-1}.
class CellGrid {
 public:
  explicit CellGrid(std::vector<double> breakpoints) : breakpoints_(std::move(breakpoints)) {
    if (breakpoints_.size() < 2) {
      throw DomainError("CellGrid needs at least one cell (two breakpoints)");
    }
    weights_.reserve(breakpoints_.size() - 1);
    for (std::size_t i = 1; i < breakpoints_.size(); ++i) {
      if (!std::isfinite(breakpoints_[i - 1]) || !std::isfinite(breakpoints_[i])) {
        throw DomainError("CellGrid breakpoints must be finite");
      }
      if (!(breakpoints_[i] > breakpoints_[i - 1])) {
        throw DomainError("CellGrid breakpoints must be strictly increasing (index " +
                          std::to_string(i) + ")");
      }
      weights_.push_back(breakpoints_[i] - breakpoints_[i - 1]);
    }
  }

  std::size_t cells() const noexcept { return weights_.size(); }
  double a() const noexcept { return breakpoints_.front(); }
  double b() const noexcept { return breakpoints_.back(); }
  double length() const noexcept { return b() - a(); }

  std::span<const double> breakpoints() const noexcept { return breakpoints_; }
  std::span<const double> weights() const noexcept { return weights_; }
  double weight(std::size_t i) const { return weights_.at(i); }

  double midpoint(std::size_t i) const {
    return 0.5 * (breakpoints_.at(i) + breakpoints_.at(i + 1));
  }

  /// Index of the cell [x_i, x_{i+1}) containing x; the last cell is closed on the right.
  std::size_t cell_of(double x) const {
    if (x < a() || x > b()) throw DomainError("point outside grid");
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
    std::size_t idx = static_cast<std::size_t>(it - breakpoints_.begin());
    if (idx == 0) return 0;
    return std::min(idx - 1, cells() - 1);
  }

  friend bool operator==(const CellGrid&, const CellGrid&) = default;

 private:
  std::vector<double> breakpoints_;
  std::vector<double> weights_;
};

/// One value per cell. The grid is passed alongside at every use.
struct StepFunction {
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }

  friend bool operator==(const StepFunction&, const StepFunction&) = default;
};

/// A step function with non-decreasing values (a member of the monotone cone).
class MonotoneStepFunction {
 public:
  MonotoneStepFunction() = default;

  explicit MonotoneStepFunction(std::vector<double> values) : values_(std::move(values)) {
    for (std::size_t i = 1; i < values_.size(); ++i) {
      if (!(values_[i - 1] <= values_[i])) {
        throw StructuralError("values are not non-decreasing at index " + std::to_string(i));
      }
    }
  }

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

  StepFunction as_step() const { return StepFunction{values_}; }

  friend bool operator==(const MonotoneStepFunction&, const MonotoneStepFunction&) = default;

 private:
  std::vector<double> values_;
};

inline void require_on_grid(const CellGrid& grid, std::size_t n_values, const char* what) {
  if (n_values != grid.cells()) {
    throw StructuralError(std::string(what) + ": " + std::to_string(n_values) +
                          " values for a grid of " + std::to_string(grid.cells()) + " cells");
  }
}

inline CellGrid make_uniform(double a, double b, std::size_t n) {
  if (!(a < b)) throw DomainError("make_uniform requires a < b");
  if (n == 0) throw DomainError("make_uniform requires n >= 1");
  std::vector<double> x(n + 1);
  const double width = b - a;
  for (std::size_t i = 0; i <= n; ++i) {
    x[i] = a + width * (static_cast<double>(i) / static_cast<double>(n));
  }
  x.back() = b;
  return CellGrid(std::move(x));
}

/// Graded mesh x_i = a + (b - a) (i / n)^grading, clustering cells near a.
inline CellGrid make_graded(double a, double b, std::size_t n, double grading) {
  if (!(a < b)) throw DomainError("make_graded requires a < b");
  if (n == 0) throw DomainError("make_graded requires n >= 1");
  if (!(grading >= 1.0)) throw DomainError("make_graded requires grading >= 1");
  std::vector<double> x(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    x[i] = a + (b - a) * std::pow(static_cast<double>(i) / static_cast<double>(n), grading);
  }
  x.front() = a;
  x.back() = b;
  return CellGrid(std::move(x));
}

/// Midpoint sampling of a pointwise-defined function.
inline StepFunction sample_midpoints(const CellGrid& grid, const std::function<double(double)>& fn) {
  StepFunction s;
  s.values.reserve(grid.cells());
  for (std::size_t i = 0; i < grid.cells(); ++i) s.values.push_back(fn(grid.midpoint(i)));
  return s;
}

inline double integrate(const CellGrid& grid, std::span<const double> values) {
  require_on_grid(grid, values.size(), "integrate");
  double total = 0.0;
  const auto w = grid.weights();
  for (std::size_t i = 0; i < values.size(); ++i) total += w[i] * values[i];
  return total;
}

inline double integrate(const CellGrid& grid, const StepFunction& s) {
  return integrate(grid, std::span<const double>(s.values));
}

/// Splits each cell into `factor` equal subcells and replicates values.
inline std::pair<CellGrid, StepFunction> refine(const CellGrid& grid, const StepFunction& s,
                                                std::size_t factor) {
  if (factor == 0) throw DomainError("refine factor must be >= 1");
  require_on_grid(grid, s.size(), "refine");
  if (factor == 1) return {grid, s};
  const auto x = grid.breakpoints();
  std::vector<double> fine;
  fine.reserve(grid.cells() * factor + 1);
  StepFunction out;
  out.values.reserve(grid.cells() * factor);
  for (std::size_t i = 0; i < grid.cells(); ++i) {
    const double w = x[i + 1] - x[i];
    for (std::size_t j = 0; j < factor; ++j) {
      fine.push_back(x[i] + w * (static_cast<double>(j) / static_cast<double>(factor)));
      out.values.push_back(s.values[i]);
    }
  }
  fine.push_back(x.back());
  return {CellGrid(std::move(fine)), std::move(out)};
}

inline StepFunction subtract(const StepFunction& lhs, std::span<const double> rhs) {
  if (lhs.size() != rhs.size()) throw StructuralError("subtract: size mismatch");
  StepFunction out{lhs.values};
  for (std::size_t i = 0; i < rhs.size(); ++i) out.values[i] -= rhs[i];
  return out;
}

inline StepFunction scaled(const StepFunction& s, double factor) {
  StepFunction out{s.values};
  for (auto& v : out.values) v *= factor;
  return out;
}

}  // namespace oiso
