#pragma once

// Built-in analytic inputs for refinement studies, demos and acceptance runs.

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "orlicz_iso/error.hpp"
#include "orlicz_iso/grid.hpp"

namespace oiso::fixtures {

struct Fixture {
  std::string name;
  CellGrid grid;
  StepFunction f;
  /// Size of the genuine discontinuity in f, 0 for continuous fixtures.
  double input_jump = 0.0;
};

/// f(x) = sin(3x) on [0, 3]: continuous, two interior turning points that force pooling.
inline Fixture sine(std::size_t n) {
  auto grid = make_uniform(0.0, 3.0, n);
  auto f = sample_midpoints(grid, [](double x) { return std::sin(3.0 * x); });
  return {"sin", std::move(grid), std::move(f), 0.0};
}

/// f(x) = [x >= 1/2] + 0.1 sin(8 pi x) on [0, 1]. The oscillation is continuous and
/// forces pooling on both halves; the unit jump at 1/2 survives every refinement.
inline Fixture step(std::size_t n) {
  auto grid = make_uniform(0.0, 1.0, n);
  auto f = sample_midpoints(grid, [](double x) {
    return (x >= 0.5 ? 1.0 : 0.0) + 0.1 * std::sin(8.0 * std::numbers::pi * x);
  });
  return {"step", std::move(grid), std::move(f), 1.0};
}

/// f(x) = x^(-1/2) on (0, 1], midpoint-sampled on a mesh graded towards 0.
inline Fixture inv_sqrt(std::size_t n, double grading = 2.0) {
  auto grid = make_graded(0.0, 1.0, n, grading);
  auto f = sample_midpoints(grid, [](double x) { return 1.0 / std::sqrt(x); });
  return {"inv-sqrt", std::move(grid), std::move(f), 0.0};
}

/// f = sqrt(2) on [0, 1]; its Power(2) Luxemburg norm is exactly 1.
inline Fixture constant_sqrt2(std::size_t n = 1) {
  auto grid = make_uniform(0.0, 1.0, n);
  StepFunction f{std::vector<double>(n, std::sqrt(2.0))};
  return {"sqrt2", std::move(grid), std::move(f), 0.0};
}

inline Fixture by_name(std::string_view name, std::size_t n) {
  if (name == "sin") return sine(n);
  if (name == "step") return step(n);
  if (name == "inv-sqrt") return inv_sqrt(n);
  if (name == "sqrt2") return constant_sqrt2(n);
  throw DomainError("unknown fixture '" + std::string(name) + "' (expected sin, step, inv-sqrt or sqrt2)");
}

}  // namespace oiso::fixtures
