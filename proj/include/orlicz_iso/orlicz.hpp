#pragma once

// Convex functions Phi(x) = int_0^x phi(t) dt and the functionals built on them:
// the modular  sum_i w_i Phi(|r_i|)  and the Luxemburg norm.

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "orlicz_iso/error.hpp"
#include "orlicz_iso/grid.hpp"

namespace oiso {

enum class OrliczKind { NFunction, NInfinityFunction };

inline const char* to_string(OrliczKind k) {
  return k == OrliczKind::NFunction ? "N" : "N_infinity";
}

namespace family {
struct Power {
  double p;
};
struct LogShifted {};
struct ArctanPrimitive {};
struct ExpSaturating {};
struct Exponential {};
/// phi interpolated linearly between knots (t, phi(t)); beyond the last knot the
/// final segment's slope is continued, so a flat last segment means bounded phi.
struct PiecewiseLinearPhi {
  std::vector<std::pair<double, double>> knots;
};
}  // namespace family

using Family = std::variant<family::Power, family::LogShifted, family::ArctanPrimitive,
                            family::ExpSaturating, family::Exponential,
                            family::PiecewiseLinearPhi>;

namespace detail {

// Alternating/positive power series for Phi near 0, where the closed forms
// cancel catastrophically (x - log1p(x) for x ~ 1e-8 loses all digits).
template <typename Term>
double sum_series(Term term, int first, int last) {
  double sum = 0.0;
  for (int k = last; k >= first; --k) sum += term(k);
  return sum;
}

inline double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace detail

/// An admissible convex function given through its derivative phi.
class OrliczSpec {
 public:
  static OrliczSpec power(double p) {
    if (!std::isfinite(p)) throw DomainError("power family requires a finite exponent");
    if (p == 1.0) {
      throw DomainError(
          "power family requires p > 1: p = 1 is Phi(t) = |t| with phi(t) = 1 for t > 0, "
          "which violates phi(0+) = 0, so L1 lies outside the admissible class");
    }
    if (!(p > 1.0)) throw DomainError("power family requires p > 1");
    return OrliczSpec(family::Power{p});
  }
  static OrliczSpec log_shifted() { return OrliczSpec(family::LogShifted{}); }
  static OrliczSpec arctan() { return OrliczSpec(family::ArctanPrimitive{}); }
  static OrliczSpec exp_saturating() { return OrliczSpec(family::ExpSaturating{}); }
  static OrliczSpec exponential() { return OrliczSpec(family::Exponential{}); }

  static OrliczSpec piecewise_phi(std::vector<std::pair<double, double>> knots) {
    if (knots.size() < 2) throw DomainError("piecewise phi needs at least two knots");
    if (knots.front().first != 0.0 || knots.front().second != 0.0) {
      throw DomainError("piecewise phi must start at knot (0, 0)");
    }
    for (std::size_t i = 1; i < knots.size(); ++i) {
      const auto [t0, v0] = knots[i - 1];
      const auto [t1, v1] = knots[i];
      if (!std::isfinite(t1) || !std::isfinite(v1)) {
        throw DomainError("piecewise phi knots must be finite");
      }
      if (!(t1 > t0)) throw DomainError("piecewise phi knot abscissae must increase strictly");
      if (!(v1 >= v0)) throw DomainError("piecewise phi ordinates must be non-decreasing");
    }
    if (!(knots[1].second > 0.0)) {
      throw DomainError("piecewise phi must be positive for t > 0 (second ordinate is 0)");
    }
    return OrliczSpec(family::PiecewiseLinearPhi{std::move(knots)});
  }

  const Family& family() const noexcept { return family_; }

  OrliczKind kind() const {
    return std::visit(
        [](const auto& fam) -> OrliczKind {
          using F = std::decay_t<decltype(fam)>;
          if constexpr (std::is_same_v<F, family::Power> ||
                        std::is_same_v<F, family::Exponential>) {
            return OrliczKind::NFunction;
          } else if constexpr (std::is_same_v<F, family::PiecewiseLinearPhi>) {
            const auto& k = fam.knots;
            const double last_slope = k[k.size() - 1].second - k[k.size() - 2].second;
            return last_slope == 0.0 ? OrliczKind::NInfinityFunction : OrliczKind::NFunction;
          } else {
            return OrliczKind::NInfinityFunction;
          }
        },
        family_);
  }

  /// Closed-form K_2 with Phi(2x) <= K_2 Phi(x), when known.
  std::optional<double> delta2_constant() const {
    if (const auto* pw = std::get_if<family::Power>(&family_)) return std::pow(2.0, pw->p);
    if (std::holds_alternative<family::LogShifted>(family_)) return 4.0;
    return std::nullopt;
  }

  /// Supremum of phi where finite (N-infinity families), else +inf.
  double phi_bound() const {
    return std::visit(
        [this](const auto& fam) -> double {
          using F = std::decay_t<decltype(fam)>;
          if constexpr (std::is_same_v<F, family::LogShifted> ||
                        std::is_same_v<F, family::ExpSaturating>) {
            return 1.0;
          } else if constexpr (std::is_same_v<F, family::ArctanPrimitive>) {
            return std::numbers::pi / 2.0;
          } else if constexpr (std::is_same_v<F, family::PiecewiseLinearPhi>) {
            return kind() == OrliczKind::NInfinityFunction ? fam.knots.back().second
                                                           : std::numeric_limits<double>::infinity();
          } else {
            return std::numeric_limits<double>::infinity();
          }
        },
        family_);
  }

  std::string name() const {
    return std::visit(
        [](const auto& fam) -> std::string {
          using F = std::decay_t<decltype(fam)>;
          if constexpr (std::is_same_v<F, family::Power>) {
            return "power(p=" + std::to_string(fam.p) + ")";
          } else if constexpr (std::is_same_v<F, family::LogShifted>) {
            return "log_shifted";
          } else if constexpr (std::is_same_v<F, family::ArctanPrimitive>) {
            return "arctan";
          } else if constexpr (std::is_same_v<F, family::ExpSaturating>) {
            return "exp_saturating";
          } else if constexpr (std::is_same_v<F, family::Exponential>) {
            return "exponential";
          } else {
            return "piecewise_phi(" + std::to_string(fam.knots.size()) + " knots)";
          }
        },
        family_);
  }

  double phi(double t) const {
    if (!(t >= 0.0)) throw DomainError("phi requires t >= 0");
    return phi_unchecked(t);
  }

  double big_phi(double x) const {
    if (!(x >= 0.0)) throw DomainError("Phi requires x >= 0");
    return big_phi_unchecked(x);
  }

  /// psi(u) = sgn(u) phi(|u|), with psi(0) = 0.
  double score(double u) const {
    if (u > 0.0) return phi_unchecked(u);
    if (u < 0.0) return -phi_unchecked(-u);
    return 0.0;
  }

  double phi_unchecked(double t) const {
    return std::visit(
        [this, t](const auto& fam) -> double {
          using F = std::decay_t<decltype(fam)>;
          if constexpr (std::is_same_v<F, family::Power>) {
            if (t == 0.0) return 0.0;
            return fam.p == 2.0 ? t : std::pow(t, fam.p - 1.0);
          } else if constexpr (std::is_same_v<F, family::LogShifted>) {
            return t / (1.0 + t);
          } else if constexpr (std::is_same_v<F, family::ArctanPrimitive>) {
            return std::atan(t);
          } else if constexpr (std::is_same_v<F, family::ExpSaturating>) {
            return -std::expm1(-t);
          } else if constexpr (std::is_same_v<F, family::Exponential>) {
            return std::expm1(t);
          } else {
            return piecewise_phi(fam.knots, t);
          }
        },
        family_);
  }

  double big_phi_unchecked(double x) const {
    return std::visit(
        [this, x](const auto& fam) -> double {
          using F = std::decay_t<decltype(fam)>;
          if constexpr (std::is_same_v<F, family::Power>) {
            if (x == 0.0) return 0.0;
            return (fam.p == 2.0 ? x * x : std::pow(x, fam.p)) / fam.p;
          } else if constexpr (std::is_same_v<F, family::LogShifted>) {
            // x - ln(1 + x) = sum_{k>=2} (-1)^k x^k / k
            if (x < 0.125) {
              return detail::sum_series(
                  [x](int k) { return ((k % 2 == 0) ? 1.0 : -1.0) * std::pow(x, k) / k; }, 2,
                  24);
            }
            return x - std::log1p(x);
          } else if constexpr (std::is_same_v<F, family::ArctanPrimitive>) {
            // x atan x - ln(1 + x^2)/2 = sum_{k>=0} (-1)^k x^{2k+2} / ((2k+1)(2k+2))
            if (x < 0.125) {
              return detail::sum_series(
                  [x](int k) {
                    return ((k % 2 == 0) ? 1.0 : -1.0) * std::pow(x, 2 * k + 2) /
                           ((2.0 * k + 1.0) * (2.0 * k + 2.0));
                  },
                  0, 12);
            }
            return x * std::atan(x) - 0.5 * std::log1p(x * x);
          } else if constexpr (std::is_same_v<F, family::ExpSaturating>) {
            // x + e^{-x} - 1 = sum_{k>=2} (-x)^k / k!
            if (x < 0.125) {
              return detail::sum_series(
                  [x](int k) { return std::pow(-x, k) / detail::factorial(k); }, 2, 18);
            }
            return x + std::expm1(-x);
          } else if constexpr (std::is_same_v<F, family::Exponential>) {
            if (x < 0.125) {
              return detail::sum_series(
                  [x](int k) { return std::pow(x, k) / detail::factorial(k); }, 2, 18);
            }
            return std::expm1(x) - x;
          } else {
            return piecewise_big_phi(fam.knots, x);
          }
        },
        family_);
  }

 private:
  explicit OrliczSpec(Family fam) : family_(std::move(fam)) {
    if (const auto* pw = std::get_if<family::PiecewiseLinearPhi>(&family_)) {
      const auto& k = pw->knots;
      cumulative_.assign(k.size(), 0.0);
      for (std::size_t i = 1; i < k.size(); ++i) {
        cumulative_[i] =
            cumulative_[i - 1] + 0.5 * (k[i].first - k[i - 1].first) * (k[i].second + k[i - 1].second);
      }
    }
  }

  // Index of the segment [t_i, t_{i+1}] used for t (last segment extends to infinity).
  static std::size_t segment_of(const std::vector<std::pair<double, double>>& k, double t) {
    std::size_t lo = 0;
    std::size_t hi = k.size() - 1;
    if (t >= k[hi - 1].first) return hi - 1;
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      if (k[mid].first <= t) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return lo;
  }

  static double piecewise_phi(const std::vector<std::pair<double, double>>& k, double t) {
    const std::size_t i = segment_of(k, t);
    const double slope = (k[i + 1].second - k[i].second) / (k[i + 1].first - k[i].first);
    return k[i].second + slope * (t - k[i].first);
  }

  double piecewise_big_phi(const std::vector<std::pair<double, double>>& k, double x) const {
    const std::size_t i = segment_of(k, x);
    const double slope = (k[i + 1].second - k[i].second) / (k[i + 1].first - k[i].first);
    const double d = x - k[i].first;
    return cumulative_[i] + k[i].second * d + 0.5 * slope * d * d;
  }

  Family family_;
  std::vector<double> cumulative_;  // Phi at each knot (piecewise family only)
};

struct Delta2Estimate {
  double sup_ratio = 0.0;
  std::optional<double> violating_x;
  bool satisfied = false;
};

/// Bound used by delta2_estimate when neither a caller threshold nor a closed-form K_2 exists.
inline constexpr double kDefaultDelta2Threshold = 1e6;

/// Empirical Delta_2 check: Phi(2x)/Phi(x) on a log-spaced grid over [x_min, x_max].
/// The bound compared against is, in order: `threshold`, the closed-form K_2, kDefaultDelta2Threshold.
inline Delta2Estimate delta2_estimate(const OrliczSpec& spec, double x_min, double x_max,
                                      std::size_t n_points,
                                      std::optional<double> threshold = std::nullopt) {
  if (!(x_min > 0.0) || !(x_max > x_min)) {
    throw DomainError("delta2_estimate requires 0 < x_min < x_max");
  }
  if (n_points < 2) throw DomainError("delta2_estimate requires n_points >= 2");
  const double bound = threshold.value_or(spec.delta2_constant().value_or(kDefaultDelta2Threshold));
  // K_2 is compared with a few ulps of slack; the closed forms are not exact in floating point.
  const double limit = bound * (1.0 + 1e-12);
  Delta2Estimate out;
  const double log_lo = std::log(x_min);
  const double step = (std::log(x_max) - log_lo) / static_cast<double>(n_points - 1);
  for (std::size_t i = 0; i < n_points; ++i) {
    const double x = (i + 1 == n_points) ? x_max : std::exp(log_lo + step * static_cast<double>(i));
    const double ratio = spec.big_phi(2.0 * x) / spec.big_phi(x);
    if (std::isnan(ratio)) continue;
    if (ratio > out.sup_ratio) out.sup_ratio = ratio;
    if (!out.violating_x && ratio > limit) out.violating_x = x;
  }
  out.satisfied = !out.violating_x.has_value();
  return out;
}

/// sum_i w_i Phi(|r_i|): exact integral of Phi(|r|) for a step residual.
inline double modular(const OrliczSpec& spec, const CellGrid& grid, std::span<const double> residuals) {
  require_on_grid(grid, residuals.size(), "modular");
  const auto w = grid.weights();
  double total = 0.0;
  for (std::size_t i = 0; i < residuals.size(); ++i) {
    total += w[i] * spec.big_phi_unchecked(std::fabs(residuals[i]));
  }
  return total;
}

inline double modular(const OrliczSpec& spec, const CellGrid& grid, const StepFunction& residuals) {
  return modular(spec, grid, std::span<const double>(residuals.values));
}

/// inf{lambda > 0 : sum_i w_i Phi(|f_i| / lambda) <= 1}.
/// Brackets by doubling/halving from 1, then bisects until the bracket's relative width is <= tol.
inline double luxemburg_norm(const OrliczSpec& spec, const CellGrid& grid,
                             std::span<const double> values, double tol) {
  if (!(tol > 0.0)) throw DomainError("luxemburg_norm requires tol > 0");
  require_on_grid(grid, values.size(), "luxemburg_norm");
  bool all_zero = true;
  for (double v : values) {
    if (!std::isfinite(v)) throw DomainError("luxemburg_norm requires finite values");
    all_zero = all_zero && v == 0.0;
  }
  if (all_zero) return 0.0;

  const auto w = grid.weights();
  auto mod_at = [&](double lambda) {
    double total = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      total += w[i] * spec.big_phi_unchecked(std::fabs(values[i]) / lambda);
    }
    return total;
  };

  constexpr int kMaxBracketSteps = 2000;
  double lo = 1.0;
  double hi = 1.0;
  int steps = 0;
  if (mod_at(1.0) > 1.0) {
    while (mod_at(hi) > 1.0) {
      lo = hi;
      hi *= 2.0;
      if (++steps > kMaxBracketSteps || !std::isfinite(hi)) {
        throw NumericalError("luxemburg_norm: upper bracket not found", lo, hi);
      }
    }
  } else {
    while (mod_at(lo) <= 1.0) {
      hi = lo;
      lo *= 0.5;
      if (++steps > kMaxBracketSteps || lo == 0.0) {
        throw NumericalError("luxemburg_norm: lower bracket not found", lo, hi);
      }
    }
  }
  // invariant: mod_at(lo) > 1 >= mod_at(hi)
  for (int it = 0; it < 400 && hi - lo > tol * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (mod_at(mid) > 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

inline double luxemburg_norm(const OrliczSpec& spec, const CellGrid& grid, const StepFunction& values,
                             double tol) {
  return luxemburg_norm(spec, grid, std::span<const double>(values.values), tol);
}

}  // namespace oiso
