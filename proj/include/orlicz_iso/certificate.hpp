#pragma once

// Optimality certificates for a candidate monotone approximant g of f.
//
// g is a best approximant from the monotone cone iff the one-sided directional
// derivative of the modular,
//
//     D(g; h) = sum_i w_i psi(f_i - g_i) (g_i - h_i),
//
// is non-negative for every monotone h. The residual profile
// r_k = sum_{i<k} w_i psi(f_i - g_i) turns that into checkable conditions:
// balance, r >= 0, r_n = 0, r = 0 across jumps, r > 0 only inside flat pieces.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "orlicz_iso/error.hpp"
#include "orlicz_iso/grid.hpp"
#include "orlicz_iso/isotone.hpp"
#include "orlicz_iso/orlicz.hpp"

namespace oiso {

struct ResidualProfile {
  std::vector<double> psi;  // psi(f_i - g_i), one per cell
  std::vector<double> r;    // r_0 = 0, r_k = r_{k-1} + w_k psi_k
  std::vector<double> g;    // the candidate the profile was computed for
  std::vector<double> w;    // cell weights
};

inline ResidualProfile residual_profile(const OrliczSpec& spec, const CellGrid& grid,
                                        const StepFunction& f, const MonotoneStepFunction& g) {
  require_on_grid(grid, f.size(), "residual_profile (f)");
  require_on_grid(grid, g.size(), "residual_profile (g)");
  ResidualProfile p;
  const auto w = grid.weights();
  p.psi.resize(f.size());
  p.r.assign(f.size() + 1, 0.0);
  for (std::size_t i = 0; i < f.size(); ++i) {
    p.psi[i] = spec.score(f.values[i] - g[i]);
    p.r[i + 1] = p.r[i] + w[i] * p.psi[i];
  }
  p.g.assign(g.values().begin(), g.values().end());
  p.w.assign(w.begin(), w.end());
  return p;
}

/// Magnitude used to turn relative certificate tolerances into absolute ones:
/// 1 + sum_i w_i |psi_i| (1 + |g_i|).
inline double certificate_scale(const ResidualProfile& p) {
  double s = 1.0;
  for (std::size_t i = 0; i < p.psi.size(); ++i) s += p.w[i] * std::fabs(p.psi[i]) * (1.0 + std::fabs(p.g[i]));
  return s;
}

struct JumpResidual {
  std::size_t breakpoint;  // interior breakpoint index k in 1..n-1
  double jump;
  double abs_r;
};

struct LocalConstancyWitness {
  std::size_t breakpoint;
  double r;
  bool locally_constant;
};

struct CharacterizationResult {
  double min_value = std::numeric_limits<double>::infinity();
  std::string argmin_probe;
  std::size_t probes_evaluated = 0;
  bool passed = false;
};

struct CertificateReport {
  double tol = 0.0;
  double jump_tol = 0.0;

  double item1_balance = 0.0;    // sum w psi g
  double item2_min_r = 0.0;      // min_k r_k
  double item3_total = 0.0;      // r_n
  double item4_max_tail = 0.0;   // max_k (r_n - r_k)
  std::vector<JumpResidual> item5_jump_residuals;
  std::vector<LocalConstancyWitness> item6_witnesses;
  std::optional<CharacterizationResult> characterization;

  bool item1_pass = false;
  bool item2_pass = false;
  bool item3_pass = false;
  bool item4_pass = false;
  bool item5_pass = false;
  bool item6_pass = false;
  bool passed = false;

  /// Item 4 follows from items 2 and 3; a failure here with both passing is an internal inconsistency.
  bool consistent() const { return !(item2_pass && item3_pass) || item4_pass; }

  void finalize() {
    passed = item1_pass && item2_pass && item3_pass && item4_pass && item5_pass && item6_pass &&
             (!characterization || characterization->passed);
  }
};

/// Default jump threshold: 1e-9 (max f - min f), floored at a tiny absolute value.
inline double default_jump_tol(const StepFunction& f) {
  if (f.values.empty()) return 1e-300;
  const auto [lo, hi] = std::minmax_element(f.values.begin(), f.values.end());
  return std::max(1e-9 * (*hi - *lo), 1e-300);
}

/// Discrete residual-profile conditions on a candidate g (the profile's g).
inline CertificateReport check_lemma_items(const ResidualProfile& p, double tol, double jump_tol) {
  if (!(tol > 0.0)) throw DomainError("check_lemma_items requires tol > 0");
  if (!(jump_tol > 0.0)) throw DomainError("check_lemma_items requires jump_tol > 0");
  CertificateReport rep;
  rep.tol = tol;
  rep.jump_tol = jump_tol;
  const std::size_t n = p.psi.size();

  double balance = 0.0;
  for (std::size_t i = 0; i < n; ++i) balance += p.w[i] * p.psi[i] * p.g[i];
  rep.item1_balance = balance;
  rep.item1_pass = std::fabs(balance) <= tol;

  rep.item2_min_r = *std::min_element(p.r.begin(), p.r.end());
  rep.item2_pass = rep.item2_min_r >= -tol;

  rep.item3_total = p.r[n];
  rep.item3_pass = std::fabs(rep.item3_total) <= tol;

  double max_tail = -std::numeric_limits<double>::infinity();
  for (double rk : p.r) max_tail = std::max(max_tail, p.r[n] - rk);
  rep.item4_max_tail = max_tail;
  rep.item4_pass = max_tail <= tol;

  rep.item5_pass = true;
  rep.item6_pass = true;
  for (std::size_t k = 1; k < n; ++k) {
    const double jump = p.g[k] - p.g[k - 1];
    if (jump > jump_tol) {
      const double abs_r = std::fabs(p.r[k]);
      rep.item5_jump_residuals.push_back({k, jump, abs_r});
      rep.item5_pass = rep.item5_pass && abs_r <= tol;
    }
    if (p.r[k] > tol) {
      const bool flat = p.g[k] == p.g[k - 1];
      rep.item6_witnesses.push_back({k, p.r[k], flat});
      rep.item6_pass = rep.item6_pass && flat;
    }
  }
  rep.finalize();
  return rep;
}

inline CertificateReport check_lemma_items(const ResidualProfile& p, const MonotoneFit& fit,
                                           double tol, double jump_tol) {
  if (p.g.size() != fit.g_star.size() ||
      !std::equal(p.g.begin(), p.g.end(), fit.g_star.values().begin())) {
    throw StructuralError("check_lemma_items: profile was not computed from this fit");
  }
  return check_lemma_items(p, tol, jump_tol);
}

/// F'_h(0+) = sum_i w_i psi(f_i - g*_i) (g*_i - h_i).
inline double directional_derivative(const OrliczSpec& spec, const CellGrid& grid,
                                     const StepFunction& f, const MonotoneStepFunction& g_star,
                                     std::span<const double> h) {
  require_on_grid(grid, f.size(), "directional_derivative (f)");
  require_on_grid(grid, g_star.size(), "directional_derivative (g*)");
  require_on_grid(grid, h.size(), "directional_derivative (h)");
  const auto w = grid.weights();
  double total = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    total += w[i] * spec.score(f.values[i] - g_star[i]) * (g_star[i] - h[i]);
  }
  return total;
}

inline double directional_derivative(const OrliczSpec& spec, const CellGrid& grid,
                                     const StepFunction& f, const MonotoneStepFunction& g_star,
                                     const MonotoneStepFunction& h) {
  return directional_derivative(spec, grid, f, g_star, h.values());
}

/// Random non-decreasing step function with values drawn uniformly from [lo, hi].
inline MonotoneStepFunction random_monotone(std::size_t n, double lo, double hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = (lo == hi) ? lo : dist(rng);
  std::sort(v.begin(), v.end());
  // Occasionally collapse runs so probes include flat pieces.
  std::uniform_int_distribution<int> coin(0, 3);
  for (std::size_t i = 1; i < n; ++i) {
    if (coin(rng) == 0) v[i] = v[i - 1];
  }
  return MonotoneStepFunction(std::move(v));
}

/// Evaluates the directional derivative over a deterministic probe family:
/// constants +-1, 2g*, g*/2, the indicators -1 on [a, x_k] / 0 after for every
/// breakpoint, and `n_probes` seeded random monotone functions in the hull of f.
inline CharacterizationResult check_characterization(const OrliczSpec& spec, const CellGrid& grid,
                                                     const StepFunction& f,
                                                     const MonotoneStepFunction& g_star,
                                                     std::size_t n_probes, std::uint64_t seed,
                                                     double tol) {
  if (n_probes < 1) throw DomainError("check_characterization requires n_probes >= 1");
  if (!(tol > 0.0)) throw DomainError("check_characterization requires tol > 0");
  require_on_grid(grid, f.size(), "check_characterization (f)");
  require_on_grid(grid, g_star.size(), "check_characterization (g*)");
  const std::size_t n = f.size();
  CharacterizationResult res;
  auto probe = [&](std::span<const double> h, std::string id) {
    const double d = directional_derivative(spec, grid, f, g_star, h);
    ++res.probes_evaluated;
    if (d < res.min_value) {
      res.min_value = d;
      res.argmin_probe = std::move(id);
    }
  };

  std::vector<double> h(n);
  std::fill(h.begin(), h.end(), 1.0);
  probe(h, "const(+1)");
  std::fill(h.begin(), h.end(), -1.0);
  probe(h, "const(-1)");
  for (std::size_t i = 0; i < n; ++i) h[i] = 2.0 * g_star[i];
  probe(h, "2g*");
  for (std::size_t i = 0; i < n; ++i) h[i] = 0.5 * g_star[i];
  probe(h, "g*/2");
  for (std::size_t k = 0; k <= n; ++k) {
    for (std::size_t i = 0; i < n; ++i) h[i] = i < k ? -1.0 : 0.0;
    probe(h, "indicator(" + std::to_string(k) + ")");
  }

  const auto [lo, hi] = std::minmax_element(f.values.begin(), f.values.end());
  std::mt19937_64 rng(seed);
  for (std::size_t j = 0; j < n_probes; ++j) {
    const auto r = random_monotone(n, *lo, *hi, rng);
    probe(r.values(), "random(" + std::to_string(j) + ")");
  }
  res.passed = res.min_value >= -tol;
  return res;
}

struct CertifyOptions {
  double rel_tol = 1e-8;                // tol = rel_tol * certificate_scale
  std::optional<double> jump_tol;       // default: default_jump_tol(f)
  std::size_t n_probes = 100;
  std::uint64_t seed = 0;
};

/// Full certificate: residual-profile items plus the characterization probes.
inline CertificateReport certify(const OrliczSpec& spec, const CellGrid& grid, const StepFunction& f,
                                 const MonotoneStepFunction& g, const CertifyOptions& opts = {}) {
  const auto profile = residual_profile(spec, grid, f, g);
  const double tol = opts.rel_tol * certificate_scale(profile);
  auto rep = check_lemma_items(profile, tol, opts.jump_tol.value_or(default_jump_tol(f)));
  rep.characterization = check_characterization(spec, grid, f, g, opts.n_probes, opts.seed, tol);
  rep.finalize();
  return rep;
}

/// F_h(eps) = modular(f - (eps h + (1 - eps) g*)) for each eps.
inline std::vector<std::pair<double, double>> convexity_probe(const OrliczSpec& spec,
                                                              const CellGrid& grid,
                                                              const StepFunction& f,
                                                              const MonotoneStepFunction& g_star,
                                                              const MonotoneStepFunction& h,
                                                              std::span<const double> epsilons) {
  require_on_grid(grid, f.size(), "convexity_probe (f)");
  require_on_grid(grid, g_star.size(), "convexity_probe (g*)");
  require_on_grid(grid, h.size(), "convexity_probe (h)");
  std::vector<std::pair<double, double>> out;
  out.reserve(epsilons.size());
  double prev = -std::numeric_limits<double>::infinity();
  std::vector<double> resid(f.size());
  for (double eps : epsilons) {
    if (!(eps >= 0.0 && eps <= 1.0)) throw DomainError("convexity_probe: epsilon outside [0, 1]");
    if (eps < prev) throw DomainError("convexity_probe: epsilons must be sorted");
    prev = eps;
    for (std::size_t i = 0; i < f.size(); ++i) {
      resid[i] = f.values[i] - (g_star[i] + eps * (h[i] - g_star[i]));
    }
    out.emplace_back(eps, modular(spec, grid, resid));
  }
  return out;
}

/// mu(A_delta intersect (x0 - h, x0 + h)) / (2h) for each window h, where
/// A_delta = {x : |f(x) - f(x0)| < delta} and f(x0) is the value of the cell containing x0.
inline std::vector<std::pair<double, double>> density_diagnostic(const CellGrid& grid,
                                                                 const StepFunction& f, double x0,
                                                                 double delta,
                                                                 std::span<const double> windows) {
  require_on_grid(grid, f.size(), "density_diagnostic");
  if (!(x0 > grid.a() && x0 < grid.b())) throw DomainError("density_diagnostic: x0 must lie in (a, b)");
  if (!(delta > 0.0)) throw DomainError("density_diagnostic: delta must be positive");
  const double f0 = f.values[grid.cell_of(x0)];
  const auto x = grid.breakpoints();
  std::vector<std::pair<double, double>> out;
  for (double h : windows) {
    if (!(h > 0.0)) throw DomainError("density_diagnostic: windows must be positive");
    const double left = x0 - h;
    const double right = x0 + h;
    double measure = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (!(std::fabs(f.values[i] - f0) < delta)) continue;
      const double overlap = std::min(right, x[i + 1]) - std::max(left, x[i]);
      if (overlap > 0.0) measure += overlap;
    }
    out.emplace_back(h, measure / (2.0 * h));
  }
  return out;
}

struct Jump {
  std::size_t breakpoint;  // interior breakpoint index
  double x;
  double size;
};

/// Interior block boundaries whose level difference exceeds jump_tol.
inline std::vector<Jump> jump_scan(const CellGrid& grid, const MonotoneFit& fit, double jump_tol) {
  std::vector<Jump> out;
  for (std::size_t b = 1; b < fit.blocks.size(); ++b) {
    const double size = fit.blocks[b].level - fit.blocks[b - 1].level;
    if (size > jump_tol) {
      const std::size_t k = fit.blocks[b].start_cell;
      out.push_back({k, grid.breakpoints()[k], size});
    }
  }
  return out;
}

inline double max_jump(const std::vector<Jump>& jumps) {
  double m = 0.0;
  for (const auto& j : jumps) m = std::max(m, j.size);
  return m;
}

/// Which continuity/uniqueness hypothesis the input satisfies: "a" for an
/// N-function with bounded data (always true of step data), "b" for an N-infinity function.
inline const char* continuity_hypothesis(const OrliczSpec& spec) {
  return spec.kind() == OrliczKind::NFunction ? "a" : "b";
}

}  // namespace oiso
