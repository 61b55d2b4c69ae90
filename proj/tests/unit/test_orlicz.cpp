#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "orlicz_iso/orlicz.hpp"

using namespace oiso;

namespace {

std::vector<OrliczSpec> all_families() {
  return {OrliczSpec::power(2.0),
          OrliczSpec::power(1.5),
          OrliczSpec::power(3.0),
          OrliczSpec::log_shifted(),
          OrliczSpec::arctan(),
          OrliczSpec::exp_saturating(),
          OrliczSpec::exponential(),
          OrliczSpec::piecewise_phi({{0, 0}, {0.5, 0.1}, {1, 0.6}, {2, 1.0}, {4, 2.0}}),
          OrliczSpec::piecewise_phi({{0, 0}, {1, 1}, {2, 1}})};
}

// Simpson in s for int phi(s^2) 2s ds: the substitution t = s^2 removes the
// sqrt singularity of phi'(t) at 0 (power p < 2).
double simpson(const OrliczSpec& spec, double lo, double hi, int panels) {
  const auto g = [&](double s) { return 2.0 * s * spec.phi(s * s); };
  const double h = (hi - lo) / panels;
  double sum = g(lo) + g(hi);
  for (int i = 1; i < panels; ++i) sum += (i % 2 ? 4.0 : 2.0) * g(lo + i * h);
  return sum * h / 3.0;
}

// Composite Simpson for int_0^x phi, split at the piecewise knots used above so that
// kinks of phi fall on panel boundaries. Independent of the closed-form primitives.
double simpson_primitive(const OrliczSpec& spec, double x) {
  double total = 0.0;
  double lo = 0.0;
  for (double knot : {0.5, 1.0, 2.0, 4.0}) {
    if (knot >= x) break;
    total += simpson(spec, std::sqrt(lo), std::sqrt(knot), 2000);
    lo = knot;
  }
  return x > lo ? total + simpson(spec, std::sqrt(lo), std::sqrt(x), 2000) : total;
}

}  // namespace

TEST(Phi, ClosedFormValues) {
  EXPECT_DOUBLE_EQ(OrliczSpec::power(2).phi(3.0), 3.0);
  EXPECT_DOUBLE_EQ(OrliczSpec::log_shifted().phi(1.0), 0.5);
  EXPECT_DOUBLE_EQ(OrliczSpec::arctan().phi(1.0), 0.7853981633974483);
}

TEST(Phi, NegativeArgumentIsDomainError) {
  for (const auto& s : all_families()) {
    EXPECT_THROW(s.phi(-1e-3), DomainError) << s.name();
    EXPECT_THROW(s.big_phi(-1.0), DomainError) << s.name();
  }
}

TEST(BigPhi, ClosedFormValues) {
  EXPECT_DOUBLE_EQ(OrliczSpec::power(2).big_phi(3.0), 4.5);
  for (const auto& s : all_families()) EXPECT_EQ(s.big_phi(0.0), 0.0) << s.name();
  // pi/4 - ln(2)/2, confirmed by 30-digit quadrature of int_0^1 atan(t) dt
  EXPECT_NEAR(OrliczSpec::arctan().big_phi(1.0), 0.4388245731174757, 1e-15);
  EXPECT_NEAR(OrliczSpec::arctan().big_phi(1.0), simpson_primitive(OrliczSpec::arctan(), 1.0), 1e-12);
}

TEST(BigPhi, MatchesQuadratureOfPhi) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(0.0, 6.0);
  for (const auto& s : all_families()) {
    for (int k = 0; k < 50; ++k) {
      const double x = dist(rng);
      const double exact = s.big_phi(x);
      const double quad = simpson_primitive(s, x);
      // Simpson is exact up to O(h^4) only where phi is smooth; piecewise knots cost a bit more.
      EXPECT_NEAR(exact, quad, 1e-8 * std::max(1.0, exact)) << s.name() << " x=" << x;
    }
  }
}

TEST(BigPhi, SmallArgumentsKeepRelativeAccuracy) {
  // Phi(x) ~ x^2 / 2 near 0 for every built-in with phi'(0) = 1.
  for (const auto& s : {OrliczSpec::log_shifted(), OrliczSpec::arctan(), OrliczSpec::exp_saturating(),
                        OrliczSpec::exponential()}) {
    const double x = 1e-8;
    EXPECT_NEAR(s.big_phi(x) / (0.5 * x * x), 1.0, 1e-7) << s.name();
  }
}

TEST(Phi, MonotoneAndConvexPrimitive) {
  for (const auto& s : all_families()) {
    double prev_phi = 0.0;
    for (int i = 0; i <= 2000; ++i) {
      const double t = 0.005 * i;
      EXPECT_GE(s.phi(t), prev_phi) << s.name();
      prev_phi = s.phi(t);
    }
    for (int i = 1; i < 2000; ++i) {
      const double h = 0.005;
      const double x = h * i;
      const double d2 = s.big_phi(x - h) - 2.0 * s.big_phi(x) + s.big_phi(x + h);
      EXPECT_GE(d2, -1e-9 * std::max(1.0, s.big_phi(x + h))) << s.name() << " x=" << x;
    }
  }
}

TEST(Phi, BoundedForNInfinityFamilies) {
  const std::vector<std::pair<OrliczSpec, double>> cases = {
      {OrliczSpec::log_shifted(), 1.0},
      {OrliczSpec::arctan(), std::numbers::pi / 2},
      {OrliczSpec::exp_saturating(), 1.0}};
  for (const auto& [s, bound] : cases) {
    EXPECT_EQ(s.kind(), OrliczKind::NInfinityFunction);
    EXPECT_DOUBLE_EQ(s.phi_bound(), bound);
    for (double t : {0.0, 1e-3, 1.0, 10.0, 1e3, 1e8, 1e300}) EXPECT_LE(s.phi(t), bound) << s.name();
  }
  EXPECT_EQ(OrliczSpec::power(2).kind(), OrliczKind::NFunction);
  EXPECT_EQ(OrliczSpec::exponential().kind(), OrliczKind::NFunction);
}

TEST(Score, OddAndZeroAtOrigin) {
  EXPECT_DOUBLE_EQ(OrliczSpec::power(2).score(-2.0), -2.0);
  EXPECT_DOUBLE_EQ(OrliczSpec::log_shifted().score(1.0), 0.5);
  EXPECT_DOUBLE_EQ(OrliczSpec::log_shifted().score(-1.0), -0.5);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> dist(-20.0, 20.0);
  for (const auto& s : all_families()) {
    EXPECT_EQ(s.score(0.0), 0.0);
    for (int k = 0; k < 200; ++k) {
      const double u = dist(rng);
      EXPECT_EQ(s.score(u) + s.score(-u), 0.0) << s.name();
    }
  }
}

TEST(Power, RejectsPOneWithDiagnostic) {
  try {
    (void)OrliczSpec::power(1.0);
    FAIL() << "p = 1 accepted";
  } catch (const DomainError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("p > 1"), std::string::npos);
    EXPECT_NE(msg.find("phi(0+) = 0"), std::string::npos);
  }
  EXPECT_THROW(OrliczSpec::power(0.5), DomainError);
  EXPECT_THROW(OrliczSpec::power(NAN), DomainError);
}

TEST(PiecewisePhi, ValidatesKnots) {
  EXPECT_THROW(OrliczSpec::piecewise_phi({{0, 0}}), DomainError);
  EXPECT_THROW(OrliczSpec::piecewise_phi({{0.1, 0}, {1, 1}}), DomainError);
  EXPECT_THROW(OrliczSpec::piecewise_phi({{0, 0}, {1, 1}, {1, 2}}), DomainError);
  EXPECT_THROW(OrliczSpec::piecewise_phi({{0, 0}, {1, 1}, {2, 0.5}}), DomainError);
  EXPECT_THROW(OrliczSpec::piecewise_phi({{0, 0}, {1, 0}, {2, 1}}), DomainError);
}

TEST(PiecewisePhi, InterpolatesAndExtends) {
  const auto sat = OrliczSpec::piecewise_phi({{0, 0}, {1, 1}, {2, 1}});
  EXPECT_EQ(sat.kind(), OrliczKind::NInfinityFunction);
  EXPECT_DOUBLE_EQ(sat.phi(0.5), 0.5);
  EXPECT_DOUBLE_EQ(sat.phi(10.0), 1.0);
  EXPECT_DOUBLE_EQ(sat.big_phi(1.0), 0.5);
  EXPECT_DOUBLE_EQ(sat.big_phi(3.0), 2.5);

  const auto grow = OrliczSpec::piecewise_phi({{0, 0}, {1, 1}, {2, 3}});
  EXPECT_EQ(grow.kind(), OrliczKind::NFunction);
  EXPECT_DOUBLE_EQ(grow.phi(3.0), 5.0);  // final slope 2 continued
  EXPECT_DOUBLE_EQ(grow.big_phi(2.0), 0.5 + 2.0);
}

TEST(Delta2, PowerIsExactlyFour) {
  const auto est = delta2_estimate(OrliczSpec::power(2), 1e-6, 1e6, 500);
  EXPECT_NEAR(est.sup_ratio, 4.0, 1e-9);
  EXPECT_TRUE(est.satisfied);
}

TEST(Delta2, LogShiftedApproachesFourFromBelow) {
  const auto s = OrliczSpec::log_shifted();
  const auto est = delta2_estimate(s, 1e-8, 1e8, 1000);
  EXPECT_LE(est.sup_ratio, 4.0 + 1e-9);
  EXPECT_GT(est.sup_ratio, 4.0 - 1e-6);
  EXPECT_TRUE(est.satisfied);
  // ratio at the small end is the sup (Phi ~ x^2/2 there)
  EXPECT_NEAR(s.big_phi(2e-8) / s.big_phi(1e-8), 4.0, 1e-6);
}

TEST(Delta2, ExponentialViolates) {
  const auto est = delta2_estimate(OrliczSpec::exponential(), 1e-3, 50, 400, 1e6);
  EXPECT_GT(est.sup_ratio, 1e6);
  EXPECT_FALSE(est.satisfied);
  ASSERT_TRUE(est.violating_x.has_value());
  EXPECT_GT(*est.violating_x, 1.0);
  // without a caller threshold the default bound applies
  EXPECT_FALSE(delta2_estimate(OrliczSpec::exponential(), 1e-3, 50, 400).satisfied);
}

TEST(Delta2, RejectsBadRange) {
  EXPECT_THROW(delta2_estimate(OrliczSpec::power(2), 0.0, 1.0, 10), DomainError);
  EXPECT_THROW(delta2_estimate(OrliczSpec::power(2), 2.0, 1.0, 10), DomainError);
  EXPECT_THROW(delta2_estimate(OrliczSpec::power(2), 1.0, 2.0, 1), DomainError);
}

TEST(Modular, Values) {
  const auto unit = make_uniform(0, 1, 1);
  EXPECT_EQ(modular(OrliczSpec::power(2), unit, StepFunction{{0.0}}), 0.0);
  EXPECT_DOUBLE_EQ(modular(OrliczSpec::power(2), unit, StepFunction{{1.0}}), 0.5);
  // (1 - ln 2) + (3 - ln 4); cross-checked against a 2e5-point Riemann sum
  const auto two = make_uniform(0, 2, 2);
  EXPECT_NEAR(modular(OrliczSpec::log_shifted(), two, StepFunction{{1.0, 3.0}}), 1.9205584583201641, 1e-14);
  EXPECT_THROW(modular(OrliczSpec::power(2), two, StepFunction{{1.0}}), StructuralError);
}

TEST(Modular, ConvexInResidual) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dist(-4.0, 4.0);
  const auto grid = make_uniform(0, 1, 12);
  for (const auto& s : all_families()) {
    for (int k = 0; k < 50; ++k) {
      std::vector<double> r1(12), r2(12), mid(12);
      for (int i = 0; i < 12; ++i) {
        r1[i] = dist(rng);
        r2[i] = dist(rng);
        mid[i] = 0.5 * (r1[i] + r2[i]);
      }
      const double lhs = modular(s, grid, mid);
      const double rhs = 0.5 * modular(s, grid, r1) + 0.5 * modular(s, grid, r2);
      EXPECT_LE(lhs, rhs * (1 + 1e-14) + 1e-15) << s.name();
    }
  }
}

TEST(Luxemburg, ClosedForms) {
  const auto unit = make_uniform(0, 1, 1);
  EXPECT_EQ(luxemburg_norm(OrliczSpec::power(2), unit, StepFunction{{0.0}}, 1e-12), 0.0);
  EXPECT_NEAR(luxemburg_norm(OrliczSpec::power(2), unit, StepFunction{{std::sqrt(2.0)}}, 1e-13), 1.0, 1e-10);

  const auto grid = make_uniform(0, 1, 4096);
  const auto f = sample_midpoints(grid, [](double x) { return x; });
  // closed form 1/sqrt(6) for f(x) = x; midpoint sampling shifts it by ~1/(24 n^2)
  EXPECT_NEAR(luxemburg_norm(OrliczSpec::power(2), grid, f, 1e-12), 1.0 / std::sqrt(6.0), 1e-4);
  EXPECT_NEAR(luxemburg_norm(OrliczSpec::power(2), grid, f, 1e-13), 0.4082482874221762, 1e-11);
}

TEST(Luxemburg, RejectsBadTolerance) {
  const auto unit = make_uniform(0, 1, 1);
  EXPECT_THROW(luxemburg_norm(OrliczSpec::power(2), unit, StepFunction{{1.0}}, 0.0), DomainError);
}

TEST(Luxemburg, AbsolutelyHomogeneous) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> val(-3.0, 3.0);
  std::uniform_real_distribution<double> scale(-50.0, 50.0);
  const auto grid = make_uniform(-1, 2, 9);
  for (const auto& s : all_families()) {
    for (int k = 0; k < 10; ++k) {
      StepFunction f;
      for (int i = 0; i < 9; ++i) f.values.push_back(val(rng));
      const double c = scale(rng);
      const double base = luxemburg_norm(s, grid, f, 1e-13);
      const double scaled_norm = luxemburg_norm(s, grid, scaled(f, c), 1e-13);
      EXPECT_NEAR(scaled_norm, std::fabs(c) * base, 1e-10 * std::fabs(c) * base) << s.name();
    }
  }
}
