#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "instances.hpp"
#include "orlicz_iso/certificate.hpp"
#include "orlicz_iso/luxemburg_fit.hpp"

using namespace oiso;
using oiso::testing::random_instance;

TEST(ScaledMinModular, MonotoneDataIsZero) {
  const auto grid = make_uniform(0, 1, 4);
  const StepFunction f{{0, 1, 2, 3}};
  for (double lambda : {0.01, 0.5, 1.0, 100.0}) {
    const auto r = scaled_min_modular(OrliczSpec::arctan(), grid, f, lambda);
    EXPECT_EQ(r.value, 0.0);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(r.h[i], f.values[i], 1e-12);
  }
}

TEST(ScaledMinModular, QuadraticTwoCells) {
  const auto grid = make_uniform(0, 2, 2);
  const auto r = scaled_min_modular(OrliczSpec::power(2), grid, StepFunction{{2, 1}}, 1.0);
  EXPECT_NEAR(r.value, 0.25, 1e-15);
  EXPECT_NEAR(r.h[0], 1.5, 1e-15);
  EXPECT_NEAR(r.h[1], 1.5, 1e-15);
  EXPECT_THROW(scaled_min_modular(OrliczSpec::power(2), grid, StepFunction{{2, 1}}, 0.0), DomainError);
}

TEST(ScaledMinModular, NonIncreasingInLambda) {
  for (std::size_t k = 0; k < 30; ++k) {
    const auto inst = random_instance(k, 61);
    double prev = std::numeric_limits<double>::infinity();
    for (double lambda = 1e-2; lambda < 1e3; lambda *= 1.5) {
      const double v = scaled_min_modular(inst.spec, inst.grid, inst.f, lambda).value;
      EXPECT_LE(v, prev * (1 + 1e-12)) << inst.spec.name();
      prev = v;
    }
    EXPECT_LT(prev, 1e-3);
  }
}

TEST(FitLuxemburg, MonotoneDataHasZeroDistance) {
  const auto grid = make_uniform(0, 1, 3);
  const StepFunction f{{-1, 0.5, 2}};
  const auto res = fit_luxemburg(OrliczSpec::power(2), grid, f, {}, 1e-12);
  EXPECT_EQ(res.delta, 0.0);
  EXPECT_EQ(std::vector<double>(res.h_star.values().begin(), res.h_star.values().end()), f.values);
  const auto chk = landers_rogge_check(OrliczSpec::power(2), grid, f, res, 1e-6);
  EXPECT_EQ(chk.residual, 0.0);
  EXPECT_TRUE(chk.consistent);
}

TEST(FitLuxemburg, QuadraticClosedForm) {
  // int_0^2 Phi(0.5 / delta) = (0.5 / delta)^2 = 1  =>  delta = 0.5
  const auto grid = make_uniform(0, 2, 2);
  const StepFunction f{{2, 1}};
  const auto spec = OrliczSpec::power(2);
  const auto res = fit_luxemburg(spec, grid, f, {}, 1e-13);
  EXPECT_NEAR(res.delta, 0.5, 1e-8);
  EXPECT_NEAR(res.h_star[0], 1.5, 1e-8);
  EXPECT_NEAR(res.h_star[1], 1.5, 1e-8);
  EXPECT_GT(res.outer_iterations, 0);
  EXPECT_TRUE(res.relation_hypothesis_met);
  EXPECT_NEAR(luxemburg_norm(spec, grid, subtract(f, res.h_star.values()), 1e-13), res.delta, 1e-8);
}

TEST(FitLuxemburg, SelfConsistentAndHomogeneous) {
  for (std::size_t k = 0; k < 40; ++k) {
    const auto inst = random_instance(k, 71);
    const auto res = fit_luxemburg(inst.spec, inst.grid, inst.f, {}, 1e-12);
    EXPECT_EQ(res.relation_hypothesis_met, inst.spec.kind() == OrliczKind::NFunction);
    const double norm = luxemburg_norm(inst.spec, inst.grid, subtract(inst.f, res.h_star.values()), 1e-13);
    EXPECT_NEAR(norm, res.delta, 1e-8 * std::max(1.0, res.delta)) << inst.spec.name();

    const double c = 2.5;
    const auto big = fit_luxemburg(inst.spec, inst.grid, scaled(inst.f, c), {}, 1e-12);
    EXPECT_NEAR(big.delta, c * res.delta, 1e-9 * c * res.delta) << inst.spec.name();
  }
}

TEST(FitLuxemburg, DeltaBoundsEveryMonotoneProbe) {
  std::mt19937_64 rng(8);
  for (std::size_t k = 0; k < 20; ++k) {
    const auto inst = random_instance(k, 83);
    const auto res = fit_luxemburg(inst.spec, inst.grid, inst.f, {}, 1e-12);
    for (int j = 0; j < 20; ++j) {
      const auto g = random_monotone(inst.f.size(), -5, 5, rng);
      const double d = luxemburg_norm(inst.spec, inst.grid, subtract(inst.f, g.values()), 1e-12);
      EXPECT_LE(res.delta, d * (1 + 1e-9));
    }
  }
}

TEST(FitLuxemburg, JumpsMatchInnerFit) {
  for (std::size_t k = 0; k < 20; ++k) {
    const auto inst = random_instance(k, 89);
    const auto res = fit_luxemburg(inst.spec, inst.grid, inst.f, {}, 1e-12);
    for (std::size_t i = 1; i < inst.f.size(); ++i) {
      const bool inner_jump = res.inner_fit.g_star[i] != res.inner_fit.g_star[i - 1];
      const bool outer_jump = res.h_star[i] != res.h_star[i - 1];
      EXPECT_EQ(inner_jump, outer_jump);
    }
  }
}

TEST(LandersRogge, ConsistentAndDetectsCorruption) {
  for (std::size_t k = 0; k < 30; ++k) {
    const auto inst = random_instance(k, 97);
    const auto res = fit_luxemburg(inst.spec, inst.grid, inst.f, {}, 1e-12);
    const auto ok = landers_rogge_check(inst.spec, inst.grid, inst.f, res, 1e-6);
    EXPECT_TRUE(ok.consistent) << inst.spec.name() << " residual=" << ok.residual;
    EXPECT_TRUE(ok.inner_certified);

    auto corrupted = res;
    std::vector<double> h(res.h_star.values().begin(), res.h_star.values().end());
    for (std::size_t i = res.inner_fit.blocks.back().start_cell; i < h.size(); ++i) h[i] += 0.1;
    corrupted.h_star = MonotoneStepFunction(std::move(h));
    const auto bad = landers_rogge_check(inst.spec, inst.grid, inst.f, corrupted, 1e-6);
    EXPECT_FALSE(bad.consistent);
    EXPECT_NEAR(bad.residual, 0.1, 1e-9);
  }
}

TEST(FitLuxemburg, RejectsBadTolerance) {
  const auto grid = make_uniform(0, 2, 2);
  EXPECT_THROW(fit_luxemburg(OrliczSpec::power(2), grid, StepFunction{{2, 1}}, {}, 0.0), DomainError);
}
