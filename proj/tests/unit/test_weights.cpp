#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "hypinv/weights.hpp"

using namespace hypinv;

TEST(Weights, PresetValues) {
  const WeightSequence w = presets::exp_sublinear(0.5);
  for (Index n : {1, 2, 10, 1000, 100000}) {
    const double x = static_cast<double>(n);
    EXPECT_NEAR(w.log_at(-n), x / std::pow(std::log(x) + 1.0, 0.5), 1e-12 * x);
  }
  for (Index n : {0, 1, 50}) EXPECT_EQ(w(n), 1.0);
  EXPECT_NEAR(presets::exp_sqrt(2.0).log_at(-400), 40.0, 1e-12);
  EXPECT_NEAR(presets::polynomial(0.25).log_at(-15), 0.25 * std::log(16.0), 1e-14);
  EXPECT_NEAR(presets::geometric(3.0).log_at(-5), 5.0 * std::log(3.0), 1e-14);
  EXPECT_EQ(presets::constant(2.0)(-7), 2.0);
}

TEST(Weights, CompanionSequence) {
  const WeightSequence p = presets::sublinear_companion(0.8);
  for (Index n : {1, 5, 100}) {
    const double x = static_cast<double>(n);
    EXPECT_NEAR(p(n), x / std::pow(std::log(x) + 1.0, 0.8), 1e-12 * x);
  }
}

TEST(Weights, PowerScalesLogs) {
  const WeightSequence w = presets::exp_sqrt(1.0).power(2.0);
  EXPECT_NEAR(w.log_at(-100), 20.0, 1e-12);
}

TEST(Weights, TabulatedOutsideRangeThrows) {
  const WeightSequence t = presets::tabulated({0, 2}, {1.0, 2.0, 3.0});
  EXPECT_EQ(t(1), 2.0);
  EXPECT_ANY_THROW(t(3));
}

TEST(Weights, DissymmetricAcceptsGrowingPresets) {
  for (const auto& w : {presets::exp_sublinear(0.3), presets::exp_sublinear(0.7), presets::exp_sqrt(1.0),
                        presets::polynomial(2.0), presets::loglog_power_dissymmetric(2.0)}) {
    const DissymmetricReport r = check_dissymmetric(w, {-100000, 100000});
    EXPECT_TRUE(r.pass) << w.name() << ": " << r.failure;
    EXPECT_TRUE(r.root_trend_decreasing) << w.name();
  }
}

TEST(Weights, DissymmetricRejectsControls) {
  EXPECT_FALSE(check_dissymmetric(presets::constant(), {-100, 100}).pass);
  EXPECT_FALSE(check_dissymmetric(presets::constant(2.0), {-100, 100}).pass);
  // Increasing toward -infinity is required, so a decaying table fails.
  std::vector<double> vals(201);
  for (Index n = -100; n <= 100; ++n) vals[static_cast<std::size_t>(n + 100)] = n < 0 ? std::exp(0.01 * n) : 1.0;
  EXPECT_FALSE(check_dissymmetric(presets::tabulated({-100, 100}, vals), {-100, 100}).pass);
}

TEST(Weights, ConsecutiveRatioConstant) {
  // exp(sqrt n) has largest consecutive ratio at n = 1: e^1.
  const DissymmetricReport r = check_dissymmetric(presets::exp_sqrt(1.0), {-1000, 1000});
  EXPECT_NEAR(r.measured_2_1_constant, std::exp(1.0), 1e-12);
}

TEST(Weights, LogConcaveSubmultiplicative) {
  const LogConcaveReport r = check_log_concave_submultiplicative(presets::exp_sublinear(0.5), {-2000, 2000});
  EXPECT_TRUE(r.log_concave) << r.failure;
  EXPECT_TRUE(r.submultiplicative_sampled) << r.failure;
  EXPECT_GT(r.pairs_checked, 0u);
}

TEST(Weights, StepWeightIsPiecewiseConstantAndNonincreasing) {
  const WeightSequence base = presets::exp_sqrt(1.0);
  const std::vector<Index> bp{1, 3, 10, 40};
  const WeightSequence w = make_step_weight(base, bp);
  // Block j covers -N_{j+1}+1 .. -N_j with value base(-j).
  EXPECT_EQ(w(0), 1.0);
  EXPECT_NEAR(w.log_at(-1), base.log_at(-1), 1e-15);
  EXPECT_NEAR(w.log_at(-2), base.log_at(-1), 1e-15);
  EXPECT_NEAR(w.log_at(-3), base.log_at(-2), 1e-15);
  EXPECT_NEAR(w.log_at(-9), base.log_at(-2), 1e-15);
  EXPECT_NEAR(w.log_at(-10), base.log_at(-3), 1e-15);
  for (Index n = -5000; n < 0; ++n) EXPECT_GE(w.log_at(n), w.log_at(n + 1));
  EXPECT_TRUE(check_dissymmetric(w, {-100000, 100000}).pass);
  EXPECT_THROW(make_step_weight(base, {2, 5}), ArgumentError);
  EXPECT_THROW(make_step_weight(base, {1, 5, 5}), ArgumentError);
}

TEST(Weights, DominatedConstructionHoldsPointwise) {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> sc(0.5, 8.0);
  for (int trial = 0; trial < 10; ++trial) {
    const double s = sc(rng);
    std::vector<double> beta(20000);
    for (std::size_t n = 0; n < beta.size(); ++n) beta[n] = s * std::log(static_cast<double>(n) + 2.0);
    const DominatedWeight d = make_dominated_weight(beta, presets::exp_sqrt(1.0));
    for (Index n = d.n0; n <= d.verified_up_to; ++n) {
      ASSERT_LE(d.weight(-n - 1), beta[static_cast<std::size_t>(n)] * (1.0 + 1e-12)) << "n=" << n << " s=" << s;
    }
    EXPECT_TRUE(check_dissymmetric(d.weight, {-100000, 100000}).pass);
  }
}

TEST(Weights, DominatedNeedsGrowth) {
  const std::vector<double> flat(100, 5.0);
  EXPECT_THROW(make_dominated_weight(flat, presets::exp_sqrt(1.0)), InconclusiveError);
  const std::vector<double> tiny(4, 5.0);
  EXPECT_THROW(make_dominated_weight(tiny, presets::exp_sqrt(1.0)), InconclusiveError);
}

TEST(Weights, SummableConstructionBoundsPartialSums) {
  for (double p : {-0.75, -1.0, -2.0}) {
    std::vector<double> eps(50000);
    for (std::size_t n = 0; n < eps.size(); ++n) eps[n] = std::pow(static_cast<double>(n) + 1.0, p);
    const SummableWeight sw = make_summable_weight(eps, presets::exp_sqrt(1.0));
    // Independent recomputation of the weighted partial sums.
    long double acc = 0.0L;
    for (std::size_t n = 0; n < eps.size(); ++n) {
      const long double e = eps[n];
      acc += e * e * std::exp(2.0L * sw.weight.log_at(-static_cast<Index>(n) - 1));
      ASSERT_NEAR(sw.weighted_partial_sums[n], static_cast<double>(acc), 1e-10 * static_cast<double>(acc));
      ASSERT_LE(static_cast<double>(acc), sw.total_bound * (1.0 + 1e-12));
    }
    EXPECT_TRUE(check_dissymmetric(sw.weight, {-100000, 100000}).pass);
  }
}

TEST(Weights, SummableRejectsNonSquareSummable) {
  std::vector<double> eps(5000);
  for (std::size_t n = 0; n < eps.size(); ++n) eps[n] = 1.0 / std::sqrt(static_cast<double>(n) + 1.0);
  EXPECT_THROW(make_summable_weight(eps, presets::exp_sqrt(1.0)), InconclusiveError);
}
