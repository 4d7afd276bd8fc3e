#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "hypinv/grid.hpp"
#include "hypinv/inner.hpp"

using namespace hypinv;

namespace {

// Generalized Laguerre L_n^{(-1)}(x) by the three-term recurrence in long double.
// exp(-x z / (1 - z)) = sum_n L_n^{(-1)}(x) z^n.
std::vector<long double> laguerre_minus_one(Index N, long double x) {
  std::vector<long double> L(static_cast<std::size_t>(N + 1));
  L[0] = 1.0L;
  if (N >= 1) L[1] = -x;
  for (Index n = 1; n < N; ++n) {
    const long double nn = static_cast<long double>(n);
    L[static_cast<std::size_t>(n + 1)] =
        ((2.0L * nn - x) * L[static_cast<std::size_t>(n)] - (nn - 1.0L) * L[static_cast<std::size_t>(n - 1)]) /
        (nn + 1.0L);
  }
  return L;
}

InnerFn single(double mass, double angle = 0.0) { return InnerFn(SingularMeasure::single(mass, angle)); }

}  // namespace

TEST(Inner, TrivialMeasureGivesUnitCoefficients) {
  const InnerFn theta;
  const CoeffVector& c = theta.theta_coeffs(10);
  const CoeffVector& d = theta.inv_theta_coeffs(10);
  for (Index n = 0; n <= 10; ++n) {
    EXPECT_EQ(c.at(n), cplx(n == 0 ? 1.0 : 0.0, 0.0));
    EXPECT_EQ(d.at(n), cplx(n == 0 ? 1.0 : 0.0, 0.0));
  }
}

TEST(Inner, ConstantTermsAreExponentials) {
  for (double a : {0.25, 1.0, 4.0}) {
    const InnerFn theta = single(a);
    EXPECT_NEAR(theta.theta_coeffs(0).at(0).real(), std::exp(-a), 1e-15 * std::exp(-a));
    EXPECT_NEAR(theta.inv_theta_coeffs(0).at(0).real(), std::exp(a), 1e-15 * std::exp(a));
  }
}

TEST(Inner, InverseCoefficientsMatchLaguerre) {
  for (double a : {0.1, 0.25, 1.0, 4.0}) {
    const Index N = 300;
    const InnerFn theta = single(a);
    const CoeffVector& inv = theta.inv_theta_coeffs(N);
    const auto L = laguerre_minus_one(N, -2.0L * a);
    for (Index n = 0; n <= N; ++n) {
      const long double ref = std::exp(static_cast<long double>(a)) * L[static_cast<std::size_t>(n)];
      EXPECT_NEAR(inv.at(n).real(), static_cast<double>(ref), 1e-12 * static_cast<double>(std::fabs(ref)))
          << "a=" << a << " n=" << n;
      EXPECT_EQ(inv.at(n).imag(), 0.0);
    }
  }
}

TEST(Inner, ThetaCoefficientsMatchLaguerre) {
  for (double a : {0.1, 1.0}) {
    const Index N = 120;
    const InnerFn theta = single(a);
    const CoeffVector& th = theta.theta_coeffs(N);
    const auto L = laguerre_minus_one(N, 2.0L * a);
    for (Index n = 0; n <= N; ++n) {
      const double ref = static_cast<double>(std::exp(-static_cast<long double>(a)) * L[static_cast<std::size_t>(n)]);
      EXPECT_NEAR(th.at(n).real(), ref, 1e-12) << "a=" << a << " n=" << n;
    }
  }
}

TEST(Inner, RotatedAtomRotatesCoefficients) {
  const double t = 1.1;
  const InnerFn base = single(0.7);
  const InnerFn moved = single(0.7, t);
  const CoeffVector expect = rotate(base.theta_coeffs(64), std::polar(1.0, -t));
  const CoeffVector& got = moved.theta_coeffs(64);
  for (Index n = 0; n <= 64; ++n) EXPECT_NEAR(std::abs(got.at(n) - expect.at(n)), 0.0, 1e-13);
}

TEST(Inner, RotateInnerFnAgreesWithCoefficientRotation) {
  const cplx xi = std::polar(1.0, 0.4);
  const InnerFn theta(SingularMeasure({{0.3, 0.5}, {2.0, 0.2}}));
  const CoeffVector a = rotate(theta, xi).theta_coeffs(40);
  const CoeffVector b = rotate(theta.theta_coeffs(40), xi);
  for (Index n = 0; n <= 40; ++n) EXPECT_NEAR(std::abs(a.at(n) - b.at(n)), 0.0, 1e-13);
}

TEST(Inner, TildeConjugatesCoefficients) {
  const InnerFn theta(SingularMeasure({{0.3, 0.5}, {2.0, 0.2}}));
  const CoeffVector a = tilde(theta).theta_coeffs(40);
  const CoeffVector& b = theta.theta_coeffs(40);
  for (Index n = 0; n <= 40; ++n) EXPECT_NEAR(std::abs(a.at(n) - std::conj(b.at(n))), 0.0, 1e-13);
}

TEST(Inner, TwoAtomsFactorAsCauchyProduct) {
  const Index N = 80;
  const InnerFn both(SingularMeasure({{0.4, 0.3}, {2.5, 0.6}}));
  const InnerFn first = single(0.3, 0.4);
  const InnerFn second = single(0.6, 2.5);
  const CoeffVector& p = first.theta_coeffs(N);
  const CoeffVector& q = second.theta_coeffs(N);
  const CoeffVector& r = both.theta_coeffs(N);
  for (Index n = 0; n <= N; ++n) {
    cplx s{0.0, 0.0};
    for (Index k = 0; k <= n; ++k) s += p.at(k) * q.at(n - k);
    EXPECT_NEAR(std::abs(r.at(n) - s), 0.0, 1e-13);
  }
}

TEST(Inner, EvaluationMatchesClosedForm) {
  const double a = 0.8;
  const InnerFn theta = single(a, 0.0);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> rad(0.0, 0.95);
  std::uniform_real_distribution<double> ang(0.0, kTwoPi);
  for (int i = 0; i < 100; ++i) {
    const cplx z = std::polar(rad(rng), ang(rng));
    const cplx ref = std::exp(-a * (1.0 + z) / (1.0 - z));
    EXPECT_NEAR(std::abs(theta(z) - ref), 0.0, 1e-13);
    EXPECT_NEAR(std::abs(eval_theta(theta, z) - ref), 0.0, 1e-13);
  }
}

TEST(Inner, BoundaryValuesAreUnimodular) {
  const InnerFn theta(SingularMeasure({{0.0, 1.0}, {3.0, 0.5}}));
  for (int k = 1; k < 100; ++k) {
    const double t = 0.0625 * k;
    if (std::abs(t - 3.0) < 1e-9) continue;
    EXPECT_NEAR(std::abs(theta.boundary(t)), 1.0, 1e-12);
  }
}

TEST(Inner, ReciprocalIdentityResidualIsSmall) {
  for (double a : {0.25, 1.0, 4.0}) {
    const InnerFn theta = single(a);
    const Index N = 500;
    const ReciprocalReport r = verify_reciprocal_identity(theta.theta_coeffs(N), theta.inv_theta_coeffs(N), N);
    EXPECT_NEAR(std::abs(r.n0_value - cplx(1.0, 0.0)), 0.0, 1e-12);
    EXPECT_LE(r.max_relative_residual, 1e-8) << "a=" << a;
  }
}

TEST(Inner, CoefficientsMatchBoundaryFft) {
  // Coefficients of 1/theta on |z| = r < 1 recovered from grid samples, compared after rescaling.
  const InnerFn theta = single(0.5, 0.7);
  const Index N = 20;
  const double r = 0.6;
  const std::size_t M = 1024;
  std::vector<cplx> samples(M);
  for (std::size_t j = 0; j < M; ++j) {
    const cplx z = std::polar(r, kTwoPi * static_cast<double>(j) / static_cast<double>(M));
    samples[j] = 1.0 / theta(z);
  }
  const std::vector<cplx> c = coefficients_from_grid(samples, 0, N);
  const CoeffVector& inv = theta.inv_theta_coeffs(N);
  for (Index n = 0; n <= N; ++n) {
    const cplx got = c[static_cast<std::size_t>(n)] / std::pow(r, static_cast<double>(n));
    EXPECT_NEAR(std::abs(got - inv.at(n)), 0.0, 1e-9 * (1.0 + std::abs(inv.at(n))));
  }
}

TEST(Inner, InverseCoefficientGrowthRate) {
  // |(1/theta)^(n)| grows like exp(2 sqrt(2 a n)) up to algebraic factors.
  for (double a : {0.25, 1.0}) {
    const GrowthFit g = growth_fit(single(a).inv_theta_coeffs(4000));
    ASSERT_FALSE(g.skipped);
    EXPECT_NEAR(g.c, 2.0 * std::sqrt(2.0 * a), 0.1 * 2.0 * std::sqrt(2.0 * a)) << "a=" << a;
  }
}

TEST(Carleson, ClosedForms) {
  const std::vector<double> one{0.0};
  EXPECT_EQ(carleson_sum(one), 0.0);
  const std::vector<double> anti{0.0, kPi};
  EXPECT_NEAR(carleson_sum(anti), -std::log(2.0), 1e-12);
  for (int k = 1; k <= 8; ++k) {
    std::vector<double> pts;
    for (int j = 0; j < k; ++j) pts.push_back(kTwoPi * j / k);
    EXPECT_NEAR(carleson_sum(pts), -std::log(static_cast<double>(k)), 1e-12) << "k=" << k;
  }
}

TEST(Carleson, EntropyBoundsOnRandomSets) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ang(0.0, kTwoPi);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 1 + trial % 12;
    std::vector<double> pts(static_cast<std::size_t>(k));
    for (auto& p : pts) p = ang(rng);
    const double s = carleson_sum(pts);
    EXPECT_LE(s, 1e-12);
    EXPECT_GE(s, -std::log(static_cast<double>(k)) - 1e-12);
    // Invariant under rotation of the whole set.
    std::vector<double> moved = pts;
    for (auto& p : moved) p = std::fmod(p + 1.234, kTwoPi);
    EXPECT_NEAR(carleson_sum(moved), s, 1e-12);
  }
}

TEST(Carleson, EmptySetRejected) {
  const std::vector<double> none;
  EXPECT_THROW(carleson_sum(none), ArgumentError);
}

TEST(Grid, FftMatchesDirectEvaluation) {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> nd;
  std::vector<cplx> v(50);
  for (auto& x : v) x = {nd(rng), nd(rng)};
  const CoeffVector c = CoeffVector::from_values(-20, v);
  for (double shift : {0.0, 0.5}) {
    const auto a = evaluate_on_grid_direct(c, 128, shift);
    const auto b = evaluate_on_grid_fft(c, 128, shift);
    for (std::size_t j = 0; j < a.size(); ++j) EXPECT_NEAR(std::abs(a[j] - b[j]), 0.0, 1e-11);
    const auto back = coefficients_from_grid(b, -20, 29, shift);
    for (Index n = -20; n <= 29; ++n) EXPECT_NEAR(std::abs(back[static_cast<std::size_t>(n + 20)] - c.at(n)), 0.0, 1e-12);
  }
}
