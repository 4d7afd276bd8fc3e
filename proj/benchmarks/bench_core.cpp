#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "hypinv/blockops.hpp"
#include "hypinv/calculus.hpp"
#include "hypinv/certify.hpp"
#include "hypinv/inner.hpp"
#include "hypinv/shifts.hpp"
#include "hypinv/weights.hpp"

using namespace hypinv;

static void BM_InverseCoefficients(benchmark::State& state) {
  const Index N = state.range(0);
  for (auto _ : state) {
    // Fresh function each round so the coefficient cache does not hide the recursion.
    const InnerFn theta(SingularMeasure::single(1.0));
    benchmark::DoNotOptimize(theta.inv_theta_coeffs(N).values.data());
  }
  state.SetComplexityN(N);
}
BENCHMARK(BM_InverseCoefficients)->RangeMultiplier(2)->Range(256, 4096)->Complexity(benchmark::oNSquared)->Unit(benchmark::kMillisecond);

static void BM_ReciprocalIdentity(benchmark::State& state) {
  const Index N = state.range(0);
  const InnerFn theta(SingularMeasure::single(1.0));
  const CoeffVector& a = theta.theta_coeffs(N);
  const CoeffVector& b = theta.inv_theta_coeffs(N);
  for (auto _ : state) benchmark::DoNotOptimize(verify_reciprocal_identity(a, b, N).max_relative_residual);
}
BENCHMARK(BM_ReciprocalIdentity)->Arg(2000)->Unit(benchmark::kMillisecond);

static void BM_WitnessPair(benchmark::State& state) {
  const Index N = state.range(0);
  const WeightSequence w = presets::exp_sublinear(0.5);
  const InnerFn theta(SingularMeasure::single(0.1));
  const TruncationWindow window(-N - 1, 64);
  const TruncatedOperator T = build_bilateral(w, window);
  const Vector Xg = imbedding_adjoint(w, CoeffVector::from_values(-1, {cplx{1.0, 0.0}}), window);
  const cplx xi = std::polar(1.0, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(witness_pair(theta, T, Xg, xi, N).residual);
}
BENCHMARK(BM_WitnessPair)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

static void BM_PowerProbe(benchmark::State& state) {
  const Index W = state.range(0);
  const WeightSequence w = presets::exp_sublinear(0.5);
  const std::vector<Index> windows{W};
  for (auto _ : state) {
    const PowerBoundReport r = power_bound_probe([&](Index win) { return build_bergman_corner(0.0, w, win, 1.0); }, 200, windows);
    benchmark::DoNotOptimize(r.windows.front().sup);
  }
}
BENCHMARK(BM_PowerProbe)->Arg(300)->Arg(600)->Unit(benchmark::kMillisecond);

static void BM_EsterleGate(benchmark::State& state) {
  const WeightSequence w = presets::exp_sublinear(0.5);
  const InnerFn theta(SingularMeasure::single(0.1));
  const Index N = state.range(0);
  theta.inv_theta_coeffs(N);
  for (auto _ : state) benchmark::DoNotOptimize(cond_esterle(w, theta, N).verdict);
}
BENCHMARK(BM_EsterleGate)->Arg(4000)->Unit(benchmark::kMillisecond);

static void BM_TailShadow(benchmark::State& state) {
  const std::vector<Index> ks{0, 1, 3, 7, 15, 31};
  for (auto _ : state) benchmark::DoNotOptimize(tail_sup_norm_probe(20, 512, ks, 1).fitted_C);
}
BENCHMARK(BM_TailShadow)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
