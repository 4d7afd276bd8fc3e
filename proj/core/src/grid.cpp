#include "hypinv/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>

namespace hypinv {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

void run_fft(std::vector<cplx>& data, int sign) {
  const int n = static_cast<int>(data.size());
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft_1d(n, buf, buf, sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(plan);
}

std::size_t bin(Index n, std::size_t M) {
  const Index m = static_cast<Index>(M);
  Index r = n % m;
  if (r < 0) r += m;
  return static_cast<std::size_t>(r);
}

}  // namespace

std::vector<cplx> evaluate_on_grid_direct(const CoeffVector& c, std::size_t M, double shift) {
  std::vector<cplx> out(M);
  for (std::size_t j = 0; j < M; ++j) {
    const double t = kTwoPi * (static_cast<double>(j) + shift) / static_cast<double>(M);
    cplx s{0.0, 0.0};
    for (std::size_t i = 0; i < c.values.size(); ++i) {
      const double n = static_cast<double>(c.offset + static_cast<Index>(i));
      s += c.values[i] * std::polar(1.0, n * t);
    }
    out[j] = s;
  }
  return out;
}

std::vector<cplx> evaluate_on_grid_fft(const CoeffVector& c, std::size_t M, double shift) {
  if (M == 0) throw ArgumentError("grid size must be positive");
  std::vector<cplx> data(M, cplx{0.0, 0.0});
  for (std::size_t i = 0; i < c.values.size(); ++i) {
    const Index n = c.offset + static_cast<Index>(i);
    const double phase = kTwoPi * static_cast<double>(n) * shift / static_cast<double>(M);
    data[bin(n, M)] += c.values[i] * (shift == 0.0 ? cplx{1.0, 0.0} : std::polar(1.0, phase));
  }
  run_fft(data, FFTW_BACKWARD);
  return data;
}

std::vector<cplx> coefficients_from_grid(std::span<const cplx> values, Index lo, Index hi, double shift) {
  const std::size_t M = values.size();
  if (M == 0 || hi < lo) throw ArgumentError("coefficients_from_grid: bad arguments");
  std::vector<cplx> data(values.begin(), values.end());
  run_fft(data, FFTW_FORWARD);
  std::vector<cplx> out(static_cast<std::size_t>(hi - lo + 1));
  for (Index n = lo; n <= hi; ++n) {
    const double phase = -kTwoPi * static_cast<double>(n) * shift / static_cast<double>(M);
    cplx v = data[bin(n, M)] / static_cast<double>(M);
    if (shift != 0.0) v *= std::polar(1.0, phase);
    out[static_cast<std::size_t>(n - lo)] = v;
  }
  return out;
}

std::size_t grid_size_for(Index span, std::size_t min_points) {
  const std::size_t want = std::max<std::size_t>(min_points, static_cast<std::size_t>(4 * std::max<Index>(span, 1)));
  std::size_t m = 1;
  while (m < want) m <<= 1;
  return m;
}

double sup_norm_on_grid(const CoeffVector& c, std::size_t min_points) {
  const std::size_t M = grid_size_for(static_cast<Index>(c.size()), min_points);
  const auto v = evaluate_on_grid_fft(c, M);
  double m = 0.0;
  for (const auto& x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace hypinv
