#pragma once

#include <span>
#include <vector>

#include "hypinv/common.hpp"
#include "hypinv/inner.hpp"

namespace hypinv {

// Values of sum_n c_n e^{i n t_j} at t_j = 2 pi (j + shift) / M, j = 0..M-1.
std::vector<cplx> evaluate_on_grid_direct(const CoeffVector& c, std::size_t M, double shift = 0.0);
std::vector<cplx> evaluate_on_grid_fft(const CoeffVector& c, std::size_t M, double shift = 0.0);

// Fourier coefficients n = lo..hi of grid samples taken at the same points (aliases folded in).
std::vector<cplx> coefficients_from_grid(std::span<const cplx> values, Index lo, Index hi, double shift = 0.0);

// Smallest power of two >= max(min_points, 4 * span).
std::size_t grid_size_for(Index span, std::size_t min_points = 512);

// Maximum modulus on the boundary grid sized by grid_size_for.
double sup_norm_on_grid(const CoeffVector& c, std::size_t min_points = 512);

}  // namespace hypinv
