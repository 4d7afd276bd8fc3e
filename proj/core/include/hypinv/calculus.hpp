#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hypinv/common.hpp"
#include "hypinv/inner.hpp"
#include "hypinv/series.hpp"
#include "hypinv/shifts.hpp"
#include "hypinv/weights.hpp"

namespace hypinv {

struct AnalyticFn {
  CoeffVector coeffs;
  // Sum of |coefficients|; set only when the coefficient tail is closed.
  std::optional<double> a_plus_norm;

  static AnalyticFn from(CoeffVector c);
};

struct ApplyResult {
  Vector y;
  double tail_bound = 0.0;
  bool inconclusive = false;
  std::vector<double> step_norms;
};

// sum_{n<=N} phi^(n) T^n x, with tail bound sum_{n>N} |phi^(n)| sup_k ||T^k x||.
ApplyResult apply_function(const AnalyticFn& phi, const TruncatedOperator& T, const Vector& x, Index N);

// (phi * f)^(n) = phi^(n) f^(-n) for n >= 0.
AnalyticFn convolve(const AnalyticFn& phi, const CoeffVector& f);

struct SeriesVector {
  ConditionStatus gate;
  Vector u;
  double tail_bound = 0.0;
  // |c_n| ||T*^n u0|| for n = 0..N.
  std::vector<double> summands;
  std::vector<double> step_norms;
  Index cutoff = 0;
};

// u = sum_{n<=N} c_n T*^n u0 where c are Taylor coefficients of 1/theta (possibly rotated).
// On a Diverged gate the vector is left empty.
SeriesVector series_adjoint_vector(const CoeffVector& inv_coeffs, const TruncatedOperator& T, const Vector& u0,
                                   Index N, const GateOptions& opts = {});
SeriesVector series_adjoint_vector(const InnerFn& theta, const TruncatedOperator& T, const Vector& u0, Index N,
                                   const GateOptions& opts = {});

// theta(T*) x as the finite sum over the nilpotent section (degree < dim).
Vector apply_inner_adjoint(const CoeffVector& theta_coeffs, const TruncatedOperator& T, const Vector& x);

struct IdentityCheck {
  double residual = 0.0;
  double relative_residual = 0.0;
  SeriesVector series;
};

// ||theta(T*) u - u0|| with u from series_adjoint_vector.
IdentityCheck verify_theta_inverse_identity(const InnerFn& theta, const TruncatedOperator& T, const Vector& u0,
                                            Index N, const GateOptions& opts = {});

// Orthonormal coordinates g^(n)/omega(n) of X*g on the window.
Vector imbedding_adjoint(const WeightSequence& w, const CoeffVector& g, TruncationWindow window);

struct WitnessPair {
  cplx xi;
  Vector u_xi;
  Vector v_xi;
  // ||theta_xi(T*)(u_xi - v_xi)||.
  double residual = 0.0;
  double u_residual = 0.0;
  double v_residual = 0.0;
  // Series tail of u_xi plus the l2 mass of theta coefficients beyond the stored window.
  double tail_bound = 0.0;
  double truncation_defect = 0.0;
  double diff_norm = 0.0;
  double u_norm = 0.0;
  double v_norm = 0.0;
  ConditionStatus gate;
};

// T must be a bilateral section carrying its weight; Xadj_g is X*g in T's orthonormal coordinates.
WitnessPair witness_pair(const InnerFn& theta, const TruncatedOperator& T, const Vector& Xadj_g, cplx xi, Index N,
                         const GateOptions& opts = {});

// Recomputes the residual of a stored pair.
double witness_residual(const InnerFn& theta, const TruncatedOperator& T, const Vector& Xadj_g, const WitnessPair& p);

// (phi)_k(z) = sum_{n >= k+1} phi^(n) z^{n-k-1}.
AnalyticFn tail_operator(const AnalyticFn& phi, Index k);

struct TailShadowReport {
  std::vector<Index> ks;
  // ratios[i][j]: polynomial i, k = ks[j].
  std::vector<std::vector<double>> ratios;
  std::vector<double> max_ratio_per_k;
  double fitted_C = 0.0;
  bool all_within = false;
  // C fitted on the first half of the battery, checked on the second half.
  double holdout_C = 0.0;
  bool holdout_within = false;
  std::size_t grid_points_min = 512;
};

// Sup-norm ratios ||(phi)_k|| / ||phi|| over a seeded battery of random polynomials.
TailShadowReport tail_sup_norm_probe(std::size_t count, Index max_degree, std::span<const Index> ks,
                                     std::uint64_t seed);

}  // namespace hypinv
