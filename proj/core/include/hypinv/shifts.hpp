#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hypinv/common.hpp"
#include "hypinv/weights.hpp"

namespace hypinv {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using SparseMatrix = Eigen::SparseMatrix<cplx>;

struct TruncationWindow {
  Index lo = 0;
  Index hi = 0;

  TruncationWindow() = default;
  TruncationWindow(Index lo_, Index hi_);

  Index size() const { return hi - lo + 1; }
  Index position(Index n) const { return n - lo; }
  bool contains(Index n) const { return n >= lo && n <= hi; }
};

// Finite section of an operator in the orthonormal basis e_n = delta_n / omega(n), rows and
// columns indexed by window.lo..window.hi.
class TruncatedOperator {
 public:
  TruncatedOperator(TruncationWindow window, Matrix matrix, std::string label,
                    std::shared_ptr<const WeightSequence> weight = nullptr);

  const TruncationWindow& window() const { return window_; }
  const Matrix& matrix() const { return matrix_; }
  const SparseMatrix& sparse() const { return *sparse_; }
  const std::string& label() const { return label_; }
  const std::shared_ptr<const WeightSequence>& weight() const { return weight_; }
  Index dim() const { return window_.size(); }

  // Coefficient of e_{hi+1} in T e_hi, dropped by the section.
  cplx link_above() const { return link_above_; }
  // Coefficient of e_lo in T e_{lo-1}, dropped by the section.
  cplx link_below() const { return link_below_; }
  bool is_adjoint() const { return adjoint_; }

  TruncatedOperator with_links(cplx above, cplx below) const;
  TruncatedOperator adjoint() const;

  Vector apply(const Vector& x) const { return *sparse_ * x; }

  // The section extended by the row that receives the mass leaving the window:
  // e_{hi+1} for a forward operator, e_{lo-1} for an adjoint.
  Matrix outflow_section() const;

 private:
  TruncationWindow window_;
  Matrix matrix_;
  std::shared_ptr<const SparseMatrix> sparse_;
  std::string label_;
  std::shared_ptr<const WeightSequence> weight_;
  cplx link_above_{0.0, 0.0};
  cplx link_below_{0.0, 0.0};
  bool adjoint_ = false;
};

// Entry (n, n-1) = omega(n)/omega(n-1) for lo < n <= hi.
TruncatedOperator build_bilateral(const WeightSequence& w, TruncationWindow window);
// Unilateral shift on [0, hi]; entries v(n)/v(n-1).
TruncatedOperator build_unilateral_plus(const WeightSequence& v, TruncationWindow window);
// Compression to [lo, -1]; e_{-1} is sent to 0.
TruncatedOperator build_unilateral_minus(const WeightSequence& w, TruncationWindow window);

struct PowerApplyResult {
  Vector x;
  // Norms of x, T*x, ..., T*^n x.
  std::vector<double> step_norms;
};

PowerApplyResult adjoint_power_apply(const TruncatedOperator& T, Index n, const Vector& x);

// Largest singular value by power iteration on T^H T.
double operator_norm(const TruncatedOperator& T, double rel_tol = 1e-13, int max_iter = 5000);

double min_singular_value(const Matrix& A);

struct ResolventSample {
  cplx lambda;
  // 1/sigma_min of the square section; infinity when singular.
  double resolvent_norm = 0.0;
  bool singular = false;
  // 1/sigma_min of the outflow-preserving section.
  double outflow_resolvent_norm = 0.0;
  bool truncation_artifact = false;
};

struct SpectrumReport {
  std::vector<ResolventSample> samples;
  std::string caveat;
};

SpectrumReport spectrum_probe(const TruncatedOperator& T, std::span<const double> rays, std::span<const double> radii);

}  // namespace hypinv
