#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hypinv/common.hpp"
#include "hypinv/shifts.hpp"
#include "hypinv/weights.hpp"

namespace hypinv {

// A construction hypothesis failed; clause() names it.
class HypothesisGateError : public std::runtime_error {
 public:
  HypothesisGateError(const std::string& clause, const std::string& detail)
      : std::runtime_error("hypothesis gate failed: " + clause + (detail.empty() ? "" : " (" + detail + ")")),
        clause_(clause) {}
  const std::string& clause() const noexcept { return clause_; }

 private:
  std::string clause_;
};

struct BergmanSpec {
  double alpha = 0.0;

  explicit BergmanSpec(double a);
  // v_alpha(n)^2 = 1 / (n+1)^{alpha+1}.
  double weight_sq(Index n) const;
  // log v_alpha on n >= 0.
  WeightSequence weight() const;
};

enum class BlockKind { RankOneCoupling, BergmanCorner };

// Upper space occupies indices >= 0 of the assembled window, the lower space indices < 0.
// Positions in the assembled matrix: lower block first, then upper.
struct BlockOperator {
  TruncatedOperator upper_left;
  TruncatedOperator lower_right;
  // upper_dim x lower_dim.
  Matrix coupling;
  TruncatedOperator assembled;
  BlockKind kind;
  std::string model_note;
  // Multiplier of the rank-one coupling in the Bergman corner build.
  double coupling_scale = 1.0;

  Index lower_dim() const { return lower_right.dim(); }
  Index upper_dim() const { return upper_left.dim(); }
};

// [[S, (., X0* chi^{-1}) chi^0], [0, T0]] with S the unweighted shift on degrees 0..h2_size-1.
// T0 must live on a window ending at -1.
BlockOperator build_h2_coupling(const TruncatedOperator& T0, const Vector& X0adj_chi, Index h2_size);

// Columns m = 0..count-1 hold X0* chi^{-1-m} for the natural imbedding of l^2_{omega-} into H^2_-.
Matrix natural_imbedding_columns(const WeightSequence& w, TruncationWindow window, Index count);

struct IdentityReport {
  double max_abs_error = 0.0;
  double scale = 0.0;
  std::vector<double> errors;
};

// P_{H^2} T^n x against sum_{k<n} (X0 x, chi^{k-n}) chi^k for n = 1..n_max.
IdentityReport verify_power_projection(const BlockOperator& B, const Matrix& X0adj_cols, const Vector& x,
                                       Index n_max);
// P_{H^2} phi(T) x against P_+ (phi . X0 x).
IdentityReport verify_polynomial_projection(const BlockOperator& B, const Matrix& X0adj_cols, const Vector& x,
                                            std::span<const cplx> phi);

// T = [[T1, A], [0, S_{omega-}]] with T1 the Bergman shift on [0, W], S_{omega-} on [-W, -1],
// A u = coupling_scale u(-1) x0 and x0 the first basis vector of the Bergman space.
BlockOperator build_bergman_corner(double alpha, const WeightSequence& w, Index W, double coupling_scale = 1.0);

// Upper corner of phi(T) applied to u against sum_k u(-1-k) (phi)_k(T1) x0.
IdentityReport verify_corner_expansion(const BlockOperator& B, const WeightSequence& w, const Vector& u,
                                       std::span<const cplx> phi);

struct PowerBoundWindow {
  Index window = 0;
  // ||T^n|| for n = 0..n_max.
  std::vector<double> norms;
  double sup = 0.0;
  // sup over 1 <= n <= n_max.
  double sup_positive = 0.0;
  Index argmax = 0;
};

struct PowerBoundReport {
  std::vector<PowerBoundWindow> windows;
  // (max - min) / min of sup_positive across windows.
  double relative_spread = 0.0;
};

// Exact ||T^n|| of a sparse section: diagonal P^H P gives the norm directly, otherwise a dense SVD.
double sparse_power_norm(const SparseMatrix& P);

PowerBoundReport power_bound_probe(const std::function<BlockOperator(Index)>& build, Index n_max,
                                   std::span<const Index> windows);

struct EigenSample {
  cplx lambda;
  double smin_square = 0.0;
  double smin_outflow = 0.0;
  bool truncation_artifact = false;
};

struct EigenProbeReport {
  std::vector<EigenSample> samples;
  double min_outflow = 0.0;
  // |s(l1) - s(l2)| <= |l1 - l2| along consecutive grid points.
  bool lipschitz_ok = true;
  std::string caveat;
};

EigenProbeReport eigenvalue_absence_probe(const TruncatedOperator& T, std::span<const cplx> lambdas);
EigenProbeReport eigenvalue_absence_probe(const BlockOperator& B, std::span<const cplx> lambdas);

// int |z|^{2n} (1 - |z|^2)^alpha dm_2 = B(n+1, alpha+1) with m_2 normalized to mass 1 on the disc.
double bergman_moment(Index n, double alpha);

struct BergmanRatio {
  double bergman_sq = 0.0;
  double weighted_sq = 0.0;
  double ratio = 0.0;
  std::string convention;
};

BergmanRatio bergman_norm_equivalence(double alpha, std::span<const cplx> f);

struct BergmanEnvelope {
  double c1 = 0.0;
  double c2 = 0.0;
  std::vector<double> ratios;
};

// Ratios over a seeded battery of random polynomials of exact degree `degree`.
BergmanEnvelope bergman_envelope(double alpha, std::size_t count, Index degree, std::uint64_t seed);

}  // namespace hypinv
