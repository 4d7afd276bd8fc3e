#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "hypinv/common.hpp"

namespace hypinv {

struct Atom {
  double angle = 0.0;  // radians in [0, 2 pi)
  double mass = 0.0;
};

class SingularMeasure {
 public:
  SingularMeasure() = default;
  explicit SingularMeasure(std::vector<Atom> atoms);

  static SingularMeasure single(double mass, double angle = 0.0);

  const std::vector<Atom>& atoms() const { return atoms_; }
  double total_mass() const { return total_mass_; }
  bool empty() const { return atoms_.empty(); }

 private:
  std::vector<Atom> atoms_;
  double total_mass_ = 0.0;
};

enum class TailFlag { Closed, Truncated };

// Coefficients c_n for n = offset .. offset + size - 1.
struct CoeffVector {
  Index offset = 0;
  std::vector<cplx> values;
  double ell1 = 0.0;
  double ell2 = 0.0;
  TailFlag tail = TailFlag::Truncated;
  // Set when the compensated error estimate of some coefficient exceeds 1e-9 relative.
  bool precision_flag = false;
  // First degree whose estimate crossed the threshold, or -1.
  Index reliable_degree = -1;

  static CoeffVector from_values(Index offset, std::vector<cplx> values, TailFlag tail = TailFlag::Truncated);

  void refresh_norms();
  cplx at(Index n) const;
  Index first() const { return offset; }
  Index last() const { return offset + static_cast<Index>(values.size()) - 1; }
  std::size_t size() const { return values.size(); }
};

class InnerFn {
 public:
  InnerFn() : InnerFn(SingularMeasure{}) {}
  explicit InnerFn(SingularMeasure measure);

  const SingularMeasure& measure() const { return measure_; }

  // theta(z) for |z| < 1.
  cplx operator()(cplx z) const;
  // theta(e^{it}); unimodular away from the atoms.
  cplx boundary(double t) const;

  // Cached, write-once per degree.
  const CoeffVector& theta_coeffs(Index N) const;
  const CoeffVector& inv_theta_coeffs(Index N) const;

 private:
  struct Cache {
    std::mutex mutex;
    std::map<Index, CoeffVector> theta;
    std::map<Index, CoeffVector> inv;
  };
  SingularMeasure measure_;
  std::shared_ptr<Cache> cache_;
};

cplx eval_theta(const InnerFn& f, cplx z);

CoeffVector coeffs_inv_theta(const InnerFn& f, Index N);
CoeffVector coeffs_theta(const InnerFn& f, Index N);

struct ReciprocalReport {
  cplx n0_value;
  double max_abs_residual = 0.0;
  // relative_residuals[n] for n = 0..N; entry 0 compares against 1.
  std::vector<double> relative_residuals;
  double max_relative_residual = 0.0;  // over 1 <= n <= N
};

ReciprocalReport verify_reciprocal_identity(const CoeffVector& theta, const CoeffVector& inv, Index N);

// phi_xi(z) = phi(xi z): coefficient n times xi^n.
CoeffVector rotate(const CoeffVector& c, cplx xi);
// phi~(z) = conj(phi(conj z)): conjugated coefficients.
CoeffVector tilde(const CoeffVector& c);
// theta_xi has the atoms rotated by conj(xi).
InnerFn rotate(const InnerFn& f, cplx xi);
// theta~ has the atom angles negated.
InnerFn tilde(const InnerFn& f);

// Sum of m(I) log m(I) over the complementary arcs of a finite set; m is normalized arc length.
double carleson_sum(std::span<const double> angles);

struct GrowthFit {
  bool skipped = false;
  double c = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
  Index from = 0;
  Index to = 0;
};

// Least-squares fit of log|c_n| = c sqrt(n) + d over the upper half of the coefficients.
GrowthFit growth_fit(const CoeffVector& coeffs);

}  // namespace hypinv
