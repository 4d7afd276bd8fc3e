#include "hypinv/shifts.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <limits>

namespace hypinv {

TruncationWindow::TruncationWindow(Index lo_, Index hi_) : lo(lo_), hi(hi_) {
  if (!(lo < hi)) throw ArgumentError("truncation window needs lo < hi");
}

TruncatedOperator::TruncatedOperator(TruncationWindow window, Matrix matrix, std::string label,
                                     std::shared_ptr<const WeightSequence> weight)
    : window_(window), matrix_(std::move(matrix)), label_(std::move(label)), weight_(std::move(weight)) {
  if (matrix_.rows() != window_.size() || matrix_.cols() != window_.size()) {
    throw ArgumentError("truncated operator: matrix dimension differs from window length");
  }
  sparse_ = std::make_shared<const SparseMatrix>(matrix_.sparseView());
}

TruncatedOperator TruncatedOperator::with_links(cplx above, cplx below) const {
  TruncatedOperator copy = *this;
  copy.link_above_ = above;
  copy.link_below_ = below;
  return copy;
}

TruncatedOperator TruncatedOperator::adjoint() const {
  std::string label = label_;
  if (label.size() >= 1 && label.back() == '*') {
    label.pop_back();
  } else {
    label += "*";
  }
  TruncatedOperator out(window_, matrix_.adjoint(), std::move(label), weight_);
  out.link_above_ = link_above_;
  out.link_below_ = link_below_;
  out.adjoint_ = !adjoint_;
  return out;
}

Matrix TruncatedOperator::outflow_section() const {
  const Index d = dim();
  Matrix out = Matrix::Zero(d + 1, d);
  if (!adjoint_) {
    out.topRows(d) = matrix_;
    out(d, d - 1) = link_above_;
  } else {
    out.bottomRows(d) = matrix_;
    out(0, 0) = std::conj(link_below_);
  }
  return out;
}

namespace {

TruncatedOperator weighted_band(const WeightSequence& w, TruncationWindow window, std::string label,
                                bool keep_top_link) {
  const Index d = window.size();
  Matrix m = Matrix::Zero(d, d);
  for (Index n = window.lo + 1; n <= window.hi; ++n) {
    m(window.position(n), window.position(n - 1)) = std::exp(w.log_at(n) - w.log_at(n - 1));
  }
  const cplx above = keep_top_link ? cplx{std::exp(w.log_at(window.hi + 1) - w.log_at(window.hi)), 0.0} : cplx{};
  const cplx below{std::exp(w.log_at(window.lo) - w.log_at(window.lo - 1)), 0.0};
  return TruncatedOperator(window, std::move(m), std::move(label), std::make_shared<const WeightSequence>(w))
      .with_links(above, below);
}

}  // namespace

TruncatedOperator build_bilateral(const WeightSequence& w, TruncationWindow window) {
  return weighted_band(w, window, "S_omega", true);
}

TruncatedOperator build_unilateral_plus(const WeightSequence& v, TruncationWindow window) {
  if (window.lo != 0) throw ArgumentError("build_unilateral_plus: window must start at 0");
  const Index d = window.size();
  Matrix m = Matrix::Zero(d, d);
  for (Index n = 1; n <= window.hi; ++n) m(n, n - 1) = std::exp(v.log_at(n) - v.log_at(n - 1));
  const cplx above{std::exp(v.log_at(window.hi + 1) - v.log_at(window.hi)), 0.0};
  return TruncatedOperator(window, std::move(m), "S_v+", std::make_shared<const WeightSequence>(v))
      .with_links(above, cplx{});
}

TruncatedOperator build_unilateral_minus(const WeightSequence& w, TruncationWindow window) {
  if (window.hi != -1) throw ArgumentError("build_unilateral_minus: window must end at -1");
  auto op = weighted_band(w, window, "S_omega-", false);
  return op;
}

PowerApplyResult adjoint_power_apply(const TruncatedOperator& T, Index n, const Vector& x) {
  if (n < 0) throw ArgumentError("adjoint_power_apply: n must be >= 0");
  if (x.size() != T.dim()) throw ArgumentError("adjoint_power_apply: vector length differs from window");
  const SparseMatrix adj = T.sparse().adjoint();
  PowerApplyResult r;
  r.x = x;
  r.step_norms.reserve(static_cast<std::size_t>(n + 1));
  r.step_norms.push_back(r.x.norm());
  for (Index k = 0; k < n; ++k) {
    r.x = adj * r.x;
    r.step_norms.push_back(r.x.norm());
  }
  return r;
}

double operator_norm(const TruncatedOperator& T, double rel_tol, int max_iter) {
  const Index d = T.dim();
  Vector v(d);
  for (Index i = 0; i < d; ++i) v(i) = cplx{1.0 + 1e-3 * static_cast<double>(i % 7), 0.0};
  v.normalize();
  const SparseMatrix& A = T.sparse();
  const SparseMatrix AH = A.adjoint();
  double prev = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    const Vector Av = A * v;
    const double est = Av.norm();
    if (est == 0.0) return 0.0;
    if (it > 0 && std::abs(est - prev) <= rel_tol * est) return est;
    prev = est;
    v = AH * Av;
    v.normalize();
  }
  return prev;
}

double min_singular_value(const Matrix& A) {
  Eigen::BDCSVD<Matrix> svd(A);
  return svd.singularValues().minCoeff();
}

SpectrumReport spectrum_probe(const TruncatedOperator& T, std::span<const double> rays, std::span<const double> radii) {
  for (double r : radii) {
    if (!(r > 0.0) || std::abs(r - 1.0) < 1e-12) throw ArgumentError("spectrum_probe: radii must be positive and differ from 1");
  }
  SpectrumReport rep;
  rep.caveat = "finite sections only; the square section of a shift is nilpotent and singular at 0";
  const Index d = T.dim();
  const double scale = std::max(1.0, T.matrix().cwiseAbs().maxCoeff());
  const Matrix out = T.outflow_section();
  for (double phi : rays) {
    for (double r : radii) {
      ResolventSample s;
      s.lambda = std::polar(r, phi);
      Matrix sq = T.matrix();
      sq.diagonal().array() -= s.lambda;
      const double smin = min_singular_value(sq);
      s.singular = smin <= 1e-14 * scale;
      s.resolvent_norm = s.singular ? std::numeric_limits<double>::infinity() : 1.0 / smin;
      Matrix rect = out;
      const Index shift = T.is_adjoint() ? 1 : 0;
      for (Index i = 0; i < d; ++i) rect(i + shift, i) -= s.lambda;
      const double smin_out = min_singular_value(rect);
      s.outflow_resolvent_norm = smin_out > 0.0 ? 1.0 / smin_out : std::numeric_limits<double>::infinity();
      s.truncation_artifact =
          s.singular || std::abs(s.resolvent_norm - s.outflow_resolvent_norm) > 0.1 * s.outflow_resolvent_norm;
      rep.samples.push_back(s);
    }
  }
  return rep;
}

}  // namespace hypinv
