#include "hypinv/blockops.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "hypinv/calculus.hpp"
#include "hypinv/certify.hpp"

namespace hypinv {

BergmanSpec::BergmanSpec(double a) : alpha(a) {
  if (!(a > -1.0) || a > 0.0) throw ArgumentError("Bergman weight needs alpha in (-1, 0]");
}

double BergmanSpec::weight_sq(Index n) const {
  if (n < 0) throw ArgumentError("Bergman weight is defined for n >= 0");
  return 1.0 / std::pow(static_cast<double>(n + 1), alpha + 1.0);
}

WeightSequence BergmanSpec::weight() const {
  const double e = 0.5 * (alpha + 1.0);
  return WeightSequence(
      WeightKind::Preset, "bergman",
      [e](Index n) {
        if (n < 0) throw ArgumentError("Bergman weight is defined for n >= 0");
        return -e * std::log(static_cast<double>(n + 1));
      },
      {{"alpha", alpha}});
}

namespace {

BlockOperator assemble(TruncatedOperator upper, TruncatedOperator lower, Matrix coupling, BlockKind kind,
                       std::string note, const std::string& label) {
  const Index L = lower.dim();
  const Index U = upper.dim();
  if (coupling.rows() != U || coupling.cols() != L) throw ArgumentError("block assembly: coupling has the wrong shape");
  Matrix m = Matrix::Zero(L + U, L + U);
  m.topLeftCorner(L, L) = lower.matrix();
  m.bottomRightCorner(U, U) = upper.matrix();
  m.bottomLeftCorner(U, L) = coupling;
  TruncatedOperator assembled =
      TruncatedOperator(TruncationWindow(lower.window().lo, upper.window().hi), std::move(m), label)
          .with_links(upper.link_above(), lower.link_below());
  return BlockOperator{std::move(upper), std::move(lower), std::move(coupling), std::move(assembled), kind,
                       std::move(note), 1.0};
}

Vector embed_lower(const BlockOperator& B, const Vector& x) {
  if (x.size() != B.lower_dim()) throw ArgumentError("vector length differs from the lower block");
  Vector z = Vector::Zero(B.assembled.dim());
  z.head(B.lower_dim()) = x;
  return z;
}

Vector upper_part(const BlockOperator& B, const Vector& z) { return z.tail(B.upper_dim()); }

void record(IdentityReport& r, const Vector& lhs, const Vector& rhs) {
  const double e = (lhs - rhs).cwiseAbs().maxCoeff();
  r.errors.push_back(e);
  r.max_abs_error = std::max(r.max_abs_error, e);
  r.scale = std::max(r.scale, rhs.cwiseAbs().maxCoeff());
}

}  // namespace

BlockOperator build_h2_coupling(const TruncatedOperator& T0, const Vector& X0adj_chi, Index h2_size) {
  if (T0.window().hi != -1) throw ArgumentError("build_h2_coupling: T0 must live on a window ending at -1");
  if (X0adj_chi.size() != T0.dim()) throw ArgumentError("build_h2_coupling: coupling vector length differs from T0");
  if (h2_size < 2) throw ArgumentError("build_h2_coupling: H^2 section needs at least two degrees");
  TruncatedOperator S = build_unilateral_plus(presets::constant(), TruncationWindow(0, h2_size - 1));
  Matrix coupling = Matrix::Zero(h2_size, T0.dim());
  coupling.row(0) = X0adj_chi.adjoint();
  return assemble(std::move(S), T0, std::move(coupling), BlockKind::RankOneCoupling,
                  "rank-one coupling (., X0* chi^-1) chi^0", "T_prop");
}

Matrix natural_imbedding_columns(const WeightSequence& w, TruncationWindow window, Index count) {
  Matrix cols = Matrix::Zero(window.size(), count);
  for (Index m = 0; m < count; ++m) {
    const CoeffVector chi = CoeffVector::from_values(-1 - m, {cplx{1.0, 0.0}});
    if (window.contains(-1 - m)) cols.col(m) = imbedding_adjoint(w, chi, window);
  }
  return cols;
}

IdentityReport verify_power_projection(const BlockOperator& B, const Matrix& X0adj_cols, const Vector& x,
                                       Index n_max) {
  if (n_max < 1 || n_max >= B.upper_dim() || X0adj_cols.cols() < n_max || X0adj_cols.rows() != B.lower_dim()) {
    throw ArgumentError("verify_power_projection: n_max must fit the H^2 section and the supplied columns");
  }
  IdentityReport r;
  Vector z = embed_lower(B, x);
  for (Index n = 1; n <= n_max; ++n) {
    z = B.assembled.apply(z);
    Vector rhs = Vector::Zero(B.upper_dim());
    for (Index k = 0; k < n; ++k) rhs(k) = X0adj_cols.col(n - 1 - k).dot(x);
    record(r, upper_part(B, z), rhs);
  }
  return r;
}

IdentityReport verify_polynomial_projection(const BlockOperator& B, const Matrix& X0adj_cols, const Vector& x,
                                            std::span<const cplx> phi) {
  const Index deg = static_cast<Index>(phi.size()) - 1;
  if (deg < 0 || deg >= B.upper_dim() || X0adj_cols.cols() < deg || X0adj_cols.rows() != B.lower_dim()) {
    throw ArgumentError("verify_polynomial_projection: degree must fit the H^2 section and the supplied columns");
  }
  IdentityReport r;
  Vector z = embed_lower(B, x);
  Vector lhs = phi[0] * z;
  for (Index n = 1; n <= deg; ++n) {
    z = B.assembled.apply(z);
    lhs += phi[static_cast<std::size_t>(n)] * z;
  }
  Vector rhs = Vector::Zero(B.upper_dim());
  for (Index k = 0; k < deg; ++k) {
    for (Index n = k + 1; n <= deg; ++n) rhs(k) += phi[static_cast<std::size_t>(n)] * X0adj_cols.col(n - k - 1).dot(x);
  }
  record(r, upper_part(B, lhs), rhs);
  return r;
}

BlockOperator build_bergman_corner(double alpha, const WeightSequence& w, Index W, double coupling_scale) {
  if (W < 16) throw ArgumentError("build_bergman_corner: window must be at least 16");
  const BergmanSpec spec(alpha);
  const DissymmetricReport dis = check_dissymmetric(w, IndexRange{-std::max<Index>(W, 64), 64});
  if (!dis.pass) throw HypothesisGateError("dissymmetric", dis.failure);
  const LogConcaveReport sub = check_log_concave_submultiplicative(w, IndexRange{-W, W});
  if (!sub.submultiplicative_sampled) throw HypothesisGateError("submultiplicative", sub.failure);
  const ConditionStatus lw = log_weight_square_sum(w, IndexRange{2, Index{1} << 14});
  if (lw.verdict != Verdict::Converged) {
    throw HypothesisGateError("sum (log n / omega(-n))^2 converges", "gate verdict " + to_string(lw.verdict));
  }
  TruncatedOperator T1 = build_unilateral_plus(spec.weight(), TruncationWindow(0, W));
  TruncatedOperator S = build_unilateral_minus(w, TruncationWindow(-W, -1));
  Matrix A = Matrix::Zero(T1.dim(), S.dim());
  A(0, S.dim() - 1) = coupling_scale * std::exp(-w.log_at(-1));
  BlockOperator B = assemble(std::move(T1), std::move(S), std::move(A), BlockKind::BergmanCorner,
                             "stand-in model: Bergman shift as T1, x0 = first basis vector", "T_corner");
  B.coupling_scale = coupling_scale;
  return B;
}

IdentityReport verify_corner_expansion(const BlockOperator& B, const WeightSequence& w, const Vector& u,
                                       std::span<const cplx> phi) {
  const Index deg = static_cast<Index>(phi.size()) - 1;
  if (deg < 0 || deg >= B.upper_dim() || deg > B.lower_dim()) {
    throw ArgumentError("verify_corner_expansion: degree must fit both blocks");
  }
  IdentityReport r;
  Vector z = embed_lower(B, u);
  Vector lhs = phi[0] * z;
  for (Index n = 1; n <= deg; ++n) {
    z = B.assembled.apply(z);
    lhs += phi[static_cast<std::size_t>(n)] * z;
  }
  const AnalyticFn f = AnalyticFn::from(CoeffVector::from_values(0, std::vector<cplx>(phi.begin(), phi.end()), TailFlag::Closed));
  Vector x0 = Vector::Zero(B.upper_dim());
  x0(0) = 1.0;
  Vector rhs = Vector::Zero(B.upper_dim());
  const TruncationWindow lw = B.lower_right.window();
  for (Index k = 0; k < deg; ++k) {
    const Index m = -1 - k;
    const cplx seq_value = u(lw.position(m)) * std::exp(-w.log_at(m));
    if (seq_value == cplx{0.0, 0.0}) continue;
    const AnalyticFn tk = tail_operator(f, k);
    rhs += seq_value * apply_function(tk, B.upper_left, x0, tk.coeffs.last()).y;
  }
  rhs *= B.coupling_scale;
  record(r, upper_part(B, lhs), rhs);
  return r;
}

double sparse_power_norm(const SparseMatrix& P) {
  const SparseMatrix G = SparseMatrix(P.adjoint()) * P;
  double top = 0.0;
  for (int k = 0; k < G.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(G, k); it; ++it) {
      if (it.row() != it.col()) {
        if (it.value() != cplx{0.0, 0.0}) {
          const Matrix dense(P);
          Eigen::BDCSVD<Matrix> svd(dense);
          return svd.singularValues()(0);
        }
      } else {
        top = std::max(top, it.value().real());
      }
    }
  }
  return std::sqrt(top);
}

PowerBoundReport power_bound_probe(const std::function<BlockOperator(Index)>& build, Index n_max,
                                   std::span<const Index> windows) {
  if (n_max < 1) throw ArgumentError("power_bound_probe: n_max must be >= 1");
  if (windows.empty()) throw ArgumentError("power_bound_probe: no windows");
  PowerBoundReport rep;
  for (Index W : windows) {
    const BlockOperator B = build(W);
    const SparseMatrix& T = B.assembled.sparse();
    SparseMatrix P(T.rows(), T.cols());
    P.setIdentity();
    PowerBoundWindow pw;
    pw.window = W;
    pw.norms.push_back(1.0);
    pw.sup = 1.0;
    for (Index n = 1; n <= n_max; ++n) {
      P = (T * P).pruned();
      const double nrm = sparse_power_norm(P);
      pw.norms.push_back(nrm);
      if (nrm > pw.sup_positive) {
        pw.sup_positive = nrm;
        pw.argmax = n;
      }
    }
    pw.sup = std::max(1.0, pw.sup_positive);
    rep.windows.push_back(std::move(pw));
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (const auto& pw : rep.windows) {
    lo = std::min(lo, pw.sup_positive);
    hi = std::max(hi, pw.sup_positive);
  }
  rep.relative_spread = lo > 0.0 ? (hi - lo) / lo : std::numeric_limits<double>::infinity();
  return rep;
}

EigenProbeReport eigenvalue_absence_probe(const TruncatedOperator& T, std::span<const cplx> lambdas) {
  if (T.is_adjoint()) throw ArgumentError("eigenvalue_absence_probe: pass the forward operator");
  EigenProbeReport rep;
  rep.caveat =
      "square sections of shifts are nilpotent, so their small singular values are truncation effects; "
      "the outflow section keeps the row that receives the mass leaving the window";
  const Index d = T.dim();
  const Matrix out = T.outflow_section();
  rep.min_outflow = std::numeric_limits<double>::infinity();
  for (const cplx lambda : lambdas) {
    if (!(std::abs(lambda) < 1.0)) throw ArgumentError("eigenvalue_absence_probe: lambda must lie in the open disc");
    EigenSample s;
    s.lambda = lambda;
    Matrix sq = T.matrix();
    sq.diagonal().array() -= lambda;
    s.smin_square = min_singular_value(sq);
    Matrix rect = out;
    for (Index i = 0; i < d; ++i) rect(i, i) -= lambda;
    s.smin_outflow = min_singular_value(rect);
    s.truncation_artifact = s.smin_square <= 0.1 * s.smin_outflow;
    rep.min_outflow = std::min(rep.min_outflow, s.smin_outflow);
    if (!rep.samples.empty()) {
      const EigenSample& p = rep.samples.back();
      const double step = std::abs(lambda - p.lambda);
      if (std::abs(s.smin_outflow - p.smin_outflow) > step * (1.0 + 1e-9) + 1e-12) rep.lipschitz_ok = false;
    }
    rep.samples.push_back(s);
  }
  return rep;
}

EigenProbeReport eigenvalue_absence_probe(const BlockOperator& B, std::span<const cplx> lambdas) {
  return eigenvalue_absence_probe(B.assembled, lambdas);
}

double bergman_moment(Index n, double alpha) {
  if (n < 0) throw ArgumentError("bergman_moment: n must be >= 0");
  if (!(alpha > -1.0)) throw ArgumentError("bergman_moment: alpha must exceed -1");
  // B(n+1, 1) = 1/(n+1) exactly.
  if (alpha == 0.0) return 1.0 / static_cast<double>(n + 1);
  const double x = static_cast<double>(n) + 1.0;
  return std::exp(std::lgamma(x) + std::lgamma(alpha + 1.0) - std::lgamma(x + alpha + 1.0));
}

BergmanRatio bergman_norm_equivalence(double alpha, std::span<const cplx> f) {
  const BergmanSpec spec(alpha);
  BergmanRatio r;
  for (std::size_t n = 0; n < f.size(); ++n) {
    const double a = std::norm(f[n]);
    if (a == 0.0) continue;
    r.bergman_sq += a * bergman_moment(static_cast<Index>(n), alpha);
    r.weighted_sq += a * spec.weight_sq(static_cast<Index>(n));
  }
  if (!(r.weighted_sq > 0.0)) throw ArgumentError("bergman_norm_equivalence: f must not vanish");
  r.ratio = r.bergman_sq / r.weighted_sq;
  r.convention = "dm_2 normalized to unit mass on the disc, density (1-|z|^2)^alpha without the (alpha+1) factor";
  return r;
}

BergmanEnvelope bergman_envelope(double alpha, std::size_t count, Index degree, std::uint64_t seed) {
  if (count == 0 || degree < 0) throw ArgumentError("bergman_envelope: need a battery and degree >= 0");
  BergmanEnvelope env;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  env.c1 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<cplx> f(static_cast<std::size_t>(degree + 1));
    for (auto& v : f) v = cplx{normal(rng), normal(rng)};
    const double r = bergman_norm_equivalence(alpha, f).ratio;
    env.ratios.push_back(r);
    env.c1 = std::min(env.c1, r);
    env.c2 = std::max(env.c2, r);
  }
  return env;
}

}  // namespace hypinv
