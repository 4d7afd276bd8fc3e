#include "hypinv/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "hypinv/grid.hpp"

namespace hypinv {

AnalyticFn AnalyticFn::from(CoeffVector c) {
  if (c.offset != 0) throw ArgumentError("analytic function coefficients must start at degree 0");
  AnalyticFn f;
  f.coeffs = std::move(c);
  if (f.coeffs.tail == TailFlag::Closed) f.a_plus_norm = f.coeffs.ell1;
  return f;
}

ApplyResult apply_function(const AnalyticFn& phi, const TruncatedOperator& T, const Vector& x, Index N) {
  if (N < 0 || N > phi.coeffs.last()) throw ArgumentError("apply_function: cutoff outside the coefficient window");
  if (x.size() != T.dim()) throw ArgumentError("apply_function: vector length differs from window");
  ApplyResult r;
  Vector p = x;
  r.y = phi.coeffs.at(0) * p;
  r.step_norms.push_back(p.norm());
  for (Index n = 1; n <= N; ++n) {
    p = T.apply(p);
    r.y += phi.coeffs.at(n) * p;
    r.step_norms.push_back(p.norm());
  }
  const Vector next = T.apply(p);
  if (next.norm() == 0.0) {
    // Every further power vanishes.
    r.tail_bound = 0.0;
    return r;
  }
  double coeff_tail = 0.0;
  if (phi.a_plus_norm) {
    double head = 0.0;
    for (Index n = 0; n <= N; ++n) head += std::abs(phi.coeffs.at(n));
    coeff_tail = std::max(0.0, *phi.a_plus_norm - head);
  } else {
    for (Index n = N + 1; n <= phi.coeffs.last(); ++n) coeff_tail += std::abs(phi.coeffs.at(n));
  }
  const double sup = *std::max_element(r.step_norms.begin(), r.step_norms.end());
  r.tail_bound = coeff_tail * std::max(sup, next.norm());
  const std::size_t q = std::max<std::size_t>(2, r.step_norms.size() / 4);
  if (r.step_norms.size() >= 4) {
    bool growing = true;
    for (std::size_t i = r.step_norms.size() - q; i + 1 < r.step_norms.size(); ++i) {
      growing = growing && r.step_norms[i + 1] > r.step_norms[i];
    }
    r.inconclusive = growing;
  }
  return r;
}

AnalyticFn convolve(const AnalyticFn& phi, const CoeffVector& f) {
  std::vector<cplx> out(phi.coeffs.size());
  for (Index n = 0; n <= phi.coeffs.last(); ++n) out[static_cast<std::size_t>(n)] = phi.coeffs.at(n) * f.at(-n);
  return AnalyticFn::from(CoeffVector::from_values(0, std::move(out), phi.coeffs.tail));
}

SeriesVector series_adjoint_vector(const CoeffVector& c, const TruncatedOperator& T, const Vector& u0, Index N,
                                   const GateOptions& opts) {
  if (c.offset != 0 || N < 0 || N > c.last()) throw ArgumentError("series_adjoint_vector: cutoff outside the coefficient window");
  if (u0.size() != T.dim()) throw ArgumentError("series_adjoint_vector: vector length differs from window");
  SeriesVector s;
  s.cutoff = N;
  const SparseMatrix adj = T.sparse().adjoint();
  std::vector<Vector> steps;
  steps.reserve(static_cast<std::size_t>(N + 1));
  Vector p = u0;
  for (Index n = 0; n <= N; ++n) {
    if (n > 0) p = adj * p;
    const double norm = p.norm();
    s.step_norms.push_back(norm);
    s.summands.push_back(std::abs(c.at(n)) * norm);
    steps.push_back(p);
  }
  s.gate = assess_series(s.summands, opts);
  if (s.gate.verdict == Verdict::Diverged) return s;
  s.u = Vector::Zero(T.dim());
  for (Index n = 0; n <= N; ++n) s.u += c.at(n) * steps[static_cast<std::size_t>(n)];
  s.tail_bound = s.gate.tail_estimate.value_or(std::numeric_limits<double>::infinity());
  return s;
}

SeriesVector series_adjoint_vector(const InnerFn& theta, const TruncatedOperator& T, const Vector& u0, Index N,
                                   const GateOptions& opts) {
  return series_adjoint_vector(theta.inv_theta_coeffs(N), T, u0, N, opts);
}

Vector apply_inner_adjoint(const CoeffVector& theta_coeffs, const TruncatedOperator& T, const Vector& x) {
  const SparseMatrix adj = T.sparse().adjoint();
  Vector p = x;
  Vector y = theta_coeffs.at(0) * p;
  const Index last = std::min<Index>(T.dim() - 1, theta_coeffs.last());
  for (Index m = 1; m <= last; ++m) {
    p = adj * p;
    if (p.squaredNorm() == 0.0) break;
    y += theta_coeffs.at(m) * p;
  }
  return y;
}

IdentityCheck verify_theta_inverse_identity(const InnerFn& theta, const TruncatedOperator& T, const Vector& u0,
                                            Index N, const GateOptions& opts) {
  IdentityCheck chk;
  chk.series = series_adjoint_vector(theta, T, u0, N, opts);
  if (chk.series.gate.verdict == Verdict::Diverged) {
    throw ArgumentError("verify_theta_inverse_identity: series gate diverged");
  }
  const Vector image = apply_inner_adjoint(theta.theta_coeffs(T.dim() - 1), T, chk.series.u);
  chk.residual = (image - u0).norm();
  const double base = u0.norm();
  chk.relative_residual = base > 0.0 ? chk.residual / base : chk.residual;
  return chk;
}

Vector imbedding_adjoint(const WeightSequence& w, const CoeffVector& g, TruncationWindow window) {
  for (Index n = g.first(); n <= g.last(); ++n) {
    if (g.at(n) != cplx{0.0, 0.0} && !window.contains(n)) {
      throw ArgumentError("imbedding_adjoint: g has coefficients outside the window");
    }
  }
  Vector out = Vector::Zero(window.size());
  for (Index n = window.lo; n <= window.hi; ++n) {
    const cplx v = g.at(n);
    if (v != cplx{0.0, 0.0}) out(window.position(n)) = v * std::exp(-w.log_at(n));
  }
  return out;
}

namespace {

struct WitnessFrame {
  TruncationWindow base;
  TruncationWindow extended;
  std::shared_ptr<const WeightSequence> weight;
  CoeffVector g;  // raw coefficients on the base window
  Index g_lo = 0;
  Index g_hi = 0;
};

WitnessFrame make_frame(const TruncatedOperator& T, const Vector& Xadj_g, Index N) {
  if (!T.weight()) throw ArgumentError("witness_pair: operator carries no weight");
  if (T.is_adjoint()) throw ArgumentError("witness_pair: pass the forward shift");
  if (Xadj_g.size() != T.dim()) throw ArgumentError("witness_pair: vector length differs from window");
  WitnessFrame f;
  f.base = T.window();
  f.weight = T.weight();
  f.extended = TruncationWindow(f.base.lo - N - 1, f.base.hi);
  std::vector<cplx> g(static_cast<std::size_t>(f.base.size()));
  f.g_lo = f.base.hi + 1;
  f.g_hi = f.base.lo - 1;
  for (Index n = f.base.lo; n <= f.base.hi; ++n) {
    const cplx c = Xadj_g(f.base.position(n));
    g[static_cast<std::size_t>(f.base.position(n))] = c * std::exp(f.weight->log_at(n));
    if (c != cplx{0.0, 0.0}) {
      f.g_lo = std::min(f.g_lo, n);
      f.g_hi = std::max(f.g_hi, n);
    }
  }
  if (f.g_lo > f.g_hi) {
    f.g_lo = f.g_hi = f.base.hi;
  }
  f.g = CoeffVector::from_values(f.base.lo, std::move(g));
  return f;
}

Vector embed(const Vector& x, TruncationWindow from, TruncationWindow into) {
  Vector out = Vector::Zero(into.size());
  out.segment(into.position(from.lo), from.size()) = x;
  return out;
}

// Residual components of theta_xi(T*) u - X*g and theta_xi(T*) v - X*g on the extended window.
// The v side uses the intertwining X* theta_xi(U*) with boundary values on a grid offset from the atoms.
std::pair<Vector, Vector> residual_parts(const InnerFn& theta, const WitnessFrame& f, const Vector& u, cplx xi) {
  const TruncatedOperator Text = build_bilateral(*f.weight, f.extended);
  const CoeffVector th = rotate(theta.theta_coeffs(Text.dim() - 1), xi);
  const Vector Xg_base = imbedding_adjoint(*f.weight, f.g, f.base);
  const Vector Xg = embed(Xg_base, f.base, f.extended);
  const Vector ru = apply_inner_adjoint(th, Text, embed(u, f.base, f.extended)) - Xg;

  const Index span = f.extended.size();
  const std::size_t M = grid_size_for(span, 512);
  double shift = 0.5;
  std::vector<cplx> gvals = evaluate_on_grid_fft(f.g, M, shift);
  const double rot = std::arg(xi);
  std::vector<cplx> prod(M);
  for (std::size_t j = 0; j < M; ++j) {
    const double t = kTwoPi * (static_cast<double>(j) + shift) / static_cast<double>(M);
    const cplx b = theta.boundary(rot - t);
    // theta_xi(conj z) * conj(theta_xi(conj z)) * g(z)
    prod[j] = (b * std::conj(b)) * gvals[j];
  }
  const auto coeffs = coefficients_from_grid(prod, f.extended.lo, f.extended.hi, shift);
  Vector rv = Vector::Zero(span);
  for (Index n = f.extended.lo; n <= f.extended.hi; ++n) {
    const cplx diff = coeffs[static_cast<std::size_t>(n - f.extended.lo)] - f.g.at(n);
    rv(f.extended.position(n)) = diff * std::exp(-f.weight->log_at(n));
  }
  return {ru, rv};
}

}  // namespace

WitnessPair witness_pair(const InnerFn& theta, const TruncatedOperator& T, const Vector& Xadj_g, cplx xi, Index N,
                         const GateOptions& opts) {
  const WitnessFrame f = make_frame(T, Xadj_g, N);
  WitnessPair p;
  p.xi = xi;
  const CoeffVector inv = rotate(theta.inv_theta_coeffs(N), xi);
  const SeriesVector s = series_adjoint_vector(inv, T, Xadj_g, N, opts);
  p.gate = s.gate;
  if (s.gate.verdict == Verdict::Diverged) return p;
  p.u_xi = s.u;

  // v_xi = X* ((theta_xi)~ g), coefficientwise on the base window.
  const Index need = f.base.hi - f.g_lo;
  const CoeffVector th = rotate(theta.theta_coeffs(std::max<Index>(need, 0)), xi);
  p.v_xi = Vector::Zero(f.base.size());
  for (Index n = f.base.lo; n <= f.base.hi; ++n) {
    cplx acc{0.0, 0.0};
    for (Index j = f.g_lo; j <= std::min(n, f.g_hi); ++j) acc += std::conj(th.at(n - j)) * f.g.at(j);
    p.v_xi(f.base.position(n)) = acc * std::exp(-f.weight->log_at(n));
  }

  const auto [ru, rv] = residual_parts(theta, f, p.u_xi, xi);
  p.u_residual = ru.norm();
  p.v_residual = rv.norm();
  p.residual = (ru - rv).norm();

  double g1 = 0.0;
  for (Index j = f.g_lo; j <= f.g_hi; ++j) g1 += std::abs(f.g.at(j));
  double mass = 0.0;
  for (Index m = 0; m <= std::max<Index>(f.base.hi - f.g_hi, 0); ++m) mass += std::norm(th.at(m));
  p.truncation_defect = g1 * std::sqrt(std::max(0.0, 1.0 - mass));
  p.tail_bound = s.tail_bound + p.truncation_defect;
  p.diff_norm = (p.u_xi - p.v_xi).norm();
  p.u_norm = p.u_xi.norm();
  p.v_norm = p.v_xi.norm();
  return p;
}

double witness_residual(const InnerFn& theta, const TruncatedOperator& T, const Vector& Xadj_g, const WitnessPair& p) {
  const Index N = p.gate.window > 0 ? p.gate.window - 1 : 0;
  const WitnessFrame f = make_frame(T, Xadj_g, N);
  const auto [ru, rv] = residual_parts(theta, f, p.u_xi, p.xi);
  return (ru - rv).norm();
}

AnalyticFn tail_operator(const AnalyticFn& phi, Index k) {
  if (k < 0) throw ArgumentError("tail_operator: k must be >= 0");
  std::vector<cplx> out;
  for (Index n = k + 1; n <= phi.coeffs.last(); ++n) out.push_back(phi.coeffs.at(n));
  if (out.empty()) out.push_back(cplx{0.0, 0.0});
  return AnalyticFn::from(CoeffVector::from_values(0, std::move(out), phi.coeffs.tail));
}

TailShadowReport tail_sup_norm_probe(std::size_t count, Index max_degree, std::span<const Index> ks,
                                     std::uint64_t seed) {
  if (count < 2 || ks.empty()) throw ArgumentError("tail_sup_norm_probe: need a battery and at least one k");
  const Index kmax = *std::max_element(ks.begin(), ks.end());
  if (max_degree <= kmax + 1) throw ArgumentError("tail_sup_norm_probe: degree must exceed the largest k");
  TailShadowReport r;
  r.ks.assign(ks.begin(), ks.end());
  r.max_ratio_per_k.assign(ks.size(), 0.0);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Index> deg(kmax + 2, max_degree);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t i = 0; i < count; ++i) {
    const Index d = deg(rng);
    std::vector<cplx> c(static_cast<std::size_t>(d + 1));
    for (auto& v : c) v = cplx{normal(rng), normal(rng)};
    const AnalyticFn phi = AnalyticFn::from(CoeffVector::from_values(0, std::move(c), TailFlag::Closed));
    const double base = sup_norm_on_grid(phi.coeffs, r.grid_points_min);
    std::vector<double> row;
    for (std::size_t j = 0; j < ks.size(); ++j) {
      const AnalyticFn t = tail_operator(phi, ks[j]);
      // Same grid as phi so both sup norms see identical sample points.
      const std::size_t M = grid_size_for(static_cast<Index>(phi.coeffs.size()), r.grid_points_min);
      const auto vals = evaluate_on_grid_fft(t.coeffs, M);
      double sup = 0.0;
      for (const auto& v : vals) sup = std::max(sup, std::abs(v));
      row.push_back(sup / base);
      r.max_ratio_per_k[j] = std::max(r.max_ratio_per_k[j], sup / base);
    }
    r.ratios.push_back(std::move(row));
  }
  auto fit = [&](std::size_t from, std::size_t to) {
    double C = 0.0;
    for (std::size_t i = from; i < to; ++i) {
      for (std::size_t j = 0; j < ks.size(); ++j) {
        C = std::max(C, r.ratios[i][j] / std::log(static_cast<double>(ks[j]) + 2.0));
      }
    }
    return C;
  };
  auto within = [&](double C, std::size_t from, std::size_t to) {
    for (std::size_t i = from; i < to; ++i) {
      for (std::size_t j = 0; j < ks.size(); ++j) {
        if (r.ratios[i][j] > C * std::log(static_cast<double>(ks[j]) + 2.0) * (1.0 + 1e-12)) return false;
      }
    }
    return true;
  };
  r.fitted_C = fit(0, count);
  r.all_within = within(r.fitted_C, 0, count);
  r.holdout_C = fit(0, count / 2);
  r.holdout_within = within(r.holdout_C, count / 2, count);
  return r;
}

}  // namespace hypinv
