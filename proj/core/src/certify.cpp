#include "hypinv/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hypinv {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_abs(cplx c) { return c == cplx{0.0, 0.0} ? kNegInf : std::log(std::abs(c)); }

GateOptions finiteness(Index first_position = 1) {
  GateOptions o;
  o.mode = GateMode::Finiteness;
  o.first_position = first_position;
  return o;
}

ConditionStatus weighted_square_sum(const WeightSequence& w, std::span<const cplx> coeffs, const GateOptions& opts) {
  std::vector<double> logs(coeffs.size());
  for (std::size_t n = 0; n < coeffs.size(); ++n) {
    logs[n] = 2.0 * (log_abs(coeffs[n]) - w.log_at(-1 - static_cast<Index>(n)));
  }
  return assess_series_log(logs, opts);
}

// Log-spaced integer sample of [lo, hi], endpoints included.
std::vector<Index> log_sample(IndexRange r, std::size_t count) {
  std::vector<Index> out;
  const double a = std::log(static_cast<double>(r.lo));
  const double b = std::log(static_cast<double>(r.hi));
  for (std::size_t k = 0; k < count; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(count - 1);
    const Index n = std::clamp<Index>(static_cast<Index>(std::llround(std::exp(a + t * (b - a)))), r.lo, r.hi);
    if (out.empty() || n > out.back()) out.push_back(n);
  }
  if (out.back() != r.hi) out.push_back(r.hi);
  return out;
}

}  // namespace

ConditionStatus cond_esterle(const WeightSequence& w, const InnerFn& theta, Index N, const GateOptions& opts) {
  if (N < 0) throw ArgumentError("cond_esterle: N must be >= 0");
  const CoeffVector& c = theta.inv_theta_coeffs(N);
  return weighted_square_sum(w, c.values, opts);
}

std::vector<cplx> divide_by_inner(const CoeffVector& f, const InnerFn& theta, Index N) {
  if (f.offset != 0) throw ArgumentError("divide_by_inner: f must be analytic (offset 0)");
  const CoeffVector& c = theta.inv_theta_coeffs(N);
  std::vector<cplx> q(static_cast<std::size_t>(N + 1), cplx{0.0, 0.0});
  for (Index n = 0; n <= N; ++n) {
    cplx acc{0.0, 0.0};
    for (Index k = 0; k <= std::min(n, f.last()); ++k) acc += f.at(k) * c.at(n - k);
    q[static_cast<std::size_t>(n)] = acc;
  }
  return q;
}

ConditionStatus cond_cofactor(const WeightSequence& w, const InnerFn& theta, const CoeffVector& f, Index N,
                           const GateOptions& opts) {
  if (N < 0) throw ArgumentError("cond_cofactor: N must be >= 0");
  bool nonzero = false;
  for (const auto& v : f.values) nonzero = nonzero || v != cplx{0.0, 0.0};
  if (!nonzero) throw ArgumentError("cond_cofactor: f must not vanish identically");
  const std::vector<cplx> q = divide_by_inner(f, theta, N);
  ConditionStatus st = weighted_square_sum(w, q, opts);
  st.assumptions.push_back("f is not in theta H^2 (not decidable from coefficients)");
  // f/theta is a polynomial of degree <= deg f exactly when f is in theta H^2 with a polynomial cofactor;
  // vanishing low coefficients are the visible trace of that.
  const Index deg = std::min(f.last(), N);
  if (deg >= 1 && std::abs(q[0]) > 0.0) {
    double low = 0.0;
    for (Index n = 1; n <= deg; ++n) low = std::max(low, std::abs(q[static_cast<std::size_t>(n)]));
    if (low <= 1e-8 * std::abs(q[0])) {
      st.assumptions.push_back("warning: f/theta is numerically constant on the degrees of f; f looks like a multiple of theta");
    }
  }
  return st;
}

ConditionStatus cond_step_series_log(const InnerFn& theta, std::span<const double> log_step_norms, const GateOptions& opts) {
  if (log_step_norms.empty()) throw ArgumentError("cond_step_series: no step norms");
  const Index N = static_cast<Index>(log_step_norms.size()) - 1;
  const CoeffVector& c = theta.inv_theta_coeffs(N);
  std::vector<double> logs(log_step_norms.size());
  for (std::size_t n = 0; n < logs.size(); ++n) logs[n] = log_abs(c.values[n]) + log_step_norms[n];
  return assess_series_log(logs, opts);
}

ConditionStatus cond_step_series(const InnerFn& theta, std::span<const double> step_norms, const GateOptions& opts) {
  std::vector<double> logs(step_norms.size());
  for (std::size_t n = 0; n < logs.size(); ++n) {
    if (step_norms[n] < 0.0) throw ArgumentError("cond_step_series: step norms must be nonnegative");
    logs[n] = step_norms[n] == 0.0 ? kNegInf : std::log(step_norms[n]);
  }
  return cond_step_series_log(theta, logs, opts);
}

L2Report cond_l2(std::span<const double> step_norms, const WeightSequence& base) {
  L2Report r;
  std::vector<double> sq(step_norms.size());
  for (std::size_t n = 0; n < sq.size(); ++n) sq[n] = step_norms[n] * step_norms[n];
  r.status = assess_series(sq, finiteness());
  if (r.status.verdict != Verdict::Converged) return r;
  try {
    r.weight = make_summable_weight(step_norms, base);
    r.weight_note = "summable weight constructed";
  } catch (const InconclusiveError& e) {
    r.weight_note = std::string(e.what()) + "; " + e.hint();
  } catch (const ArgumentError& e) {
    r.weight_note = e.what();
  }
  return r;
}

DecayReport cond_w_decay(std::span<const double> step_norms, const WeightSequence& w) {
  const std::size_t N = step_norms.size();
  if (N < 8) throw ArgumentError("cond_w_decay: need at least 8 step norms");
  DecayReport r;
  const std::size_t half = N / 2;
  const std::size_t three = (3 * N) / 4;
  r.tail_from = static_cast<Index>(half);
  for (std::size_t n = half; n < N; ++n) {
    const double v = step_norms[n] * std::exp(w.log_at(static_cast<Index>(n) + 1));
    if (n < three) {
      r.early_max = std::max(r.early_max, v);
    } else {
      r.late_max = std::max(r.late_max, v);
    }
  }
  r.C_fit = std::max(r.early_max, r.late_max);
  r.pass = std::isfinite(r.C_fit) && r.late_max <= r.early_max * (1.0 + 1e-9);
  return r;
}

const Clause& QuasianalyticReport::clause(const std::string& name) const {
  for (const auto& c : clauses) {
    if (c.name == name) return c;
  }
  throw ArgumentError("no clause named " + name);
}

ConditionStatus log_weight_square_sum(const WeightSequence& w, IndexRange window) {
  if (window.lo < 2) throw ArgumentError("log_weight_square_sum: window must start at n >= 2");
  std::vector<double> logs;
  logs.reserve(static_cast<std::size_t>(window.size()));
  for (Index n = window.lo; n <= window.hi; ++n) {
    logs.push_back(2.0 * (std::log(std::log(static_cast<double>(n))) - w.log_at(-n)));
  }
  return assess_series_log(logs, finiteness(window.lo));
}

QuasianalyticReport quasianalytic_conditions(const WeightSequence& w, const WeightSequence& p, IndexRange window) {
  if (window.lo < 2 || window.size() < 16) throw ArgumentError("quasianalytic_conditions: window must start at >= 2 and hold 16 points");
  QuasianalyticReport rep;
  auto pv = [&p](Index n) {
    const double v = p(n);
    if (!(v > 0.0)) throw ArgumentError("quasianalytic_conditions: p must be positive");
    return v;
  };
  const std::vector<Index> s = log_sample(window, 64);
  const Index mid = window.lo + window.size() / 2;

  {
    Clause c;
    c.name = "log(n+1) <= C p(n)";
    double early = 0.0, late = 0.0;
    for (Index n = window.lo; n <= window.hi; ++n) {
      const double r = std::log(static_cast<double>(n) + 1.0) / pv(n);
      (n < mid ? early : late) = std::max(n < mid ? early : late, r);
    }
    c.measured = std::max(early, late);
    c.pass = std::isfinite(c.measured) && late <= early * (1.0 + 1e-12);
    c.note = "measured is the fitted C; pass when the second half does not raise it";
    rep.clauses.push_back(c);
  }
  {
    Clause c;
    c.name = "log omega(-n) / p(n) -> infinity";
    bool increasing = true;
    double prev = w.log_at(-s.front()) / pv(s.front());
    const double first = prev;
    for (std::size_t k = 1; k < s.size(); ++k) {
      const double r = w.log_at(-s[k]) / pv(s[k]);
      increasing = increasing && r > prev;
      prev = r;
    }
    c.measured = prev / first;
    c.pass = increasing && prev > first;
    c.note = "measured is the end/start ratio of the sampled trend";
    rep.clauses.push_back(c);
  }
  {
    Clause c;
    c.name = "p concave";
    double worst = kNegInf;
    for (Index n = window.lo + 1; n < window.hi; ++n) {
      const double d2 = (pv(n + 1) - 2.0 * pv(n) + pv(n - 1)) / pv(n);
      worst = std::max(worst, d2);
    }
    c.measured = worst;
    c.pass = worst <= 1e-12;
    c.window_limited = true;
    c.note = "measured is the largest relative second difference";
    rep.clauses.push_back(c);
  }
  {
    Clause c;
    c.name = "sum p(n)/n^2 diverges";
    std::vector<double> terms;
    for (Index n = window.lo; n <= window.hi; ++n) terms.push_back(pv(n) / (static_cast<double>(n) * static_cast<double>(n)));
    const ConditionStatus st = assess_series(terms, finiteness(window.lo));
    c.measured = st.sum();
    c.pass = st.verdict == Verdict::Diverged;
    c.note = "gate verdict " + to_string(st.verdict) + " (" + to_string(st.model) + ")";
    rep.clauses.push_back(c);
  }
  {
    Clause c;
    c.name = "p(n)/n -> 0";
    bool decreasing = true;
    double prev = pv(s.front()) / static_cast<double>(s.front());
    const double first = prev;
    for (std::size_t k = 1; k < s.size(); ++k) {
      const double r = pv(s[k]) / static_cast<double>(s[k]);
      decreasing = decreasing && r <= prev * (1.0 + 1e-12);
      prev = r;
    }
    c.measured = prev;
    c.pass = decreasing && prev < 0.5 * first;
    c.note = "pass needs a nonincreasing trend that at least halves across the window";
    rep.clauses.push_back(c);
  }
  {
    Clause c;
    c.name = "p(n)/n^eps increasing";
    double min_slope = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < s.size(); ++k) {
      const double slope = (std::log(pv(s[k + 1])) - std::log(pv(s[k]))) /
                           (std::log(static_cast<double>(s[k + 1])) - std::log(static_cast<double>(s[k])));
      min_slope = std::min(min_slope, slope);
    }
    c.measured = 0.5 * min_slope;
    c.pass = min_slope > 0.0;
    c.note = "measured is an admissible eps (half the smallest local log-slope)";
    rep.clauses.push_back(c);
  }
  {
    Clause c;
    c.name = "sum (log n / omega(-n))^2 converges";
    rep.log_weight_square_status = log_weight_square_sum(w, window);
    c.measured = rep.log_weight_square_status.sum();
    c.pass = rep.log_weight_square_status.verdict == Verdict::Converged;
    c.note = "gate verdict " + to_string(rep.log_weight_square_status.verdict);
    rep.clauses.push_back(c);
  }
  rep.pass = std::all_of(rep.clauses.begin(), rep.clauses.end(), [](const Clause& c) { return c.pass; });
  return rep;
}

ConditionStatus log_growth_sum_log(std::span<const double> log_y_norms) {
  std::vector<double> terms(log_y_norms.size());
  for (std::size_t n = 0; n < terms.size(); ++n) {
    if (!std::isfinite(log_y_norms[n])) throw ArgumentError("log_growth_sum: norms must be positive and finite");
    const double x = static_cast<double>(n);
    terms[n] = std::abs(log_y_norms[n]) / (x * x + 1.0);
  }
  return assess_series(terms, finiteness());
}

ConditionStatus log_growth_sum(std::span<const double> y_norms) {
  std::vector<double> logs(y_norms.size());
  for (std::size_t n = 0; n < logs.size(); ++n) {
    if (!(y_norms[n] > 0.0)) throw ArgumentError("log_growth_sum: norms must be positive");
    logs[n] = std::log(y_norms[n]);
  }
  return log_growth_sum_log(logs);
}

OrderingReport cauchy_schwarz_ordering(const WeightSequence& w, const InnerFn& theta,
                                       std::span<const double> step_norms, double rel_tol) {
  OrderingReport r;
  const ConditionStatus l1 = cond_step_series(theta, step_norms);
  const Index N = static_cast<Index>(step_norms.size()) - 1;
  const CoeffVector& c = theta.inv_theta_coeffs(N);
  std::vector<double> a(step_norms.size());
  std::vector<double> b(step_norms.size());
  for (std::size_t n = 0; n < a.size(); ++n) {
    const double lw = w.log_at(-1 - static_cast<Index>(n));
    a[n] = std::exp(2.0 * (log_abs(c.values[n]) - lw));
    b[n] = step_norms[n] * step_norms[n] * std::exp(2.0 * lw);
  }
  const std::vector<double> A = compensated_prefix_sums(a);
  const std::vector<double> B = compensated_prefix_sums(b);
  r.lhs = l1.partial_sums;
  r.rhs.resize(a.size());
  for (std::size_t n = 0; n < a.size(); ++n) {
    r.rhs[n] = std::sqrt(A[n]) * std::sqrt(B[n]);
    if (r.rhs[n] > 0.0) r.max_ratio = std::max(r.max_ratio, r.lhs[n] / r.rhs[n]);
    if (r.lhs[n] > r.rhs[n] * (1.0 + rel_tol) && r.holds) {
      r.holds = false;
      r.first_violation = static_cast<Index>(n);
    }
  }
  return r;
}

std::vector<double> measured_step_norms(const WeightSequence& w, const CoeffVector& g, TruncationWindow window,
                                        Index N) {
  if (N < 0) throw ArgumentError("measured_step_norms: N must be >= 0");
  const TruncationWindow ext(window.lo - N - 1, window.hi);
  const TruncatedOperator T = build_bilateral(w, ext);
  return adjoint_power_apply(T, N, imbedding_adjoint(w, g, ext)).step_norms;
}

CutoffSelection select_identity_cutoff(const InnerFn& theta, const TruncatedOperator& T, const Vector& u0,
                                       Index start, Index N_max, const GateOptions& opts) {
  if (start < 1 || N_max < start) throw ArgumentError("select_identity_cutoff: need 1 <= start <= N_max");
  Index N = start;
  for (;;) {
    IdentityCheck chk = verify_theta_inverse_identity(theta, T, u0, N, opts);
    const ConditionStatus& g = chk.series.gate;
    if (g.verdict == Verdict::Converged) return {N, std::move(chk)};
    if (N >= N_max) {
      throw InconclusiveError("series gate not converged at the largest admissible N",
                              "raise n_coeffs above " + std::to_string(g.required_n.value_or(2 * N)));
    }
    Index next = g.required_n.value_or(2 * N);
    next = std::clamp<Index>(std::max(next, N + N / 4 + 1), N + 1, N_max);
    N = next;
  }
}

WitnessSummary scan_witness(const CertifyInput& in) {
  GateOptions opts;
  opts.tail_tol = in.tail_tol;
  const TruncatedOperator T = build_bilateral(in.weight, in.window);
  const Vector Xg = imbedding_adjoint(in.weight, in.g, in.window);
  WitnessSummary out;
  double best_score = -1.0;
  for (std::size_t k = 0; k < in.xi_grid; ++k) {
    const cplx xi = std::polar(1.0, kTwoPi * static_cast<double>(k) / static_cast<double>(in.xi_grid));
    const WitnessPair p = witness_pair(in.theta, T, Xg, xi, in.n_coeffs, opts);
    WitnessRow row;
    row.xi = xi;
    row.diff_norm = p.diff_norm;
    row.residual = p.residual;
    row.u_norm = p.u_norm;
    row.v_norm = p.v_norm;
    row.tail_bound = p.tail_bound;
    row.separated = p.diff_norm > 0.0 && p.diff_norm >= in.separation_factor * p.residual &&
                    p.residual <= in.residual_tol * (p.u_norm + p.v_norm);
    if (row.separated) ++out.separated_count;
    const double score = row.separated ? 1.0 + p.diff_norm : 0.0;
    if (score > best_score) {
      best_score = score;
      out.best = out.rows.size();
    }
    out.rows.push_back(row);
  }
  return out;
}

namespace {

void certify_bilateral(const CertifyInput& in, CertificateReport& rep) {
  GateOptions opts;
  opts.tail_tol = in.tail_tol;
  const Index N = in.n_coeffs;
  rep.step_norms = measured_step_norms(in.weight, in.g, in.window, N);
  rep.conditions["cond_step_series"] = cond_step_series(in.theta, rep.step_norms, opts);
  rep.conditions["cond_esterle"] = cond_esterle(in.weight, in.theta, N, opts);
  rep.conditions["cond_l2"] = cond_l2(rep.step_norms).status;
  rep.governing = "cond_step_series";
  rep.assumptions.push_back("g is not identically zero");
  rep.assumptions.push_back("only grid points are tested; openness of the witness set is not checked");

  const ConditionStatus& gov = rep.conditions["cond_step_series"];
  if (gov.verdict == Verdict::Diverged) {
    rep.conclusion = Conclusion::NotCertified;
    rep.conclusion_text = "not certified: governing condition diverged";
    return;
  }
  if (gov.verdict == Verdict::Inconclusive) {
    rep.conclusion = Conclusion::Inconclusive;
    rep.required_n = gov.required_n;
    rep.conclusion_text = "inconclusive: governing condition undecided at truncation level " + std::to_string(N);
    return;
  }

  rep.witness = scan_witness(in);
  if (rep.witness.separated_count > 0) {
    rep.conclusion = Conclusion::Certified;
    rep.conclusion_text = "certified at truncation level N=" + std::to_string(N);
  } else {
    rep.conclusion = Conclusion::NotCertified;
    rep.conclusion_text = "not certified: no grid point separates the witness pair";
  }
}

void certify_unilateral(const CertifyInput& in, CertificateReport& rep) {
  GateOptions opts;
  opts.tail_tol = in.tail_tol;
  const TruncatedOperator T = build_unilateral_plus(in.weight, in.window);
  const Vector u0 = imbedding_adjoint(in.weight, in.g, in.window);
  rep.governing = "series_adjoint_vector";
  try {
    const CutoffSelection sel = select_identity_cutoff(in.theta, T, u0, std::min<Index>(16, in.n_coeffs), in.n_coeffs, opts);
    rep.conditions["series_adjoint_vector"] = sel.check.series.gate;
    rep.identity_relative_residual = sel.check.relative_residual;
    rep.step_norms = sel.check.series.step_norms;
    rep.truncation = sel.N;
    rep.conclusion = Conclusion::NotCertified;
    rep.conclusion_text = "not certified: unilateral model runs the inverse identity only";
  } catch (const InconclusiveError& e) {
    rep.conclusion = Conclusion::Inconclusive;
    rep.conclusion_text = std::string("inconclusive: ") + e.what() + "; " + e.hint();
  } catch (const ArgumentError& e) {
    rep.conclusion = Conclusion::NotCertified;
    rep.conclusion_text = std::string("not certified: ") + e.what();
  }
}

}  // namespace

CertificateReport certify_scenario(const CertifyInput& in) {
  if (in.n_coeffs < 1) throw ArgumentError("certify_scenario: n_coeffs must be >= 1");
  if (in.xi_grid < 1) throw ArgumentError("certify_scenario: xi grid must be nonempty");
  if (!(in.tail_tol > 0.0) || !(in.residual_tol > 0.0)) throw ArgumentError("certify_scenario: tolerances must be positive");
  CertificateReport rep;
  rep.id = in.id;
  rep.truncation = in.n_coeffs;
  if (in.kind == ScenarioKind::Bilateral) {
    certify_bilateral(in, rep);
  } else {
    certify_unilateral(in, rep);
  }
  return rep;
}

std::string to_string(Conclusion c) {
  switch (c) {
    case Conclusion::Certified: return "certified";
    case Conclusion::NotCertified: return "not certified";
    case Conclusion::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

int exit_code(Conclusion c) {
  switch (c) {
    case Conclusion::Certified: return 0;
    case Conclusion::NotCertified: return 2;
    case Conclusion::Inconclusive: return 3;
  }
  return 3;
}

}  // namespace hypinv
