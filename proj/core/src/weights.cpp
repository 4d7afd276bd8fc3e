#include "hypinv/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace hypinv {

WeightSequence::WeightSequence(WeightKind kind, std::string name, LogFn log_fn, std::map<std::string, double> params)
    : kind_(kind),
      name_(std::move(name)),
      log_fn_(std::make_shared<const LogFn>(std::move(log_fn))),
      params_(std::move(params)) {}

double WeightSequence::operator()(Index n) const { return std::exp(log_at(n)); }

double WeightSequence::log_at(Index n) const { return (*log_fn_)(n); }

WeightSequence WeightSequence::with_note(std::string note) const {
  WeightSequence copy = *this;
  copy.note_ = std::move(note);
  return copy;
}

WeightSequence WeightSequence::power(double s) const {
  auto inner = log_fn_;
  auto params = params_;
  params["power"] = s;
  return WeightSequence(kind_, name_ + "^s", [inner, s](Index n) { return s * (*inner)(n); }, std::move(params));
}

namespace presets {

namespace {

// Shared shape for weights that are 1 on the nonnegative integers.
WeightSequence negative_side(std::string name, std::function<double(double)> log_of_n,
                             std::map<std::string, double> params) {
  return WeightSequence(
      WeightKind::Preset, std::move(name),
      [f = std::move(log_of_n)](Index m) { return m >= 0 ? 0.0 : f(static_cast<double>(-m)); },
      std::move(params));
}

double loglog_shape(double a, double n) {
  const double l = std::log(n);
  return std::pow(std::log(l), a) * l;
}

}  // namespace

WeightSequence constant(double c) {
  if (!(c > 0.0)) throw InvalidWeightError("constant weight must be positive");
  const double lc = std::log(c);
  return WeightSequence(WeightKind::Preset, "constant", [lc](Index) { return lc; }, {{"c", c}});
}

WeightSequence geometric(double base) {
  if (!(base >= 1.0)) throw ArgumentError("geometric weight needs base >= 1");
  const double lb = std::log(base);
  return negative_side("geometric", [lb](double n) { return n * lb; }, {{"base", base}});
}

WeightSequence exp_sqrt(double c) {
  return negative_side("exp_sqrt", [c](double n) { return c * std::sqrt(n); }, {{"c", c}});
}

WeightSequence exp_sublinear(double beta) {
  return negative_side(
      "exp_sublinear", [beta](double n) { return n / std::pow(std::log(n) + 1.0, beta); }, {{"beta", beta}});
}

WeightSequence polynomial(double s) {
  return negative_side("polynomial", [s](double n) { return s * std::log1p(n); }, {{"s", s}});
}

Index loglog_power_junction(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0) || !(b < 0.5)) throw ArgumentError("loglog_power needs a > 0 and 0 < b < 1/2");
  for (Index n0 = 16; n0 < 100000000; ++n0) {
    const double x = static_cast<double>(n0);
    const double l = std::log(x);
    const double ll = std::log(l);
    if ((a / ll + 1.0) / l > b) continue;
    // Discrete junction: concave across n0 and log w / n^b still nonincreasing.
    const double f0 = loglog_shape(a, x);
    const double fp = loglog_shape(a, x + 1.0);
    const double fm = f0 * std::pow((x - 1.0) / x, b);
    if (f0 - fm < fp - f0) continue;
    if (fp / std::pow(x + 1.0, b) > f0 / std::pow(x, b)) continue;
    return n0;
  }
  throw ArgumentError("loglog_power: no junction index found");
}

WeightSequence loglog_power(double a, double b) {
  const Index n0 = loglog_power_junction(a, b);
  const double x0 = static_cast<double>(n0);
  const double f0 = loglog_shape(a, x0);
  return WeightSequence(
      WeightKind::Preset, "loglog_power",
      [a, b, n0, x0, f0](Index n) {
        if (n < 1) throw ArgumentError("loglog_power is defined for n >= 1");
        const double x = static_cast<double>(n);
        return n >= n0 ? loglog_shape(a, x) : f0 * std::pow(x / x0, b);
      },
      {{"a", a}, {"b", b}, {"junction", x0}});
}

WeightSequence loglog_power_dissymmetric(double a, double b) {
  const WeightSequence w = loglog_power(a, b);
  auto params = w.params();
  return WeightSequence(
      WeightKind::Preset, "loglog_power_dissymmetric", [w](Index m) { return m >= 0 ? 0.0 : w.log_at(-m); },
      std::move(params));
}

WeightSequence sublinear_companion(double beta_prime) {
  return WeightSequence(
      WeightKind::Preset, "sublinear_companion",
      [beta_prime](Index n) {
        if (n < 1) throw ArgumentError("sublinear_companion is defined for n >= 1");
        const double x = static_cast<double>(n);
        return std::log(x) - beta_prime * std::log(std::log(x) + 1.0);
      },
      {{"beta_prime", beta_prime}});
}

WeightSequence tabulated(IndexRange range, std::vector<double> values, std::string name) {
  if (range.size() != static_cast<Index>(values.size())) throw ArgumentError("tabulated weight: size mismatch");
  std::vector<double> logs(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0)) throw InvalidWeightError("tabulated weight: non-positive value");
    logs[i] = std::log(values[i]);
  }
  auto table = std::make_shared<const std::vector<double>>(std::move(logs));
  return WeightSequence(WeightKind::Tabulated, std::move(name), [table, range](Index n) {
    if (n < range.lo || n > range.hi) throw ArgumentError("tabulated weight: index outside table");
    return (*table)[static_cast<std::size_t>(n - range.lo)];
  });
}

}  // namespace presets

namespace {

std::vector<double> log_table(const WeightSequence& w, IndexRange window) {
  std::vector<double> out(static_cast<std::size_t>(window.size()));
  for (Index n = window.lo; n <= window.hi; ++n) {
    const double v = w.log_at(n);
    if (std::isnan(v) || v == -std::numeric_limits<double>::infinity()) {
      std::ostringstream msg;
      msg << "weight '" << w.name() << "' is not positive at n=" << n;
      throw InvalidWeightError(msg.str());
    }
    out[static_cast<std::size_t>(n - window.lo)] = v;
  }
  return out;
}

double log_tol(double a, double b) { return 1e-13 * (1.0 + std::max(std::abs(a), std::abs(b))); }

}  // namespace

DissymmetricReport check_dissymmetric(const WeightSequence& w, IndexRange window) {
  if (window.lo > -16 || window.hi < 16) throw ArgumentError("check_dissymmetric: window must cover [-16, 16]");
  const auto logs = log_table(w, window);
  auto L = [&](Index n) { return logs[static_cast<std::size_t>(n - window.lo)]; };

  DissymmetricReport r;
  bool ones = true;
  for (Index n = 0; n <= window.hi; ++n) ones = ones && std::abs(L(n)) <= 1e-15;
  bool monotone = true;
  double max_log_ratio = -std::numeric_limits<double>::infinity();
  for (Index n = window.lo + 1; n <= window.hi; ++n) {
    const double d = L(n - 1) - L(n);
    if (d < -log_tol(L(n - 1), L(n))) monotone = false;
    max_log_ratio = std::max(max_log_ratio, d);
  }
  r.measured_2_1_constant = std::exp(max_log_ratio);
  const bool grows = L(window.lo) > L(0) + 1e-12;
  const bool ratio_finite = std::isfinite(r.measured_2_1_constant);

  for (Index n = 1; n <= -window.lo; n *= 2) r.root_trend.emplace_back(n, std::exp(L(-n) / static_cast<double>(n)));
  if (r.root_trend.back().first != -window.lo) {
    const Index n = -window.lo;
    r.root_trend.emplace_back(n, std::exp(L(-n) / static_cast<double>(n)));
  }
  r.root_trend_decreasing = true;
  for (std::size_t i = r.root_trend.size() / 2 + 1; i < r.root_trend.size(); ++i) {
    if (r.root_trend[i].second > r.root_trend[i - 1].second * (1.0 + 1e-12)) r.root_trend_decreasing = false;
  }

  r.pass = ones && monotone && grows && ratio_finite;
  if (!ones) {
    r.failure = "not identically 1 on the nonnegative integers";
  } else if (!monotone) {
    r.failure = "not nonincreasing";
  } else if (!grows) {
    r.failure = "bounded on the window (no growth toward -infinity)";
  } else if (!ratio_finite) {
    r.failure = "consecutive ratio unbounded";
  }
  return r;
}

LogConcaveReport check_log_concave_submultiplicative(const WeightSequence& w, IndexRange window) {
  if (window.lo > -2) throw ArgumentError("check_log_concave_submultiplicative: window needs negative indices");
  const auto logs = log_table(w, window);
  auto L = [&](Index n) { return logs[static_cast<std::size_t>(n - window.lo)]; };

  LogConcaveReport r;
  r.log_concave = true;
  for (Index n = 0; -n - 2 >= window.lo; ++n) {
    const double d0 = L(-n - 1) - L(-n);
    const double d1 = L(-n - 2) - L(-n - 1);
    if (d1 > d0 + log_tol(L(-n - 2), L(-n))) {
      r.log_concave = false;
      r.failure = "ratio omega(-n-1)/omega(-n) increases at n=" + std::to_string(n + 1);
      break;
    }
  }

  const Index size = window.size();
  const Index stride = size <= 4001 ? 1 : (size + 1999) / 2000;
  r.submultiplicative_sampled = true;
  for (Index n = window.lo; n <= window.hi; n += stride) {
    for (Index k = window.lo; k <= window.hi; k += stride) {
      const Index s = n + k;
      if (s < window.lo || s > window.hi) continue;
      ++r.pairs_checked;
      if (L(s) > L(n) + L(k) + log_tol(L(s), L(n) + L(k))) {
        r.submultiplicative_sampled = false;
        if (r.failure.empty()) {
          r.failure = "omega(n+k) > omega(n) omega(k) at n=" + std::to_string(n) + ", k=" + std::to_string(k);
        }
      }
    }
  }
  return r;
}

WeightSequence make_step_weight(const WeightSequence& base, std::vector<Index> breakpoints) {
  if (breakpoints.empty() || breakpoints.front() != 1) throw ArgumentError("make_step_weight: N_1 must be 1");
  for (std::size_t i = 1; i < breakpoints.size(); ++i) {
    if (breakpoints[i] <= breakpoints[i - 1]) throw ArgumentError("make_step_weight: breakpoints must increase");
  }
  auto bp = std::make_shared<const std::vector<Index>>(std::move(breakpoints));
  std::map<std::string, double> params{{"breakpoints", static_cast<double>(bp->size())}};
  return WeightSequence(
      WeightKind::StepFromBase, "step(" + base.name() + ")",
      [base, bp](Index n) {
        if (n >= 0) return 0.0;
        const Index m = -n;
        const auto& b = *bp;
        const Index last = b.back();
        Index j = 0;
        if (m >= last) {
          const Index gap = b.size() >= 2 ? last - b[b.size() - 2] : 1;
          j = static_cast<Index>(b.size()) + (m - last) / gap;
        } else {
          j = static_cast<Index>(std::upper_bound(b.begin(), b.end(), m) - b.begin());
        }
        return base.log_at(-j);
      },
      std::move(params));
}

DominatedWeight make_dominated_weight(std::span<const double> beta, const WeightSequence& base) {
  const Index K = static_cast<Index>(beta.size());
  if (K < 8) throw InconclusiveError("make_dominated_weight: prefix too short", "supply at least 8 values");
  for (double b : beta) {
    if (!(b >= 0.0)) throw ArgumentError("make_dominated_weight: beta must be nonnegative");
  }
  // beta_prime[n] = inf_{k >= n-1} beta_k for n = 1..K (slot 0 unused).
  std::vector<double> suffix_min(beta.begin(), beta.end());
  for (Index i = K - 2; i >= 0; --i) {
    suffix_min[static_cast<std::size_t>(i)] =
        std::min(suffix_min[static_cast<std::size_t>(i)], suffix_min[static_cast<std::size_t>(i + 1)]);
  }
  auto beta_prime = [&](Index n) { return suffix_min[static_cast<std::size_t>(n - 1)]; };

  const Index q = K - K / 4;
  if (!(beta_prime(K) > beta_prime(q))) {
    throw InconclusiveError("make_dominated_weight: beta shows no growth on the trailing quarter",
                            "supply a prefix on which beta visibly tends to infinity");
  }

  Index start = 0;
  for (Index n = 1; n <= K; ++n) {
    if (beta_prime(n) < 1.0) start = n;
  }

  std::vector<Index> bp{1};
  for (Index j = 2;; ++j) {
    const double need = base(-j);
    Index m = std::max(bp.back(), start) + 1;
    while (m <= K && beta_prime(m) < need) ++m;
    if (m > K) break;
    bp.push_back(m);
  }
  if (bp.size() < 2) {
    std::ostringstream hint;
    hint << "beta' reaches " << beta_prime(K) << " at n=" << K << " but base(-2)=" << base(-2)
         << "; supply at least " << 2 * K << " values";
    throw InconclusiveError("make_dominated_weight: prefix too short to place breakpoints", hint.str());
  }
  if (bp.back() < K + 1) bp.push_back(K + 1);

  DominatedWeight out{make_step_weight(base, bp), bp, bp[1] - 1, K - 1};
  std::ostringstream note;
  note << "omega(-n-1) <= beta_n for " << out.n0 << " <= n <= " << out.verified_up_to << " (window-limited)";
  out.weight = out.weight.with_note(note.str());
  return out;
}

SummableWeight make_summable_weight(std::span<const double> eps, const WeightSequence& base) {
  const Index K = static_cast<Index>(eps.size());
  if (K < 8) throw InconclusiveError("make_summable_weight: prefix too short", "supply at least 8 values");
  std::vector<double> sq(eps.size());
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] >= 0.0)) throw ArgumentError("make_summable_weight: eps must be nonnegative");
    sq[i] = eps[i] * eps[i];
  }
  GateOptions gopts;
  gopts.mode = GateMode::Finiteness;
  const ConditionStatus gate = assess_series(sq, gopts);
  if (gate.verdict != Verdict::Converged) {
    throw InconclusiveError("make_summable_weight: cannot certify square summability of eps (" +
                                to_string(gate.verdict) + ")",
                            gate.required_n ? "try n >= " + std::to_string(*gate.required_n) : "extend the prefix");
  }
  const double tail = gate.tail_estimate.value_or(0.0);

  // R[m] = sum_{n >= m} eps_n^2, with the model tail beyond the prefix.
  std::vector<double> R(eps.size() + 1);
  R[eps.size()] = tail;
  for (Index i = K - 1; i >= 0; --i) R[static_cast<std::size_t>(i)] = R[static_cast<std::size_t>(i + 1)] + sq[static_cast<std::size_t>(i)];

  const double ln2 = std::log(2.0);
  auto fits = [&](Index j, Index m) {
    const double r = R[static_cast<std::size_t>(m - 1)];
    if (r == 0.0) return true;
    return 2.0 * base.log_at(-j) + std::log(r) <= -static_cast<double>(j) * ln2;
  };

  std::vector<Index> bp{1};
  for (Index j = 2;; ++j) {
    Index m = bp.back() + 1;
    while (m <= K && !fits(j, m)) ++m;
    if (m > K) break;
    bp.push_back(m);
  }
  if (bp.back() < K + 1) bp.push_back(K + 1);

  SummableWeight out{make_step_weight(base, bp), bp, {}, 0.0, tail, K - 1};
  out.weighted_partial_sums.reserve(eps.size());
  std::vector<double> terms(eps.size());
  for (Index n = 0; n < K; ++n) {
    const double e = eps[static_cast<std::size_t>(n)];
    terms[static_cast<std::size_t>(n)] = e == 0.0 ? 0.0 : std::exp(2.0 * std::log(e) + 2.0 * out.weight.log_at(-n - 1));
  }
  out.weighted_partial_sums = compensated_prefix_sums(terms);

  std::vector<double> block_bounds;
  for (std::size_t j = 0; j < bp.size(); ++j) {
    const Index m = bp[j];
    const double r = m - 1 <= K ? R[static_cast<std::size_t>(m - 1)] : 0.0;
    block_bounds.push_back(r == 0.0 ? 0.0 : std::exp(2.0 * base.log_at(-static_cast<Index>(j + 1)) + std::log(r)));
  }
  out.total_bound = compensated_prefix_sums(block_bounds).back();
  out.weight = out.weight.with_note("weighted sum bounded on the supplied prefix; later blocks window-limited");
  return out;
}

KellayReport kellay_hypotheses_check(const WeightSequence& w, IndexRange window, double b, double c) {
  if (window.lo < 1 || window.size() < 16) throw ArgumentError("kellay_hypotheses_check: need window [lo>=1, ...] of length >= 16");
  const std::size_t size = static_cast<std::size_t>(window.size());
  std::vector<double> L(size);
  for (std::size_t i = 0; i < size; ++i) L[i] = w.log_at(window.lo + static_cast<Index>(i));
  for (std::size_t i = size / 2; i < size; ++i) {
    if (!(L[i] > 0.0)) throw InvalidWeightError("kellay_hypotheses_check: log w_n <= 0 on the window tail");
  }
  auto pos = [&](std::size_t i) { return static_cast<double>(window.lo + static_cast<Index>(i)); };

  KellayReport r;
  r.ratio_nonincreasing = true;
  for (std::size_t i = 0; i + 2 < size; ++i) {
    const double d0 = L[i + 1] - L[i];
    const double d1 = L[i + 2] - L[i + 1];
    if (d1 > d0 + 1e-13 * (1.0 + std::abs(L[i + 2]))) {
      r.ratio_nonincreasing = false;
      break;
    }
  }
  r.log_over_power_nonincreasing = true;
  for (std::size_t i = 0; i + 1 < size; ++i) {
    const double h0 = L[i] / std::pow(pos(i), b);
    const double h1 = L[i + 1] / std::pow(pos(i + 1), b);
    if (h1 > h0 + 1e-12 * std::abs(h0)) {
      r.log_over_power_nonincreasing = false;
      break;
    }
  }
  const std::size_t mid = size / 2;
  const double g_mid = L[mid] - c * std::log(pos(mid));
  const double g_end = L[size - 1] - c * std::log(pos(size - 1));
  r.lower_power_bound = g_end >= g_mid - 1e-12 * (1.0 + std::abs(g_mid));

  std::vector<double> terms(size);
  for (std::size_t i = 0; i < size; ++i) terms[i] = L[i] > 0.0 ? 1.0 / (pos(i) * L[i]) : 0.0;
  GateOptions gopts;
  gopts.mode = GateMode::Finiteness;
  gopts.first_position = window.lo;
  r.harmonic_status = assess_series(terms, gopts);
  r.harmonic_log_sum = r.harmonic_status.partial_sums;
  r.harmonic_log_summable = r.harmonic_status.verdict == Verdict::Converged;

  r.pass = r.ratio_nonincreasing && r.log_over_power_nonincreasing && r.lower_power_bound && r.harmonic_log_summable;
  if (!r.ratio_nonincreasing) {
    r.failure = "consecutive ratio not nonincreasing";
  } else if (!r.log_over_power_nonincreasing) {
    r.failure = "log w_n / n^b not nonincreasing";
  } else if (!r.lower_power_bound) {
    r.failure = "w_n / n^c trends to zero";
  } else if (!r.harmonic_log_summable) {
    r.failure = "sum 1/(n log w_n) not certified finite (" + to_string(r.harmonic_status.verdict) + ")";
  }
  return r;
}

}  // namespace hypinv
