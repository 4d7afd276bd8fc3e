#include "hypinv/series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hypinv {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Anchor {
  double log_value = kNegInf;
  double position = 0.0;
  bool ok = false;
};

// Largest term inside [from, to] with its position; smooths out mild oscillation.
Anchor block_max(std::span<const double> log_abs, std::size_t from, std::size_t to, Index first_position) {
  Anchor a;
  for (std::size_t i = from; i <= to; ++i) {
    if (std::isfinite(log_abs[i]) && (!a.ok || log_abs[i] > a.log_value)) {
      a.log_value = log_abs[i];
      a.position = static_cast<double>(first_position) + static_cast<double>(i);
      a.ok = true;
    }
  }
  return a;
}

std::optional<Index> hint_from_exponent(double tail, double target, double exponent, double end_position) {
  if (!(exponent > 1.0 + 1e-6) || !(target > 0.0)) return std::nullopt;
  const double scale = std::pow(tail / target, 1.0 / (exponent - 1.0));
  const double n = std::ceil(end_position * scale);
  if (!std::isfinite(n) || n > 1e15) return static_cast<Index>(1e15);
  return static_cast<Index>(n);
}

ConditionStatus assess_impl(std::span<const double> log_abs, std::vector<double> signed_terms,
                            const GateOptions& opts) {
  if (opts.first_position < 1) throw ArgumentError("series gate: first_position must be >= 1");
  ConditionStatus st;
  const std::size_t n = log_abs.size();
  st.window = static_cast<Index>(n);
  st.partial_sums = compensated_prefix_sums(signed_terms);
  if (n == 0) {
    st.note = "no terms";
    return st;
  }
  for (double v : log_abs) {
    if (std::isnan(v)) throw ArgumentError("series gate: NaN term");
  }

  const double sum = std::abs(st.partial_sums.back());
  const double end_position = static_cast<double>(opts.first_position) + static_cast<double>(n - 1);

  double tail = 0.0;
  double exponent_for_hint = 0.0;
  bool convergent = false;

  if (log_abs.back() == kNegInf) {
    st.model = TailModel::Vanishing;
    st.note = "terms vanish at the end of the window";
    convergent = true;
  } else {
    std::size_t q = static_cast<std::size_t>(std::ceil(opts.window_fraction * static_cast<double>(n)));
    q = std::clamp<std::size_t>(q, 2, n);
    const std::size_t s = n - q;
    bool has_zero = false;
    for (std::size_t i = s; i < n; ++i) has_zero = has_zero || !std::isfinite(log_abs[i]);

    bool decided = false;
    if (!has_zero && q >= 2) {
      bool all_up = true;
      bool all_down = true;
      bool ratios_nonincreasing = true;
      double max_lr = kNegInf;
      double prev_lr = 0.0;
      for (std::size_t i = s; i + 1 < n; ++i) {
        const double lr = log_abs[i + 1] - log_abs[i];
        all_up = all_up && lr >= 0.0;
        all_down = all_down && lr < 0.0;
        if (i > s && lr > prev_lr + 1e-12 * std::abs(prev_lr) + 1e-15) ratios_nonincreasing = false;
        max_lr = std::max(max_lr, lr);
        prev_lr = lr;
      }
      if (all_up) {
        st.model = TailModel::NonDecreasing;
        st.model_rate = std::exp(max_lr);
        st.verdict = Verdict::Diverged;
        st.note = "summand ratio >= 1 across the trailing window";
        return st;
      }
      if (all_down && ratios_nonincreasing) {
        st.model = TailModel::Geometric;
        st.model_rate = std::exp(max_lr);
        tail = std::exp(log_abs.back() + max_lr) / (-std::expm1(max_lr));
        convergent = true;
        decided = true;
        if (tail > 0.0 && sum > 0.0 && opts.mode == GateMode::Tolerance && tail > opts.tail_tol * sum) {
          // Target the projected limit sum + tail rather than the current partial sum.
          const double k = std::log(opts.tail_tol * (sum + tail) / tail) / max_lr;
          st.required_n = static_cast<Index>(n) + static_cast<Index>(std::ceil(k));
        }
      }
    }

    if (!decided) {
      if (n < 16) {
        st.note = "too few terms for an asymptotic tail model";
        return st;
      }
      const std::size_t bw = std::max<std::size_t>(1, n / 20);
      const std::size_t mid = n / 2;
      const Anchor a1 = block_max(log_abs, mid >= bw ? mid - bw : 0, mid - 1, opts.first_position);
      const Anchor a2 = block_max(log_abs, n - bw, n - 1, opts.first_position);
      if (!a1.ok || !a2.ok || a2.position <= a1.position) {
        st.note = "trailing blocks contain no usable terms";
        return st;
      }
      const double m = opts.exponent_margin;
      const double drop = a1.log_value - a2.log_value;
      const double dn = std::log(a2.position) - std::log(a1.position);
      const double p = drop / dn;
      // Tails are extrapolated from the anchor a2 to the end of the window.
      const double t_anchor = std::exp(a2.log_value);
      const double le = std::log(end_position);
      exponent_for_hint = p;
      if (p >= 1.0 + 4.0 * m) {
        st.model = TailModel::Power;
        st.model_rate = p;
        tail = t_anchor * a2.position * std::pow(a2.position / end_position, p - 1.0) / (p - 1.0);
        convergent = true;
      } else if (p <= 1.0 - 2.0 * m) {
        st.model = TailModel::Power;
        st.model_rate = p;
        st.verdict = Verdict::Diverged;
        st.note = "local power exponent at most 1";
        return st;
      } else {
        const double l1 = std::log(a1.position);
        const double l2 = std::log(a2.position);
        if (l1 <= 0.0) {
          st.note = "window too short for the logarithmic scale";
          return st;
        }
        const double dl = std::log(l2) - std::log(l1);
        const double qexp = (drop - dn) / dl;
        if (qexp >= 1.0 + m) {
          st.model = TailModel::LogPower;
          st.model_rate = qexp;
          tail = t_anchor * a2.position * l2 * std::pow(l2 / le, qexp - 1.0) / (qexp - 1.0);
          convergent = true;
        } else if (qexp <= 1.0 - m) {
          st.model = TailModel::LogPower;
          st.model_rate = qexp;
          st.verdict = Verdict::Diverged;
          st.note = "logarithmic exponent at most 1";
          return st;
        } else {
          if (l1 <= 1.0) {
            st.note = "window too short for the iterated logarithmic scale";
            return st;
          }
          const double dll = std::log(std::log(l2)) - std::log(std::log(l1));
          const double rexp = (drop - dn - dl) / dll;
          st.model = TailModel::LogLogPower;
          st.model_rate = rexp;
          if (rexp >= 1.0 + m) {
            const double ll2 = std::log(l2);
            tail = t_anchor * a2.position * l2 * ll2 * std::pow(ll2 / std::log(le), rexp - 1.0) / (rexp - 1.0);
            convergent = true;
          } else if (rexp <= 1.0 - m) {
            st.verdict = Verdict::Diverged;
            st.note = "iterated logarithmic exponent at most 1";
            return st;
          } else {
            st.note = "tail behaviour undecided at three logarithmic scales";
            return st;
          }
        }
      }
    }
  }

  if (!convergent) return st;
  st.tail_estimate = tail;
  if (opts.mode == GateMode::Finiteness) {
    st.verdict = Verdict::Converged;
    return st;
  }
  if (tail == 0.0 || tail <= opts.tail_tol * sum) {
    st.verdict = Verdict::Converged;
    return st;
  }
  st.verdict = Verdict::Inconclusive;
  if (!st.required_n && st.model != TailModel::Geometric) {
    st.required_n = hint_from_exponent(tail, opts.tail_tol * sum, exponent_for_hint, end_position);
  }
  st.note = "tail estimate above tolerance";
  return st;
}

}  // namespace

std::vector<double> compensated_prefix_sums(std::span<const double> terms) {
  std::vector<double> out;
  out.reserve(terms.size());
  double s = 0.0;
  double c = 0.0;
  for (double t : terms) {
    const double u = s + t;
    if (std::abs(s) >= std::abs(t)) {
      c += (s - u) + t;
    } else {
      c += (t - u) + s;
    }
    s = u;
    out.push_back(s + c);
  }
  return out;
}

ConditionStatus assess_series_log(std::span<const double> log_terms, const GateOptions& opts) {
  std::vector<double> linear(log_terms.size());
  for (std::size_t i = 0; i < log_terms.size(); ++i) linear[i] = std::exp(log_terms[i]);
  return assess_impl(log_terms, std::move(linear), opts);
}

ConditionStatus assess_series(std::span<const double> terms, const GateOptions& opts) {
  std::vector<double> log_abs(terms.size());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    log_abs[i] = terms[i] == 0.0 ? kNegInf : std::log(std::abs(terms[i]));
  }
  return assess_impl(log_abs, std::vector<double>(terms.begin(), terms.end()), opts);
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Converged: return "Converged";
    case Verdict::Diverged: return "Diverged";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

std::string to_string(TailModel m) {
  switch (m) {
    case TailModel::None: return "none";
    case TailModel::Vanishing: return "vanishing";
    case TailModel::Geometric: return "geometric";
    case TailModel::Power: return "power";
    case TailModel::LogPower: return "log-power";
    case TailModel::LogLogPower: return "loglog-power";
    case TailModel::NonDecreasing: return "non-decreasing";
  }
  return "none";
}

}  // namespace hypinv
