#pragma once

#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hypinv/common.hpp"
#include "hypinv/series.hpp"

namespace hypinv {

enum class WeightKind { Preset, StepFromBase, Tabulated };

// A positive function on the integers, evaluated in the log domain.
// Holds two-sided weights (omega) as well as one-sided sequences such as w_n, p(n), beta_n, eps_n.
class WeightSequence {
 public:
  using LogFn = std::function<double(Index)>;

  WeightSequence(WeightKind kind, std::string name, LogFn log_fn, std::map<std::string, double> params = {});

  double operator()(Index n) const;
  double log_at(Index n) const;

  WeightKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  const std::map<std::string, double>& params() const { return params_; }
  const std::string& support_note() const { return note_; }

  WeightSequence with_note(std::string note) const;
  // Pointwise power w(n)^s.
  WeightSequence power(double s) const;

 private:
  WeightKind kind_;
  std::string name_;
  std::shared_ptr<const LogFn> log_fn_;
  std::map<std::string, double> params_;
  std::string note_;
};

namespace presets {

// omega(n) = c everywhere.
WeightSequence constant(double c = 1.0);
// omega(-n) = base^n for n > 0, 1 for n >= 0.
WeightSequence geometric(double base);
// omega(-n) = exp(c sqrt(n)).
WeightSequence exp_sqrt(double c = 1.0);
// omega(-n) = exp(n / (log n + 1)^beta).
WeightSequence exp_sublinear(double beta);
// omega(-n) = (1 + n)^s.
WeightSequence polynomial(double s);
// w_n = n^{(log log n)^a} for n >= n0, extended below n0 by log w_n = log w_{n0} (n/n0)^b.
// One-sided: defined for n >= 1.
WeightSequence loglog_power(double a, double b = 0.45);
// Two-sided weight with omega(-n) = loglog_power(a, b)(n), omega(n) = 1 for n >= 0.
WeightSequence loglog_power_dissymmetric(double a, double b = 0.45);
// p(n) = n / (log n + 1)^beta_prime for n >= 1, one-sided.
WeightSequence sublinear_companion(double beta_prime);
// Values given on [range.lo, range.hi]; evaluation outside the range throws.
WeightSequence tabulated(IndexRange range, std::vector<double> values, std::string name = "tabulated");

// The junction index used by loglog_power.
Index loglog_power_junction(double a, double b);

}  // namespace presets

struct DissymmetricReport {
  bool pass = false;
  double measured_2_1_constant = 0.0;
  // Samples of omega(-n)^{1/n}; expected to drift toward 1 but only reported.
  std::vector<std::pair<Index, double>> root_trend;
  bool root_trend_decreasing = false;
  bool window_limited = true;
  std::string failure;
};

DissymmetricReport check_dissymmetric(const WeightSequence& w, IndexRange window);

struct LogConcaveReport {
  bool log_concave = false;
  bool submultiplicative_sampled = false;
  std::size_t pairs_checked = 0;
  std::string failure;
};

LogConcaveReport check_log_concave_submultiplicative(const WeightSequence& w, IndexRange window);

// omega(n) = 1 for n >= 0 and omega(n) = base(-j) for -N_{j+1}+1 <= n <= -N_j.
// Past the last breakpoint the gaps continue with the last gap.
WeightSequence make_step_weight(const WeightSequence& base, std::vector<Index> breakpoints);

struct DominatedWeight {
  WeightSequence weight;
  std::vector<Index> breakpoints;
  Index n0 = 0;
  // Index up to which the supplied prefix determines the inequality.
  Index verified_up_to = 0;
};

// beta[n] holds beta_n for n = 0..size-1.
DominatedWeight make_dominated_weight(std::span<const double> beta, const WeightSequence& base);

struct SummableWeight {
  WeightSequence weight;
  std::vector<Index> breakpoints;
  // Partial sums of eps_n^2 omega(-n-1)^2 over the supplied prefix.
  std::vector<double> weighted_partial_sums;
  double total_bound = 0.0;
  double eps_tail_estimate = 0.0;
  Index verified_up_to = 0;
};

// eps[n] holds eps_n for n = 0..size-1.
SummableWeight make_summable_weight(std::span<const double> eps, const WeightSequence& base);

struct KellayReport {
  bool ratio_nonincreasing = false;
  bool log_over_power_nonincreasing = false;
  bool lower_power_bound = false;
  bool harmonic_log_summable = false;
  bool pass = false;
  std::vector<double> harmonic_log_sum;
  ConditionStatus harmonic_status;
  bool window_limited = true;
  std::string failure;
};

KellayReport kellay_hypotheses_check(const WeightSequence& w, IndexRange window, double b, double c);

}  // namespace hypinv
