#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hypinv/calculus.hpp"
#include "hypinv/common.hpp"
#include "hypinv/inner.hpp"
#include "hypinv/series.hpp"
#include "hypinv/shifts.hpp"
#include "hypinv/weights.hpp"

namespace hypinv {

// sum_{n<=N} |(1/theta)^(n)|^2 / omega(-1-n)^2.
ConditionStatus cond_esterle(const WeightSequence& w, const InnerFn& theta, Index N, const GateOptions& opts = {});

// sum_{n<=N} |(f/theta)^(n)|^2 / omega(-1-n)^2. Membership f in theta H^2 is not decided; it is an assumption.
ConditionStatus cond_cofactor(const WeightSequence& w, const InnerFn& theta, const CoeffVector& f, Index N,
                           const GateOptions& opts = {});

// Coefficients of f/theta for n = 0..N.
std::vector<cplx> divide_by_inner(const CoeffVector& f, const InnerFn& theta, Index N);

// sum_{n<N} |(1/theta)^(n)| s_n with s_n = ||T*^n X* g||; N = step_norms.size().
ConditionStatus cond_step_series(const InnerFn& theta, std::span<const double> step_norms, const GateOptions& opts = {});
// Same with step norms given as natural logs.
ConditionStatus cond_step_series_log(const InnerFn& theta, std::span<const double> log_step_norms,
                             const GateOptions& opts = {});

struct L2Report {
  ConditionStatus status;
  // Present when the square sum converged and the weight construction succeeded.
  std::optional<SummableWeight> weight;
  std::string weight_note;
};

// sum ||T*^n X* g||^2 in finiteness mode; chains into make_summable_weight on convergence.
L2Report cond_l2(std::span<const double> step_norms, const WeightSequence& base = presets::exp_sqrt());

struct DecayReport {
  double C_fit = 0.0;
  double early_max = 0.0;
  double late_max = 0.0;
  bool pass = false;
  Index tail_from = 0;
};

// Smallest C with s_n <= C / w_{n+1} on the second half of the prefix; passes when the last quarter
// does not exceed the third.
DecayReport cond_w_decay(std::span<const double> step_norms, const WeightSequence& w);

struct Clause {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  bool window_limited = true;
  std::string note;
};

struct QuasianalyticReport {
  std::vector<Clause> clauses;
  ConditionStatus log_weight_square_status;
  bool pass = false;

  const Clause& clause(const std::string& name) const;
};

// sum_{n in window} (log n / omega(-n))^2 in finiteness mode; window.lo >= 2.
ConditionStatus log_weight_square_sum(const WeightSequence& w, IndexRange window);

// Growth-balance clauses for omega and a positive sequence p on window (window.lo >= 2).
QuasianalyticReport quasianalytic_conditions(const WeightSequence& w, const WeightSequence& p, IndexRange window);

// sum log ||y_n|| / (n^2 + 1) in finiteness mode.
ConditionStatus log_growth_sum(std::span<const double> y_norms);
// Same with log ||y_n|| given directly.
ConditionStatus log_growth_sum_log(std::span<const double> log_y_norms);

struct OrderingReport {
  bool holds = true;
  double max_ratio = 0.0;  // max of lhs / rhs over prefixes with rhs > 0
  Index first_violation = -1;
  std::vector<double> lhs;
  std::vector<double> rhs;
};

// Checks sum |c_n| s_n <= sqrt(sum |c_n|^2 / omega(-1-n)^2) sqrt(sum s_n^2 omega(-1-n)^2) on every prefix.
OrderingReport cauchy_schwarz_ordering(const WeightSequence& w, const InnerFn& theta,
                                       std::span<const double> step_norms, double rel_tol = 1e-12);

enum class ScenarioKind { Bilateral, Unilateral };

struct CertifyInput {
  std::string id;
  ScenarioKind kind = ScenarioKind::Bilateral;
  WeightSequence weight = presets::constant();
  InnerFn theta;
  // Coefficients of g (bilateral) or of the starting vector h (unilateral).
  CoeffVector g;
  Index n_coeffs = 0;
  TruncationWindow window;
  std::size_t xi_grid = 64;
  double tail_tol = 1e-8;
  double residual_tol = 1e-6;
  double separation_factor = 1e3;
};

struct WitnessRow {
  cplx xi;
  double diff_norm = 0.0;
  double residual = 0.0;
  double u_norm = 0.0;
  double v_norm = 0.0;
  double tail_bound = 0.0;
  bool separated = false;
};

struct WitnessSummary {
  std::vector<WitnessRow> rows;
  std::optional<std::size_t> best;
  std::size_t separated_count = 0;
};

enum class Conclusion { Certified, NotCertified, Inconclusive };

struct CertificateReport {
  std::string id;
  std::map<std::string, ConditionStatus> conditions;
  std::string governing;
  WitnessSummary witness;
  Conclusion conclusion = Conclusion::Inconclusive;
  std::string conclusion_text;
  std::optional<Index> required_n;
  Index truncation = 0;
  std::vector<std::string> assumptions;
  // Unilateral scenarios: ||theta(T*)u - u0|| / ||u0||.
  std::optional<double> identity_relative_residual;
  std::vector<double> step_norms;
};

// ||T*^n X* g|| for n = 0..N, measured on [window.lo - N - 1, window.hi] so nothing leaves the section.
std::vector<double> measured_step_norms(const WeightSequence& w, const CoeffVector& g, TruncationWindow window,
                                        Index N);

struct CutoffSelection {
  Index N = 0;
  IdentityCheck check;
};

// Smallest N from start (following required_n hints, capped at N_max) with a Converged series gate.
CutoffSelection select_identity_cutoff(const InnerFn& theta, const TruncatedOperator& T, const Vector& u0,
                                       Index start, Index N_max, const GateOptions& opts = {});

// Witness pairs on the grid xi_k = exp(2 pi i k / xi_grid) over in.window.
WitnessSummary scan_witness(const CertifyInput& in);

CertificateReport certify_scenario(const CertifyInput& in);

std::string to_string(Conclusion c);
int exit_code(Conclusion c);

}  // namespace hypinv
