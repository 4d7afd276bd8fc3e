#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hypinv/common.hpp"

namespace hypinv {

enum class Verdict { Converged, Diverged, Inconclusive };

// Tolerance: Converged needs the estimated tail below tail_tol relative to the partial sum.
// Finiteness: Converged as soon as the tail model is convergent; the tail is still reported.
enum class GateMode { Tolerance, Finiteness };

enum class TailModel { None, Vanishing, Geometric, Power, LogPower, LogLogPower, NonDecreasing };

struct GateOptions {
  double tail_tol = 1e-8;
  double window_fraction = 0.25;
  GateMode mode = GateMode::Tolerance;
  double exponent_margin = 0.25;
  // Position of the first term used by the power/log models; must be >= 1.
  Index first_position = 1;
};

struct ConditionStatus {
  Verdict verdict = Verdict::Inconclusive;
  std::vector<double> partial_sums;
  std::optional<double> tail_estimate;
  Index window = 0;
  TailModel model = TailModel::None;
  double model_rate = 0.0;
  std::optional<Index> required_n;
  std::string note;
  std::vector<std::string> assumptions;

  double sum() const { return partial_sums.empty() ? 0.0 : partial_sums.back(); }
};

// Terms are given as natural logs; -inf marks an exact zero.
ConditionStatus assess_series_log(std::span<const double> log_terms, const GateOptions& opts = {});
ConditionStatus assess_series(std::span<const double> terms, const GateOptions& opts = {});

std::string to_string(Verdict v);
std::string to_string(TailModel m);

// Neumaier-compensated running sums.
std::vector<double> compensated_prefix_sums(std::span<const double> terms);

}  // namespace hypinv
