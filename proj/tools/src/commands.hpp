#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "scenario.hpp"

namespace hypinv::cli {

struct Overrides {
  std::optional<Index> n;
  std::optional<std::size_t> grid;
};

struct CommandOutput {
  int exit_code = 0;
  // File name (relative to --out) and contents, in emission order.
  std::vector<std::pair<std::string, std::string>> files;
  std::string summary;
};

// Exit codes shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNotCertified = 2;
inline constexpr int kExitInconclusive = 3;

// Applies --n / --grid; widens the window downward when the cutoff needs room below g.
Scenario apply_overrides(Scenario s, const Overrides& o);

CommandOutput cmd_coeffs(const Scenario& s);
CommandOutput cmd_certify(const Scenario& s);
CommandOutput cmd_witness_scan(const Scenario& s);
CommandOutput cmd_blockprobe(const Scenario& s);
CommandOutput cmd_weights_make(const Scenario& s);
CommandOutput cmd_carleson(const Scenario& s);

// Names of the subcommands that apply to a scenario.
std::vector<std::string> applicable_commands(const Scenario& s);
CommandOutput run_command(const std::string& name, const Scenario& s);

// Shortest round-trip decimal form, locale independent.
std::string fmt(double v);

}  // namespace hypinv::cli
