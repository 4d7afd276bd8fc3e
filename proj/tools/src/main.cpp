#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "hypinv/blockops.hpp"

namespace fs = std::filesystem;
using namespace hypinv;
using namespace hypinv::cli;

namespace {

int write_outputs(const CommandOutput& out, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    std::cerr << "cannot create " << dir.string() << ": " << ec.message() << "\n";
    return kExitUsage;
  }
  for (const auto& [name, content] : out.files) {
    std::ofstream f(dir / name, std::ios::binary);
    f << content;
    if (!f) {
      std::cerr << "cannot write " << (dir / name).string() << "\n";
      return kExitUsage;
    }
  }
  return out.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hyperinvariant-subspace certification and weighted-shift probes"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir = ".";
  std::optional<Index> n_override;
  std::optional<std::size_t> grid_override;

  const std::vector<std::string> names{"coeffs", "certify", "blockprobe", "weights-make", "carleson", "witness-scan"};
  for (const auto& name : names) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--scenario", scenario_path, "scenario file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--n", n_override, "override truncation N");
    sub->add_option("--grid", grid_override, "override xi grid size");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    const Scenario s = apply_overrides(load_scenario(scenario_path), Overrides{n_override, grid_override});
    const CommandOutput out = run_command(command, s);
    const int rc = write_outputs(out, out_dir);
    std::cout << out.summary << "\n";
    return rc;
  } catch (const ScenarioError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const InconclusiveError& e) {
    std::cerr << "inconclusive: " << e.what() << "; " << e.hint() << "\n";
    return kExitInconclusive;
  } catch (const HypothesisGateError& e) {
    std::cerr << e.what() << "\n";
    return kExitNotCertified;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
