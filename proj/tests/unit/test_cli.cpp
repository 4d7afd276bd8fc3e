#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "commands.hpp"
#include "json.hpp"
#include "scenario.hpp"

using namespace hypinv;
using namespace hypinv::cli;

namespace {

const std::string kMinimal = R"(id: t
kind: bilateral
weight:
  preset: exp_sublinear
  params: {beta: 0.5}
measure:
  atoms:
    - {angle: 0.0, mass: 1.0}
truncation:
  n_coeffs: 40
  window_lo: -41
  window_hi: 8
xi_grid: 4
)";

int error_line(const std::string& text) {
  try {
    parse_scenario(text, "x.yaml");
  } catch (const ScenarioError& e) {
    const std::string what = e.what();
    const auto colon = what.find(':');
    const auto next = what.find(':', colon + 1);
    if (colon == std::string::npos || next == std::string::npos) return 0;
    return std::stoi(what.substr(colon + 1, next - colon - 1));
  }
  return -1;
}

std::string with_line(const std::string& base, const std::string& line) { return base + line + "\n"; }

const std::string& file(const CommandOutput& out, const std::string& name) {
  for (const auto& [n, content] : out.files) {
    if (n == name) return content;
  }
  throw std::runtime_error("missing output " + name);
}

}  // namespace

TEST(Scenario, ParsesMinimalFile) {
  const Scenario s = parse_scenario(kMinimal, "x.yaml");
  EXPECT_EQ(s.id, "t");
  EXPECT_EQ(s.kind, "bilateral");
  EXPECT_EQ(s.weight.preset, "exp_sublinear");
  EXPECT_EQ(s.weight.params.at("beta"), 0.5);
  ASSERT_EQ(s.atoms.size(), 1u);
  EXPECT_EQ(s.atoms[0].mass, 1.0);
  EXPECT_EQ(s.n_coeffs, 40);
  EXPECT_EQ(s.window_lo, -41);
  EXPECT_EQ(s.xi_grid, 4u);
  EXPECT_EQ(s.tail_tol, 1e-8);
  EXPECT_EQ(s.sha256, sha256_hex(kMinimal));
}

TEST(Scenario, UnknownKeysReportTheirLine) {
  EXPECT_EQ(error_line(with_line(kMinimal, "xi_gird: 8")), 14);
  const std::string nested = R"(id: t
weight:
  preset: constant
  parms: {c: 1}
truncation: {n_coeffs: 4, window_lo: -5, window_hi: 4}
)";
  EXPECT_EQ(error_line(nested), 4);
}

TEST(Scenario, RejectsBadValues) {
  EXPECT_THROW(parse_scenario(with_line(kMinimal, "tolerances: {tail_tol: -1}"), "x"), ScenarioError);
  EXPECT_THROW(parse_scenario("id: t\nweight: {preset: nope}\ntruncation: {n_coeffs: 4, window_lo: -5, window_hi: 4}\n", "x"),
               ScenarioError);
  EXPECT_THROW(parse_scenario("id: t\nweight: {preset: constant, params: {beta: 1}}\ntruncation: {n_coeffs: 4, window_lo: -5, window_hi: 4}\n", "x"),
               ScenarioError);
  EXPECT_THROW(parse_scenario("id: t\nweight: {preset: constant}\n", "x"), ScenarioError);
  EXPECT_THROW(parse_scenario("id: t\nweight: {preset: constant}\ntruncation: {n_coeffs: 4, window_lo: -5, window_hi: 4}\nxi_grid: -3\n", "x"),
               ScenarioError);
  EXPECT_THROW(parse_scenario("id: [unclosed\n", "x"), ScenarioError);
  EXPECT_THROW(load_scenario("/nonexistent/file.yaml"), ScenarioError);
}

TEST(Scenario, Sha256KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(Scenario, OverridesWidenWindow) {
  const Scenario s = parse_scenario(kMinimal, "x");
  const Scenario o = apply_overrides(s, Overrides{Index{100}, std::size_t{16}});
  EXPECT_EQ(o.n_coeffs, 100);
  EXPECT_EQ(o.xi_grid, 16u);
  EXPECT_EQ(o.window_lo, -101);
  EXPECT_THROW(apply_overrides(s, Overrides{Index{0}, std::nullopt}), ArgumentError);
}

TEST(Commands, CoeffsTrivialMeasure) {
  Scenario s = parse_scenario(kMinimal, "x");
  s.atoms.clear();
  const CommandOutput out = cmd_coeffs(s);
  EXPECT_EQ(out.exit_code, 0);
  const std::string& csv = file(out, "t_coeffs.csv");
  EXPECT_NE(csv.find("\n0,1,0,1,0,0\n"), std::string::npos);
  EXPECT_NE(csv.find("\n1,0,0,0,0,"), std::string::npos);
}

TEST(Commands, CoeffsSingleAtomConstantTerms) {
  const CommandOutput out = cmd_coeffs(parse_scenario(kMinimal, "x"));
  const std::string& csv = file(out, "t_coeffs.csv");
  const std::string row0 = "\n0," + fmt(std::exp(-1.0)) + ",0," + fmt(std::exp(1.0)) + ",0,";
  EXPECT_NE(csv.find(row0), std::string::npos) << csv.substr(0, 400);
}

TEST(Commands, ReportsCarryHashAndTruncation) {
  const Scenario s = parse_scenario(kMinimal, "x");
  for (const auto& name : applicable_commands(s)) {
    const CommandOutput out = run_command(name, s);
    for (const auto& [fname, content] : out.files) {
      EXPECT_NE(content.find(s.sha256), std::string::npos) << name << " " << fname;
      EXPECT_NE(content.find("n_coeffs"), std::string::npos) << name << " " << fname;
    }
  }
}

TEST(Commands, RepeatedRunsAreByteIdentical) {
  const Scenario s = parse_scenario(kMinimal, "x");
  for (const auto& name : applicable_commands(s)) {
    const CommandOutput a = run_command(name, s);
    const CommandOutput b = run_command(name, s);
    EXPECT_EQ(a.exit_code, b.exit_code);
    EXPECT_EQ(a.files, b.files) << name;
  }
}

TEST(Commands, CertifyTrivialInnerExitsTwo) {
  Scenario s = parse_scenario(kMinimal, "x");
  s.atoms.clear();
  EXPECT_EQ(cmd_certify(s).exit_code, kExitNotCertified);
}

TEST(Commands, BlockGateFailureNamesClause) {
  const std::string text = R"(id: b
kind: block
weight: {preset: polynomial, params: {s: 0.25}}
truncation: {n_coeffs: 10, window_lo: -64, window_hi: 64}
block: {alpha: 0.0, windows: [64], n_max: 10}
)";
  const CommandOutput out = cmd_blockprobe(parse_scenario(text, "x"));
  EXPECT_EQ(out.exit_code, kExitNotCertified);
  EXPECT_NE(file(out, "b_blockprobe.json").find("\"gate_failure\": \"sum (log n / omega(-n))^2 converges\""),
            std::string::npos);
}

TEST(Commands, CarlesonUsesGivenAngles) {
  Scenario s = parse_scenario(kMinimal, "x");
  s.carleson_angles = std::vector<double>{0.0, kPi};
  const CommandOutput out = cmd_carleson(s);
  const auto j = nlohmann::json::parse(file(out, "t_carleson.json"));
  EXPECT_NEAR(j.at("sum").get<double>(), -std::log(2.0), 1e-12);
  EXPECT_EQ(j.at("points").get<int>(), 2);
}

TEST(Commands, FormatRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.0}) EXPECT_EQ(std::stod(fmt(v)), v);
  EXPECT_EQ(fmt(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_THROW(run_command("nope", parse_scenario(kMinimal, "x")), ArgumentError);
}
