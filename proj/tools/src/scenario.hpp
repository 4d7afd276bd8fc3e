#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hypinv/certify.hpp"
#include "hypinv/common.hpp"
#include "hypinv/inner.hpp"
#include "hypinv/weights.hpp"

namespace hypinv::cli {

// Parse or validation failure; line is 1-based, 0 when unknown.
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(const std::string& path, int line, const std::string& msg)
      : std::runtime_error(path + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + msg) {}
};

struct WeightSpec {
  std::string preset;
  std::map<std::string, double> params;
};

struct VectorSpec {
  // chi_minus_one | kernel | coefficients
  std::string preset = "chi_minus_one";
  double r = 0.5;
  Index offset = 0;
  std::vector<cplx> coeffs;
};

struct BlockSpec {
  double alpha = 0.0;
  std::vector<Index> windows;
  Index n_max = 200;
  double coupling_scale = 1.0;
  std::vector<double> lambda_radii{0.0, 0.5, 0.9};
  Index lambda_rays = 8;
  Index identity_degree = 50;
  std::uint64_t seed = 7;
};

struct QuasianalyticSpec {
  double beta_prime = 0.8;
  Index lo = 10;
  Index hi = 100000;
};

struct SequenceSpec {
  // log: scale log(n+2); power: scale (n+1)^exponent
  std::string kind = "power";
  double scale = 1.0;
  double exponent = 1.0;
  Index length = 4096;
};

struct WeightsMakeSpec {
  // step | dominated | summable
  std::string construction;
  SequenceSpec sequence;
  std::vector<Index> breakpoints;
  Index check_radius = 100000;
};

struct Scenario {
  std::string path;
  std::string id;
  // bilateral | unilateral | block
  std::string kind = "bilateral";
  WeightSpec weight;
  std::vector<Atom> atoms;
  VectorSpec vector;
  Index n_coeffs = 0;
  Index window_lo = 0;
  Index window_hi = 0;
  std::size_t xi_grid = 64;
  double tail_tol = 1e-8;
  double residual_tol = 1e-6;
  std::optional<BlockSpec> block;
  std::optional<QuasianalyticSpec> quasianalytic;
  std::optional<WeightsMakeSpec> weights_make;
  std::optional<std::vector<double>> carleson_angles;
  std::string sha256;
};

Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& text, const std::string& path);

std::string sha256_hex(const std::string& bytes);

WeightSequence make_weight(const WeightSpec& spec);
InnerFn make_inner(const Scenario& s);
// Coefficients of the scenario vector g (or h for the unilateral model).
CoeffVector make_vector(const Scenario& s);
CertifyInput make_certify_input(const Scenario& s);

}  // namespace hypinv::cli
