#include "scenario.hpp"

#include <openssl/evp.h>
#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace hypinv::cli {

namespace {

class Reader {
 public:
  explicit Reader(std::string path) : path_(std::move(path)) {}

  [[noreturn]] void fail(const YAML::Node& n, const std::string& msg) const {
    throw ScenarioError(path_, n.IsDefined() ? n.Mark().line + 1 : 0, msg);
  }

  void expect_map(const YAML::Node& n, const std::string& where) const {
    if (!n.IsMap()) fail(n, where + " must be a mapping");
  }

  void check_keys(const YAML::Node& n, const std::set<std::string>& allowed, const std::string& where) const {
    expect_map(n, where);
    for (const auto& kv : n) {
      const std::string key = kv.first.as<std::string>();
      if (!allowed.count(key)) {
        throw ScenarioError(path_, kv.first.Mark().line + 1, "unknown key '" + key + "' in " + where);
      }
    }
  }

  template <typename T>
  T get(const YAML::Node& n, const std::string& what) const {
    try {
      return n.as<T>();
    } catch (const YAML::Exception&) {
      fail(n, "cannot read " + what);
    }
  }

  template <typename T>
  T required(const YAML::Node& parent, const std::string& key, const std::string& where) const {
    const YAML::Node n = parent[key];
    if (!n.IsDefined()) fail(parent, "missing key '" + key + "' in " + where);
    return get<T>(n, where + "." + key);
  }

  template <typename T>
  T optional(const YAML::Node& parent, const std::string& key, T fallback, const std::string& where) const {
    const YAML::Node n = parent[key];
    if (!n.IsDefined()) return fallback;
    return get<T>(n, where + "." + key);
  }

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

SequenceSpec read_sequence(const Reader& rd, const YAML::Node& n) {
  rd.check_keys(n, {"kind", "scale", "exponent", "length"}, "weights_make.sequence");
  SequenceSpec s;
  s.kind = rd.optional<std::string>(n, "kind", s.kind, "weights_make.sequence");
  if (s.kind != "power" && s.kind != "log") rd.fail(n["kind"], "sequence kind must be power or log");
  s.scale = rd.optional<double>(n, "scale", s.scale, "weights_make.sequence");
  s.exponent = rd.optional<double>(n, "exponent", s.exponent, "weights_make.sequence");
  s.length = rd.optional<Index>(n, "length", s.length, "weights_make.sequence");
  if (s.length < 8) rd.fail(n, "sequence length must be >= 8");
  return s;
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  EVP_DigestUpdate(ctx, bytes.data(), bytes.size());
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError(path, 0, "cannot open scenario file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path);
}

Scenario parse_scenario(const std::string& text, const std::string& path) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ScenarioError(path, e.mark.line + 1, e.msg);
  }
  const Reader rd(path);
  rd.check_keys(root, {"id", "kind", "weight", "measure", "vector", "truncation", "xi_grid", "tolerances", "block",
                       "quasianalytic", "weights_make", "carleson"},
                "scenario");
  Scenario s;
  s.path = path;
  s.sha256 = sha256_hex(text);
  s.id = rd.required<std::string>(root, "id", "scenario");
  s.kind = rd.optional<std::string>(root, "kind", s.kind, "scenario");
  if (s.kind != "bilateral" && s.kind != "unilateral" && s.kind != "block") {
    rd.fail(root["kind"], "kind must be bilateral, unilateral or block");
  }

  const YAML::Node w = root["weight"];
  if (!w.IsDefined()) rd.fail(root, "missing key 'weight' in scenario");
  rd.check_keys(w, {"preset", "params"}, "weight");
  s.weight.preset = rd.required<std::string>(w, "preset", "weight");
  if (w["params"].IsDefined()) {
    rd.expect_map(w["params"], "weight.params");
    for (const auto& kv : w["params"]) {
      s.weight.params[kv.first.as<std::string>()] = rd.get<double>(kv.second, "weight.params");
    }
  }
  try {
    (void)make_weight(s.weight);
  } catch (const std::exception& e) {
    rd.fail(w, e.what());
  }

  if (root["measure"].IsDefined()) {
    const YAML::Node m = root["measure"];
    rd.check_keys(m, {"atoms"}, "measure");
    const YAML::Node atoms = m["atoms"];
    if (atoms.IsDefined()) {
      if (!atoms.IsSequence()) rd.fail(atoms, "measure.atoms must be a list");
      for (const auto& a : atoms) {
        rd.check_keys(a, {"angle", "mass"}, "measure.atoms[]");
        Atom at;
        at.angle = rd.required<double>(a, "angle", "measure.atoms[]");
        at.mass = rd.required<double>(a, "mass", "measure.atoms[]");
        if (!(at.mass > 0.0)) rd.fail(a, "atom mass must be positive");
        s.atoms.push_back(at);
      }
    }
    try {
      (void)SingularMeasure(s.atoms);
    } catch (const std::exception& e) {
      rd.fail(m, e.what());
    }
  }

  if (root["vector"].IsDefined()) {
    const YAML::Node v = root["vector"];
    rd.check_keys(v, {"preset", "r", "offset", "re", "im"}, "vector");
    s.vector.preset = rd.optional<std::string>(v, "preset", s.vector.preset, "vector");
    if (s.vector.preset == "kernel") {
      s.vector.r = rd.required<double>(v, "r", "vector");
      if (!(s.vector.r >= 0.0 && s.vector.r < 1.0)) rd.fail(v["r"], "kernel r must lie in [0, 1)");
    } else if (s.vector.preset == "coefficients") {
      s.vector.offset = rd.required<Index>(v, "offset", "vector");
      const auto re = rd.required<std::vector<double>>(v, "re", "vector");
      const auto im = rd.optional<std::vector<double>>(v, "im", std::vector<double>(re.size(), 0.0), "vector");
      if (re.empty() || im.size() != re.size()) rd.fail(v, "vector re/im must be nonempty and of equal length");
      for (std::size_t i = 0; i < re.size(); ++i) s.vector.coeffs.emplace_back(re[i], im[i]);
    } else if (s.vector.preset != "chi_minus_one") {
      rd.fail(v["preset"], "vector preset must be chi_minus_one, kernel or coefficients");
    }
  }

  const YAML::Node t = root["truncation"];
  if (!t.IsDefined()) rd.fail(root, "missing key 'truncation' in scenario");
  rd.check_keys(t, {"n_coeffs", "window_lo", "window_hi"}, "truncation");
  s.n_coeffs = rd.required<Index>(t, "n_coeffs", "truncation");
  s.window_lo = rd.required<Index>(t, "window_lo", "truncation");
  s.window_hi = rd.required<Index>(t, "window_hi", "truncation");
  if (s.n_coeffs < 1) rd.fail(t["n_coeffs"], "n_coeffs must be >= 1");
  if (s.window_lo >= s.window_hi) rd.fail(t, "window_lo must be below window_hi");

  const Index grid = rd.optional<Index>(root, "xi_grid", 64, "scenario");
  if (grid < 1) rd.fail(root["xi_grid"], "xi_grid must be >= 1");
  s.xi_grid = static_cast<std::size_t>(grid);

  if (root["tolerances"].IsDefined()) {
    const YAML::Node tol = root["tolerances"];
    rd.check_keys(tol, {"tail_tol", "residual_tol"}, "tolerances");
    s.tail_tol = rd.optional<double>(tol, "tail_tol", s.tail_tol, "tolerances");
    s.residual_tol = rd.optional<double>(tol, "residual_tol", s.residual_tol, "tolerances");
    if (!(s.tail_tol > 0.0) || !(s.residual_tol > 0.0)) rd.fail(tol, "tolerances must be positive");
  }

  if (root["block"].IsDefined()) {
    const YAML::Node b = root["block"];
    rd.check_keys(b, {"alpha", "windows", "n_max", "coupling_scale", "lambda_radii", "lambda_rays", "identity_degree", "seed"},
                  "block");
    BlockSpec bs;
    bs.alpha = rd.optional<double>(b, "alpha", bs.alpha, "block");
    if (!(bs.alpha > -1.0) || bs.alpha > 0.0) rd.fail(b["alpha"], "block.alpha must lie in (-1, 0]");
    bs.windows = rd.required<std::vector<Index>>(b, "windows", "block");
    if (bs.windows.empty()) rd.fail(b["windows"], "block.windows must be nonempty");
    for (Index W : bs.windows) {
      if (W < 64) rd.fail(b["windows"], "block windows must be >= 64");
    }
    bs.n_max = rd.optional<Index>(b, "n_max", bs.n_max, "block");
    if (bs.n_max < 1) rd.fail(b["n_max"], "block.n_max must be >= 1");
    bs.coupling_scale = rd.optional<double>(b, "coupling_scale", bs.coupling_scale, "block");
    bs.lambda_radii = rd.optional<std::vector<double>>(b, "lambda_radii", bs.lambda_radii, "block");
    for (double r : bs.lambda_radii) {
      if (!(r >= 0.0 && r < 1.0)) rd.fail(b["lambda_radii"], "lambda radii must lie in [0, 1)");
    }
    bs.lambda_rays = rd.optional<Index>(b, "lambda_rays", bs.lambda_rays, "block");
    if (bs.lambda_rays < 1) rd.fail(b["lambda_rays"], "block.lambda_rays must be >= 1");
    bs.identity_degree = rd.optional<Index>(b, "identity_degree", bs.identity_degree, "block");
    if (bs.identity_degree < 1 || bs.identity_degree >= bs.windows.front()) {
      rd.fail(b, "block.identity_degree must lie in [1, first window)");
    }
    bs.seed = rd.optional<std::uint64_t>(b, "seed", bs.seed, "block");
    s.block = bs;
  }
  if (s.kind == "block" && !s.block) rd.fail(root, "kind block needs a block section");

  if (root["quasianalytic"].IsDefined()) {
    const YAML::Node q = root["quasianalytic"];
    rd.check_keys(q, {"beta_prime", "window"}, "quasianalytic");
    QuasianalyticSpec qs;
    qs.beta_prime = rd.required<double>(q, "beta_prime", "quasianalytic");
    const auto win = rd.optional<std::vector<Index>>(q, "window", {qs.lo, qs.hi}, "quasianalytic");
    if (win.size() != 2 || win[0] < 2 || win[1] < win[0] + 15) rd.fail(q, "quasianalytic.window must be [lo >= 2, hi >= lo + 15]");
    qs.lo = win[0];
    qs.hi = win[1];
    s.quasianalytic = qs;
  }

  if (root["weights_make"].IsDefined()) {
    const YAML::Node m = root["weights_make"];
    rd.check_keys(m, {"construction", "sequence", "breakpoints", "check_radius"}, "weights_make");
    WeightsMakeSpec ws;
    ws.construction = rd.required<std::string>(m, "construction", "weights_make");
    if (ws.construction != "step" && ws.construction != "dominated" && ws.construction != "summable") {
      rd.fail(m["construction"], "construction must be step, dominated or summable");
    }
    if (m["sequence"].IsDefined()) ws.sequence = read_sequence(rd, m["sequence"]);
    ws.breakpoints = rd.optional<std::vector<Index>>(m, "breakpoints", {}, "weights_make");
    if (ws.construction == "step" && ws.breakpoints.empty()) rd.fail(m, "step construction needs breakpoints");
    ws.check_radius = rd.optional<Index>(m, "check_radius", ws.check_radius, "weights_make");
    if (ws.check_radius < 16) rd.fail(m["check_radius"], "check_radius must be >= 16");
    s.weights_make = ws;
  }

  if (root["carleson"].IsDefined()) {
    const YAML::Node c = root["carleson"];
    rd.check_keys(c, {"angles"}, "carleson");
    s.carleson_angles = rd.required<std::vector<double>>(c, "angles", "carleson");
    if (s.carleson_angles->empty()) rd.fail(c, "carleson.angles must be nonempty");
  }
  return s;
}

WeightSequence make_weight(const WeightSpec& spec) {
  auto param = [&spec](const std::string& key, double fallback) {
    auto it = spec.params.find(key);
    return it == spec.params.end() ? fallback : it->second;
  };
  auto only = [&spec](std::set<std::string> allowed) {
    for (const auto& kv : spec.params) {
      if (!allowed.count(kv.first)) throw ArgumentError("unknown parameter '" + kv.first + "' for preset " + spec.preset);
    }
  };
  if (spec.preset == "constant") {
    only({"c"});
    return presets::constant(param("c", 1.0));
  }
  if (spec.preset == "geometric") {
    only({"base"});
    return presets::geometric(param("base", 2.0));
  }
  if (spec.preset == "exp_sqrt") {
    only({"c"});
    return presets::exp_sqrt(param("c", 1.0));
  }
  if (spec.preset == "exp_sublinear") {
    only({"beta"});
    return presets::exp_sublinear(param("beta", 0.5));
  }
  if (spec.preset == "polynomial") {
    only({"s"});
    return presets::polynomial(param("s", 1.0));
  }
  if (spec.preset == "loglog_power") {
    only({"a", "b"});
    return presets::loglog_power_dissymmetric(param("a", 2.0), param("b", 0.45));
  }
  throw ArgumentError("unknown weight preset '" + spec.preset + "'");
}

InnerFn make_inner(const Scenario& s) { return InnerFn(SingularMeasure(s.atoms)); }

CoeffVector make_vector(const Scenario& s) {
  if (s.vector.preset == "chi_minus_one") return CoeffVector::from_values(-1, {cplx{1.0, 0.0}}, TailFlag::Closed);
  if (s.vector.preset == "kernel") {
    std::vector<cplx> v;
    double p = 1.0;
    for (Index n = 0; n <= s.window_hi; ++n) {
      v.emplace_back(p, 0.0);
      p *= s.vector.r;
    }
    return CoeffVector::from_values(0, std::move(v));
  }
  return CoeffVector::from_values(s.vector.offset, s.vector.coeffs, TailFlag::Closed);
}

CertifyInput make_certify_input(const Scenario& s) {
  if (s.kind == "block") throw ArgumentError("block scenarios carry no certificate");
  CertifyInput in;
  in.id = s.id;
  in.kind = s.kind == "unilateral" ? ScenarioKind::Unilateral : ScenarioKind::Bilateral;
  in.weight = make_weight(s.weight);
  in.theta = make_inner(s);
  in.g = make_vector(s);
  in.n_coeffs = s.n_coeffs;
  in.window = TruncationWindow(s.window_lo, s.window_hi);
  in.xi_grid = s.xi_grid;
  in.tail_tol = s.tail_tol;
  in.residual_tol = s.residual_tol;
  return in;
}

}  // namespace hypinv::cli
