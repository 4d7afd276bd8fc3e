#include "commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <random>
#include <sstream>

#include "hypinv/blockops.hpp"
#include "hypinv/calculus.hpp"
#include "hypinv/certify.hpp"
#include "hypinv/inner.hpp"
#include "hypinv/shifts.hpp"
#include "hypinv/weights.hpp"
#include "json.hpp"

namespace hypinv::cli {

using nlohmann::json;

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

json number(double v) {
  if (std::isfinite(v)) return v;
  return fmt(v);
}

json truncation_json(const Scenario& s) {
  return json{{"n_coeffs", s.n_coeffs}, {"window_lo", s.window_lo}, {"window_hi", s.window_hi}, {"xi_grid", s.xi_grid}};
}

json header_json(const Scenario& s) {
  return json{{"scenario_id", s.id}, {"scenario_hash", s.sha256}, {"truncation", truncation_json(s)}};
}

std::string csv_header(const Scenario& s) {
  std::ostringstream os;
  os << "# scenario_id=" << s.id << "\n";
  os << "# scenario_hash=" << s.sha256 << "\n";
  os << "# n_coeffs=" << s.n_coeffs << " window_lo=" << s.window_lo << " window_hi=" << s.window_hi
     << " xi_grid=" << s.xi_grid << "\n";
  return os.str();
}

json status_json(const ConditionStatus& st) {
  json j{{"verdict", to_string(st.verdict)},
         {"sum", number(st.sum())},
         {"window", st.window},
         {"model", to_string(st.model)},
         {"model_rate", number(st.model_rate)},
         {"note", st.note},
         {"assumptions", st.assumptions}};
  j["tail_estimate"] = st.tail_estimate ? number(*st.tail_estimate) : json(nullptr);
  j["required_n"] = st.required_n ? json(*st.required_n) : json(nullptr);
  return j;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::vector<cplx> random_poly(std::mt19937_64& rng, Index degree) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<cplx> c(static_cast<std::size_t>(degree + 1));
  for (auto& v : c) v = cplx{normal(rng), normal(rng)};
  return c;
}

Vector random_vector(std::mt19937_64& rng, Index dim) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(dim);
  for (Index i = 0; i < dim; ++i) v(i) = cplx{normal(rng), normal(rng)};
  return v;
}

std::vector<double> sequence_values(const SequenceSpec& q) {
  std::vector<double> v(static_cast<std::size_t>(q.length));
  for (Index n = 0; n < q.length; ++n) {
    const double x = static_cast<double>(n);
    v[static_cast<std::size_t>(n)] =
        q.kind == "log" ? q.scale * std::log(x + 2.0) : q.scale * std::pow(x + 1.0, q.exponent);
  }
  return v;
}

std::string witness_csv(const Scenario& s, const std::vector<WitnessRow>& rows) {
  std::ostringstream os;
  os << csv_header(s);
  os << "k,xi_angle,xi_re,xi_im,diff_norm,residual,u_norm,v_norm,tail_bound,separated\n";
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& r = rows[k];
    os << k << ',' << fmt(std::arg(r.xi)) << ',' << fmt(r.xi.real()) << ',' << fmt(r.xi.imag()) << ','
       << fmt(r.diff_norm) << ',' << fmt(r.residual) << ',' << fmt(r.u_norm) << ',' << fmt(r.v_norm) << ','
       << fmt(r.tail_bound) << ',' << (r.separated ? 1 : 0) << "\n";
  }
  return os.str();
}

}  // namespace

Scenario apply_overrides(Scenario s, const Overrides& o) {
  if (o.n) {
    if (*o.n < 1) throw ArgumentError("--n must be >= 1");
    s.n_coeffs = *o.n;
  }
  if (o.grid) {
    if (*o.grid < 1) throw ArgumentError("--grid must be >= 1");
    s.xi_grid = *o.grid;
  }
  if (s.kind == "bilateral") {
    const CoeffVector g = make_vector(s);
    s.window_lo = std::min(s.window_lo, g.first() - s.n_coeffs);
  }
  return s;
}

CommandOutput cmd_coeffs(const Scenario& s) {
  CommandOutput out;
  const InnerFn theta = make_inner(s);
  const Index N = s.n_coeffs;
  const CoeffVector& th = theta.theta_coeffs(N);
  const CoeffVector& inv = theta.inv_theta_coeffs(N);
  const ReciprocalReport rr = verify_reciprocal_identity(th, inv, N);

  std::ostringstream os;
  os << csv_header(s);
  os << "n,theta_re,theta_im,inv_theta_re,inv_theta_im,reciprocal_relative_residual\n";
  for (Index n = 0; n <= N; ++n) {
    const cplx a = th.at(n);
    const cplx b = inv.at(n);
    os << n << ',' << fmt(a.real()) << ',' << fmt(a.imag()) << ',' << fmt(b.real()) << ',' << fmt(b.imag()) << ','
       << fmt(rr.relative_residuals[static_cast<std::size_t>(n)]) << "\n";
  }
  json j = header_json(s);
  j["command"] = "coeffs";
  j["n0_product"] = {number(rr.n0_value.real()), number(rr.n0_value.imag())};
  j["max_abs_residual"] = number(rr.max_abs_residual);
  j["max_relative_residual"] = number(rr.max_relative_residual);
  j["theta_precision_flag"] = th.precision_flag;
  j["theta_reliable_degree"] = th.reliable_degree;
  j["inv_theta_precision_flag"] = inv.precision_flag;
  j["inv_theta_reliable_degree"] = inv.reliable_degree;
  j["inv_theta_ell2"] = number(inv.ell2);
  out.files.emplace_back(s.id + "_coeffs.csv", os.str());
  out.files.emplace_back(s.id + "_coeffs.json", dump(j));
  out.summary = "coeffs: N=" + std::to_string(N) + " max relative residual " + fmt(rr.max_relative_residual);
  return out;
}

CommandOutput cmd_certify(const Scenario& s) {
  CommandOutput out;
  const CertifyInput in = make_certify_input(s);
  const CertificateReport rep = certify_scenario(in);

  json j = header_json(s);
  j["command"] = "certify";
  j["kind"] = s.kind;
  json conds = json::object();
  for (const auto& [name, st] : rep.conditions) conds[name] = status_json(st);
  j["conditions"] = conds;
  j["governing"] = rep.governing;
  j["conclusion"] = to_string(rep.conclusion);
  j["conclusion_text"] = rep.conclusion_text;
  j["assumptions"] = rep.assumptions;
  j["required_n"] = rep.required_n ? json(*rep.required_n) : json(nullptr);
  j["truncation_used"] = rep.truncation;
  j["identity_relative_residual"] =
      rep.identity_relative_residual ? number(*rep.identity_relative_residual) : json(nullptr);
  json wit{{"grid_points", rep.witness.rows.size()}, {"separated_count", rep.witness.separated_count}};
  if (rep.witness.best) {
    const WitnessRow& b = rep.witness.rows[*rep.witness.best];
    wit["best"] = {{"xi_angle", number(std::arg(b.xi))}, {"diff_norm", number(b.diff_norm)},
                   {"residual", number(b.residual)},      {"u_norm", number(b.u_norm)},
                   {"v_norm", number(b.v_norm)},          {"tail_bound", number(b.tail_bound)},
                   {"separated", b.separated}};
  }
  j["witness"] = wit;

  std::ostringstream txt;
  txt << "scenario " << s.id << " (" << s.kind << ")\n";
  txt << "hash " << s.sha256 << "\n";
  txt << "truncation n_coeffs=" << s.n_coeffs << " window_lo=" << s.window_lo << " window_hi=" << s.window_hi
      << " xi_grid=" << s.xi_grid << "\n";
  for (const auto& [name, st] : rep.conditions) {
    txt << name << ": " << to_string(st.verdict) << " sum=" << fmt(st.sum())
        << " tail=" << (st.tail_estimate ? fmt(*st.tail_estimate) : std::string("none")) << " model=" << to_string(st.model)
        << "\n";
  }
  if (rep.identity_relative_residual) txt << "identity relative residual " << fmt(*rep.identity_relative_residual) << "\n";
  if (rep.witness.best) {
    const WitnessRow& b = rep.witness.rows[*rep.witness.best];
    txt << "witness best xi angle=" << fmt(std::arg(b.xi)) << " diff=" << fmt(b.diff_norm) << " residual=" << fmt(b.residual)
        << " separated " << rep.witness.separated_count << "/" << rep.witness.rows.size() << "\n";
  }
  for (const auto& a : rep.assumptions) txt << "assumption: " << a << "\n";
  txt << "conclusion: " << rep.conclusion_text << "\n";

  out.files.emplace_back(s.id + "_certificate.json", dump(j));
  out.files.emplace_back(s.id + "_certificate.txt", txt.str());
  if (!rep.witness.rows.empty()) out.files.emplace_back(s.id + "_witness.csv", witness_csv(s, rep.witness.rows));
  out.exit_code = exit_code(rep.conclusion);
  out.summary = rep.conclusion_text;
  if (rep.required_n) out.summary += " (required N >= " + std::to_string(*rep.required_n) + ")";
  return out;
}

CommandOutput cmd_witness_scan(const Scenario& s) {
  if (s.kind != "bilateral") throw ArgumentError("witness-scan needs a bilateral scenario");
  CommandOutput out;
  const WitnessSummary scan = scan_witness(make_certify_input(s));
  const std::vector<WitnessRow>& rows = scan.rows;
  const std::size_t separated = scan.separated_count;
  out.files.emplace_back(s.id + "_witness_scan.csv", witness_csv(s, rows));
  out.exit_code = separated > 0 ? kExitOk : kExitNotCertified;
  out.summary = "witness-scan: " + std::to_string(separated) + "/" + std::to_string(rows.size()) + " grid points separated";
  return out;
}

CommandOutput cmd_blockprobe(const Scenario& s) {
  if (!s.block) throw ArgumentError("blockprobe needs a block section");
  const BlockSpec& b = *s.block;
  CommandOutput out;
  const WeightSequence w = make_weight(s.weight);
  json j = header_json(s);
  j["command"] = "blockprobe";
  j["alpha"] = b.alpha;
  j["windows"] = b.windows;
  j["n_max"] = b.n_max;
  j["coupling_scale"] = number(b.coupling_scale);

  PowerBoundReport power;
  try {
    power = power_bound_probe([&](Index W) { return build_bergman_corner(b.alpha, w, W, b.coupling_scale); }, b.n_max, b.windows);
  } catch (const HypothesisGateError& e) {
    j["gate_failure"] = e.clause();
    j["message"] = e.what();
    out.files.emplace_back(s.id + "_blockprobe.json", dump(j));
    out.exit_code = kExitNotCertified;
    out.summary = e.what();
    return out;
  }
  const Index W0 = b.windows.front();
  const BlockOperator B = build_bergman_corner(b.alpha, w, W0, b.coupling_scale);
  j["model_note"] = B.model_note;

  json pw = json::array();
  for (const auto& win : power.windows) {
    pw.push_back({{"window", win.window}, {"sup", number(win.sup)}, {"sup_positive", number(win.sup_positive)},
                  {"argmax", win.argmax}});
  }
  j["power_bound"] = {{"windows", pw}, {"relative_spread", number(power.relative_spread)}};

  std::vector<cplx> lambdas;
  for (double r : b.lambda_radii) {
    if (r == 0.0) {
      lambdas.emplace_back(0.0, 0.0);
      continue;
    }
    for (Index k = 0; k < b.lambda_rays; ++k) {
      lambdas.push_back(std::polar(r, kTwoPi * static_cast<double>(k) / static_cast<double>(b.lambda_rays)));
    }
  }
  const EigenProbeReport eig = eigenvalue_absence_probe(B, lambdas);
  json samples = json::array();
  for (const auto& e : eig.samples) {
    samples.push_back({{"lambda", {number(e.lambda.real()), number(e.lambda.imag())}},
                       {"smin_square", number(e.smin_square)},
                       {"smin_outflow", number(e.smin_outflow)},
                       {"truncation_artifact", e.truncation_artifact}});
  }
  j["eigenvalue_probe"] = {{"window", W0},
                           {"samples", samples},
                           {"min_outflow", number(eig.min_outflow)},
                           {"lipschitz_ok", eig.lipschitz_ok},
                           {"caveat", eig.caveat}};

  std::mt19937_64 rng(b.seed);
  const std::vector<cplx> phi = random_poly(rng, b.identity_degree);
  const Vector u = random_vector(rng, B.lower_dim());
  const IdentityReport corner = verify_corner_expansion(B, w, u, phi);
  const std::vector<cplx> z{cplx{0.0, 0.0}, cplx{1.0, 0.0}};
  const IdentityReport corner_z = verify_corner_expansion(B, w, u, z);

  const TruncationWindow lower(-W0, -1);
  const TruncatedOperator T0 = build_unilateral_minus(w, lower);
  const Vector chi = imbedding_adjoint(w, CoeffVector::from_values(-1, {cplx{1.0, 0.0}}), lower);
  const BlockOperator P = build_h2_coupling(T0, chi, W0);
  const Matrix cols = natural_imbedding_columns(w, lower, b.identity_degree + 1);
  const Vector x = random_vector(rng, T0.dim());
  const IdentityReport powers = verify_power_projection(P, cols, x, b.identity_degree);
  const IdentityReport poly = verify_polynomial_projection(P, cols, x, phi);
  j["identities"] = {
      {"degree", b.identity_degree},
      {"corner_expansion_max_error", number(corner.max_abs_error)},
      {"corner_expansion_z_max_error", number(corner_z.max_abs_error)},
      {"power_projection_max_error", number(powers.max_abs_error)},
      {"polynomial_projection_max_error", number(poly.max_abs_error)},
  };

  if (s.quasianalytic) {
    const QuasianalyticReport q = quasianalytic_conditions(
        w, presets::sublinear_companion(s.quasianalytic->beta_prime), IndexRange{s.quasianalytic->lo, s.quasianalytic->hi});
    json clauses = json::array();
    for (const auto& c : q.clauses) {
      clauses.push_back({{"name", c.name}, {"pass", c.pass}, {"measured", number(c.measured)}, {"note", c.note},
                         {"window_limited", c.window_limited}});
    }
    j["quasianalytic"] = {{"beta_prime", s.quasianalytic->beta_prime},
                          {"window", {s.quasianalytic->lo, s.quasianalytic->hi}},
                          {"clauses", clauses},
                          {"pass", q.pass}};
  }
  std::vector<double> logs;
  for (Index n = 0; n <= s.n_coeffs; ++n) logs.push_back(w.log_at(-n - 1));
  j["log_growth"] = status_json(log_growth_sum_log(logs));

  std::ostringstream csv;
  csv << csv_header(s);
  csv << "n";
  for (const auto& win : power.windows) csv << ",norm_W" << win.window;
  csv << "\n";
  for (Index n = 0; n <= b.n_max; ++n) {
    csv << n;
    for (const auto& win : power.windows) csv << ',' << fmt(win.norms[static_cast<std::size_t>(n)]);
    csv << "\n";
  }
  out.files.emplace_back(s.id + "_blockprobe.json", dump(j));
  out.files.emplace_back(s.id + "_power_norms.csv", csv.str());
  out.summary = "blockprobe: power sup spread " + fmt(power.relative_spread) + ", min outflow singular value " +
                fmt(eig.min_outflow);
  return out;
}

CommandOutput cmd_weights_make(const Scenario& s) {
  if (!s.weights_make) throw ArgumentError("weights-make needs a weights_make section");
  const WeightsMakeSpec& m = *s.weights_make;
  CommandOutput out;
  const WeightSequence base = make_weight(s.weight);
  json j = header_json(s);
  j["command"] = "weights-make";
  j["construction"] = m.construction;

  std::optional<WeightSequence> made;
  try {
    if (m.construction == "step") {
      made = make_step_weight(base, m.breakpoints);
      j["breakpoints"] = m.breakpoints;
    } else if (m.construction == "dominated") {
      const std::vector<double> beta = sequence_values(m.sequence);
      const DominatedWeight d = make_dominated_weight(beta, base);
      made = d.weight;
      j["breakpoints"] = d.breakpoints;
      j["n0"] = d.n0;
      j["verified_up_to"] = d.verified_up_to;
      double worst = 0.0;
      for (Index n = d.n0; n <= d.verified_up_to; ++n) {
        worst = std::max(worst, d.weight(-n - 1) / beta[static_cast<std::size_t>(n)]);
      }
      j["max_ratio_omega_over_beta"] = number(worst);
      j["inequality_holds"] = worst <= 1.0;
    } else {
      const std::vector<double> eps = sequence_values(m.sequence);
      const SummableWeight sw = make_summable_weight(eps, base);
      made = sw.weight;
      j["breakpoints"] = sw.breakpoints;
      j["verified_up_to"] = sw.verified_up_to;
      j["weighted_sum"] = number(sw.weighted_partial_sums.back());
      j["total_bound"] = number(sw.total_bound);
      j["eps_tail_estimate"] = number(sw.eps_tail_estimate);
      j["inequality_holds"] = sw.weighted_partial_sums.back() <= sw.total_bound * (1.0 + 1e-12);
    }
  } catch (const InconclusiveError& e) {
    j["inconclusive"] = e.what();
    j["hint"] = e.hint();
    out.files.emplace_back(s.id + "_weight.json", dump(j));
    out.exit_code = kExitInconclusive;
    out.summary = std::string(e.what()) + "; " + e.hint();
    return out;
  }
  const DissymmetricReport dr = check_dissymmetric(*made, IndexRange{-m.check_radius, m.check_radius});
  j["dissymmetric"] = {{"pass", dr.pass},
                       {"measured_2_1_constant", number(dr.measured_2_1_constant)},
                       {"root_trend_decreasing", dr.root_trend_decreasing},
                       {"window_limited", dr.window_limited},
                       {"failure", dr.failure}};
  j["note"] = made->support_note();

  std::ostringstream csv;
  csv << csv_header(s);
  csv << "n,log_omega_minus_n\n";
  for (Index n = 0; n <= m.check_radius; n = n < 64 ? n + 1 : n + n / 16) {
    csv << n << ',' << fmt(made->log_at(-n)) << "\n";
  }
  out.files.emplace_back(s.id + "_weight.json", dump(j));
  out.files.emplace_back(s.id + "_weight.csv", csv.str());
  out.exit_code = dr.pass ? kExitOk : kExitNotCertified;
  out.summary = "weights-make: " + m.construction + (dr.pass ? " passes" : " fails") + " the dissymmetric check";
  return out;
}

CommandOutput cmd_carleson(const Scenario& s) {
  std::vector<double> angles;
  if (s.carleson_angles) {
    angles = *s.carleson_angles;
  } else {
    for (const auto& a : s.atoms) angles.push_back(a.angle);
  }
  if (angles.empty()) throw ArgumentError("carleson needs carleson.angles or measure atoms");
  CommandOutput out;
  const double sum = carleson_sum(angles);
  json j = header_json(s);
  j["command"] = "carleson";
  j["points"] = angles.size();
  j["sum"] = number(sum);
  out.files.emplace_back(s.id + "_carleson.json", dump(j));
  out.summary = "carleson: sum " + fmt(sum);
  return out;
}

std::vector<std::string> applicable_commands(const Scenario& s) {
  std::vector<std::string> names{"coeffs"};
  if (s.kind != "block") names.push_back("certify");
  if (s.kind == "bilateral") names.push_back("witness-scan");
  if (s.kind == "block") names.push_back("blockprobe");
  if (s.weights_make) names.push_back("weights-make");
  if (s.carleson_angles || !s.atoms.empty()) names.push_back("carleson");
  return names;
}

CommandOutput run_command(const std::string& name, const Scenario& s) {
  if (name == "coeffs") return cmd_coeffs(s);
  if (name == "certify") return cmd_certify(s);
  if (name == "witness-scan") return cmd_witness_scan(s);
  if (name == "blockprobe") return cmd_blockprobe(s);
  if (name == "weights-make") return cmd_weights_make(s);
  if (name == "carleson") return cmd_carleson(s);
  throw ArgumentError("unknown command " + name);
}

}  // namespace hypinv::cli
