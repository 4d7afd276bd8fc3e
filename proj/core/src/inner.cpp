#include "hypinv/inner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hypinv {

namespace {

constexpr double kUnitRoundoff = std::numeric_limits<double>::epsilon() / 2.0;

double wrap_angle(double t) {
  double r = std::fmod(t, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r -= kTwoPi;
  return r;
}

// Neumaier summation on each component.
struct CompensatedSum {
  double re = 0.0, im = 0.0, cre = 0.0, cim = 0.0, abs_total = 0.0;
  static void add(double& s, double& c, double t) {
    const double u = s + t;
    if (std::abs(s) >= std::abs(t)) {
      c += (s - u) + t;
    } else {
      c += (t - u) + s;
    }
    s = u;
  }
  void add(cplx t) {
    add(re, cre, t.real());
    add(im, cim, t.imag());
    abs_total += std::abs(t);
  }
  cplx value() const { return {re + cre, im + cim}; }
};

// e = exp(S) for S = s0 + sum_{k>=1} s[k] z^k via n e_n = sum_k k s_k e_{n-k}.
CoeffVector exp_series(cplx s0, const std::vector<cplx>& s, Index N) {
  std::vector<cplx> e(static_cast<std::size_t>(N + 1));
  e[0] = std::exp(s0);
  CoeffVector out;
  for (Index n = 1; n <= N; ++n) {
    CompensatedSum acc;
    for (Index k = 1; k <= n; ++k) {
      acc.add(static_cast<double>(k) * s[static_cast<std::size_t>(k)] * e[static_cast<std::size_t>(n - k)]);
    }
    const cplx v = acc.value() / static_cast<double>(n);
    e[static_cast<std::size_t>(n)] = v;
    const double mag = std::abs(acc.value());
    const double estimate = mag > 0.0 ? kUnitRoundoff * acc.abs_total / mag : (acc.abs_total > 0.0 ? 1.0 : 0.0);
    if (estimate > 1e-9 && !out.precision_flag) {
      out.precision_flag = true;
      out.reliable_degree = n;
    }
  }
  const bool flagged = out.precision_flag;
  const Index reliable = out.reliable_degree;
  out = CoeffVector::from_values(0, std::move(e), TailFlag::Truncated);
  out.precision_flag = flagged;
  out.reliable_degree = reliable;
  return out;
}

// Power-series coefficients of sign * sum_j a_j (z + zeta_j)/(z - zeta_j).
std::pair<cplx, std::vector<cplx>> herglotz_series(const SingularMeasure& m, Index N, double sign) {
  std::vector<cplx> s(static_cast<std::size_t>(N + 1), cplx{0.0, 0.0});
  double s0 = 0.0;
  for (const Atom& a : m.atoms()) {
    s0 += a.mass;
    for (Index k = 1; k <= N; ++k) {
      s[static_cast<std::size_t>(k)] += 2.0 * a.mass * std::polar(1.0, -static_cast<double>(k) * a.angle);
    }
  }
  // (z + zeta)/(z - zeta) = -(1 + 2 sum_k (z/zeta)^k)
  for (auto& v : s) v *= -sign;
  return {cplx{-sign * s0, 0.0}, std::move(s)};
}

void check_unit(cplx xi) {
  if (std::abs(std::abs(xi) - 1.0) > 1e-12) throw ArgumentError("rotation needs |xi| = 1");
}

}  // namespace

SingularMeasure::SingularMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  for (auto& a : atoms_) {
    if (!(a.mass > 0.0)) throw ArgumentError("singular measure: atom masses must be positive");
    if (!std::isfinite(a.angle)) throw ArgumentError("singular measure: non-finite angle");
    a.angle = wrap_angle(a.angle);
    total_mass_ += a.mass;
  }
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    for (std::size_t j = i + 1; j < atoms_.size(); ++j) {
      if (atoms_[i].angle == atoms_[j].angle) throw ArgumentError("singular measure: atom angles must be distinct");
    }
  }
}

SingularMeasure SingularMeasure::single(double mass, double angle) { return SingularMeasure({Atom{angle, mass}}); }

CoeffVector CoeffVector::from_values(Index offset, std::vector<cplx> values, TailFlag tail) {
  CoeffVector c;
  c.offset = offset;
  c.values = std::move(values);
  c.tail = tail;
  c.refresh_norms();
  return c;
}

void CoeffVector::refresh_norms() {
  double s1 = 0.0;
  double scale = 0.0;
  for (const auto& v : values) {
    s1 += std::abs(v);
    scale = std::max(scale, std::abs(v));
  }
  double s2 = 0.0;
  if (scale > 0.0) {
    for (const auto& v : values) s2 += std::norm(v / scale);
  }
  ell1 = s1;
  ell2 = scale * std::sqrt(s2);
}

cplx CoeffVector::at(Index n) const {
  if (n < offset || n > last()) return {0.0, 0.0};
  return values[static_cast<std::size_t>(n - offset)];
}

InnerFn::InnerFn(SingularMeasure measure) : measure_(std::move(measure)), cache_(std::make_shared<Cache>()) {}

cplx InnerFn::operator()(cplx z) const {
  if (!(std::abs(z) < 1.0)) throw DomainError("eval_theta: |z| must be < 1");
  cplx s{0.0, 0.0};
  for (const Atom& a : measure_.atoms()) {
    const cplx zeta = std::polar(1.0, a.angle);
    s += a.mass * (z + zeta) / (z - zeta);
  }
  return std::exp(s);
}

cplx InnerFn::boundary(double t) const {
  double phase = 0.0;
  for (const Atom& a : measure_.atoms()) {
    const double x = 0.5 * (t - a.angle);
    const double sn = std::sin(x);
    if (sn == 0.0) throw DomainError("theta boundary value requested at an atom");
    phase -= a.mass * std::cos(x) / sn;
  }
  return std::polar(1.0, phase);
}

const CoeffVector& InnerFn::theta_coeffs(Index N) const {
  std::lock_guard<std::mutex> lock(cache_->mutex);
  auto it = cache_->theta.find(N);
  if (it == cache_->theta.end()) it = cache_->theta.emplace(N, coeffs_theta(*this, N)).first;
  return it->second;
}

const CoeffVector& InnerFn::inv_theta_coeffs(Index N) const {
  std::lock_guard<std::mutex> lock(cache_->mutex);
  auto it = cache_->inv.find(N);
  if (it == cache_->inv.end()) it = cache_->inv.emplace(N, coeffs_inv_theta(*this, N)).first;
  return it->second;
}

cplx eval_theta(const InnerFn& f, cplx z) { return f(z); }

CoeffVector coeffs_inv_theta(const InnerFn& f, Index N) {
  if (N < 0) throw ArgumentError("coeffs_inv_theta: N must be >= 0");
  auto [s0, s] = herglotz_series(f.measure(), N, -1.0);
  return exp_series(s0, s, N);
}

CoeffVector coeffs_theta(const InnerFn& f, Index N) {
  if (N < 0) throw ArgumentError("coeffs_theta: N must be >= 0");
  auto [s0, s] = herglotz_series(f.measure(), N, 1.0);
  return exp_series(s0, s, N);
}

ReciprocalReport verify_reciprocal_identity(const CoeffVector& theta, const CoeffVector& inv, Index N) {
  if (theta.offset != 0 || inv.offset != 0 || theta.last() < N || inv.last() < N) {
    throw ArgumentError("verify_reciprocal_identity: both vectors must cover degrees 0..N");
  }
  ReciprocalReport r;
  r.relative_residuals.resize(static_cast<std::size_t>(N + 1));
  for (Index n = 0; n <= N; ++n) {
    CompensatedSum acc;
    for (Index k = 0; k <= n; ++k) {
      acc.add(inv.values[static_cast<std::size_t>(k)] * theta.values[static_cast<std::size_t>(n - k)]);
    }
    const cplx target = n == 0 ? cplx{1.0, 0.0} : cplx{0.0, 0.0};
    const cplx v = acc.value();
    if (n == 0) r.n0_value = v;
    const double res = std::abs(v - target);
    r.max_abs_residual = std::max(r.max_abs_residual, res);
    const double rel = acc.abs_total > 0.0 ? res / acc.abs_total : 0.0;
    r.relative_residuals[static_cast<std::size_t>(n)] = rel;
    if (n >= 1) r.max_relative_residual = std::max(r.max_relative_residual, rel);
  }
  return r;
}

CoeffVector rotate(const CoeffVector& c, cplx xi) {
  check_unit(xi);
  const double t = std::arg(xi);
  CoeffVector out = c;
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    const double n = static_cast<double>(c.offset + static_cast<Index>(i));
    out.values[i] *= std::polar(1.0, n * t);
  }
  out.refresh_norms();
  return out;
}

CoeffVector tilde(const CoeffVector& c) {
  CoeffVector out = c;
  for (auto& v : out.values) v = std::conj(v);
  return out;
}

InnerFn rotate(const InnerFn& f, cplx xi) {
  check_unit(xi);
  const double t = std::arg(xi);
  std::vector<Atom> atoms = f.measure().atoms();
  for (auto& a : atoms) a.angle = wrap_angle(a.angle - t);
  return InnerFn(SingularMeasure(std::move(atoms)));
}

InnerFn tilde(const InnerFn& f) {
  std::vector<Atom> atoms = f.measure().atoms();
  for (auto& a : atoms) a.angle = wrap_angle(-a.angle);
  return InnerFn(SingularMeasure(std::move(atoms)));
}

double carleson_sum(std::span<const double> angles) {
  if (angles.empty()) throw ArgumentError("carleson_sum: empty support");
  std::vector<double> t;
  t.reserve(angles.size());
  for (double a : angles) t.push_back(wrap_angle(a));
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double gap = (i + 1 < t.size() ? t[i + 1] - t[i] : t[0] + kTwoPi - t[i]) / kTwoPi;
    if (gap > 0.0) sum += gap * std::log(gap);
  }
  return sum;
}

GrowthFit growth_fit(const CoeffVector& coeffs) {
  if (coeffs.size() < 64) throw ArgumentError("growth_fit: need at least 64 coefficients");
  GrowthFit g;
  const std::size_t from = coeffs.size() / 2;
  g.from = coeffs.offset + static_cast<Index>(from);
  g.to = coeffs.last();
  for (std::size_t i = from; i < coeffs.size(); ++i) {
    if (coeffs.values[i] == cplx{0.0, 0.0}) {
      g.skipped = true;
      return g;
    }
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(coeffs.size() - from);
  for (std::size_t i = from; i < coeffs.size(); ++i) {
    const double x = std::sqrt(static_cast<double>(coeffs.offset + static_cast<Index>(i)));
    const double y = std::log(std::abs(coeffs.values[i]));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = m * sxx - sx * sx;
  g.c = (m * sxy - sx * sy) / den;
  g.intercept = (sy - g.c * sx) / m;
  double ss = 0.0;
  for (std::size_t i = from; i < coeffs.size(); ++i) {
    const double x = std::sqrt(static_cast<double>(coeffs.offset + static_cast<Index>(i)));
    const double d = std::log(std::abs(coeffs.values[i])) - (g.c * x + g.intercept);
    ss += d * d;
  }
  g.residual = std::sqrt(ss / m);
  return g;
}

}  // namespace hypinv
