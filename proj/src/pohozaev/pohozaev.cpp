#include "emden/pohozaev.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <variant>

#include "emden/core/error.hpp"
#include "emden/core/norms.hpp"
#include "emden/core/quadrature.hpp"

namespace emden {

namespace {
constexpr double kDeltaTol = 1e-12;
constexpr double kTailFactor = 10.0;
constexpr double kSampledMargin = 10.0;
constexpr double kExponentTol = 1e-9;

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

std::vector<double> scan_radii() {
  std::vector<double> r;
  for (int j = -120; j <= 120; ++j) r.push_back(std::pow(10.0, j / 20.0));
  return r;
}
}  // namespace

double delta0(int N, double p) {
  require(N >= 3, "delta0 needs N >= 3");
  require(p > 2.0, "delta0 needs p > 2");
  return N - 0.5 * p * (N - 2.0);
}

PohozaevIntegral pohozaev_lhs(RadialFunction const& u, WeightSpec const& k_profile, double delta,
                              ProblemSpec const& spec) {
  double const d0 = delta0(spec.N, spec.p);
  if (std::abs(delta - d0) > kDeltaTol * std::max(1.0, std::abs(d0))) {
    std::ostringstream os;
    os << "Pohozaev integral needs delta = delta0(N, p) = " << d0 << " (got " << delta << ")";
    fail(ErrorKind::wrong_exponent, os.str());
  }
  require(k_profile.radial(), "Pohozaev integral needs a radial profile");
  auto const& g = *u.grid();
  require(g.dimension() == spec.N, "Pohozaev integral: grid dimension differs from N");
  auto r = g.nodes();
  auto w = g.weights();
  auto v = u.values();
  PohozaevIntegral out;
  double last = 0.0;
  for (std::size_t i = 1; i < r.size(); ++i) {
    if (v[i] == 0.0 || w[i] == 0.0) continue;
    double const dk = k_profile.derivative(r[i]);
    if (dk == 0.0) continue;
    double const term = w[i] * r[i] * dk * std::pow(r[i], -delta) * std::pow(std::abs(v[i]), spec.p);
    if (!std::isfinite(term)) {
      fail(ErrorKind::evaluation, "Pohozaev integrand is not finite at node " + std::to_string(i));
    }
    out.value += term;
    out.absolute += std::abs(term);
    if (i + 1 == r.size()) last = std::abs(term);
  }
  double const mean = out.absolute / static_cast<double>(r.size());
  out.tail_warning = mean > 0.0 && last > kTailFactor * mean;
  return out;
}

WeightSpec pohozaev_profile(ProblemSpec const& spec) {
  require(spec.weight.radial(), "Pohozaev decomposition needs a radial weight");
  double const d0 = delta0(spec.N, spec.p);
  auto const& data = spec.weight.node().data;
  if (auto const* pw = std::get_if<weights::PowerLaw>(&data)) {
    // c r^{-delta} = (c r^{delta0 - delta}) r^{-delta0}; keep constants exact.
    if (pw->delta == d0) return WeightSpec::constant(pw->c);
  }
  if (auto const* c = std::get_if<weights::Constant>(&data)) {
    if (d0 == 0.0) return WeightSpec::constant(c->c);
  }
  return WeightSpec::product(spec.weight, -d0);
}

IdentityGap pohozaev_identity_gap(RadialFunction const& u, ProblemSpec const& spec) {
  IdentityGap out;
  if (u.max_abs() == 0.0) {
    out.zero_input = true;
    return out;
  }
  double const d0 = delta0(spec.N, spec.p);
  WeightSpec const k = pohozaev_profile(spec);
  double const E = dirichlet_energy(u);
  double const B = weighted_lp(u, spec.weight, spec.p).total;
  auto const lhs = pohozaev_lhs(u, k, d0, spec);
  double const half = 0.5 * (spec.N - 2.0);
  out.energy_term = half * E;
  out.nonlinear_term = half * B;
  out.derivative_term = lhs.value / spec.p;
  double const scale = std::max({std::abs(out.energy_term), std::abs(out.nonlinear_term),
                                 std::abs(out.derivative_term)});
  out.gap = std::abs(out.energy_term - out.nonlinear_term - out.derivative_term) / scale;
  return out;
}

char const* to_string(CertificateVerdict v) {
  switch (v) {
    case CertificateVerdict::nonexistence_certified: return "nonexistence_certified";
    case CertificateVerdict::no_certificate: return "no_certificate";
    case CertificateVerdict::inconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

// r h'(r) + d0 h(r) with a noise estimate; sampled weights use their own nodes.
struct SignScan {
  std::vector<SignSample> samples;
  std::vector<double> noise;
};

SignScan scan_analytic(WeightSpec const& h, double d0) {
  SignScan s;
  for (double r : scan_radii()) {
    double const a = r * h.derivative(r);
    double const b = d0 * h(r);
    s.samples.push_back({r, a + b});
    s.noise.push_back(1e-12 * (std::abs(a) + std::abs(b)));
  }
  return s;
}

SignScan scan_sampled(weights::Sampled const& w, double d0) {
  SignScan s;
  auto const& x = w.nodes;
  auto const& v = w.values;
  std::size_t const n = x.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i] <= 0.0) continue;
    double d, alt;
    if (i == 0) {
      d = (v[1] - v[0]) / (x[1] - x[0]);
      alt = n > 2 ? (v[2] - v[1]) / (x[2] - x[1]) : d;
    } else if (i + 1 == n) {
      d = (v[i] - v[i - 1]) / (x[i] - x[i - 1]);
      alt = n > 2 ? (v[i - 1] - v[i - 2]) / (x[i - 1] - x[i - 2]) : d;
    } else {
      d = (v[i + 1] - v[i - 1]) / (x[i + 1] - x[i - 1]);
      alt = (v[i + 1] - v[i]) / (x[i + 1] - x[i]);
    }
    // Centered against one-sided: the gap estimates the difference-scheme error.
    double const err = std::abs(d - alt);
    s.samples.push_back({x[i], x[i] * d + d0 * v[i]});
    s.noise.push_back(kSampledMargin * x[i] * err);
  }
  return s;
}

int end_sign(Envelope const& e, double d0, bool at_origin) {
  double const a = at_origin ? e.a0 : e.ainf;
  double const c = at_origin ? e.c0 : e.cinf;
  if (!std::isfinite(a)) return 0;
  double const f = a + d0;
  if (std::abs(f) <= kExponentTol || c == 0.0) return 0;
  return sign_of(c * f);
}

}  // namespace

Certificate nonexistence_certificate(WeightSpec const& h, int N, double p) {
  Certificate out;
  out.delta0 = delta0(N, p);
  double const d0 = out.delta0;
  if (!h.radial()) {
    out.reason = "weight is not radial, so no product decomposition is available";
    return out;
  }
  auto const& data = h.node().data;

  if (auto const* sp = std::get_if<weights::ShiftedPower>(&data)) {
    // r k' r^{-d0} = c (1+r)^{-delta-1} (d0 + (d0 - delta) r)
    out.method = "analytic";
    for (double r : scan_radii()) {
      out.evidence.push_back({r, sp->c * std::pow(1.0 + r, -sp->delta - 1.0) * (d0 + (d0 - sp->delta) * r)});
    }
    int const s = sign_of(sp->c);
    out.sign_at_origin = s * sign_of(d0);
    out.sign_at_infinity = s * (sp->delta == d0 ? sign_of(d0) : sign_of(d0 - sp->delta));
    if (sp->c == 0.0) {
      out.verdict = CertificateVerdict::no_certificate;
      out.reason = "zero weight";
      return out;
    }
    if (d0 > 0.0 && sp->delta > d0) out.sign_change = d0 / (sp->delta - d0);
    if (d0 < 0.0 && sp->delta < d0) out.sign_change = d0 / (sp->delta - d0);
    if (out.sign_change) {
      out.verdict = CertificateVerdict::no_certificate;
      out.reason = "<grad k, x> changes sign";
    } else if (out.sign_at_origin != 0 && out.sign_at_origin == out.sign_at_infinity) {
      out.verdict = CertificateVerdict::nonexistence_certified;
      out.reason = "<grad k, x> is single-signed on (0, inf) and at both ends";
    } else {
      out.verdict = CertificateVerdict::no_certificate;
      out.reason = "<grad k, x> vanishes at an end";
    }
    return out;
  }

  SignScan scan;
  if (auto const* sw = std::get_if<weights::Sampled>(&data)) {
    out.method = "scan";
    scan = scan_sampled(*sw, d0);
  } else {
    out.method = std::holds_alternative<weights::PowerLaw>(data) ||
                         std::holds_alternative<weights::Constant>(data) ||
                         std::holds_alternative<weights::BrokenPower>(data)
                     ? "analytic"
                     : "scan";
    scan = scan_analytic(h, d0);
  }
  out.evidence = scan.samples;
  Envelope const env = h.envelope();
  if (!env.known) {
    out.reason = "no envelope, so the signs at 0 and infinity are unknown";
    return out;
  }
  out.sign_at_origin = end_sign(env, d0, true);
  out.sign_at_infinity = end_sign(env, d0, false);

  int pos = 0, neg = 0, unresolved = 0;
  std::optional<double> first_pos, first_neg;
  for (std::size_t i = 0; i < scan.samples.size(); ++i) {
    double const v = scan.samples[i].value;
    if (std::abs(v) <= scan.noise[i]) {
      ++unresolved;
    } else if (v > 0.0) {
      ++pos;
      if (!first_pos) first_pos = scan.samples[i].r;
    } else {
      ++neg;
      if (!first_neg) first_neg = scan.samples[i].r;
    }
  }
  if (pos > 0 && neg > 0) {
    out.verdict = CertificateVerdict::no_certificate;
    out.sign_change = std::max(*first_pos, *first_neg);
    out.reason = "<grad k, x> changes sign";
    return out;
  }
  if (pos == 0 && neg == 0) {
    out.verdict = CertificateVerdict::no_certificate;
    out.reason = "<grad k, x> vanishes identically; the identity carries no information";
    return out;
  }
  int const s = pos > 0 ? 1 : -1;
  if ((out.sign_at_origin != 0 && out.sign_at_origin != s) ||
      (out.sign_at_infinity != 0 && out.sign_at_infinity != s)) {
    out.verdict = CertificateVerdict::no_certificate;
    out.reason = "asymptotic sign differs from the sampled sign";
    return out;
  }
  if (unresolved > 0 || out.sign_at_origin == 0 || out.sign_at_infinity == 0) {
    out.reason = "sign not resolved beyond the error margin everywhere";
    return out;
  }
  out.verdict = CertificateVerdict::nonexistence_certified;
  out.reason = "<grad k, x> is single-signed on the scan and at both ends";
  return out;
}

}  // namespace emden
