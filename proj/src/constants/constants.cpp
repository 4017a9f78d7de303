#include "emden/constants.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <random>
#include <sstream>

#include "emden/core/error.hpp"
#include "emden/core/laplacian.hpp"
#include "emden/core/norms.hpp"
#include "emden/core/quadrature.hpp"

namespace emden {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kExponentTol = 1e-9;
constexpr double kCrossCheckTol = 1e-8;
constexpr double kSurplusTol = 1e-10;

}  // namespace

// -- extremal family ---------------------------------------------------------

ExtremalFamily::ExtremalFamily(int N, double delta, double sigma)
    : N_(N), delta_(delta), sigma_(sigma) {
  require(N >= 3, "extremal family needs N >= 3");
  require(delta >= 0.0 && delta < 2.0, "extremal family needs 0 <= delta < 2");
  require(sigma > 0.0 && std::isfinite(sigma), "extremal family needs sigma > 0");
}

double ExtremalFamily::exponent() const { return 2.0 * (N_ - delta_) / (N_ - 2.0); }

double ExtremalFamily::operator()(double r) const {
  if (r == 0.0) return 1.0;
  double const a = 2.0 - delta_;
  return std::pow(1.0 + std::pow(r / sigma_, a), -(N_ - 2.0) / a);
}

double ExtremalFamily::derivative(double r) const {
  double const a = 2.0 - delta_;
  double const b = (N_ - 2.0) / a;
  double const x = r / sigma_;
  if (r == 0.0) {
    if (a > 1.0) return 0.0;
    if (a == 1.0) return -b / sigma_;
    return -kInf;
  }
  return -b * a * std::pow(x, a - 1.0) / sigma_ * std::pow(1.0 + std::pow(x, a), -b - 1.0);
}

double ExtremalFamily::gradient_norm_sq() const {
  double const a = 2.0 - delta_;
  double const b = (N_ - 2.0) / a;
  double const base =
      sphere_area(N_) * b * b * a * std::beta((2.0 * a + N_ - 2.0) / a, (N_ - 2.0) / a);
  return base * std::pow(sigma_, N_ - 2.0);
}

double ExtremalFamily::weighted_integral() const {
  double const a = 2.0 - delta_;
  double const m = (N_ - delta_) / a;
  return sphere_area(N_) / a * std::beta(m, m) * std::pow(sigma_, N_ - delta_);
}

RadialFunction ExtremalFamily::sample(GridPtr grid) const {
  return RadialFunction::sample(std::move(grid), [this](double r) { return (*this)(r); });
}

RadialFunction ExtremalFamily::normalized(GridPtr grid) const {
  return sample(std::move(grid)).scaled(1.0 / std::sqrt(gradient_norm_sq()));
}

double ExtremalFamily::normalized_value(double r) const {
  return (*this)(r) / std::sqrt(gradient_norm_sq());
}

double hardy_sobolev_constant(int N, double delta) {
  static std::mutex mutex;
  static std::map<std::pair<int, double>, double> cache;
  {
    std::lock_guard lock(mutex);
    auto it = cache.find({N, delta});
    if (it != cache.end()) return it->second;
  }
  ExtremalFamily u(N, delta);
  double const p = u.exponent();
  double const grad = u.gradient_norm_sq();
  double const mass = u.weighted_integral();

  auto g = integrate_radial([&](double r) { double d = u.derivative(r); return d * d; }, N, 0.0, kInf);
  auto m = integrate_radial(
      [&](double r) { return std::pow(r, -delta) * std::pow(u(r), p); }, N, 0.0, kInf);
  if (std::abs(g.value - grad) > kCrossCheckTol * grad ||
      std::abs(m.value - mass) > kCrossCheckTol * mass) {
    std::ostringstream os;
    os << "Hardy-Sobolev closed form disagrees with quadrature of the extremal (N=" << N
       << ", delta=" << delta << ")";
    fail(ErrorKind::evaluation, os.str());
  }
  double const K = std::pow(mass, 1.0 / p) / std::sqrt(grad);
  std::lock_guard lock(mutex);
  cache[{N, delta}] = K;
  return K;
}

double hardy_sobolev_quotient(RadialFunction const& u, double delta, int N) {
  require(delta >= 0.0 && delta < 2.0, "quotient needs 0 <= delta < 2");
  require(u.grid()->dimension() == N, "quotient: grid dimension differs from N");
  double const p = 2.0 * (N - delta) / (N - 2.0);
  double const E = dirichlet_energy(u);
  if (!(E > 0.0)) fail(ErrorKind::undefined_quotient, "quotient undefined: zero Dirichlet energy");
  double const B = weighted_lp(u, WeightSpec::power_law(delta), p).total;
  return std::pow(B, 1.0 / p) / std::sqrt(E);
}

// -- Rayleigh minimization ---------------------------------------------------

std::string Domain::name() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
    case DomainKind::whole: return "whole";
    case DomainKind::ball: os << "ball(0," << radius << ")"; break;
    case DomainKind::exterior: os << "exterior(" << radius << ")"; break;
  }
  return os.str();
}

namespace {

NodeRange domain_range(Domain const& d, RadialGrid const& g) {
  int const M = g.size();
  if (d.kind == DomainKind::whole) return {0, M};
  require(d.radius > 0.0 && std::isfinite(d.radius), "domain radius must be positive");
  int const idx = g.lower_bound(d.radius);
  if (d.kind == DomainKind::ball) return {0, idx};
  int begin = idx;
  if (begin < M && g.nodes()[begin] == d.radius) ++begin;
  return {begin, M};
}

// Starting profiles: extremal-type decay, three Gaussian widths and a random mixture.
std::vector<std::vector<double>> make_seeds(RadialGrid const& g, NodeRange range, double ell,
                                            double delta_hint, int N, double center,
                                            std::uint64_t seed) {
  auto r = g.nodes();
  std::vector<std::vector<double>> seeds;
  auto add = [&](auto const& f) {
    std::vector<double> v(range.size());
    for (int k = 0; k < range.size(); ++k) v[k] = f(r[range.begin + k]);
    seeds.push_back(std::move(v));
  };
  double const a = 2.0 - delta_hint;
  add([&](double x) {
    double const y = std::max(0.0, x - center) / ell;
    return std::pow(1.0 + std::pow(y, a), -(N - 2.0) / a);
  });
  for (double w : {0.5, 1.0, 2.0}) {
    add([&](double x) {
      double const y = (x - center) / (w * ell);
      return std::exp(-y * y);
    });
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> logc(-1.0, 1.0), amp(0.2, 1.0);
  std::array<double, 4> cs{}, ws{}, as{};
  for (int i = 0; i < 4; ++i) {
    cs[i] = center + ell * std::pow(10.0, logc(rng)) * (i == 0 ? 0.0 : 1.0);
    ws[i] = ell * std::pow(10.0, logc(rng));
    as[i] = amp(rng);
  }
  add([&](double x) {
    double v = 0.0;
    for (int i = 0; i < 4; ++i) {
      double const y = (x - cs[i]) / ws[i];
      v += as[i] * std::exp(-y * y);
    }
    return v;
  });
  return seeds;
}

double origin_delta_hint(WeightSpec const& k) {
  Envelope e = k.envelope();
  if (!e.known || !std::isfinite(e.a0)) return 0.0;
  return std::clamp(-e.a0, 0.0, 1.9);
}

}  // namespace

BestConstantResult rayleigh_min(Domain const& domain, WeightSpec const& k, double q,
                                GridPtr const& grid, RayleighOptions const& opts) {
  require(q > 2.0, "rayleigh_min needs q > 2");
  require(k.radial(), "rayleigh_min needs a radial weight");
  RadialGrid const& g = *grid;
  NodeRange const range = domain_range(domain, g);
  require(range.size() >= 4, "domain " + domain.name() + " contains fewer than 4 grid nodes");

  auto const nw = nodal_weight(k, g);
  std::vector<double> kw(nw.plus.begin() + range.begin, nw.plus.begin() + range.end);
  RadialLaplacian K(g, range);

  double const ell = domain.kind == DomainKind::whole ? g.scale() : domain.radius;
  double const center = domain.kind == DomainKind::exterior ? domain.radius : 0.0;
  auto seeds = make_seeds(g, range, ell, origin_delta_hint(k), g.dimension(), center, opts.seed);

  BestConstantResult out;
  out.domain = domain;
  bool any_mass = false;
  double last_residual = 0.0;
  std::optional<DescentResult> best;
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    DescentResult res;
    try {
      res = minimize_quotient(K, kw, q, seeds[s], opts.descent);
    } catch (Error const& e) {
      if (e.kind() == ErrorKind::nehari_undefined) continue;
      throw;
    }
    any_mass = true;
    last_residual = res.residual;
    if (!res.converged && opts.require_convergence) continue;
    bool const better = !best || (res.converged && !best->converged) ||
                        (res.converged == best->converged && res.quotient < best->quotient);
    if (better) {
      best = std::move(res);
      out.start = static_cast<int>(s);
    }
  }
  if (!any_mass) {
    out.infinite = true;
    out.value = kInf;
    return out;
  }
  if (!best) {
    std::ostringstream os;
    os << "rayleigh_min on " << domain.name() << " did not converge; last residual "
       << last_residual;
    fail(ErrorKind::non_convergence, os.str());
  }
  out.value = best->quotient;
  out.converged = best->converged;
  out.iterations = best->iterations;
  out.residual = best->residual;
  // E = 1 after descent, so B = Q^{-q/2}; rescale to unit weighted mass.
  double const scale = std::pow(best->quotient, 0.5);
  std::vector<double> full(g.size(), 0.0);
  for (int i = 0; i < range.size(); ++i) full[range.begin + i] = best->u[i] * scale;
  out.minimizer = RadialFunction(grid, std::move(full));
  return out;
}

// -- S profiles --------------------------------------------------------------

std::vector<double> default_s_radii() {
  std::vector<double> r;
  for (int j = -6; j <= 6; ++j) r.push_back(std::pow(10.0, j / 2.0));
  return r;
}

namespace {

// Value at the far end of the curve against the value one decade inward.
bool grows_across_last_decade(std::vector<SPoint> const& c, bool toward_large, double factor) {
  if (c.size() < 2) return false;
  std::size_t const end = toward_large ? c.size() - 1 : 0;
  double const r_end = c[end].r;
  if (c[end].infinite) return true;
  std::size_t ref = end;
  if (toward_large) {
    for (std::size_t i = c.size(); i-- > 0;) {
      if (c[i].r <= r_end / 10.0 * (1.0 + 1e-12)) {
        ref = i;
        break;
      }
    }
    if (ref == end) ref = 0;
  } else {
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (c[i].r >= r_end * 10.0 * (1.0 - 1e-12)) {
        ref = i;
        break;
      }
    }
    if (ref == end) ref = c.size() - 1;
  }
  if (c[ref].infinite) return false;
  return c[end].value > factor * c[ref].value;
}

}  // namespace

SProfile s_profile(WeightSpec const& k, double q, int N, std::vector<double> const& r_list,
                   SProfileOptions const& opts) {
  require(!r_list.empty(), "s_profile needs at least one radius");
  for (std::size_t i = 0; i < r_list.size(); ++i) {
    require(r_list[i] > 0.0, "s_profile radii must be positive");
    if (i > 0) require(r_list[i] > r_list[i - 1], "s_profile radii must be increasing");
  }
  std::size_t const n = r_list.size();
  SProfile out;
  out.exterior.resize(n);
  out.origin.resize(n);
  std::vector<std::exception_ptr> errors(n);
  RayleighOptions ropts = opts.rayleigh;
  ropts.require_convergence = false;

#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < n; ++i) {
    try {
      double const r = r_list[i];
      auto grid = build_grid(opts.map, opts.M, r, N);
      auto ext = rayleigh_min(Domain::exterior(r), k, q, grid, ropts);
      auto ball = rayleigh_min(Domain::ball(r), k, q, grid, ropts);
      out.exterior[i] = {r, ext.value, ext.infinite, ext.infinite ? kInf : ext.value};
      out.origin[i] = {r, ball.value, ball.infinite, ball.infinite ? kInf : ball.value};
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto const& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  double const tol = opts.monotone_rtol;
  for (std::size_t i = 1; i < n; ++i) {
    auto const& a = out.exterior[i - 1];
    auto const& b = out.exterior[i];
    if (!b.infinite && (a.infinite || b.value < a.value * (1.0 - tol))) out.exterior_monotone = false;
    auto const& c = out.origin[i - 1];
    auto const& d = out.origin[i];
    if (!c.infinite && (d.infinite || d.value > c.value * (1.0 + tol))) out.origin_monotone = false;
  }
  out.infinity_flag = grows_across_last_decade(out.exterior, true, opts.growth_factor);
  out.origin_flag = grows_across_last_decade(out.origin, false, opts.growth_factor);

  // Nested domains share test functions: a minimizer for {|x| > r_j} is
  // admissible for every r_i < r_j, and one for B_{r_i} for every r_j > r_i.
  auto const tighten = [](SPoint& p, SPoint const& nested) {
    if (nested.infinite) return;
    if (p.infinite || nested.value < p.value) {
      p.value = nested.value;
      p.infinite = false;
    }
  };
  for (std::size_t i = n - 1; i-- > 0;) tighten(out.exterior[i], out.exterior[i + 1]);
  for (std::size_t i = 1; i < n; ++i) tighten(out.origin[i], out.origin[i - 1]);
  out.s_infinity = out.infinity_flag ? kInf : out.exterior.back().value;
  out.s_origin = out.origin_flag ? kInf : out.origin.front().value;
  return out;
}

// -- analytic constants --------------------------------------------------------

namespace {

// Limit of a nonnegative weight at 0 or infinity: 0, finite, or +inf.
double end_limit(WeightSpec const& k, bool at_origin) {
  Envelope e = k.envelope();
  if (e.known) {
    double const a = at_origin ? e.a0 : e.ainf;
    double const c = at_origin ? e.c0 : e.cinf;
    if (c <= 0.0) return 0.0;
    if (std::abs(a) <= kExponentTol) return c;
    bool const vanishes = at_origin ? a > 0.0 : a < 0.0;
    return vanishes ? 0.0 : kInf;
  }
  if (at_origin) return k(0.0);
  fail(ErrorKind::inconclusive, "limit at infinity unavailable without an envelope");
}

double s_from_k(double kval, double p, double K) {
  if (kval <= 0.0) return kInf;
  if (std::isinf(kval)) return 0.0;
  return std::pow(kval, -2.0 / p) * std::pow(K, -2.0);
}

}  // namespace

SInterval analytic_S(WeightSpec const& k_profile, double delta, double q, int N, Location where,
                     double radius) {
  require(N >= 3, "analytic_S needs N >= 3");
  require(delta >= 0.0 && delta < 2.0, "analytic_S needs 0 <= delta < 2");
  require(k_profile.radial(), "analytic_S needs a radial profile");
  double const p = 2.0 * (N - delta) / (N - 2.0);
  if (std::abs(q - p) > 1e-12 * p) {
    std::ostringstream os;
    os << "analytic S needs q = p(N, delta) = " << p << " (got " << q << ")";
    fail(ErrorKind::unsupported, os.str());
  }
  double const K = hardy_sobolev_constant(N, delta);
  switch (where) {
    case Location::origin: {
      double const s = s_from_k(end_limit(k_profile, true), p, K);
      return {s, s};
    }
    case Location::off_origin: {
      if (delta > 0.0) return {kInf, kInf};
      double const s = s_from_k(k_profile(radius), p, K);
      return {s, s};
    }
    case Location::infinity: {
      Envelope e = k_profile.envelope();
      if (e.known) {
        double const s = s_from_k(end_limit(k_profile, false), p, K);
        return {s, s};
      }
      // Without an envelope: extreme values over the outermost probe decade.
      auto radii = probe_radii();
      double lo = kInf, hi = 0.0;
      for (std::size_t i = radii.size() - 11; i < radii.size(); ++i) {
        double const v = k_profile(radii[i]);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      return {s_from_k(hi, p, K), s_from_k(lo, p, K)};
    }
  }
  return {kInf, kInf};
}

// -- compactness threshold -----------------------------------------------------

namespace {

double critical_delta(ProblemSpec const& spec) { return spec.N - spec.p * (spec.N - 2.0) / 2.0; }

std::string radius_label(double r) {
  std::ostringstream os;
  os.precision(17);
  os << "r=" << r;
  return os.str();
}

// Contributing points x with their orbit lengths and local constants S^x_{h+}.
std::vector<ThresholdTerm> threshold_terms(ProblemSpec const& spec, SProfile const* numeric) {
  double const delta = critical_delta(spec);
  WeightSpec const hp = spec.weight.positive_part();
  std::vector<ThresholdTerm> terms;
  bool const analytic = hp.radial() && hp.envelope().known && delta >= 0.0 && delta < 2.0;
  if (!analytic) {
    if (numeric == nullptr || !hp.radial() || delta <= 0.0) {
      fail(ErrorKind::inconclusive,
           "no analytic local constants for this weight; numeric S curves required");
    }
    terms.push_back({"0", {1, false}, {numeric->s_origin, numeric->s_origin}});
    terms.push_back({"inf", {1, false}, {numeric->s_infinity, numeric->s_infinity}});
    return terms;
  }
  WeightSpec const k = WeightSpec::product(hp, -delta);
  terms.push_back({"0", {1, false}, analytic_S(k, delta, spec.p, spec.N, Location::origin)});
  terms.push_back({"inf", spec.group.orbit_length_at_infinity(),
                   analytic_S(k, delta, spec.p, spec.N, Location::infinity)});
  if (delta == 0.0) {
    // Critical exponent: every finite orbit off the origin contributes.
    double best_r = 0.0, best_k = -1.0;
    for (double r : probe_radii()) {
      double const v = k(r);
      if (v > best_k) {
        best_k = v;
        best_r = r;
      }
    }
    OrbitLength orbit = spec.group.min_orbit_at_radius(best_r, spec.N);
    if (!orbit.infinite) {
      terms.push_back({radius_label(best_r), orbit,
                       analytic_S(k, delta, spec.p, spec.N, Location::off_origin, best_r)});
    }
  }
  return terms;
}

}  // namespace

C0Result c0_threshold(ProblemSpec const& spec, SProfile const* numeric) {
  spec.validate();
  C0Result out;
  out.delta = critical_delta(spec);
  out.terms = threshold_terms(spec, numeric);
  double const expo = spec.p / (spec.p - 2.0);
  double const pre = 0.5 - 1.0 / spec.p;
  double lo = kInf, hi = kInf;
  for (auto const& t : out.terms) {
    if (t.orbit.infinite) continue;
    double const m = t.orbit.as_double();
    lo = std::min(lo, m * std::pow(t.s.lower, expo));
    hi = std::min(hi, m * std::pow(t.s.upper, expo));
  }
  out.infinite = std::isinf(lo);
  out.value = pre * lo;
  out.upper = pre * hi;
  return out;
}

// -- test-function conditions --------------------------------------------------

char const* to_string(BoundVerdict v) {
  switch (v) {
    case BoundVerdict::satisfied: return "satisfied";
    case BoundVerdict::unsatisfied: return "unsatisfied";
    case BoundVerdict::inconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

double threshold_bound(ProblemSpec const& spec, std::vector<ThresholdTerm> const& terms) {
  double bound = 0.0;
  for (auto const& t : terms) {
    if (t.orbit.infinite || std::isinf(t.s.lower)) continue;
    double const term = std::pow(t.orbit.as_double(), -(spec.p - 2.0) / 2.0) *
                        std::pow(t.s.lower, -spec.p / 2.0);
    bound = std::max(bound, term);
  }
  return bound;
}

}  // namespace

TestFunctionResult test_function_bound(ProblemSpec const& spec,
                                       std::vector<double> const& sigma_grid) {
  spec.validate();
  TestFunctionResult out;
  double const delta = critical_delta(spec);
  if (!spec.weight.radial() || delta < 0.0 || delta >= 2.0) {
    out.reason = "needs a radial weight and 2 < p <= 2*";
    return out;
  }
  require(!sigma_grid.empty(), "test_function_bound needs a sigma grid");
  WeightSpec const hp = spec.weight.positive_part();
  WeightSpec const k = WeightSpec::product(hp, -delta);
  double kc;
  try {
    double const k0 = end_limit(k, true);
    double const kinf = end_limit(k, false);
    double sup_off = 0.0;
    if (spec.group.kind() != GroupKind::full_rotation) {
      for (double r : probe_radii()) {
        OrbitLength o = spec.group.min_orbit_at_radius(r, spec.N);
        sup_off = std::max(sup_off, k(r) * std::pow(o.as_double(), -(spec.p - 2.0) / 2.0));
      }
    }
    kc = std::max({k0, kinf, sup_off});
  } catch (Error const& e) {
    if (e.kind() != ErrorKind::inconclusive) throw;
    out.reason = e.what();
    return out;
  }
  out.k_c = kc;
  if (std::isinf(kc)) {
    out.verdict = BoundVerdict::unsatisfied;
    out.bound = kInf;
    out.reason = "comparison weight is unbounded";
    return out;
  }
  out.bound = kc * std::pow(hardy_sobolev_constant(spec.N, delta), spec.p);

  bool clean = true;
  double best_surplus = -kInf;
  for (double sigma : sigma_grid) {
    ExtremalFamily v(spec.N, delta, sigma);
    auto const& h = spec.weight;
    auto mass = integrate_radial(
        [&](double r) { return h(r) * std::pow(v.normalized_value(r), spec.p); }, spec.N, 0.0, kInf);
    auto surplus = integrate_radial(
        [&](double r) {
          return (h(r) - kc * std::pow(r, -delta)) * std::pow(v.normalized_value(r), spec.p);
        },
        spec.N, 0.0, kInf);
    auto scale = integrate_radial(
        [&](double r) {
          return (std::abs(h(r)) + kc * std::pow(r, -delta)) * std::pow(v.normalized_value(r), spec.p);
        },
        spec.N, 0.0, kInf);
    out.sigma.push_back(sigma);
    out.mass.push_back(mass.value);
    out.surplus.push_back(surplus.value);
    bool const ok = mass.status != SeriesStatus::diverged && mass.status != SeriesStatus::inconclusive &&
                    surplus.status != SeriesStatus::diverged &&
                    surplus.status != SeriesStatus::inconclusive;
    if (!ok) {
      clean = false;
      continue;
    }
    if (mass.value > 0.0 && surplus.value >= -kSurplusTol * scale.value &&
        surplus.value > best_surplus) {
      best_surplus = surplus.value;
      out.witness_sigma = sigma;
    }
  }
  if (out.witness_sigma) {
    out.verdict = BoundVerdict::satisfied;
    out.reason = "nonnegative surplus at the witness dilation";
  } else if (clean) {
    out.verdict = BoundVerdict::unsatisfied;
    out.reason = "no dilation in the grid has positive mass and nonnegative surplus";
  } else {
    out.reason = "some integrals did not converge";
  }
  return out;
}

TestFunctionResult test_function_bound(ProblemSpec const& spec, RadialFunction const& u) {
  spec.validate();
  TestFunctionResult out;
  std::vector<ThresholdTerm> terms;
  try {
    terms = threshold_terms(spec, nullptr);
  } catch (Error const& e) {
    if (e.kind() != ErrorKind::inconclusive) throw;
    out.reason = e.what();
    return out;
  }
  out.bound = threshold_bound(spec, terms);
  double const E = dirichlet_energy(u);
  if (!(E > 0.0)) fail(ErrorKind::undefined_quotient, "test function has zero Dirichlet energy");
  auto const lp = weighted_lp(u, spec.weight, spec.p);
  double const value = lp.total / std::pow(E, spec.p / 2.0);
  out.mass.push_back(value);
  out.surplus.push_back(value - out.bound);
  if (value > 0.0 && value >= out.bound) {
    out.verdict = BoundVerdict::satisfied;
    out.reason = "normalized mass reaches the threshold bound";
  } else {
    out.verdict = BoundVerdict::unsatisfied;
    out.reason = value > 0.0 ? "normalized mass below the threshold bound" : "nonpositive mass";
  }
  return out;
}

}  // namespace emden
