#include "emden/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>

#include <boost/math/special_functions/beta.hpp>

#include "emden/core/error.hpp"
#include "emden/core/problem.hpp"

namespace emden {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kExponentTol = 1e-9;

double norm(Point const& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

bool finite_status(SeriesStatus s) {
  return s == SeriesStatus::converged || s == SeriesStatus::extrapolated;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

char const* to_string(Verdict v) {
  switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::fails: return "fails";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

double sphere_fraction_in_ball(double r, double d, double rho, int N) {
  if (d == 0.0) return r < rho ? 1.0 : 0.0;
  if (r + d <= rho) return 1.0;
  if (r >= d + rho || r <= d - rho) return 0.0;
  double const c = (r * r + d * d - rho * rho) / (2.0 * r * d);
  if (c <= -1.0) return 1.0;
  if (c >= 1.0) return 0.0;
  double const half = 0.5 * boost::math::ibeta(0.5 * (N - 1.0), 0.5, 1.0 - c * c);
  return c >= 0.0 ? half : 1.0 - half;
}

namespace {

// int over (B_rho(x) \ B_rmin(0)) of k+, |x| = d, for radial k.
ShellIntegral radial_mass(WeightSpec const& k, int N, double d, double rho, double rmin) {
  auto kp = [&](double r) { return k.positive_value(r); };
  ShellIntegral total;
  auto add = [&](ShellIntegral const& s) {
    total.value += s.value;
    total.shells += s.shells;
    if (!finite_status(s.status)) total.status = s.status;
  };
  double const full_hi = rho - d;  // shells entirely inside the ball
  if (full_hi > rmin) add(integrate_radial(kp, N, rmin, full_hi));
  if (d > 0.0) {
    double const lo = std::max(std::abs(d - rho), rmin);
    double const hi = d + rho;
    if (hi > lo) {
      add(integrate_radial([&](double r) {
        double const f = sphere_fraction_in_ball(r, d, rho, N);
        return f == 0.0 ? 0.0 : f * kp(r);
      }, N, lo, hi));
    }
  }
  if (total.status == SeriesStatus::diverged) total.value = kInf;
  return total;
}

}  // namespace

BallMass ball_mass(WeightSpec const& k, Point const& x, double rho, std::vector<double> const& cutoffs,
                   BallMassOptions const& opts) {
  require(rho > 0.0 && std::isfinite(rho), "ball radius must be positive and finite");
  require(x.size() >= 1, "ball center needs at least one coordinate");
  for (double R : cutoffs) require(R >= 0.0, "cutoff radii must be nonnegative");
  int const N = static_cast<int>(x.size());
  BallMass out;
  if (k.radial() && opts.method == MassMethod::automatic) {
    double const d = norm(x);
    auto const m = radial_mass(k, N, d, rho, 0.0);
    out.value = m.value;
    out.inconclusive = m.status == SeriesStatus::inconclusive;
    for (double R : cutoffs) {
      auto const o = radial_mass(k, N, d, rho, R);
      out.outside.push_back(o.value);
      out.inconclusive = out.inconclusive || o.status == SeriesStatus::inconclusive;
    }
    return out;
  }
  auto f = [&](std::span<const double> y) { return std::max(0.0, k.at(y)); };
  auto const s = kernels::ball_monte_carlo(f, x, rho, cutoffs, opts.sampling);
  out.value = s.value;
  out.std_error = s.std_error;
  out.outside = s.outside;
  out.monte_carlo = true;
  out.inconclusive = !std::isfinite(s.value) || (s.value > 0.0 && s.std_error > opts.max_rel_error * s.value);
  return out;
}

BallMass mazja_functional(WeightSpec const& k, double q, Point const& x, double rho,
                          BallMassOptions const& opts) {
  require(q > 2.0, "the scaled ball mass needs q > 2");
  BallMass m = ball_mass(k, x, rho, {}, opts);
  double const N = static_cast<double>(x.size());
  double const scale = std::pow(rho, (1.0 - 0.5 * N) * q);
  m.value *= scale;
  m.std_error *= scale;
  return m;
}

ProbeGrid default_probe_grid(int N) {
  require(N >= 1, "probe grid needs N >= 1");
  ProbeGrid g;
  g.centers.push_back(Point(N, 0.0));
  for (int i = 0; i < N; ++i) {
    for (int j = -4; j <= 4; ++j) {
      Point x(N, 0.0);
      x[i] = std::ldexp(1.0, j);
      g.centers.push_back(std::move(x));
    }
  }
  for (int j = -10; j <= 10; ++j) g.radii.push_back(std::ldexp(1.0, j));
  for (int j = 0; j <= 6; ++j) g.cutoffs.push_back(std::ldexp(1.0, j));
  for (int j = -10; j <= 0; ++j) g.scales.push_back(std::ldexp(1.0, j));
  return g;
}

namespace {

struct EnvelopeVerdict {
  Verdict continuity = Verdict::inconclusive;
  Verdict compactness = Verdict::inconclusive;
  std::string rationale;
  std::optional<double> origin, infinity;
};

// Scaled mass rho^{(1-N/2)q} int_{B_rho} k ~ rho^{e}: e = a0 + dq at the
// origin, ainf + dq for large balls, dq for small balls elsewhere.
EnvelopeVerdict decide(Envelope const& e, double dq) {
  EnvelopeVerdict v;
  if (!e.known) {
    v.rationale = "envelope exponents unknown; probe curves are evidence only";
    return v;
  }
  if (e.c0 != 0.0) v.origin = e.a0 + dq;
  if (e.cinf != 0.0) v.infinity = e.ainf + dq;
  double const o = v.origin.value_or(kInf);
  double const i = v.infinity.value_or(-kInf);
  bool const cont = dq >= -kExponentTol && o >= -kExponentTol && i <= kExponentTol;
  bool const comp = dq > kExponentTol && o > kExponentTol && i < -kExponentTol;
  v.continuity = cont ? Verdict::holds : Verdict::fails;
  v.compactness = comp ? Verdict::holds : Verdict::fails;
  std::ostringstream os;
  if (dq < -kExponentTol) {
    os << "q above the critical exponent: small balls blow up like rho^" << dq;
  } else if (o < -kExponentTol) {
    os << "scaled mass at the origin grows like rho^" << o << " as rho -> 0";
  } else if (i > kExponentTol) {
    os << "scaled mass of large balls grows like rho^" << i;
  } else if (!comp) {
    if (dq <= kExponentTol) {
      os << "critical exponent: small balls keep a fixed share of the scaled mass";
    } else if (o <= kExponentTol) {
      os << "scale invariant at the origin: the small-ball sup does not vanish";
    } else {
      os << "scale invariant at infinity: mass outside B_R does not vanish";
    }
  } else {
    os << "scaled mass vanishes at the origin (rho^" << o << "), at interior points (rho^" << dq
       << ") and at infinity";
    if (v.infinity) os << " (rho^" << i << ")";
  }
  v.rationale = os.str();
  return v;
}

}  // namespace

EmbeddingReport compactness_check(WeightSpec const& k, double q, int N, std::optional<ProbeGrid> probes,
                                  BallMassOptions const& opts) {
  require(N >= 3, "embedding check needs N >= 3");
  require(q > 2.0, "embedding check needs q > 2");
  ProbeGrid const grid = probes ? std::move(*probes) : default_probe_grid(N);
  require(!grid.centers.empty() && !grid.radii.empty(), "probe grid needs centers and radii");
  for (auto const& c : grid.centers) require(static_cast<int>(c.size()) == N, "probe center dimension differs from N");

  EmbeddingReport rep;
  rep.N = N;
  rep.q = q;
  double const dq = N - 0.5 * q * (N - 2.0);
  rep.interior_exponent = dq;
  rep.exponent_tolerance = kExponentTol;

  // Radial weights see only |x|; probe one center per distinct norm.
  std::vector<Point> centers;
  if (k.radial() && opts.method == MassMethod::automatic) {
    std::vector<double> seen;
    for (auto const& c : grid.centers) {
      double const d = norm(c);
      if (std::find(seen.begin(), seen.end(), d) != seen.end()) continue;
      seen.push_back(d);
      Point x(N, 0.0);
      x[0] = d;
      centers.push_back(std::move(x));
    }
  } else {
    centers = grid.centers;
  }

  std::size_t const nc = centers.size();
  std::size_t const nr = grid.radii.size();
  std::vector<BallMass> cells(nc * nr);
  std::vector<std::exception_ptr> errors(cells.size());
  bool const mc = !(k.radial() && opts.method == MassMethod::automatic);
  // Monte Carlo parallelizes inside the kernel; radial cells parallelize here.
#pragma omp parallel for schedule(dynamic) if (!mc)
  for (std::size_t c = 0; c < cells.size(); ++c) {
    try {
      cells[c] = ball_mass(k, centers[c / nr], grid.radii[c % nr], grid.cutoffs, opts);
    } catch (...) {
      errors[c] = std::current_exception();
    }
  }
  for (auto const& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  auto scaled = [&](double rho, double m) {
    return std::isinf(m) ? kInf : std::pow(rho, (1.0 - 0.5 * N) * q) * m;
  };
  for (std::size_t c = 0; c < cells.size(); ++c) {
    double const v = scaled(grid.radii[c % nr], cells[c].value);
    rep.sup_estimate = std::max(rep.sup_estimate, v);
    rep.monte_carlo = rep.monte_carlo || cells[c].monte_carlo;
    rep.sampling_inconclusive = rep.sampling_inconclusive || cells[c].inconclusive;
  }
  rep.sup_infinite = std::isinf(rep.sup_estimate);
  for (std::size_t j = 0; j < grid.cutoffs.size(); ++j) {
    double sup = 0.0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      sup = std::max(sup, scaled(grid.radii[c % nr], cells[c].outside[j]));
    }
    rep.tail_curve.push_back({grid.cutoffs[j], sup});
  }
  for (double s : grid.scales) {
    double sup = 0.0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double const rho = grid.radii[c % nr];
      if (rho <= s) sup = std::max(sup, scaled(rho, cells[c].value));
    }
    rep.small_scale_curve.push_back({s, sup});
  }

  Envelope env = k.positive_part().envelope();
  auto const v = decide(env, dq);
  rep.continuity = v.continuity;
  rep.compactness = v.compactness;
  rep.origin_exponent = v.origin;
  rep.infinity_exponent = v.infinity;
  rep.rationale = v.rationale;
  if (env.known && k.family() == Family::sampled_radial) rep.rationale += " (fitted envelope)";
  return rep;
}

// -- sufficient criteria ------------------------------------------------------

char const* to_string(Criterion c) {
  switch (c) {
    case Criterion::integrable_power: return "integrable_power";
    case Criterion::critical_decay: return "critical_decay";
    case Criterion::hardy_weighted: return "hardy_weighted";
    case Criterion::dominated: return "dominated";
    case Criterion::algebraic_decay: return "algebraic_decay";
    case Criterion::lebesgue_bounded: return "lebesgue_bounded";
    case Criterion::radial_split: return "radial_split";
    case Criterion::translates: return "translates";
    case Criterion::radial_supercritical: return "radial_supercritical";
  }
  return "?";
}

std::optional<Criterion> criterion_from_string(std::string const& s) {
  for (auto c : {Criterion::integrable_power, Criterion::critical_decay, Criterion::hardy_weighted,
                 Criterion::dominated, Criterion::algebraic_decay, Criterion::lebesgue_bounded,
                 Criterion::radial_split, Criterion::translates, Criterion::radial_supercritical}) {
    if (s == to_string(c)) return c;
  }
  return std::nullopt;
}

namespace {

// End behaviour c r^a of a derived function; c == 0 means identically zero there.
struct End {
  double a = 0.0;
  double c = 0.0;
};

bool vanishes_at_origin(End e) { return e.c == 0.0 || e.a > kExponentTol; }
bool vanishes_at_infinity(End e) { return e.c == 0.0 || e.a < -kExponentTol; }
// int_0 c r^a r^{N-1} dr and int^inf alike.
bool integrable_at_origin(End e, int N) { return e.c == 0.0 || e.a + N > kExponentTol; }
bool integrable_at_infinity(End e, int N) { return e.c == 0.0 || e.a + N < -kExponentTol; }

// Envelope of k+^s r^t.
std::pair<End, End> power_ends(Envelope const& e, double s, double t) {
  auto pw = [&](double a, double c) {
    if (c <= 0.0) return End{0.0, 0.0};
    return End{s * a + t, std::pow(c, s)};
  };
  return {pw(e.a0, e.c0), pw(e.ainf, e.cinf)};
}

// Criterion of the form int_{lo}^{inf} g < inf with g ~ ends.
CriterionResult integral_criterion(Criterion id, std::function<double(double)> const& g, int N,
                                   double lo, std::pair<End, End> ends, bool known,
                                   bool check_origin, std::string const& what) {
  CriterionResult out;
  out.criterion = id;
  out.integral = integrate_radial(g, N, lo, kInf);
  if (!known) {
    out.reason = "envelope unknown; " + what + " quadrature " + to_string(out.integral->status) +
                 " is evidence only";
    return out;
  }
  bool const o = !check_origin || integrable_at_origin(ends.first, N);
  bool const i = integrable_at_infinity(ends.second, N);
  if (!o || !i) {
    out.verdict = Verdict::fails;
    out.reason = what + " diverges at " + (!o ? "the origin" : "infinity") + " (integrand ~ r^" +
                 fmt(!o ? ends.first.a : ends.second.a) + ")";
    return out;
  }
  if (!finite_status(out.integral->status)) {
    out.reason = what + " finite by exponents, but quadrature is " + to_string(out.integral->status);
    return out;
  }
  out.verdict = Verdict::holds;
  out.reason = what + " finite: exponents integrable at both ends, quadrature " +
               to_string(out.integral->status);
  return out;
}

// f = k+ r^{t} must vanish at both ends and stay bounded on the probes.
CriterionResult vanishing_ratio(Criterion id, WeightSpec const& k, double t, std::string const& what) {
  CriterionResult out;
  out.criterion = id;
  Envelope const e = k.positive_part().envelope();
  if (!e.known) {
    out.reason = "envelope unknown; cannot decide whether " + what + " vanishes at 0 and infinity";
    return out;
  }
  auto [o, i] = power_ends(e, 1.0, t);
  if (!vanishes_at_origin(o) || !vanishes_at_infinity(i)) {
    out.verdict = Verdict::fails;
    out.reason = what + " does not vanish at " + (!vanishes_at_origin(o) ? "the origin" : "infinity");
    return out;
  }
  if (k.radial()) {
    for (double r : probe_radii()) {
      double const f = k.positive_value(r) * std::pow(r, t);
      if (!std::isfinite(f)) {
        out.reason = what + " is not finite at r = " + fmt(r);
        return out;
      }
    }
  }
  out.verdict = Verdict::holds;
  out.reason = what + " vanishes at 0 (r^" + fmt(o.a) + ") and at infinity (r^" + fmt(i.a) + ")";
  return out;
}

CriterionResult split_criterion(Criterion id, WeightSpec const& h, double p, CriterionParams const& prm) {
  int const N = prm.N;
  double const d0 = N - 0.5 * p * (N - 2.0);
  CriterionResult out;
  out.criterion = id;
  if (!h.radial()) {
    out.reason = "needs a radial weight";
    return out;
  }
  if (prm.k1 || prm.k2) {
    require(prm.k1 && prm.k2, "radial split needs both components");
    require(prm.k1->radial() && prm.k2->radial(), "split components must be radial");
    for (double r : probe_radii()) {
      double const lhs = h.positive_value(r);
      double const rhs = (*prm.k1)(r) + (*prm.k2)(r);
      if ((*prm.k1)(r) < 0.0 || (*prm.k2)(r) < 0.0 || std::abs(lhs - rhs) > 1e-9 * std::max(1.0, std::abs(lhs))) {
        out.verdict = Verdict::fails;
        out.reason = "components are not a nonnegative split of h+ at r = " + fmt(r);
        return out;
      }
    }
    auto a = vanishing_ratio(id, *prm.k1, d0, "k1 r^{delta0}");
    if (a.verdict != Verdict::holds) {
      a.reason = "first component: " + a.reason;
      return a;
    }
    auto const e2 = prm.k2->envelope();
    auto b = integral_criterion(id, [&](double r) { return (*prm.k2)(r) * std::pow(r, -0.5 * p * (N - 2.0)); },
                                N, 0.0, power_ends(e2, 1.0, -0.5 * p * (N - 2.0)), e2.known, true,
                                "int k2 r^{N-1-p(N-2)/2}");
    b.reason = "second component: " + b.reason;
    return b;
  }
  // Automatic split: all of h+ in one component.
  auto a = vanishing_ratio(id, h, d0, "h+ r^{delta0}");
  if (a.verdict == Verdict::holds) return a;
  auto const e = h.positive_part().envelope();
  auto b = integral_criterion(id, [&](double r) { return h.positive_value(r) * std::pow(r, -0.5 * p * (N - 2.0)); },
                              N, 0.0, power_ends(e, 1.0, -0.5 * p * (N - 2.0)), e.known, true,
                              "int h+ r^{N-1-p(N-2)/2}");
  if (b.verdict == Verdict::fails && a.verdict == Verdict::fails) {
    b.verdict = Verdict::inconclusive;
    b.reason = "neither single-component split works (" + a.reason + "; " + b.reason +
               "); a mixed split may exist";
  }
  return b;
}

}  // namespace

CriterionResult sufficient_criterion(WeightSpec const& k, double q, Criterion id, CriterionParams const& prm) {
  int const N = prm.N;
  require(N >= 3, "criteria need N >= 3");
  double const crit = 2.0 * N / (N - 2.0);
  auto kp = [&](double r) { return k.positive_value(r); };
  CriterionResult out;
  out.criterion = id;
  auto wrong_range = [&](std::string const& why) {
    out.verdict = Verdict::fails;
    out.reason = why;
    return out;
  };
  auto need_radial = [&]() {
    out.reason = "integral criteria need a radial weight";
    return out;
  };

  switch (id) {
    case Criterion::integrable_power: {
      if (!(q > 2.0 && q < crit)) return wrong_range("needs 2 < q < 2*");
      if (!k.radial()) return need_radial();
      double const s = crit / (crit - q);
      auto const e = k.positive_part().envelope();
      return integral_criterion(id, [&](double r) { return std::pow(kp(r), s); }, N, 0.0,
                                power_ends(e, s, 0.0), e.known, true, "int k^{2*/(2*-q)}");
    }
    case Criterion::critical_decay: {
      if (!(q > 2.0 && q < crit)) return wrong_range("needs 2 < q < 2*");
      return vanishing_ratio(id, k, N - 0.5 * q * (N - 2.0), "k r^{N-q(N-2)/2}");
    }
    case Criterion::hardy_weighted: {
      require(prm.delta.has_value(), "hardy_weighted needs delta");
      double const delta = *prm.delta;
      if (!(delta >= 0.0 && delta <= 2.0)) return wrong_range("needs 0 <= delta <= 2");
      double const p = 2.0 * (N - delta) / (N - 2.0);
      if (!(q >= 1.0 && q < p)) return wrong_range("needs 1 <= q < p(N, delta) = " + fmt(p));
      if (!k.radial()) return need_radial();
      double const s = p / (p - q);
      double const t = delta * q / (p - q);
      auto const e = k.positive_part().envelope();
      return integral_criterion(id, [&](double r) {
        double const v = kp(r);
        return v == 0.0 ? 0.0 : std::pow(v, s) * std::pow(r, t);
      }, N, 0.0, power_ends(e, s, t), e.known, true, "int k^{p/(p-q)} |x|^{delta q/(p-q)}");
    }
    case Criterion::dominated: {
      require(prm.p && prm.z && prm.h, "dominated needs p, z and h");
      double const p = *prm.p;
      double const z = *prm.z;
      WeightSpec const& h = *prm.h;
      if (!(std::min(p, crit) > q && q >= 1.0)) return wrong_range("needs min(p, 2*) > q >= 1");
      if (!(z >= 0.0 && z <= q)) return wrong_range("needs 0 <= z <= q");
      require(prm.R > 0.0, "dominated needs R > 0");
      if (!k.radial() || !h.radial()) return need_radial();
      out.positivity_assumed = true;
      for (double r : probe_radii()) {
        if (r > prm.R && kp(r) > 0.0 && !(h(r) > 0.0)) {
          return wrong_range("h is not positive on the support of k at r = " + fmt(r));
        }
      }
      double const s = crit / (crit - q);
      auto const ek = k.positive_part().envelope();
      auto const eh = h.envelope();
      if (ek.known && !integrable_at_origin(power_ends(ek, s, 0.0).first, N)) {
        return wrong_range("k is not locally in L^{2*/(2*-q)} at the origin");
      }
      double const m = (q - z) / (p - q);
      double const t = crit / (crit - z);
      auto g = [&](double r) {
        double const kv = kp(r);
        if (kv == 0.0) return 0.0;
        return std::pow(kv * std::pow(kv / h(r), m), t);
      };
      std::pair<End, End> ends;
      bool const known = ek.known && eh.known && eh.cinf > 0.0;
      if (known && ek.cinf > 0.0) {
        double const a = ek.ainf + m * (ek.ainf - eh.ainf);
        ends.second = End{t * a, 1.0};
      }
      auto res = integral_criterion(id, g, N, prm.R, ends, known, false,
                                    "tail int [k (k/h)^{(q-z)/(p-q)}]^{2*/(2*-z)}");
      res.positivity_assumed = true;
      return res;
    }
    case Criterion::algebraic_decay: {
      double const p = q;
      if (!(p > 2.0 && p < crit)) return wrong_range("needs 2 < p < 2*");
      if (!k.nonnegative()) return wrong_range("needs a nonnegative weight");
      auto const e = k.envelope();
      if (!e.known) {
        out.reason = "envelope unknown";
        return out;
      }
      if (e.c0 != 0.0 && e.a0 < -kExponentTol) return wrong_range("weight is unbounded at the origin");
      double const d0 = N - 0.5 * p * (N - 2.0);
      // h <= C (1+r^2)^-a needs 2a <= -ainf; a must exceed delta0 and stay below 2.
      double const amax = e.cinf == 0.0 ? kInf : -0.5 * e.ainf;
      if (prm.a) {
        double const a = *prm.a;
        if (!(a > 0.0 && a < 2.0)) return wrong_range("needs 0 < a < 2");
        if (!(a > d0 + kExponentTol)) return wrong_range("needs (2N - 2a)/(N - 2) < p, i.e. a > " + fmt(d0));
        if (a > amax + kExponentTol) return wrong_range("weight decays slower than (1+r^2)^-" + fmt(a));
      } else if (!(amax > d0 + kExponentTol)) {
        return wrong_range("decay r^" + fmt(e.ainf) + " is too slow: needs faster than r^-" + fmt(2.0 * d0));
      }
      out.verdict = Verdict::holds;
      out.reason = "bounded at the origin, decay exponent " + fmt(e.ainf) + " beyond -2 delta0 = " + fmt(-2.0 * d0);
      return out;
    }
    case Criterion::lebesgue_bounded: {
      double const p = q;
      if (!(p > 2.0 && p < crit)) return wrong_range("needs 2 < p < 2*");
      if (!k.nonnegative()) return wrong_range("needs a nonnegative weight");
      if (!k.radial()) return need_radial();
      auto const e = k.envelope();
      if (!e.known) {
        out.reason = "envelope unknown";
        return out;
      }
      if ((e.c0 != 0.0 && e.a0 < -kExponentTol) || (e.cinf != 0.0 && e.ainf > kExponentTol)) {
        return wrong_range("weight is not bounded");
      }
      double const smax = crit / (crit - p);
      double s = prm.s.value_or(0.0);
      if (prm.s) {
        if (!(s > 1.0 && s < smax)) return wrong_range("needs 1 < s < 2*/(2*-p) = " + fmt(smax));
      } else {
        // Smallest admissible exponent helps most; s slightly above the decay limit.
        if (e.cinf != 0.0 && !(e.ainf * smax < -N - kExponentTol)) {
          return wrong_range("no s < " + fmt(smax) + " makes r^" + fmt(e.ainf) + " integrable");
        }
        double const lo = e.cinf == 0.0 ? 1.0 : std::max(1.0, -N / e.ainf);
        s = 0.5 * (lo + smax);
      }
      auto res = integral_criterion(id, [&](double r) { return std::pow(k(r), s); }, N, 0.0,
                                    power_ends(e, s, 0.0), true, true, "int h^s with s = " + fmt(s));
      return res;
    }
    case Criterion::radial_split: {
      if (!(q > 2.0)) return wrong_range("needs p > 2");
      return split_criterion(id, k, q, prm);
    }
    case Criterion::translates: {
      double const p = q;
      if (!(p > 2.0 && p < crit)) return wrong_range("needs 2 < p < 2*");
      double const d0 = N - 0.5 * p * (N - 2.0);
      if (auto const* t = std::get_if<weights::Translates>(&k.node().data)) {
        double sum_abs = 0.0;
        for (double a : t->coefficients) sum_abs += std::abs(a);
        if (!std::isfinite(sum_abs)) return wrong_range("coefficients are not summable");
        // f(y) |y|^{exponent} = (f |y|^{exponent + delta0}) |y|^{-delta0}
        return vanishing_ratio(id, t->envelope, t->exponent + d0,
                               "f |y|^{exponent + delta0}");
      }
      return vanishing_ratio(id, k, d0, "h+ r^{delta0}");
    }
    case Criterion::radial_supercritical: {
      if (!(q >= crit)) return wrong_range("needs p >= 2*");
      return split_criterion(id, k, q, prm);
    }
  }
  return out;
}

}  // namespace emden
