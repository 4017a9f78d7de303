#include "emden/solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <sstream>

#include "emden/core/descent.hpp"
#include "emden/core/error.hpp"
#include "emden/core/laplacian.hpp"
#include "emden/core/norms.hpp"
#include "emden/embedding.hpp"
#include "emden/kernels.hpp"
#include "emden/pohozaev.hpp"

namespace emden {

namespace {

constexpr double kDescentTol = 1e-6;
constexpr double kMinDamping = 0x1p-20;
constexpr double kNegativeTol = 1e-10;
constexpr double kAtomFraction = 0.5;

struct Discrete {
  RadialLaplacian K;
  std::vector<double> kw;  // w_i h(r_i), signed
};

Discrete discretize(ProblemSpec const& spec, RadialGrid const& g) {
  require(spec.weight.radial(), "the solver handles radial weights only");
  require(g.dimension() == spec.N, "grid dimension differs from the problem dimension");
  return {RadialLaplacian(g), nodal_weight(spec.weight, g).signed_weight()};
}

// F(u) = K u - kw |u|^{p-2} u
std::vector<double> residual_vector(Discrete const& d, std::span<const double> u, double p) {
  std::vector<double> F(u.size());
  d.K.apply(u, F);
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (d.kw[i] != 0.0) F[i] -= d.kw[i] * std::pow(std::abs(u[i]), p - 2.0) * u[i];
  }
  return F;
}

double dual_norm(RadialLaplacian const& K, std::span<const double> F) {
  auto z = K.solve(F);
  double s = 0.0;
  for (std::size_t i = 0; i < F.size(); ++i) s += F[i] * z[i];
  return std::sqrt(std::max(0.0, s));
}

}  // namespace

double energy(RadialFunction const& u, ProblemSpec const& spec, bool* divergence_warning) {
  auto const lp = weighted_lp(u, spec.weight, spec.p);
  if (divergence_warning != nullptr) *divergence_warning = lp.divergence_warning;
  return 0.5 * dirichlet_energy(u) - lp.total / spec.p;
}

GradResidual grad_residual(RadialFunction const& u, ProblemSpec const& spec) {
  auto const d = discretize(spec, *u.grid());
  GradResidual out;
  out.nodal = residual_vector(d, u.values(), spec.p);
  out.norm = dual_norm(d.K, out.nodal);
  return out;
}

NehariProjection nehari_project(RadialFunction const& u, ProblemSpec const& spec) {
  double const E = dirichlet_energy(u);
  double const B = weighted_lp(u, spec.weight, spec.p).total;
  if (!(B > 0.0)) {
    fail(ErrorKind::nehari_undefined, "Nehari projection undefined: int h |u|^p <= 0");
  }
  double const t = std::pow(E / B, 1.0 / (spec.p - 2.0));
  return {t, u.scaled(t)};
}

double nehari_level(RadialFunction const& u, ProblemSpec const& spec) {
  double const E = dirichlet_energy(u);
  double const B = weighted_lp(u, spec.weight, spec.p).total;
  if (!(B > 0.0)) fail(ErrorKind::nehari_undefined, "Nehari level undefined: int h |u|^p <= 0");
  double const p = spec.p;
  return (0.5 - 1.0 / p) * std::pow(E, p / (p - 2.0)) * std::pow(B, -2.0 / (p - 2.0));
}

char const* to_string(ConcentrationVerdict v) {
  switch (v) {
    case ConcentrationVerdict::no_concentration: return "no_concentration";
    case ConcentrationVerdict::tail_escape: return "tail_escape";
    case ConcentrationVerdict::point_atom: return "point_atom";
  }
  return "?";
}

char const* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::failed: return "failed";
    case SolveStatus::nehari_undefined: return "nehari_undefined";
  }
  return "?";
}

ConcentrationReport concentration_report(RadialFunction const& u, ProblemSpec const& spec,
                                         ConcentrationProbes const& probes) {
  auto const& g = *u.grid();
  require(!probes.radii.empty() && !probes.cutoffs.empty() && !probes.centers.empty(),
          "concentration probes must be nonempty");
  auto const nw = nodal_weight(spec.weight, g);
  auto r = g.nodes();
  auto v = u.values();
  std::vector<double> m(v.size());
  double total = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    m[i] = nw.plus[i] == 0.0 ? 0.0 : nw.plus[i] * std::pow(std::abs(v[i]), spec.p);
    total += m[i];
  }
  if (!(total > 0.0)) fail(ErrorKind::undefined_quotient, "concentration report: zero mass");

  ConcentrationReport out;
  auto cutoffs = probes.cutoffs;
  std::sort(cutoffs.begin(), cutoffs.end());
  for (double R : cutoffs) {
    double beyond = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (r[i] > R) beyond += m[i];
    }
    out.tail_fraction.emplace_back(R, std::clamp(beyond / total, 0.0, 1.0));
  }
  auto radii = probes.radii;
  std::sort(radii.begin(), radii.end());
  for (double rho : radii) {
    double peak = 0.0;
    for (double d : probes.centers) {
      double inside = 0.0;
      for (std::size_t i = 0; i < m.size(); ++i) {
        if (m[i] != 0.0) inside += m[i] * sphere_fraction_in_ball(r[i], d, rho, spec.N);
      }
      peak = std::max(peak, inside / total);
    }
    out.peak_ball_fraction.emplace_back(rho, std::clamp(peak, 0.0, 1.0));
  }
  if (out.peak_ball_fraction.front().second > kAtomFraction) {
    out.verdict = ConcentrationVerdict::point_atom;
  } else if (out.tail_fraction.back().second > kAtomFraction) {
    out.verdict = ConcentrationVerdict::tail_escape;
  }
  return out;
}

namespace {

std::vector<std::vector<double>> solver_seeds(RadialGrid const& g, SolverOptions const& opts) {
  auto r = g.nodes();
  double const L = g.scale();
  int const N = g.dimension();
  std::vector<std::vector<double>> seeds;
  auto add = [&](auto const& f) {
    std::vector<double> v(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) v[i] = f(r[i]);
    seeds.push_back(std::move(v));
  };
  for (double w : {0.5, 1.0, 2.0}) {
    add([&](double x) {
      double const y = x / (w * L);
      return std::exp(-y * y);
    });
  }
  add([&](double x) { return std::pow(1.0 + (x / L) * (x / L), -(N - 2.0) / 2.0); });
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> logs(-1.0, 1.0), amp(0.2, 1.0);
  std::array<double, 4> cs{}, ws{}, as{};
  for (int i = 0; i < 4; ++i) {
    cs[i] = i == 0 ? 0.0 : L * std::pow(10.0, logs(rng));
    ws[i] = L * std::pow(10.0, logs(rng));
    as[i] = amp(rng);
  }
  add([&](double x) {
    double s = 0.0;
    for (int i = 0; i < 4; ++i) {
      double const y = (x - cs[i]) / ws[i];
      s += as[i] * std::exp(-y * y);
    }
    return s;
  });
  if (opts.initial) {
    require(opts.initial->size() == r.size(), "initial profile needs one value per grid node");
    seeds.push_back(*opts.initial);
  }
  return seeds;
}

}  // namespace

SolveResult solve(ProblemSpec const& spec, GridPtr const& grid, SolverOptions const& opts) {
  spec.validate();
  require(opts.tol > 0.0, "solver tolerance must be positive");
  require(opts.max_descent >= 1 && opts.max_newton >= 0, "solver iteration limits must be positive");
  RadialGrid const& g = *grid;
  auto const d = discretize(spec, g);
  double const p = spec.p;

  SolveResult out;
  DescentOptions dopts;
  dopts.gtol = std::max(opts.tol, kDescentTol);
  dopts.max_iterations = opts.max_descent;

  std::optional<DescentResult> best;
  for (auto& seed : solver_seeds(g, opts)) {
    try {
      auto res = minimize_quotient(d.K, d.kw, p, std::move(seed), dopts);
      if (!best || res.quotient < best->quotient) best = std::move(res);
    } catch (Error const& e) {
      if (e.kind() != ErrorKind::nehari_undefined) throw;
    }
  }
  if (!best) {
    out.status = SolveStatus::nehari_undefined;
    out.message = "no seed has int h |u|^p > 0";
    return out;
  }
  out.descent_iterations = best->iterations;

  // Nehari projection: E = 1 after descent, so t = B^{-1/(p-2)} with B = Q^{-q/2}.
  std::vector<double> u = best->u;
  double const t = std::pow(best->quotient, p / (2.0 * (p - 2.0)));
  for (double& x : u) x *= t;

  auto F = residual_vector(d, u, p);
  double fnorm = dual_norm(d.K, F);
  std::size_t const n = u.size();
  std::vector<double> sub(n - 1), diag(n), super(n - 1), trial(n);
  auto const K_diag = d.K.diagonal();
  auto const K_off = d.K.off_diagonal();
  int it = 0;
  for (; it < opts.max_newton; ++it) {
    double const unorm = std::sqrt(d.K.form(u));
    if (fnorm < 0.1 * opts.tol * unorm) break;
    for (std::size_t i = 0; i < n; ++i) {
      double const nl = d.kw[i] == 0.0 ? 0.0 : (p - 1.0) * d.kw[i] * std::pow(std::abs(u[i]), p - 2.0);
      diag[i] = K_diag[i] - nl;
      if (i + 1 < n) {
        sub[i] = K_off[i];
        super[i] = K_off[i];
      }
    }
    std::vector<double> rhs(F);
    for (double& x : rhs) x = -x;
    std::vector<double> step;
    try {
      step = solve_tridiagonal(sub, diag, super, rhs);
    } catch (Error const&) {
      out.message = "singular Newton system";
      break;
    }
    bool accepted = false;
    for (double lambda = 1.0; lambda >= kMinDamping; lambda *= 0.5) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = u[i] + lambda * step[i];
      auto Ft = residual_vector(d, trial, p);
      double const ft = dual_norm(d.K, Ft);
      if (ft < fnorm) {
        u.swap(trial);
        F = std::move(Ft);
        fnorm = ft;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      out.message = "Newton damping reached its floor";
      break;
    }
  }
  out.newton_iterations = it;

  double umax = 0.0, umin = 0.0;
  for (double x : u) {
    umax = std::max(umax, x);
    umin = std::min(umin, x);
  }
  bool const nonnegative = umin >= -kNegativeTol * umax;
  if (nonnegative) {
    for (double& x : u) x = std::max(0.0, x);
    F = residual_vector(d, u, p);
    fnorm = dual_norm(d.K, F);
  }
  RadialFunction sol(grid, u);
  double const E = d.K.form(u);
  double const B = kernels::power_sum(d.kw, u, p);
  out.pde_residual = E > 0.0 ? fnorm / std::sqrt(E) : INFINITY;
  out.nehari_residual = E > 0.0 ? std::abs(E - B) / E : INFINITY;
  out.level = 0.5 * E - B / p;
  try {
    auto const lhs = pohozaev_lhs(sol, pohozaev_profile(spec), delta0(spec.N, p), spec);
    if (lhs.absolute > 0.0) out.pohozaev_residual = lhs.relative();
  } catch (Error const&) {
  }

  std::ostringstream why;
  bool ok = true;
  if (!(out.pde_residual < opts.tol)) {
    ok = false;
    why << "pde residual " << out.pde_residual << " above tolerance; ";
  }
  if (!(out.nehari_residual < opts.tol)) {
    ok = false;
    why << "Nehari residual " << out.nehari_residual << " above tolerance; ";
  }
  if (!(out.level > 0.0)) {
    ok = false;
    why << "nonpositive level; ";
  }
  if (!nonnegative) {
    ok = false;
    why << "profile changes sign; ";
  }
  if (E > 0.0 && B > 0.0) {
    out.concentration = concentration_report(sol, spec, opts.probes);
    if (out.concentration.verdict != ConcentrationVerdict::no_concentration) {
      ok = false;
      why << "mass concentration (" << to_string(out.concentration.verdict) << "); ";
    }
  }
  out.solution = std::move(sol);
  out.status = ok ? SolveStatus::converged : SolveStatus::failed;
  std::string msg = why.str();
  if (!msg.empty()) msg.resize(msg.size() - 2);
  if (!out.message.empty() && !ok) msg = out.message + (msg.empty() ? "" : "; " + msg);
  out.message = ok ? "" : msg;
  return out;
}

}  // namespace emden
