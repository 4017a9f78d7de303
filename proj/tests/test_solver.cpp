#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "emden/constants.hpp"
#include "emden/core/error.hpp"
#include "emden/core/norms.hpp"
#include "emden/solver.hpp"

using namespace emden;
using std::numbers::pi;

namespace {
double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

ProblemSpec power_problem() { return make_problem(3, 4.0, WeightSpec::power_law(1.0)); }
GridPtr grid(int M = 2000) { return build_grid(MapKind::algebraic, M, 1.0, 3); }
}  // namespace

TEST_CASE("energy on the extremal and at zero") {
  auto const g = grid();
  auto const spec = power_problem();
  CHECK(energy(RadialFunction::zero(g), spec) == 0.0);
  auto const u = ExtremalFamily(3, 1.0).sample(g);
  CHECK(rel(energy(u, spec), pi / 2.0) < 5e-3);
  CHECK(energy(u.scaled(-1.0), spec) == energy(u, spec));
}

TEST_CASE("grad residual vanishes at zero and matches finite differences") {
  auto const g = grid(400);
  auto const spec = make_problem(3, 4.0, WeightSpec::shifted_power(1.5));
  auto const z = grad_residual(RadialFunction::zero(g), spec);
  CHECK(z.norm == 0.0);

  auto const u = ExtremalFamily(3, 1.0).sample(g);
  auto const res = grad_residual(u, spec);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n01;
  std::uniform_real_distribution<double> logw(-1.0, 1.0);
  for (int k = 0; k < 10; ++k) {
    std::vector<double> phi(g->size());
    auto r = g->nodes();
    for (int j = 0; j < 3; ++j) {
      double const a = n01(rng), c = std::pow(10.0, logw(rng)), w = std::pow(10.0, logw(rng));
      for (std::size_t i = 0; i + 1 < phi.size(); ++i) phi[i] += a * std::exp(-std::pow((r[i] - c) / w, 2));
    }
    double dot = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) dot += res.nodal[i] * phi[i];
    double errs[2];
    int j = 0;
    for (double eps : {1e-4, 1e-5}) {
      std::vector<double> v(u.values().begin(), u.values().end());
      for (std::size_t i = 0; i < v.size(); ++i) v[i] += eps * phi[i];
      double const fd = (energy(RadialFunction(g, v), spec) - energy(u, spec)) / eps;
      errs[j++] = std::abs(fd - dot);
    }
    // first order: a tenfold smaller step shrinks the error tenfold
    CHECK(errs[1] / errs[0] == doctest::Approx(0.1).epsilon(0.05));
  }
}

TEST_CASE("Nehari projection arithmetic") {
  auto const g = grid();
  auto const spec = power_problem();
  auto const u = ExtremalFamily(3, 1.0).sample(g);
  auto const pr = nehari_project(u, spec);
  CHECK(rel(pr.t, std::sqrt(2.0)) < 5e-3);
  double const E = dirichlet_energy(pr.tu);
  double const B = weighted_lp(pr.tu, spec.weight, 4.0).total;
  CHECK(std::abs(E - B) < 1e-12 * E);

  auto const lam = nehari_project(u.scaled(3.0), spec);
  CHECK(rel(lam.t, pr.t / 3.0) < 1e-14);
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(lam.tu[i] == doctest::Approx(pr.tu[i]).epsilon(1e-13));

  double const level = nehari_level(u, spec);
  CHECK(rel(level, energy(pr.tu, spec)) < 1e-12);
  for (double lambda : {0.1, 2.0, 1e3}) CHECK(rel(nehari_level(u.scaled(lambda), spec), level) < 1e-12);

  auto const neg = make_problem(
      3, 4.0, WeightSpec::signed_pair(WeightSpec::bump(1.0, 5.0, 0.1), WeightSpec::constant(1.0)));
  CHECK_THROWS_AS(nehari_project(u, neg), Error);
  CHECK_THROWS_AS(nehari_level(u, neg), Error);
}

TEST_CASE("Nehari level is dilation invariant on the extremal family") {
  auto const g = grid();
  auto const spec = power_problem();
  double const ref = nehari_level(ExtremalFamily(3, 1.0, 1.0).sample(g), spec);
  for (double s : {0.5, 2.0, 0.25, 4.0}) {
    CHECK(rel(nehari_level(ExtremalFamily(3, 1.0, s).sample(g), spec), ref) < 1e-3);
  }
}

TEST_CASE("concentration report on bubbles") {
  auto const g = grid();
  auto const spec = power_problem();
  auto const atom = concentration_report(ExtremalFamily(3, 1.0, 1e-3).sample(g), spec);
  CHECK(atom.verdict == ConcentrationVerdict::point_atom);
  CHECK(atom.peak_ball_fraction.front().first == 0.1);
  CHECK(atom.peak_ball_fraction.front().second > 0.99);

  auto const tail = concentration_report(ExtremalFamily(3, 1.0, 1e3).sample(g), spec);
  CHECK(tail.verdict == ConcentrationVerdict::tail_escape);

  auto const mid = concentration_report(ExtremalFamily(3, 1.0, 1.0).sample(g), spec);
  CHECK(mid.verdict == ConcentrationVerdict::no_concentration);
  for (auto const* rep : {&atom, &tail, &mid}) {
    for (std::size_t i = 0; i < rep->tail_fraction.size(); ++i) {
      CHECK(rep->tail_fraction[i].second >= 0.0);
      CHECK(rep->tail_fraction[i].second <= 1.0);
      if (i > 0) CHECK(rep->tail_fraction[i].second <= rep->tail_fraction[i - 1].second);
    }
    for (std::size_t i = 1; i < rep->peak_ball_fraction.size(); ++i) {
      CHECK(rep->peak_ball_fraction[i].second >= rep->peak_ball_fraction[i - 1].second - 1e-15);
      CHECK(rep->peak_ball_fraction[i].second <= 1.0);
    }
  }

  auto const compact = RadialFunction::sample(g, [](double r) { return r < 1.0 ? 1.0 - r : 0.0; });
  ConcentrationProbes far;
  far.cutoffs = {2.0, 5.0, 50.0};
  for (auto const& [R, f] : concentration_report(compact, spec, far).tail_fraction) CHECK(f == 0.0);

  CHECK_THROWS_AS(concentration_report(RadialFunction::zero(g), spec), Error);
}

TEST_CASE("solve shifted power 1.5") {
  auto const spec = make_problem(3, 4.0, WeightSpec::shifted_power(1.5));
  auto const res = solve(spec, grid());
  REQUIRE(res.status == SolveStatus::converged);
  REQUIRE(res.solution);
  CHECK(res.level > 0.0);
  CHECK(res.pde_residual < 1e-8);
  CHECK(res.nehari_residual < 1e-8);
  REQUIRE(res.pohozaev_residual);
  CHECK(*res.pohozaev_residual < 1e-3);
  CHECK(res.concentration.verdict == ConcentrationVerdict::no_concentration);
  for (double v : res.solution->values()) CHECK(v >= 0.0);
  double const E = dirichlet_energy(*res.solution);
  CHECK(rel(res.level, 0.25 * E) < 1e-8);
  CHECK(grad_residual(*res.solution, spec).norm < 1e-8 * std::sqrt(E));

  // seeding with -u converges to the same nonnegative solution
  SolverOptions opts;
  std::vector<double> neg(res.solution->values().begin(), res.solution->values().end());
  for (double& x : neg) x = -x;
  opts.initial = neg;
  auto const again = solve(spec, grid(), opts);
  REQUIRE(again.status == SolveStatus::converged);
  CHECK(rel(again.level, res.level) < 1e-8);
}

TEST_CASE("solve refines consistently for shifted power 2") {
  auto const spec = make_problem(3, 4.0, WeightSpec::shifted_power(2.0));
  auto const a = solve(spec, grid(2000));
  auto const b = solve(spec, grid(4000));
  REQUIRE(a.status == SolveStatus::converged);
  REQUIRE(b.status == SolveStatus::converged);
  CHECK(rel(a.level, b.level) < 1e-2);
}

TEST_CASE("solve reports an undefined Nehari manifold") {
  auto const h = WeightSpec::signed_pair(WeightSpec::bump(1.0, 0.0, 0.5), WeightSpec::constant(10.0));
  auto const res = solve(make_problem(3, 4.0, h), grid(500));
  CHECK(res.status == SolveStatus::nehari_undefined);
  CHECK_FALSE(res.solution);
}

TEST_CASE("solve flags tail escape when no solution exists") {
  auto const res = solve(make_problem(3, 4.0, WeightSpec::shifted_power(0.5)), grid(1000));
  CHECK(res.status == SolveStatus::failed);
  CHECK(res.concentration.verdict == ConcentrationVerdict::tail_escape);
}
