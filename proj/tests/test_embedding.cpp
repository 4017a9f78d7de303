#include <cmath>
#include <numbers>

#include "doctest.h"
#include "emden/core/error.hpp"
#include "emden/embedding.hpp"

using namespace emden;
using std::numbers::pi;

namespace {
double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }
Point origin() { return {0.0, 0.0, 0.0}; }

BallMassOptions mc(std::uint64_t samples = std::uint64_t{1} << 16) {
  BallMassOptions o;
  o.method = MassMethod::monte_carlo;
  o.sampling.samples = samples;
  return o;
}

// Midpoint tensor cubature of k over B_rho(x) in R^3.
double cube_mass(WeightSpec const& k, Point const& x, double rho, int n) {
  double const h = 2.0 * rho / n;
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int l = 0; l < n; ++l) {
        double const a = -rho + (i + 0.5) * h, b = -rho + (j + 0.5) * h, c = -rho + (l + 0.5) * h;
        if (a * a + b * b + c * c >= rho * rho) continue;
        Point y{x[0] + a, x[1] + b, x[2] + c};
        s += k.at(y);
      }
    }
  }
  return s * h * h * h;
}
}  // namespace

TEST_CASE("ball mass closed forms") {
  CHECK(rel(ball_mass(WeightSpec::constant(1.0), origin(), 1.0).value, 4.0 * pi / 3.0) < 1e-12);
  for (double rho : {0.01, 1.0, 37.0}) {
    CHECK(rel(ball_mass(WeightSpec::power_law(1.0), origin(), rho).value, 2.0 * pi * rho * rho) < 1e-10);
  }
  // 1/|y| is harmonic away from 0: mean value over the ball is 1/|x|
  auto const off = ball_mass(WeightSpec::power_law(1.0), {3.0, 0.0, 0.0}, 0.5);
  CHECK_FALSE(off.monte_carlo);
  CHECK(rel(off.value, 4.0 * pi / 3.0 * 0.125 / 3.0) < 1e-8);
  CHECK(rel(ball_mass(WeightSpec::constant(2.0), {0.3, 0.4, 0.0}, 1.5).value, 2.0 * 4.0 * pi / 3.0 * 3.375) < 1e-8);
  CHECK(std::isinf(ball_mass(WeightSpec::power_law(3.5), origin(), 1.0).value));
  CHECK_THROWS_AS(ball_mass(WeightSpec::constant(1.0), origin(), 0.0), Error);
}

TEST_CASE("Monte Carlo ball mass matches tensor cubature") {
  auto const k = WeightSpec::power_law(1.0);
  Point const x{3.0, 0.0, 0.0};
  auto const m = ball_mass(k, x, 0.5, {}, mc());
  CHECK(m.monte_carlo);
  CHECK_FALSE(m.inconclusive);
  double const cube = cube_mass(k, x, 0.5, 160);
  CHECK(std::abs(m.value - cube) < 3.0 * m.std_error + 1e-4 * cube);

  auto const tr = WeightSpec::sum_of_translates({{0.0, 0.0, 1.0}}, {2.0}, WeightSpec::shifted_power(2.0), 0.0);
  auto const t = ball_mass(tr, {0.0, 0.5, 1.0}, 0.8, {}, mc());
  double const tc = cube_mass(tr, {0.0, 0.5, 1.0}, 0.8, 120);
  CHECK(std::abs(t.value - tc) < 3.0 * t.std_error + 1e-3 * tc);

  // few samples on a sharply peaked weight: flagged, not silently returned
  auto const spike = WeightSpec::sum_of_translates({{0.0, 0.0, 0.3}}, {1.0}, WeightSpec::constant(1.0), -2.9);
  auto const s = ball_mass(spike, origin(), 1.0, {}, mc(256));
  CHECK(s.inconclusive);
}

TEST_CASE("ball mass monotone in the radius, outside masses bounded") {
  auto const k = WeightSpec::shifted_power(1.5);
  Point const x{0.7, 0.0, 0.0};
  double prev = 0.0;
  for (double rho : {0.1, 0.5, 1.0, 2.0, 8.0}) {
    auto const m = ball_mass(k, x, rho, {0.5, 1.0, 4.0});
    CHECK(m.value >= prev);
    prev = m.value;
    CHECK(m.outside[0] <= m.value * (1 + 1e-12));
    CHECK(m.outside[1] <= m.outside[0] * (1 + 1e-12));
    CHECK(m.outside[2] <= m.outside[1] * (1 + 1e-12));
  }
}

TEST_CASE("scaled ball mass") {
  auto const k = WeightSpec::power_law(1.0);
  for (double rho : {1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3}) {
    CHECK(rel(mazja_functional(k, 4.0, origin(), rho).value, 2.0 * pi) < 1e-3);
  }
  auto const c = WeightSpec::constant(1.0);
  // rho^{-2} (4 pi / 3) rho^3: linear in rho
  CHECK(rel(mazja_functional(c, 4.0, origin(), 0.1).value, 4.0 * pi / 3.0 * 0.1) < 1e-10);
  CHECK(rel(mazja_functional(c, 4.0, origin(), 1e3).value, 4.0 * pi / 3.0 * 1e3) < 1e-10);
  double const sp = mazja_functional(WeightSpec::shifted_power(2.0), 4.0, origin(), 1.0).value;
  CHECK(rel(sp, 4.0 * pi * (1.5 - 2.0 * std::log(2.0))) < 1e-10);
  CHECK_THROWS_AS(mazja_functional(k, 2.0, origin(), 1.0), Error);

  // log-log slope (1 - N/2) q + N - delta
  for (double delta : {0.5, 1.5}) {
    auto const w = WeightSpec::power_law(delta);
    double const a = mazja_functional(w, 3.0, origin(), 0.5).value;
    double const b = mazja_functional(w, 3.0, origin(), 8.0).value;
    double const slope = std::log(b / a) / std::log(16.0);
    CHECK(std::abs(slope - (-1.5 + 3.0 - delta)) < 1e-3);
  }
}

TEST_CASE("compactness verdicts follow the exponent threshold") {
  for (double q : {2.5, 3.0, 4.0, 5.0}) {
    for (int j = 1; j <= 12; ++j) {
      double const delta = 0.25 * j;
      auto const r = compactness_check(WeightSpec::shifted_power(delta), q, 3);
      bool const expected = delta > 3.0 - 0.5 * q;
      CHECK((r.compactness == Verdict::holds) == expected);
      CHECK((r.continuity == Verdict::holds) == (delta >= 3.0 - 0.5 * q));
      if (r.compactness == Verdict::holds) CHECK(r.continuity == Verdict::holds);
      for (std::size_t i = 1; i < r.tail_curve.size(); ++i) {
        CHECK(r.tail_curve[i].value <= r.tail_curve[i - 1].value * (1 + 1e-9));
      }
      for (std::size_t i = 1; i < r.small_scale_curve.size(); ++i) {
        CHECK(r.small_scale_curve[i].value >= r.small_scale_curve[i - 1].value);
      }
    }
  }
}

TEST_CASE("compactness report cases") {
  auto const pl = compactness_check(WeightSpec::power_law(1.0), 4.0, 3);
  CHECK(pl.continuity == Verdict::holds);
  CHECK(pl.compactness == Verdict::fails);
  CHECK(rel(pl.sup_estimate, 2.0 * pi) < 1e-6);
  for (auto const& c : pl.small_scale_curve) CHECK(rel(c.value, 2.0 * pi) < 1e-6);
  CHECK(pl.tail_curve.back().value > 6.0);

  auto const sp = compactness_check(WeightSpec::shifted_power(1.5), 4.0, 3);
  CHECK(sp.compactness == Verdict::holds);
  CHECK(sp.tail_curve.back().value < 0.5 * sp.tail_curve.front().value);

  auto const c = compactness_check(WeightSpec::constant(1.0), 4.0, 3);
  CHECK(c.continuity == Verdict::fails);
  CHECK(c.compactness == Verdict::fails);

  auto const super = compactness_check(WeightSpec::shifted_power(4.0), 7.0, 3);
  CHECK(super.continuity == Verdict::fails);

  // a short sampled weight has no fitted envelope
  auto const sampled = WeightSpec::sampled_radial({0.0, 0.5, 1.0, 2.0}, {1.0, 0.8, 0.5, 0.2});
  auto const s = compactness_check(sampled, 4.0, 3);
  CHECK(s.continuity == Verdict::inconclusive);
  CHECK(s.compactness == Verdict::inconclusive);
  CHECK_FALSE(s.tail_curve.empty());
  CHECK(s.sup_estimate > 0.0);

  CHECK_THROWS_AS(compactness_check(WeightSpec::constant(1.0), 2.0, 3), Error);
}

TEST_CASE("non-radial weights use Monte Carlo evidence") {
  ProbeGrid g;
  g.centers = {{0.0, 0.0, 0.0}, {0.0, 0.0, 1.0}, {2.0, 0.0, 0.0}};
  g.radii = {0.25, 1.0, 4.0};
  g.cutoffs = {1.0, 4.0};
  g.scales = {0.5, 1.0};
  auto const tr = WeightSpec::sum_of_translates({{0.0, 0.0, 1.0}, {2.0, 0.0, 0.0}}, {1.0, 0.5},
                                                WeightSpec::shifted_power(2.0), -0.5);
  auto const r = compactness_check(tr, 4.0, 3, g, mc(4096));
  CHECK(r.monte_carlo);
  CHECK(r.compactness == Verdict::holds);
  CHECK(r.sup_estimate > 0.0);
}

TEST_CASE("sufficient criteria") {
  using C = Criterion;
  for (int j = 1; j <= 12; ++j) {
    double const delta = 0.25 * j;
    auto const r = sufficient_criterion(WeightSpec::shifted_power(delta), 4.0, C::integrable_power);
    CHECK((r.verdict == Verdict::holds) == (delta > 1.0));
    if (delta <= 1.0) CHECK(r.verdict == Verdict::fails);
  }

  // k = min(r, 1/r) r^{-1} for q = 4, N = 3
  auto const f = WeightSpec::broken_power(1.0, 1.0, -1.0);
  CHECK(sufficient_criterion(WeightSpec::product(f, 1.0), 4.0, C::critical_decay).verdict == Verdict::holds);
  CHECK(sufficient_criterion(WeightSpec::power_law(1.0), 4.0, C::critical_decay).verdict == Verdict::fails);

  // delta = 0 reduces the weighted Hardy criterion to the integrable power one
  CriterionParams hp;
  hp.delta = 0.0;
  for (double delta : {0.75, 1.5, 2.5}) {
    auto const k = WeightSpec::shifted_power(delta);
    auto const a = sufficient_criterion(k, 4.0, C::integrable_power);
    auto const b = sufficient_criterion(k, 4.0, C::hardy_weighted, hp);
    CHECK(a.verdict == b.verdict);
    if (a.integral && b.integral && a.verdict == Verdict::holds) {
      CHECK(rel(a.integral->value, b.integral->value) < 1e-12);
    }
  }
  hp.delta = 1.0;
  CHECK(sufficient_criterion(WeightSpec::shifted_power(2.0), 3.0, C::hardy_weighted, hp).verdict == Verdict::holds);
  CHECK(sufficient_criterion(WeightSpec::shifted_power(2.0), 4.0, C::hardy_weighted, hp).verdict == Verdict::fails);

  CriterionParams dp;
  dp.p = 5.0;
  dp.z = 0.0;
  dp.h = WeightSpec::power_law(0.0);
  auto const dom = sufficient_criterion(WeightSpec::shifted_power(2.0), 4.0, C::dominated, dp);
  CHECK(dom.verdict == Verdict::holds);
  CHECK(dom.positivity_assumed);
  dp.h = WeightSpec::bump(1.0, 0.0, 1.0);
  CHECK(sufficient_criterion(WeightSpec::shifted_power(2.0), 4.0, C::dominated, dp).verdict == Verdict::fails);

  CHECK(sufficient_criterion(WeightSpec::shifted_power(2.5), 4.0, C::algebraic_decay).verdict == Verdict::holds);
  CHECK(sufficient_criterion(WeightSpec::shifted_power(1.5), 4.0, C::algebraic_decay).verdict == Verdict::fails);
  CHECK(sufficient_criterion(WeightSpec::power_law(2.5), 4.0, C::algebraic_decay).verdict == Verdict::fails);

  CHECK(sufficient_criterion(WeightSpec::shifted_power(2.0), 4.0, C::lebesgue_bounded).verdict == Verdict::holds);
  CHECK(sufficient_criterion(WeightSpec::shifted_power(1.0), 4.0, C::lebesgue_bounded).verdict == Verdict::fails);

  CHECK(sufficient_criterion(WeightSpec::shifted_power(1.5), 4.0, C::radial_split).verdict == Verdict::holds);
  CHECK(sufficient_criterion(WeightSpec::shifted_power(0.5), 4.0, C::radial_split).verdict != Verdict::holds);
  CriterionParams sp;
  sp.k1 = WeightSpec::shifted_power(1.5);
  sp.k2 = WeightSpec::bump(0.5, 2.0, 0.5);
  auto const mixed = WeightSpec::sum({*sp.k1, *sp.k2});
  CHECK(sufficient_criterion(mixed, 4.0, C::radial_split, sp).verdict == Verdict::holds);
  sp.k2 = WeightSpec::bump(0.7, 2.0, 0.5);
  CHECK(sufficient_criterion(mixed, 4.0, C::radial_split, sp).verdict == Verdict::fails);

  auto const tr = WeightSpec::sum_of_translates({{0.0, 0.0, 1.0}, {3.0, 0.0, 0.0}}, {1.0, -0.5},
                                                WeightSpec::shifted_power(1.0), -0.5);
  CHECK(sufficient_criterion(tr, 4.0, C::translates).verdict == Verdict::holds);
  auto const tr_slow = WeightSpec::sum_of_translates({{0.0, 0.0, 1.0}}, {1.0}, WeightSpec::constant(1.0), -1.0);
  CHECK(sufficient_criterion(tr_slow, 4.0, C::translates).verdict == Verdict::fails);

  // p = 2* = 6: sub-critical criteria refuse, the supercritical preset applies
  CHECK(sufficient_criterion(WeightSpec::product(WeightSpec::shifted_power(1.0), -0.5), 6.0, C::radial_supercritical).verdict == Verdict::holds);
  CHECK(sufficient_criterion(WeightSpec::shifted_power(1.0), 6.0, C::integrable_power).verdict == Verdict::fails);
  CHECK(sufficient_criterion(WeightSpec::constant(1.0), 6.0, C::radial_supercritical).verdict != Verdict::holds);

  CHECK(criterion_from_string("translates") == C::translates);
  CHECK_FALSE(criterion_from_string("nope"));
}
