#include <cmath>
#include <numbers>

#include "doctest.h"
#include "emden/constants.hpp"
#include "emden/core/error.hpp"
#include "emden/core/norms.hpp"

using namespace emden;
using std::numbers::pi;

namespace {
double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }
constexpr double kK31 = 0.5877875036706168;  // (2 pi / 3)^{1/4} / (4 pi / 3)^{1/2}
}  // namespace

TEST_CASE("extremal family basics") {
  ExtremalFamily u(3, 1.0);
  CHECK(u(0.0) == 1.0);
  CHECK(u.exponent() == 4.0);
  double prev = 2.0;
  for (double r : {0.0, 0.1, 1.0, 10.0, 1e3}) {
    CHECK(u(r) < prev);
    prev = u(r);
  }
  CHECK(rel(u(1.0), 0.5) < 1e-15);
  CHECK(rel(u.gradient_norm_sq(), 4.0 * pi / 3.0) < 1e-13);
  CHECK(rel(u.weighted_integral(), 2.0 * pi / 3.0) < 1e-13);
  CHECK_THROWS_AS(ExtremalFamily(3, 2.0), Error);
  CHECK_THROWS_AS(ExtremalFamily(3, 0.5, 0.0), Error);
}

TEST_CASE("Hardy-Sobolev constant") {
  double const K = hardy_sobolev_constant(3, 1.0);
  CHECK(std::pow(2.0 * pi / 3.0, 0.25) / std::sqrt(4.0 * pi / 3.0) == doctest::Approx(K).epsilon(1e-14));
  CHECK(rel(K, kK31) < 1e-6);
  CHECK(rel(std::pow(K, -2.0), 2.8944) < 1e-4);
  for (int N : {3, 4, 5}) {
    for (double d : {0.0, 0.5, 1.5}) CHECK(hardy_sobolev_constant(N, d) > 0.0);
  }
}

TEST_CASE("hardy_sobolev_quotient on the grid") {
  auto g = build_grid(MapKind::algebraic, 2000, 1.0, 3);
  auto u = ExtremalFamily(3, 1.0).sample(g);
  double const q = hardy_sobolev_quotient(u, 1.0, 3);
  CHECK(rel(q, kK31) < 5e-3);
  CHECK(rel(hardy_sobolev_quotient(u.scaled(2.5), 1.0, 3), q) < 1e-12);
  for (double sigma : {0.25, 4.0}) {
    auto us = ExtremalFamily(3, 1.0, sigma).sample(g);
    CHECK(rel(hardy_sobolev_quotient(us, 1.0, 3), q) < 1e-3);
  }
  CHECK_THROWS_AS(hardy_sobolev_quotient(RadialFunction::zero(g), 1.0, 3), Error);
}

TEST_CASE("rayleigh_min reproduces S for the Hardy weight") {
  auto g = build_grid(MapKind::algebraic, 2000, 1.0, 3);
  auto res = rayleigh_min(Domain::whole(), WeightSpec::power_law(1.0), 4.0, g);
  double const S = std::pow(hardy_sobolev_constant(3, 1.0), -2.0);
  CHECK(rel(res.value, S) < 1e-2);
  REQUIRE(res.minimizer.has_value());
  auto lp = weighted_lp(*res.minimizer, WeightSpec::power_law(1.0), 4.0);
  CHECK(std::abs(lp.total - 1.0) < 1e-8);

  auto ball = rayleigh_min(Domain::ball(1.0), WeightSpec::power_law(1.0), 4.0, g);
  auto ext = rayleigh_min(Domain::exterior(1.0), WeightSpec::power_law(1.0), 4.0, g);
  CHECK(ball.value > res.value);
  CHECK(ext.value > res.value);
}

TEST_CASE("rayleigh_min scales with the weight coefficient") {
  auto g = build_grid(MapKind::algebraic, 2000, 1.0, 3);
  auto a = rayleigh_min(Domain::whole(), WeightSpec::product(WeightSpec::constant(1.0), 1.0), 4.0, g);
  auto b = rayleigh_min(Domain::whole(), WeightSpec::product(WeightSpec::constant(2.0), 1.0), 4.0, g);
  CHECK(rel(b.value / a.value, std::pow(2.0, -0.5)) < 1e-2);
}

TEST_CASE("rayleigh_min reports infinity when no start has mass") {
  auto g = build_grid(MapKind::algebraic, 200, 1.0, 3);
  auto res = rayleigh_min(Domain::exterior(10.0), WeightSpec::bump(1.0, 0.0, 0.01), 4.0, g);
  CHECK(res.infinite);
}

TEST_CASE("s_profile of the Hardy weight is flat") {
  SProfileOptions opts;
  opts.M = 1000;
  auto prof = s_profile(WeightSpec::power_law(1.0), 4.0, 3, default_s_radii(), opts);
  double const S = std::pow(hardy_sobolev_constant(3, 1.0), -2.0);
  CHECK_FALSE(prof.infinity_flag);
  CHECK_FALSE(prof.origin_flag);
  CHECK(prof.exterior_monotone);
  CHECK(prof.origin_monotone);
  CHECK(prof.s_infinity > S);
  CHECK(prof.s_origin > S);
  CHECK(rel(prof.s_infinity, S) < 1e-2);
  CHECK(rel(prof.s_origin, S) < 1e-2);
  CHECK(rel(prof.s_infinity, prof.exterior.front().value) < 1e-6);
}

TEST_CASE("s_profile of a compact weight diverges at both ends") {
  SProfileOptions opts;
  opts.M = 1000;
  auto prof = s_profile(WeightSpec::shifted_power(1.5), 4.0, 3, default_s_radii(), opts);
  CHECK(prof.infinity_flag);
  CHECK(prof.origin_flag);
  CHECK(prof.exterior_monotone);
  CHECK(prof.origin_monotone);
}

TEST_CASE("analytic_S") {
  double const S = std::pow(hardy_sobolev_constant(3, 1.0), -2.0);
  auto one = WeightSpec::constant(1.0);
  auto o = analytic_S(one, 1.0, 4.0, 3, Location::origin);
  CHECK(rel(o.lower, S) < 1e-14);
  CHECK(o.lower == o.upper);
  CHECK(analytic_S(one, 1.0, 4.0, 3, Location::off_origin).infinite());
  auto inf = analytic_S(WeightSpec::shifted_power(0.0, 3.0), 1.0, 4.0, 3, Location::infinity);
  CHECK(inf.lower == inf.upper);
  CHECK(rel(inf.lower, std::pow(3.0, -0.5) * S) < 1e-14);
  CHECK_THROWS_AS(analytic_S(one, 1.0, 5.0, 3, Location::origin), Error);
  // k(0) = 0 with delta > 0: infinite.
  CHECK(analytic_S(WeightSpec::power_law(-1.0), 1.0, 4.0, 3, Location::origin).infinite());
}

TEST_CASE("c0 threshold") {
  double const S = std::pow(hardy_sobolev_constant(3, 1.0), -2.0);
  auto spec = make_problem(3, 4.0, WeightSpec::power_law(1.0));
  auto c0 = c0_threshold(spec);
  CHECK(rel(c0.value, 0.25 * S * S) < 1e-12);
  CHECK(rel(c0.value, 2.0 * pi / 3.0) < 1e-3);

  auto radial = make_problem(3, 4.0, WeightSpec::power_law(1.0), GroupSpec::full_rotation());
  auto cr = c0_threshold(radial);
  for (auto const& t : cr.terms) CHECK((t.point == "0" || t.point == "inf"));

  // Critical exponent with a bounded weight: off-origin points contribute.
  auto crit = WeightSpec::shifted_power(0.0, 1.0);
  double prev = 0.0;
  for (std::uint64_t m : {1, 2, 4, 8}) {
    auto cm = c0_threshold(make_problem(3, 6.0, crit, GroupSpec::cyclic(m)));
    CHECK(cm.value >= prev);
    prev = cm.value;
  }
}

TEST_CASE("test_function_bound dilation scan") {
  std::vector<double> sigmas{0.1, 0.3, 1.0, 3.0, 10.0};
  auto exact = make_problem(3, 4.0, WeightSpec::power_law(1.0));
  auto r1 = test_function_bound(exact, sigmas);
  CHECK(r1.verdict == BoundVerdict::satisfied);
  for (double s : r1.surplus) CHECK(std::abs(s) < 1e-10);

  auto bumped = make_problem(
      3, 4.0, WeightSpec::sum({WeightSpec::power_law(1.0), WeightSpec::bump(1.0, 1.0, 0.5)}),
      GroupSpec::full_rotation());
  auto r2 = test_function_bound(bumped, sigmas);
  CHECK(r2.verdict == BoundVerdict::satisfied);
  REQUIRE(r2.witness_sigma.has_value());
  CHECK(r2.surplus[0] > 0.0);

  auto negative = make_problem(
      3, 4.0, WeightSpec::signed_pair(WeightSpec::bump(0.01, 0.0, 0.1), WeightSpec::constant(1.0)));
  auto r3 = test_function_bound(negative, sigmas);
  CHECK(r3.verdict == BoundVerdict::unsatisfied);
  for (double m : r3.mass) CHECK(m < 0.0);
}

TEST_CASE("test_function_bound with a profile") {
  auto g = build_grid(MapKind::algebraic, 2000, 1.0, 3);
  auto spec = make_problem(3, 4.0, WeightSpec::power_law(1.0));
  auto res = test_function_bound(spec, ExtremalFamily(3, 1.0).sample(g));
  CHECK(res.verdict != BoundVerdict::inconclusive);
  CHECK(res.bound > 0.0);
}

TEST_CASE("s_profile curves respect domain nesting when S vanishes at infinity") {
  SProfileOptions opts;
  opts.M = 1000;
  auto prof = s_profile(WeightSpec::shifted_power(0.5), 4.0, 3, default_s_radii(), opts);
  CHECK_FALSE(prof.exterior_monotone);  // raw upper bounds drift toward S = 0
  for (std::size_t i = 1; i < prof.exterior.size(); ++i) {
    CHECK(prof.exterior[i].value >= prof.exterior[i - 1].value);
    CHECK(prof.origin[i].value <= prof.origin[i - 1].value);
    CHECK(prof.exterior[i - 1].value <= prof.exterior[i - 1].raw);
  }
  CHECK(prof.exterior.back().value == prof.exterior.back().raw);
}
