#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "emden/core/error.hpp"
#include "emden/core/grid.hpp"
#include "emden/core/laplacian.hpp"
#include "emden/core/norms.hpp"
#include "emden/core/problem.hpp"
#include "emden/core/quadrature.hpp"
#include "emden/core/weight.hpp"
#include "emden/kernels.hpp"

using namespace emden;
using std::numbers::pi;

namespace {
double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }
auto ball_indicator = [](double r) { return r <= 1.0 ? 1.0 : 0.0; };
}  // namespace

TEST_CASE("build_grid rejects bad parameters") {
  CHECK_THROWS_AS(build_grid(MapKind::algebraic, 7, 1.0, 3), Error);
  CHECK_THROWS_AS(build_grid(MapKind::algebraic, 16, 0.0, 3), Error);
  CHECK_THROWS_AS(build_grid(MapKind::algebraic, 16, -1.0, 3), Error);
  CHECK_THROWS_AS(build_grid(MapKind::log_uniform, 16, 1.0, 2), Error);
}

TEST_CASE("grid nodes increase and weights are nonnegative") {
  for (auto map : {MapKind::algebraic, MapKind::log_uniform}) {
    auto g = build_grid(map, 64, 2.0, 4);
    auto r = g->nodes();
    CHECK(r[0] == 0.0);
    for (std::size_t i = 1; i < r.size(); ++i) CHECK(r[i] > r[i - 1]);
    for (double w : g->weights()) CHECK(w >= 0.0);
    for (double a : g->stiffness()) CHECK(a > 0.0);
  }
}

TEST_CASE("ball volume on the algebraic grid") {
  auto g = build_grid(MapKind::algebraic, 2000, 1.0, 3);
  CHECK(rel(quad_radial(ball_indicator, *g), 4.0 * pi / 3.0) < 1e-4);
  auto coarse = build_grid(MapKind::algebraic, 16, 1.0, 3);
  CHECK(rel(quad_radial(ball_indicator, *coarse), 4.0 * pi / 3.0) < 1e-2);
}

TEST_CASE("quadrature error decreases as M doubles") {
  auto f = [](double r) { return std::exp(-r) * r; };  // with r^{N-1}, N = 3: not exact
  double prev = 1e300;
  for (int M : {16, 32, 64, 128, 256}) {
    auto g = build_grid(MapKind::algebraic, M, 1.0, 3);
    double const err = rel(quad_radial(f, *g), 4.0 * pi * 6.0);
    CHECK(err < prev);
    prev = err;
  }
  prev = 1e300;
  for (int M : {16, 32, 64, 128}) {
    auto g = build_grid(MapKind::algebraic, M, 1.0, 3);
    double const err = rel(quad_radial(ball_indicator, *g), 4.0 * pi / 3.0);
    CHECK(err <= prev);
    prev = err;
  }
}

TEST_CASE("exponential moment on the log grid") {
  auto g = build_grid(MapKind::log_uniform, 2000, 1.0, 3);
  CHECK(rel(quad_radial([](double r) { return std::exp(-r); }, *g), 8.0 * pi) < 1e-4);
  // e^{-r} r^{2-N} / omega integrates to 1 for any N.
  for (int N : {3, 4, 5}) {
    auto gn = build_grid(MapKind::log_uniform, 2000, 1.0, N);
    double const omega = sphere_area(N);
    auto f = [&](double r) { return std::exp(-r) * std::pow(r, 2 - N) / omega; };
    CHECK(rel(quad_radial(f, *gn), 1.0) < 1e-4);
  }
}

TEST_CASE("quad_radial beta integrals") {
  auto g = build_grid(MapKind::algebraic, 2000, 1.0, 3);
  CHECK(rel(quad_radial([](double r) { return std::pow(1.0 + r, -4.0) / r; }, *g), 2.0 * pi / 3.0) <
        1e-6);
  CHECK(rel(quad_radial([](double r) { return std::pow(1.0 + r, -4.0); }, *g), 4.0 * pi / 3.0) <
        1e-6);
}

TEST_CASE("quad_radial names the offending cell") {
  auto g = build_grid(MapKind::algebraic, 32, 1.0, 3);
  try {
    quad_radial([](double r) { return r > 2.0 ? std::nan("") : 1.0; }, *g);
    FAIL("expected an evaluation error");
  } catch (Error const& e) {
    CHECK(e.kind() == ErrorKind::evaluation);
    CHECK(std::string(e.what()).find("cell") != std::string::npos);
  }
}

TEST_CASE("sample_nodes substitutes the origin for singular weights") {
  auto g = build_grid(MapKind::algebraic, 32, 1.0, 3);
  auto v = sample_nodes([](double r) { return 1.0 / r; }, *g);
  CHECK(v[0] == v[1]);
}

TEST_CASE("dirichlet energy") {
  auto g = build_grid(MapKind::algebraic, 2000, 1.0, 3);
  CHECK(dirichlet_energy(RadialFunction::zero(g)) == 0.0);
  auto u = RadialFunction::sample(g, [](double r) { return 1.0 / (1.0 + r); });
  double const e = dirichlet_energy(u);
  CHECK(rel(e, 4.0 * pi / 3.0) < 5e-3);
  CHECK(rel(dirichlet_energy(u.scaled(3.7)), 3.7 * 3.7 * e) < 1e-12);
  // Off-scale bubble on a log grid.
  auto gl = build_grid(MapKind::log_uniform, 2000, 1.0, 3);
  auto ul = RadialFunction::sample(gl, [](double r) { return 1.0 / (1.0 + r / 5.0); });
  CHECK(rel(dirichlet_energy(ul), 4.0 * pi * 5.0 / 3.0) < 5e-3);
}

TEST_CASE("laplacian form matches the energy and solves") {
  auto g = build_grid(MapKind::algebraic, 200, 1.0, 3);
  auto u = RadialFunction::sample(g, [](double r) { return std::exp(-r); });
  RadialLaplacian K(*g);
  CHECK(rel(K.form(u.values()), dirichlet_energy(u)) < 1e-12);
  std::vector<double> b(u.size());
  K.apply(u.values(), b);
  auto x = K.solve(b);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(x[i] == doctest::Approx(u[i]).epsilon(1e-9));
  RadialLaplacian Kb(*g, NodeRange{0, 50});
  CHECK(Kb.size() == 50);
}

TEST_CASE("weighted_lp") {
  auto g = build_grid(MapKind::algebraic, 2000, 1.0, 3);
  auto u = RadialFunction::sample(g, [](double r) { return 1.0 / (1.0 + r); });
  auto res = weighted_lp(u, WeightSpec::power_law(1.0), 4.0);
  CHECK(rel(res.total, 2.0 * pi / 3.0) < 1e-4);
  CHECK(res.negative == 0.0);
  CHECK_FALSE(res.divergence_warning);

  auto z = weighted_lp(RadialFunction::zero(g), WeightSpec::power_law(1.0), 4.0);
  CHECK(z.total == 0.0);
  CHECK(z.positive == 0.0);
  CHECK(z.negative == 0.0);

  double const lambda = 1.3;
  CHECK(rel(weighted_lp(u.scaled(lambda), WeightSpec::power_law(1.0), 4.0).total,
            std::pow(lambda, 4.0) * res.total) < 1e-12);
}

TEST_CASE("weighted_lp sign split of a signed pair") {
  auto g = build_grid(MapKind::algebraic, 2000, 1.0, 3);
  double const c = 0.3;
  // h+ = |x|^-1 lives where u lives, h- = c everywhere.
  auto h = WeightSpec::signed_pair(WeightSpec::power_law(1.0), WeightSpec::constant(c));
  auto u = RadialFunction::sample(g, [](double r) { return 1.0 / (1.0 + r); });
  auto res = weighted_lp(u, h, 4.0);
  auto plain = weighted_lp(u, WeightSpec::constant(1.0), 4.0);
  CHECK(rel(res.negative, c * plain.total) < 1e-12);
  CHECK(res.positive >= 0.0);
  CHECK(res.negative >= 0.0);
  CHECK(res.total == res.positive - res.negative);
}

TEST_CASE("serial and parallel kernels agree bitwise") {
  auto g = build_grid(MapKind::algebraic, 10000, 1.0, 3);
  auto u = RadialFunction::sample(g, [](double r) { return std::exp(-r) * (1.0 + std::sin(r)); });
  auto w = nodal_weight(WeightSpec::shifted_power(1.5), *g);
  auto a = g->stiffness();
  CHECK(kernels::serial::power_sum(w.plus, u.values(), 4.0) ==
        kernels::parallel::power_sum(w.plus, u.values(), 4.0));
  CHECK(kernels::serial::dirichlet_form(a, u.values()) ==
        kernels::parallel::dirichlet_form(a, u.values()));
  std::vector<double> y1(u.size()), y2(u.size());
  kernels::serial::apply_stiffness(a, u.values(), y1);
  kernels::parallel::apply_stiffness(a, u.values(), y2);
  CHECK(y1 == y2);
  auto f = [](double r) { return std::pow(1.0 + r, -4.0); };
  CHECK(kernels::serial::cell_quadrature(*g, f) == kernels::parallel::cell_quadrature(*g, f));
  auto k = [](std::span<const double> x) { return 1.0 / (1.0 + x[0] * x[0]); };
  std::vector<double> c{0.5, 0.0, 0.0}, cut{0.5};
  kernels::BallSampling opts;
  opts.samples = 1 << 14;
  auto s1 = kernels::serial::ball_monte_carlo(k, c, 1.0, cut, opts);
  auto s2 = kernels::parallel::ball_monte_carlo(k, c, 1.0, cut, opts);
  CHECK(s1.value == s2.value);
  CHECK(s1.outside == s2.outside);
}

TEST_CASE("stratified Monte Carlo ball volume") {
  std::vector<double> c{0.0, 0.0, 0.0}, cut{0.5};
  auto s = kernels::ball_monte_carlo([](std::span<const double>) { return 1.0; }, c, 1.0, cut, {});
  CHECK(rel(s.value, 4.0 * pi / 3.0) < 1e-12);
  CHECK(rel(s.outside[0], 4.0 * pi / 3.0 * (1.0 - 0.125)) < 5e-3);
}

TEST_CASE("dyadic shell integration") {
  // int_{R^3} (1+r)^{-4} dx = 4 pi / 3
  auto a = integrate_radial([](double r) { return std::pow(1.0 + r, -4.0); }, 3, 0.0, INFINITY);
  CHECK(a.status != SeriesStatus::diverged);
  CHECK(rel(a.value, 4.0 * pi / 3.0) < 1e-9);
  // int_{B_rho} |x|^{-1} dx = 2 pi rho^2
  auto b = integrate_radial([](double r) { return 1.0 / r; }, 3, 0.0, 2.0);
  CHECK(rel(b.value, 2.0 * pi * 4.0) < 1e-9);
  // (1+r)^{-3} in R^3 diverges logarithmically.
  auto c = integrate_radial([](double r) { return std::pow(1.0 + r, -3.0); }, 3, 0.0, INFINITY);
  CHECK(c.status == SeriesStatus::diverged);
  auto d = integrate_radial([](double r) { return std::pow(r, -3.5); }, 3, 0.0, 1.0);
  CHECK(d.status == SeriesStatus::diverged);
  // Slow but geometric decay is summed with extrapolation.
  auto e = integrate_radial([](double r) { return std::pow(1.0 + r, -3.1); }, 3, 1.0, INFINITY);
  CHECK((e.status == SeriesStatus::extrapolated || e.status == SeriesStatus::converged));
}

TEST_CASE("problem validation") {
  CHECK_THROWS_WITH_AS(make_problem(2, 4.0, WeightSpec::constant(1.0)).validate(),
                       doctest::Contains("N >= 3"), Error);
  CHECK_THROWS_AS(make_problem(3, 2.0, WeightSpec::constant(1.0)).validate(), Error);
  CHECK_THROWS_AS(make_problem(3, 4.0, WeightSpec::constant(-1.0)).validate(), Error);
  CHECK_NOTHROW(make_problem(3, 4.0, WeightSpec::shifted_power(1.5)).validate());
}

TEST_CASE("group orbit lengths") {
  std::vector<double> origin{0.0, 0.0, 0.0}, off{1.0, 0.0, 0.0}, axis{0.0, 0.0, 2.0};
  for (auto g : {GroupSpec::trivial(), GroupSpec::cyclic(4), GroupSpec::full_rotation()}) {
    CHECK(g.orbit_length(origin).count == 1);
    CHECK_FALSE(g.orbit_length(origin).infinite);
    CHECK(g.orbit_length_at_infinity().count == 1);
  }
  CHECK(GroupSpec::trivial().orbit_length(off).count == 1);
  CHECK(GroupSpec::cyclic(4).orbit_length(off).count == 4);
  CHECK(GroupSpec::cyclic(4).orbit_length(axis).count == 1);
  CHECK(GroupSpec::full_rotation().orbit_length(off).infinite);
}

TEST_CASE("signed pair components must be nonnegative") {
  CHECK_THROWS_AS(WeightSpec::signed_pair(WeightSpec::constant(1.0), WeightSpec::constant(-1.0)), Error);
}

TEST_CASE("sampled weight envelope by regression") {
  std::vector<double> r, v;
  for (int j = -40; j <= 40; ++j) {
    double const x = std::pow(10.0, j / 10.0);
    r.push_back(x);
    v.push_back(std::pow(1.0 + x, -2.0));
  }
  auto h = WeightSpec::sampled_radial(r, v);
  auto env = h.envelope();
  CHECK(env.known);
  CHECK(env.a0 == doctest::Approx(0.0).epsilon(0.02));
  CHECK(env.ainf == doctest::Approx(-2.0).epsilon(0.02));
  CHECK(h(1.0) == doctest::Approx(0.25).epsilon(1e-6));
}
