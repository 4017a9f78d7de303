#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "emden/core/grid.hpp"
#include "emden/kernels.hpp"

using namespace emden;

namespace {

std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = U(rng);
  return v;
}

template <bool Parallel>
void BM_power_sum(benchmark::State& state) {
  auto const n = static_cast<std::size_t>(state.range(0));
  auto const kw = random_vector(n, 1), u = random_vector(n, 2);
  for (auto _ : state) {
    double const v = Parallel ? kernels::parallel::power_sum(kw, u, 4.0) : kernels::serial::power_sum(kw, u, 4.0);
    benchmark::DoNotOptimize(v);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}

template <bool Parallel>
void BM_dirichlet_form(benchmark::State& state) {
  auto const n = static_cast<std::size_t>(state.range(0));
  auto const a = random_vector(n, 3), u = random_vector(n, 4);
  for (auto _ : state) {
    double const v = Parallel ? kernels::parallel::dirichlet_form(a, u) : kernels::serial::dirichlet_form(a, u);
    benchmark::DoNotOptimize(v);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}

template <bool Parallel>
void BM_apply_stiffness(benchmark::State& state) {
  auto const n = static_cast<std::size_t>(state.range(0));
  auto const a = random_vector(n, 5), u = random_vector(n, 6);
  std::vector<double> out(n);
  for (auto _ : state) {
    if (Parallel) kernels::parallel::apply_stiffness(a, u, out);
    else kernels::serial::apply_stiffness(a, u, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}

template <bool Parallel>
void BM_cell_quadrature(benchmark::State& state) {
  auto const grid = build_grid(MapKind::algebraic, static_cast<int>(state.range(0)), 1.0, 3);
  auto const f = [](double r) { return std::pow(1.0 + r, -6.0); };
  for (auto _ : state) {
    double const v = Parallel ? kernels::parallel::cell_quadrature(*grid, f) : kernels::serial::cell_quadrature(*grid, f);
    benchmark::DoNotOptimize(v);
  }
}

template <bool Parallel>
void BM_ball_monte_carlo(benchmark::State& state) {
  kernels::BallSampling opts;
  opts.samples = static_cast<std::uint64_t>(state.range(0));
  std::vector<double> const x{0.5, 0.0, 0.0};
  std::vector<double> const cutoffs{1.0, 2.0};
  auto const k = [](std::span<const double> y) {
    double const r = std::sqrt(y[0] * y[0] + y[1] * y[1] + y[2] * y[2]);
    return std::pow(1.0 + r, -1.5);
  };
  for (auto _ : state) {
    auto const s = Parallel ? kernels::parallel::ball_monte_carlo(k, x, 1.0, cutoffs, opts)
                            : kernels::serial::ball_monte_carlo(k, x, 1.0, cutoffs, opts);
    benchmark::DoNotOptimize(s.value);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_power_sum<false>)->Name("power_sum/serial")->RangeMultiplier(8)->Range(1 << 12, 1 << 21);
BENCHMARK(BM_power_sum<true>)->Name("power_sum/parallel")->RangeMultiplier(8)->Range(1 << 12, 1 << 21)->UseRealTime();
BENCHMARK(BM_dirichlet_form<false>)->Name("dirichlet_form/serial")->RangeMultiplier(8)->Range(1 << 12, 1 << 21);
BENCHMARK(BM_dirichlet_form<true>)->Name("dirichlet_form/parallel")->RangeMultiplier(8)->Range(1 << 12, 1 << 21)->UseRealTime();
BENCHMARK(BM_apply_stiffness<false>)->Name("apply_stiffness/serial")->RangeMultiplier(8)->Range(1 << 12, 1 << 21);
BENCHMARK(BM_apply_stiffness<true>)->Name("apply_stiffness/parallel")->RangeMultiplier(8)->Range(1 << 12, 1 << 21)->UseRealTime();
BENCHMARK(BM_cell_quadrature<false>)->Name("cell_quadrature/serial")->Arg(2000)->Arg(16000);
BENCHMARK(BM_cell_quadrature<true>)->Name("cell_quadrature/parallel")->Arg(2000)->Arg(16000)->UseRealTime();
BENCHMARK(BM_ball_monte_carlo<false>)->Name("ball_monte_carlo/serial")->Arg(1 << 14)->Arg(1 << 16);
BENCHMARK(BM_ball_monte_carlo<true>)->Name("ball_monte_carlo/parallel")->Arg(1 << 14)->Arg(1 << 16)->UseRealTime();

BENCHMARK_MAIN();
