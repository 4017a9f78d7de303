#pragma once

// Data-parallel inner loops. Every kernel has a serial reference in
// `kernels::serial` and an OpenMP version in `kernels::parallel`; the
// unqualified entry points dispatch on problem size.
//
// Parallel reductions use a fixed number of contiguous chunks whose partial
// results are combined in order, so results do not depend on the thread count.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "emden/core/grid.hpp"

namespace emden::kernels {

inline constexpr std::size_t kReductionChunks = 64;
inline constexpr std::size_t kParallelThreshold = std::size_t{1} << 12;

using RadialCallable = std::function<double(double)>;
using PointCallable = std::function<double(std::span<const double>)>;

struct PowerSplit {
  double positive = 0.0;
  double negative = 0.0;
};

/// Result of a stratified Monte Carlo integral over B_rho(x).
struct BallSample {
  double value = 0.0;
  double std_error = 0.0;
  /// Mass of B_rho(x) \ B_R(0) for each requested cutoff R.
  std::vector<double> outside;
  std::vector<double> outside_std_error;
};

struct BallSampling {
  std::uint64_t samples = std::uint64_t{1} << 16;
  int strata = 64;
  std::uint64_t seed = 20010301;
};

namespace serial {
double power_sum(std::span<const double> kw, std::span<const double> u, double p);
PowerSplit power_split(std::span<const double> wp, std::span<const double> wm,
                       std::span<const double> u, double p);
double dirichlet_form(std::span<const double> a, std::span<const double> u);
void apply_stiffness(std::span<const double> a, std::span<const double> u, std::span<double> out);
double cell_quadrature(RadialGrid const& grid, RadialCallable const& f);
BallSample ball_monte_carlo(PointCallable const& k, std::span<const double> x, double rho,
                            std::span<const double> cutoffs, BallSampling const& opts);
}  // namespace serial

namespace parallel {
double power_sum(std::span<const double> kw, std::span<const double> u, double p);
PowerSplit power_split(std::span<const double> wp, std::span<const double> wm,
                       std::span<const double> u, double p);
double dirichlet_form(std::span<const double> a, std::span<const double> u);
void apply_stiffness(std::span<const double> a, std::span<const double> u, std::span<double> out);
double cell_quadrature(RadialGrid const& grid, RadialCallable const& f);
BallSample ball_monte_carlo(PointCallable const& k, std::span<const double> x, double rho,
                            std::span<const double> cutoffs, BallSampling const& opts);
}  // namespace parallel

double power_sum(std::span<const double> kw, std::span<const double> u, double p);
PowerSplit power_split(std::span<const double> wp, std::span<const double> wm,
                       std::span<const double> u, double p);
double dirichlet_form(std::span<const double> a, std::span<const double> u);
void apply_stiffness(std::span<const double> a, std::span<const double> u, std::span<double> out);
double cell_quadrature(RadialGrid const& grid, RadialCallable const& f);
BallSample ball_monte_carlo(PointCallable const& k, std::span<const double> x, double rho,
                            std::span<const double> cutoffs, BallSampling const& opts);

}  // namespace emden::kernels
