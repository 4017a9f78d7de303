#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "emden/core/grid.hpp"
#include "emden/core/problem.hpp"

namespace emden {

/// I(u) = ||grad u||^2 / 2 - int h |u|^p / p on the grid.
double energy(RadialFunction const& u, ProblemSpec const& spec, bool* divergence_warning = nullptr);

struct GradResidual {
  std::vector<double> nodal;  // I'(u) tested against each nodal hat function
  double norm = 0.0;          // dual norm in the discrete Dirichlet inner product
};

GradResidual grad_residual(RadialFunction const& u, ProblemSpec const& spec);

struct NehariProjection {
  double t = 0.0;
  RadialFunction tu;
};

/// Scaling onto the Nehari manifold; nehari_undefined when int h |u|^p <= 0.
NehariProjection nehari_project(RadialFunction const& u, ProblemSpec const& spec);

/// (1/2 - 1/p) ||grad u||^{2p/(p-2)} B^{-2/(p-2)} = I(nehari_project(u).tu).
double nehari_level(RadialFunction const& u, ProblemSpec const& spec);

enum class ConcentrationVerdict { no_concentration, tail_escape, point_atom };
char const* to_string(ConcentrationVerdict v);

struct ConcentrationProbes {
  std::vector<double> radii{0.1, 0.3, 1.0, 3.0, 10.0};    // ball radii rho
  std::vector<double> cutoffs{1.0, 3.0, 10.0, 30.0, 100.0};  // tail radii R
  std::vector<double> centers{0.0, 0.5, 1.0, 2.0, 4.0};    // |x| of probe centers
};

struct ConcentrationReport {
  std::vector<std::pair<double, double>> tail_fraction;       // (R, mass beyond R)
  std::vector<std::pair<double, double>> peak_ball_fraction;  // (rho, max_x mass in B_rho(x))
  ConcentrationVerdict verdict = ConcentrationVerdict::no_concentration;
};

/// Distribution of the mass h+ |u|^p; throws undefined_quotient on zero mass.
ConcentrationReport concentration_report(RadialFunction const& u, ProblemSpec const& spec,
                                         ConcentrationProbes const& probes = {});

enum class SolveStatus { converged, failed, nehari_undefined };
char const* to_string(SolveStatus s);

struct SolverOptions {
  double tol = 1e-8;
  int max_descent = 500;
  int max_newton = 50;
  std::uint64_t seed = 1;
  std::optional<std::vector<double>> initial;  // user seed, one value per node
  ConcentrationProbes probes;
};

struct SolveResult {
  std::optional<RadialFunction> solution;
  double level = 0.0;
  double nehari_residual = 0.0;
  double pde_residual = 0.0;
  std::optional<double> pohozaev_residual;
  int descent_iterations = 0;
  int newton_iterations = 0;
  ConcentrationReport concentration;
  SolveStatus status = SolveStatus::failed;
  std::string message;
};

/// Nehari minimization from several seeds, best start polished by damped
/// Newton. Converged means both residuals below tol, a positive level, a
/// nonnegative profile and no mass concentration.
SolveResult solve(ProblemSpec const& spec, GridPtr const& grid, SolverOptions const& opts = {});

}  // namespace emden
