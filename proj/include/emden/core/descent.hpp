#pragma once

#include <span>
#include <vector>

#include "emden/core/laplacian.hpp"

namespace emden {

struct DescentOptions {
  double gtol = 1e-8;
  int max_iterations = 500;
  /// Stop when Q changes by less than stall_rtol (relative) over stall_window steps.
  double stall_rtol = 1e-12;
  int stall_window = 20;
};

struct DescentResult {
  std::vector<double> u;  // normalized to u^T K u = 1
  double quotient = 0.0;
  double residual = 0.0;  // ||d||_K of the last direction
  int iterations = 0;
  bool converged = false;
  bool stalled = false;
};

/// Minimizes Q(u) = u^T K u / (sum kw |u|^q)^{2/q} on local vectors by
/// K^{-1}-preconditioned gradient steps with Armijo backtracking and |u|
/// after every step. kw may be signed; steps with sum kw |u|^q <= 0 are
/// rejected. Throws nehari_undefined when u0 itself has no positive mass.
DescentResult minimize_quotient(RadialLaplacian const& K, std::span<const double> kw, double q,
                                std::vector<double> u0, DescentOptions const& opts);

}  // namespace emden
