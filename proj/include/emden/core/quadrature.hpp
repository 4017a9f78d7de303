#pragma once

#include <functional>
#include <vector>

#include "emden/core/grid.hpp"
#include "emden/core/weight.hpp"

namespace emden {

/// Integral of f(|x|) over R^N on the grid: three Gauss points per cell of the
/// mapped variable, including the tail cell that reaches infinity. Jumps of f
/// placed on nodes are integrated exactly at the cell level.
double quad_radial(std::function<double(double)> const& f, RadialGrid const& grid);

/// f at the grid nodes. A non-finite value at r = 0 (singular weights) is
/// replaced by the value at the first interior node; the node carries zero
/// quadrature weight, so this only keeps downstream arithmetic finite.
std::vector<double> sample_nodes(std::function<double(double)> const& f, RadialGrid const& grid);

enum class SeriesStatus { converged, extrapolated, diverged, inconclusive };

char const* to_string(SeriesStatus s);

struct ShellIntegral {
  double value = 0.0;
  SeriesStatus status = SeriesStatus::converged;
  /// Last observed ratio of consecutive dyadic shell contributions.
  double ratio = 0.0;
  int shells = 0;
};

/// omega_{N-1} * int_lo^hi f(r) r^{N-1} dr over dyadic shells (Gauss-Legendre
/// in log r). lo = 0 and hi = inf are allowed; the open ends are summed shell
/// by shell and the remainder extrapolated when the contributions decay
/// geometrically. Divergence is reported when they stop decaying.
ShellIntegral integrate_radial(std::function<double(double)> const& f, int N, double lo,
                               double hi);

}  // namespace emden
