#pragma once

#include <vector>

#include "emden/core/grid.hpp"
#include "emden/core/weight.hpp"

namespace emden {

/// omega int (u')^2 r^{N-1} dr from one-sided differences with midpoint measure.
double dirichlet_energy(RadialFunction const& u);

/// Quadrature weights times h+ and h- at the nodes.
struct NodalWeight {
  std::vector<double> plus;
  std::vector<double> minus;
  /// plus - minus, i.e. w_i h(r_i).
  std::vector<double> signed_weight() const;
};

NodalWeight nodal_weight(WeightSpec const& h, RadialGrid const& grid);

struct LpResult {
  double total = 0.0;
  double positive = 0.0;
  double negative = 0.0;
  /// Last node contributes more than 10x the mean nodal contribution.
  bool divergence_warning = false;
};

/// int |h| |u|^p split into its h+ and h- parts.
LpResult weighted_lp(RadialFunction const& u, WeightSpec const& h, double p);
LpResult weighted_lp(RadialFunction const& u, NodalWeight const& w, double p);

}  // namespace emden
