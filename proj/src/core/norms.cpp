#include "emden/core/norms.hpp"

#include <cmath>

#include "emden/core/error.hpp"
#include "emden/core/quadrature.hpp"
#include "emden/kernels.hpp"

namespace emden {

namespace {
constexpr double kTailFactor = 10.0;
}

double dirichlet_energy(RadialFunction const& u) {
  return kernels::dirichlet_form(u.grid()->stiffness(), u.values());
}

std::vector<double> NodalWeight::signed_weight() const {
  std::vector<double> out(plus.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = plus[i] - minus[i];
  return out;
}

NodalWeight nodal_weight(WeightSpec const& h, RadialGrid const& grid) {
  require(h.radial(), "nodal weights need a radial weight");
  NodalWeight out;
  out.plus = sample_nodes([&](double r) { return h.positive_value(r); }, grid);
  out.minus = sample_nodes([&](double r) { return h.negative_value(r); }, grid);
  auto w = grid.weights();
  for (std::size_t i = 0; i < w.size(); ++i) {
    out.plus[i] *= w[i];
    out.minus[i] *= w[i];
  }
  return out;
}

LpResult weighted_lp(RadialFunction const& u, WeightSpec const& h, double p) {
  return weighted_lp(u, nodal_weight(h, *u.grid()), p);
}

LpResult weighted_lp(RadialFunction const& u, NodalWeight const& w, double p) {
  require(p > 0.0, "weighted_lp needs p > 0");
  auto v = u.values();
  auto const split = kernels::power_split(w.plus, w.minus, v, p);
  LpResult out;
  out.positive = split.positive;
  out.negative = split.negative;
  out.total = out.positive - out.negative;
  std::size_t const n = v.size();
  double const last = (w.plus[n - 1] + w.minus[n - 1]) * std::pow(std::abs(v[n - 1]), p);
  double const mean = (out.positive + out.negative) / static_cast<double>(n);
  out.divergence_warning = mean > 0.0 && last > kTailFactor * mean;
  return out;
}

}  // namespace emden
