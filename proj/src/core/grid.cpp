#include "emden/core/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "emden/core/error.hpp"
#include "emden/core/problem.hpp"

namespace emden {

namespace {
constexpr double kLogSpanDecades = 6.0;
}

char const* to_string(MapKind kind) {
  return kind == MapKind::algebraic ? "algebraic" : "log";
}

RadialGrid::RadialGrid(MapKind map, int M, double L, int N)
    : map_(map), M_(M), L_(L), N_(N), omega_(emden::sphere_area(N)) {
  require(M >= 8, "grid needs M >= 8 nodes (got " + std::to_string(M) + ")");
  require(L > 0.0 && std::isfinite(L), "grid scale L must be positive");
  require(N >= 3, "grid dimension must satisfy N >= 3");

  if (map_ == MapKind::log_uniform) {
    double const span = kLogSpanDecades * std::log(10.0);
    t_min_ = std::log(L_) - span;
    t_step_ = 2.0 * span / (M_ - 2);
  }

  double const ds = step();
  nodes_.resize(M_);
  for (int i = 0; i < M_; ++i) nodes_[i] = radius(static_cast<double>(i) / M_);

  weights_.assign(M_, 0.0);
  for (int i = 1; i < M_; ++i) {
    double const s = static_cast<double>(i) / M_;
    double const rn = std::pow(nodes_[i], N_ - 1);
    weights_[i] = omega_ * rn * 0.5 * ds * (jacobian(s, true) + jacobian(s, false));
  }

  stiffness_.resize(M_);
  for (int e = 0; e < M_; ++e) {
    double const s = (e + 0.5) * ds;
    double const r = radius(s);
    stiffness_[e] = omega_ * std::pow(r, N_ - 1) / jacobian(s) / ds;
  }
}

double RadialGrid::radius(double s) const {
  if (map_ == MapKind::algebraic) return L_ * s / (1.0 - s);
  double const s1 = 1.0 / M_;
  double const slast = (M_ - 1.0) / M_;
  double const r1 = std::exp(t_min_);
  if (s <= s1) return r1 * s * M_;
  if (s >= slast) {
    double const rlast = std::exp(t_min_ + (M_ - 2) * t_step_);
    return rlast / (M_ * (1.0 - s));
  }
  return std::exp(t_min_ + (s * M_ - 1.0) * t_step_);
}

double RadialGrid::jacobian(double s, bool left) const {
  if (map_ == MapKind::algebraic) return L_ / ((1.0 - s) * (1.0 - s));
  double const s1 = 1.0 / M_;
  double const slast = (M_ - 1.0) / M_;
  double const r1 = std::exp(t_min_);
  bool const first_piece = left ? s <= s1 : s < s1;
  bool const tail_piece = left ? s > slast : s >= slast;
  if (first_piece) return r1 * M_;
  if (tail_piece) {
    double const rlast = std::exp(t_min_ + (M_ - 2) * t_step_);
    return rlast / (M_ * (1.0 - s) * (1.0 - s));
  }
  return radius(s) * M_ * t_step_;
}

int RadialGrid::lower_bound(double r) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), r);
  return static_cast<int>(it - nodes_.begin());
}

GridPtr build_grid(MapKind map, int M, double L, int N) {
  return std::make_shared<const RadialGrid>(map, M, L, N);
}

RadialFunction::RadialFunction(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  require(grid_ != nullptr, "radial function needs a grid");
  require(values_.size() == static_cast<std::size_t>(grid_->size()),
          "radial function needs one value per grid node");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      fail(ErrorKind::evaluation, "radial function is not finite at node " + std::to_string(i));
    }
  }
}

RadialFunction RadialFunction::zero(GridPtr grid) {
  std::vector<double> v(grid->size(), 0.0);
  return RadialFunction(std::move(grid), std::move(v));
}

RadialFunction RadialFunction::sample(GridPtr grid, std::function<double(double)> const& f) {
  std::vector<double> v(grid->size());
  auto r = grid->nodes();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(r[i]);
  return RadialFunction(std::move(grid), std::move(v));
}

RadialFunction RadialFunction::scaled(double lambda) const {
  std::vector<double> v(values_);
  for (double& x : v) x *= lambda;
  return RadialFunction(grid_, std::move(v));
}

RadialFunction RadialFunction::abs() const {
  std::vector<double> v(values_);
  for (double& x : v) x = std::abs(x);
  return RadialFunction(grid_, std::move(v));
}

double RadialFunction::max_abs() const {
  double m = 0.0;
  for (double x : values_) m = std::max(m, std::abs(x));
  return m;
}

bool RadialFunction::decays(double tol) const {
  double const m = max_abs();
  return m == 0.0 || std::abs(values_.back()) <= tol * m;
}

}  // namespace emden
