#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace emden {

enum class MapKind { algebraic, log_uniform };

char const* to_string(MapKind kind);

/// Mapped discretization of [0, inf). Node i sits at s_i = i / M of the unit
/// interval; the map r(s) sends s = 1 to r = inf, where functions vanish.
///
///   algebraic:   r = L s / (1 - s)
///   log_uniform: r_0 = 0, r_1 .. r_{M-1} log-spaced over [1e-6 L, 1e6 L],
///                linear on the first cell and algebraic on the tail cell.
///
/// Nodal weights integrate against omega_{N-1} r^{N-1} dr (trapezoid in s);
/// element coefficients give the Dirichlet form with midpoint measure in s.
class RadialGrid {
 public:
  RadialGrid(MapKind map, int M, double L, int N);

  MapKind map() const { return map_; }
  int size() const { return M_; }
  double scale() const { return L_; }
  int dimension() const { return N_; }
  double sphere_area() const { return omega_; }
  double step() const { return 1.0 / M_; }

  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }
  /// a_e for e = 0 .. M-1; element M-1 links the last node to infinity.
  std::span<const double> stiffness() const { return stiffness_; }

  double radius(double s) const;
  double jacobian(double s, bool left = false) const;

  /// Index of the first node with r >= value (M if none).
  int lower_bound(double r) const;

  /// Same map and size with a different scale.
  RadialGrid rescaled(double L) const { return RadialGrid(map_, M_, L, N_); }

 private:
  MapKind map_;
  int M_;
  double L_;
  int N_;
  double omega_;
  double t_min_ = 0.0;
  double t_step_ = 0.0;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::vector<double> stiffness_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

/// Validated grid construction; rejects M < 8, L <= 0, N < 3.
GridPtr build_grid(MapKind map, int M, double L, int N);

/// Nodal values of a radial function; u(inf) = 0 is implicit.
class RadialFunction {
 public:
  RadialFunction(GridPtr grid, std::vector<double> values);

  static RadialFunction zero(GridPtr grid);
  static RadialFunction sample(GridPtr grid, std::function<double(double)> const& f);

  GridPtr const& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  std::vector<double>& mutable_values() { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }

  RadialFunction scaled(double lambda) const;
  RadialFunction abs() const;
  double max_abs() const;
  /// Last node small against the maximum: |u_{M-1}| <= tol * max |u|.
  bool decays(double tol = 1e-2) const;

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

}  // namespace emden
