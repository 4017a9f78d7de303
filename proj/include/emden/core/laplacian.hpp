#pragma once

#include <span>
#include <vector>

#include "emden/core/grid.hpp"

namespace emden {

/// Contiguous set of free nodes [begin, end); the others are held at zero.
struct NodeRange {
  int begin = 0;
  int end = 0;
  int size() const { return end - begin; }
  bool contains(int i) const { return i >= begin && i < end; }
};

/// Discrete radial Dirichlet form K restricted to a node range.
/// u^T K u = sum_e a_e (u_{e+1} - u_e)^2 with zero outside the range and at infinity.
class RadialLaplacian {
 public:
  explicit RadialLaplacian(RadialGrid const& grid);
  RadialLaplacian(RadialGrid const& grid, NodeRange range);

  NodeRange range() const { return range_; }
  int size() const { return static_cast<int>(diag_.size()); }

  /// Local (range-relative) tridiagonal entries.
  std::span<const double> diagonal() const { return diag_; }
  std::span<const double> off_diagonal() const { return off_; }

  /// y = K x on local vectors.
  void apply(std::span<const double> x, std::span<double> y) const;
  double form(std::span<const double> x) const;

  /// Solve K x = b (SPD, LAPACK dptsv).
  std::vector<double> solve(std::span<const double> b) const;

 private:
  NodeRange range_;
  std::vector<double> diag_;
  std::vector<double> off_;
};

/// Solve the general tridiagonal system (sub, diag, super) x = b with partial
/// pivoting (LAPACK dgtsv). Throws an evaluation error on a singular matrix.
std::vector<double> solve_tridiagonal(std::vector<double> sub, std::vector<double> diag,
                                      std::vector<double> super, std::vector<double> b);

}  // namespace emden
