#include "emden/core/laplacian.hpp"

#include <lapacke.h>

#include <string>

#include "emden/core/error.hpp"

namespace emden {

RadialLaplacian::RadialLaplacian(RadialGrid const& grid)
    : RadialLaplacian(grid, NodeRange{0, grid.size()}) {}

RadialLaplacian::RadialLaplacian(RadialGrid const& grid, NodeRange range) : range_(range) {
  require(range.begin >= 0 && range.end <= grid.size() && range.size() >= 1,
          "laplacian: node range is empty or outside the grid");
  auto a = grid.stiffness();
  int const n = range.size();
  diag_.resize(n);
  off_.resize(n > 0 ? n - 1 : 0);
  for (int k = 0; k < n; ++k) {
    int const i = range.begin + k;
    diag_[k] = a[i] + (i > 0 ? a[i - 1] : 0.0);
    if (k + 1 < n) off_[k] = -a[i];
  }
}

void RadialLaplacian::apply(std::span<const double> x, std::span<double> y) const {
  std::size_t const n = diag_.size();
  require(x.size() == n && y.size() == n, "laplacian: vector size mismatch");
  for (std::size_t k = 0; k < n; ++k) {
    double v = diag_[k] * x[k];
    if (k > 0) v += off_[k - 1] * x[k - 1];
    if (k + 1 < n) v += off_[k] * x[k + 1];
    y[k] = v;
  }
}

double RadialLaplacian::form(std::span<const double> x) const {
  std::vector<double> y(x.size());
  apply(x, y);
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) s += x[k] * y[k];
  return s;
}

std::vector<double> RadialLaplacian::solve(std::span<const double> b) const {
  require(b.size() == diag_.size(), "laplacian: right-hand side size mismatch");
  std::vector<double> d(diag_), e(off_), x(b.begin(), b.end());
  lapack_int const n = static_cast<lapack_int>(d.size());
  lapack_int const info = LAPACKE_dptsv(LAPACK_COL_MAJOR, n, 1, d.data(), e.data(), x.data(), n);
  if (info != 0) {
    fail(ErrorKind::evaluation, "laplacian solve failed (dptsv info " + std::to_string(info) + ")");
  }
  return x;
}

std::vector<double> solve_tridiagonal(std::vector<double> sub, std::vector<double> diag,
                                      std::vector<double> super, std::vector<double> b) {
  lapack_int const n = static_cast<lapack_int>(diag.size());
  require(b.size() == diag.size() && sub.size() + 1 == diag.size() && super.size() + 1 == diag.size(),
          "tridiagonal solve: inconsistent sizes");
  lapack_int const info =
      LAPACKE_dgtsv(LAPACK_COL_MAJOR, n, 1, sub.data(), diag.data(), super.data(), b.data(), n);
  if (info != 0) {
    fail(ErrorKind::evaluation, "tridiagonal solve failed (dgtsv info " + std::to_string(info) + ")");
  }
  return b;
}

}  // namespace emden
