#include "emden/core/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include <boost/math/quadrature/gauss.hpp>

#include "emden/core/error.hpp"
#include "emden/core/problem.hpp"
#include "emden/kernels.hpp"

namespace emden {

double quad_radial(std::function<double(double)> const& f, RadialGrid const& grid) {
  return kernels::cell_quadrature(grid, f);
}

std::vector<double> sample_nodes(std::function<double(double)> const& f, RadialGrid const& grid) {
  auto r = grid.nodes();
  std::vector<double> v(r.size());
  for (std::size_t i = 1; i < r.size(); ++i) {
    v[i] = f(r[i]);
    if (!std::isfinite(v[i])) {
      fail(ErrorKind::evaluation, "weight is not finite at node " + std::to_string(i) +
                                      " (r = " + std::to_string(r[i]) + ")");
    }
  }
  double const v0 = f(0.0);
  v[0] = std::isfinite(v0) ? v0 : v[1];
  return v;
}

char const* to_string(SeriesStatus s) {
  switch (s) {
    case SeriesStatus::converged: return "converged";
    case SeriesStatus::extrapolated: return "extrapolated";
    case SeriesStatus::diverged: return "diverged";
    case SeriesStatus::inconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

constexpr int kMaxShells = 120;
constexpr double kGeometricRatio = 0.95;
constexpr double kFlatRatio = 1.0 - 1e-6;

using Gauss = boost::math::quadrature::gauss<double, 20>;

// omega * int_a^b f(r) r^{N-1} dr with a, b > 0, pieces of at most a factor 2.
double finite_piece(std::function<double(double)> const& f, int N, double a, double b) {
  double const omega = sphere_area(N);
  double const ta = std::log(a);
  double const tb = std::log(b);
  int const pieces = std::max(1, static_cast<int>(std::ceil((tb - ta) / std::log(2.0) - 1e-12)));
  double const h = (tb - ta) / pieces;
  auto g = [&](double t) {
    double const r = std::exp(t);
    double const v = f(r);
    return v == 0.0 ? 0.0 : v * std::pow(r, N);
  };
  double total = 0.0;
  for (int i = 0; i < pieces; ++i) total += Gauss::integrate(g, ta + i * h, ta + (i + 1) * h);
  return omega * total;
}

int severity(SeriesStatus s) {
  switch (s) {
    case SeriesStatus::converged: return 0;
    case SeriesStatus::extrapolated: return 1;
    case SeriesStatus::inconclusive: return 2;
    case SeriesStatus::diverged: return 3;
  }
  return 3;
}

// Sum of dyadic shells anchored at `anchor`, walking toward 0 (down) or infinity.
ShellIntegral shell_series(std::function<double(double)> const& f, int N, double anchor, bool down) {
  ShellIntegral out;
  double sum = 0.0;
  double prev = 0.0;
  std::deque<double> ratios;
  int zero_run = 0;
  for (int j = 0; j < kMaxShells; ++j) {
    double const a = down ? anchor * std::ldexp(1.0, -j - 1) : anchor * std::ldexp(1.0, j);
    double const c = finite_piece(f, N, a, 2.0 * a);
    out.shells = j + 1;
    if (!std::isfinite(c)) {
      out.value = std::numeric_limits<double>::infinity();
      out.status = SeriesStatus::diverged;
      return out;
    }
    sum += c;
    if (c == 0.0) {
      if (++zero_run >= 8 && j >= 8) {
        out.value = sum;
        out.status = SeriesStatus::converged;
        return out;
      }
      prev = c;
      continue;
    }
    zero_run = 0;
    if (prev != 0.0) {
      ratios.push_back(std::abs(c) / std::abs(prev));
      if (ratios.size() > 6) ratios.pop_front();
    }
    prev = c;
    if (ratios.size() < 6) continue;
    double const rmax = *std::max_element(ratios.begin(), ratios.end());
    double const rmin = *std::min_element(ratios.begin(), ratios.end());
    out.ratio = ratios.back();
    if (rmin >= kFlatRatio && j >= 24) {
      out.value = std::copysign(std::numeric_limits<double>::infinity(), sum);
      out.status = SeriesStatus::diverged;
      return out;
    }
    if (rmax < kGeometricRatio) {
      double const q = ratios.back();
      double const tail = c * q / (1.0 - q);
      if (std::abs(tail) <= 1e-14 * std::abs(sum)) {
        out.value = sum + tail;
        out.status = SeriesStatus::converged;
        return out;
      }
    }
  }
  double const rmax = ratios.empty() ? 1.0 : *std::max_element(ratios.begin(), ratios.end());
  double const rmin = ratios.empty() ? 1.0 : *std::min_element(ratios.begin(), ratios.end());
  if (rmax < kGeometricRatio) {
    double const q = ratios.back();
    out.value = sum + prev * q / (1.0 - q);
    out.status = SeriesStatus::extrapolated;
  } else if (rmin >= kFlatRatio) {
    out.value = std::copysign(std::numeric_limits<double>::infinity(), sum);
    out.status = SeriesStatus::diverged;
  } else {
    out.value = sum;
    out.status = SeriesStatus::inconclusive;
  }
  return out;
}

ShellIntegral combine(ShellIntegral a, ShellIntegral const& b) {
  a.value += b.value;
  if (severity(b.status) > severity(a.status)) {
    a.status = b.status;
    a.ratio = b.ratio;
  }
  a.shells += b.shells;
  return a;
}

}  // namespace

ShellIntegral integrate_radial(std::function<double(double)> const& f, int N, double lo, double hi) {
  require(N >= 1, "integrate_radial: dimension must be positive");
  require(lo >= 0.0 && hi >= lo, "integrate_radial: need 0 <= lo <= hi");
  ShellIntegral out;
  if (lo == hi) return out;
  bool const open_lo = lo == 0.0;
  bool const open_hi = std::isinf(hi);
  if (open_lo && open_hi) {
    return combine(shell_series(f, N, 1.0, true), shell_series(f, N, 1.0, false));
  }
  if (open_lo) return shell_series(f, N, hi, true);
  if (open_hi) return shell_series(f, N, lo, false);
  out.value = finite_piece(f, N, lo, hi);
  if (!std::isfinite(out.value)) out.status = SeriesStatus::diverged;
  return out;
}

}  // namespace emden
