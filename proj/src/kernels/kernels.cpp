#include "emden/kernels.hpp"

#include <cmath>
#include <random>
#include <string>

#include "emden/core/error.hpp"
#include "reduce.hpp"

namespace emden::kernels {

namespace {

using detail::chunked_sum;

constexpr std::array<double, 3> kGaussX = {-0.7745966692414834, 0.0, 0.7745966692414834};
constexpr std::array<double, 3> kGaussW = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

double power_sum_impl(std::span<const double> kw, std::span<const double> u, double p, bool par) {
  require(kw.size() == u.size(), "power_sum: size mismatch");
  return chunked_sum(
      u.size(), [&](std::size_t i) { return kw[i] == 0.0 ? 0.0 : kw[i] * std::pow(std::abs(u[i]), p); },
      par);
}

PowerSplit power_split_impl(std::span<const double> wp, std::span<const double> wm,
                            std::span<const double> u, double p, bool par) {
  require(wp.size() == u.size() && wm.size() == u.size(), "power_split: size mismatch");
  PowerSplit out;
  out.positive = chunked_sum(
      u.size(), [&](std::size_t i) { return wp[i] == 0.0 ? 0.0 : wp[i] * std::pow(std::abs(u[i]), p); },
      par);
  out.negative = chunked_sum(
      u.size(), [&](std::size_t i) { return wm[i] == 0.0 ? 0.0 : wm[i] * std::pow(std::abs(u[i]), p); },
      par);
  return out;
}

double dirichlet_impl(std::span<const double> a, std::span<const double> u, bool par) {
  require(a.size() == u.size(), "dirichlet_form: size mismatch");
  std::size_t const n = u.size();
  return chunked_sum(
      n,
      [&](std::size_t e) {
        double const next = e + 1 < n ? u[e + 1] : 0.0;
        double const d = next - u[e];
        return a[e] * d * d;
      },
      par);
}

void stiffness_impl(std::span<const double> a, std::span<const double> u, std::span<double> out,
                    bool par) {
  require(a.size() == u.size() && out.size() == u.size(), "apply_stiffness: size mismatch");
  std::ptrdiff_t const n = static_cast<std::ptrdiff_t>(u.size());
  auto row = [&](std::ptrdiff_t i) {
    double v = a[i] * (u[i] - (i + 1 < n ? u[i + 1] : 0.0));
    if (i > 0) v += a[i - 1] * (u[i] - u[i - 1]);
    out[i] = v;
  };
  if (par) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) row(i);
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) row(i);
  }
}

double cell_quadrature_impl(RadialGrid const& grid, RadialCallable const& f, bool par) {
  int const M = grid.size();
  int const N = grid.dimension();
  double const ds = grid.step();
  double const omega = grid.sphere_area();
  std::array<int, kReductionChunks> bad{};
  std::array<double, kReductionChunks> bad_r{};
  bad.fill(-1);

  auto cell = [&](std::size_t c, std::size_t chunk) {
    double acc = 0.0;
    for (int g = 0; g < 3; ++g) {
      double const s = (static_cast<double>(c) + 0.5 * (1.0 + kGaussX[g])) * ds;
      double const r = grid.radius(s);
      double v;
      try {
        v = f(r);
      } catch (...) {
        v = std::nan("");
      }
      if (!std::isfinite(v)) {
        if (bad[chunk] < 0) {
          bad[chunk] = static_cast<int>(c);
          bad_r[chunk] = r;
        }
        return 0.0;
      }
      if (v == 0.0) continue;
      acc += kGaussW[g] * v * std::pow(r, N - 1) * grid.jacobian(s);
    }
    return 0.5 * ds * omega * acc;
  };

  std::array<double, kReductionChunks> partial{};
  auto run = [&](std::size_t chunk) {
    auto const [b, e] = detail::chunk_bounds(static_cast<std::size_t>(M), chunk);
    double acc = 0.0;
    for (std::size_t c = b; c < e; ++c) acc += cell(c, chunk);
    partial[chunk] = acc;
  };
  if (par) {
#pragma omp parallel for schedule(static)
    for (std::size_t c = 0; c < kReductionChunks; ++c) run(c);
  } else {
    for (std::size_t c = 0; c < kReductionChunks; ++c) run(c);
  }
  for (std::size_t c = 0; c < kReductionChunks; ++c) {
    if (bad[c] >= 0) {
      fail(ErrorKind::evaluation, "integrand is not finite in cell " + std::to_string(bad[c]) +
                                      " (r = " + std::to_string(bad_r[c]) + ")");
    }
  }
  double total = 0.0;
  for (double v : partial) total += v;
  return total;
}

struct StratumResult {
  double mean = 0.0;
  double var = 0.0;
  std::vector<double> out_mean;
  std::vector<double> out_var;
};

StratumResult sample_stratum(PointCallable const& k, std::span<const double> x, double rho,
                             std::span<const double> cutoffs, BallSampling const& opts, int j,
                             std::uint64_t n) {
  std::size_t const N = x.size();
  std::seed_seq seq{static_cast<std::uint32_t>(opts.seed), static_cast<std::uint32_t>(opts.seed >> 32),
                    static_cast<std::uint32_t>(j)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  double const lo = static_cast<double>(j) / opts.strata;
  double const hi = static_cast<double>(j + 1) / opts.strata;
  std::vector<double> y(N), dir(N);
  StratumResult res;
  res.out_mean.assign(cutoffs.size(), 0.0);
  res.out_var.assign(cutoffs.size(), 0.0);
  double sum = 0.0, sum2 = 0.0;
  std::vector<double> osum(cutoffs.size(), 0.0), osum2(cutoffs.size(), 0.0);
  for (std::uint64_t i = 0; i < n; ++i) {
    double norm2 = 0.0;
    for (auto& d : dir) {
      d = gauss(rng);
      norm2 += d * d;
    }
    double const t = lo + (hi - lo) * unif(rng);
    double const rad = rho * std::pow(t, 1.0 / static_cast<double>(N)) / std::sqrt(norm2);
    double ny = 0.0;
    for (std::size_t a = 0; a < N; ++a) {
      y[a] = x[a] + rad * dir[a];
      ny += y[a] * y[a];
    }
    double const v = k(y);
    sum += v;
    sum2 += v * v;
    ny = std::sqrt(ny);
    for (std::size_t c = 0; c < cutoffs.size(); ++c) {
      double const w = ny > cutoffs[c] ? v : 0.0;
      osum[c] += w;
      osum2[c] += w * w;
    }
  }
  double const dn = static_cast<double>(n);
  auto finish = [dn](double s, double s2, double& m, double& var) {
    m = s / dn;
    var = dn > 1 ? std::max(0.0, (s2 - dn * m * m) / (dn - 1.0)) : 0.0;
  };
  finish(sum, sum2, res.mean, res.var);
  for (std::size_t c = 0; c < cutoffs.size(); ++c) finish(osum[c], osum2[c], res.out_mean[c], res.out_var[c]);
  return res;
}

BallSample ball_mc_impl(PointCallable const& k, std::span<const double> x, double rho,
                        std::span<const double> cutoffs, BallSampling const& opts, bool par) {
  require(rho > 0.0, "ball radius must be positive");
  require(opts.strata >= 1 && opts.samples >= static_cast<std::uint64_t>(2 * opts.strata),
          "Monte Carlo needs at least two samples per stratum");
  require(!x.empty(), "ball center must have a dimension");
  int const S = opts.strata;
  std::uint64_t const per = opts.samples / static_cast<std::uint64_t>(S);
  std::vector<StratumResult> strata(S);
  if (par) {
#pragma omp parallel for schedule(dynamic)
    for (int j = 0; j < S; ++j) strata[j] = sample_stratum(k, x, rho, cutoffs, opts, j, per);
  } else {
    for (int j = 0; j < S; ++j) strata[j] = sample_stratum(k, x, rho, cutoffs, opts, j, per);
  }
  double const N = static_cast<double>(x.size());
  double const vol = std::pow(M_PI, N / 2.0) / std::tgamma(N / 2.0 + 1.0) * std::pow(rho, N);
  double const vs = vol / S;
  BallSample out;
  out.outside.assign(cutoffs.size(), 0.0);
  out.outside_std_error.assign(cutoffs.size(), 0.0);
  double var = 0.0;
  std::vector<double> ovar(cutoffs.size(), 0.0);
  for (auto const& st : strata) {
    out.value += vs * st.mean;
    var += vs * vs * st.var / static_cast<double>(per);
    for (std::size_t c = 0; c < cutoffs.size(); ++c) {
      out.outside[c] += vs * st.out_mean[c];
      ovar[c] += vs * vs * st.out_var[c] / static_cast<double>(per);
    }
  }
  out.std_error = std::sqrt(var);
  for (std::size_t c = 0; c < cutoffs.size(); ++c) out.outside_std_error[c] = std::sqrt(ovar[c]);
  return out;
}

}  // namespace

namespace serial {
double power_sum(std::span<const double> kw, std::span<const double> u, double p) {
  return power_sum_impl(kw, u, p, false);
}
PowerSplit power_split(std::span<const double> wp, std::span<const double> wm,
                       std::span<const double> u, double p) {
  return power_split_impl(wp, wm, u, p, false);
}
double dirichlet_form(std::span<const double> a, std::span<const double> u) {
  return dirichlet_impl(a, u, false);
}
void apply_stiffness(std::span<const double> a, std::span<const double> u, std::span<double> out) {
  stiffness_impl(a, u, out, false);
}
double cell_quadrature(RadialGrid const& grid, RadialCallable const& f) {
  return cell_quadrature_impl(grid, f, false);
}
BallSample ball_monte_carlo(PointCallable const& k, std::span<const double> x, double rho,
                            std::span<const double> cutoffs, BallSampling const& opts) {
  return ball_mc_impl(k, x, rho, cutoffs, opts, false);
}
}  // namespace serial

namespace parallel {
double power_sum(std::span<const double> kw, std::span<const double> u, double p) {
  return power_sum_impl(kw, u, p, true);
}
PowerSplit power_split(std::span<const double> wp, std::span<const double> wm,
                       std::span<const double> u, double p) {
  return power_split_impl(wp, wm, u, p, true);
}
double dirichlet_form(std::span<const double> a, std::span<const double> u) {
  return dirichlet_impl(a, u, true);
}
void apply_stiffness(std::span<const double> a, std::span<const double> u, std::span<double> out) {
  stiffness_impl(a, u, out, true);
}
double cell_quadrature(RadialGrid const& grid, RadialCallable const& f) {
  return cell_quadrature_impl(grid, f, true);
}
BallSample ball_monte_carlo(PointCallable const& k, std::span<const double> x, double rho,
                            std::span<const double> cutoffs, BallSampling const& opts) {
  return ball_mc_impl(k, x, rho, cutoffs, opts, true);
}
}  // namespace parallel

double power_sum(std::span<const double> kw, std::span<const double> u, double p) {
  return power_sum_impl(kw, u, p, u.size() >= kParallelThreshold);
}
PowerSplit power_split(std::span<const double> wp, std::span<const double> wm,
                       std::span<const double> u, double p) {
  return power_split_impl(wp, wm, u, p, u.size() >= kParallelThreshold);
}
double dirichlet_form(std::span<const double> a, std::span<const double> u) {
  return dirichlet_impl(a, u, u.size() >= kParallelThreshold);
}
void apply_stiffness(std::span<const double> a, std::span<const double> u, std::span<double> out) {
  stiffness_impl(a, u, out, u.size() >= kParallelThreshold);
}
double cell_quadrature(RadialGrid const& grid, RadialCallable const& f) {
  // Callables are usually expensive, so the threshold is on cells, not flops.
  return cell_quadrature_impl(grid, f, static_cast<std::size_t>(grid.size()) >= 512);
}
BallSample ball_monte_carlo(PointCallable const& k, std::span<const double> x, double rho,
                            std::span<const double> cutoffs, BallSampling const& opts) {
  return ball_mc_impl(k, x, rho, cutoffs, opts, opts.samples >= kParallelThreshold);
}

}  // namespace emden::kernels
