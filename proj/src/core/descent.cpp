#include "emden/core/descent.hpp"

#include <cmath>
#include <deque>

#include "emden/core/error.hpp"
#include "emden/kernels.hpp"

namespace emden {

namespace {
constexpr double kArmijo = 1e-4;
constexpr double kMinStep = 0x1p-20;
}  // namespace

DescentResult minimize_quotient(RadialLaplacian const& K, std::span<const double> kw, double q,
                                std::vector<double> u, DescentOptions const& opts) {
  std::size_t const n = u.size();
  require(kw.size() == n && static_cast<int>(n) == K.size(), "descent: size mismatch");
  require(q > 2.0, "descent: exponent must exceed 2");

  for (double& x : u) x = std::abs(x);
  double E = K.form(u);
  double B = kernels::power_sum(kw, u, q);
  if (!(E > 0.0) || !(B > 0.0)) {
    fail(ErrorKind::nehari_undefined, "initial profile has no positive weighted mass");
  }
  double const s0 = 1.0 / std::sqrt(E);
  for (double& x : u) x *= s0;
  B *= std::pow(s0, q);

  DescentResult out;
  std::deque<double> history;
  double tau = 1.0;
  std::vector<double> g(n), d(n), v(n);

  for (int it = 0; it < opts.max_iterations; ++it) {
    double const Q = std::pow(B, -2.0 / q);
    history.push_back(Q);
    if (static_cast<int>(history.size()) > opts.stall_window + 1) history.pop_front();
    out.quotient = Q;
    out.iterations = it;

    for (std::size_t i = 0; i < n; ++i) g[i] = kw[i] * std::pow(std::abs(u[i]), q - 2.0) * u[i];
    auto z = K.solve(g);
    for (std::size_t i = 0; i < n; ++i) d[i] = u[i] - z[i] / B;
    double const dk2 = std::max(0.0, K.form(d));
    out.residual = std::sqrt(dk2);
    if (out.residual < opts.gtol) {
      out.converged = true;
      break;
    }
    if (static_cast<int>(history.size()) > opts.stall_window &&
        std::abs(history.front() - Q) <= opts.stall_rtol * Q) {
      out.stalled = true;
      out.converged = true;
      break;
    }

    bool accepted = false;
    tau = std::min(1.0, 2.0 * tau);
    for (; tau >= kMinStep; tau *= 0.5) {
      for (std::size_t i = 0; i < n; ++i) v[i] = std::abs(u[i] - tau * d[i]);
      double const Ev = K.form(v);
      double const Bv = kernels::power_sum(kw, v, q);
      if (!(Bv > 0.0) || !(Ev > 0.0)) continue;
      double const Qv = Ev / std::pow(Bv, 2.0 / q);
      if (Qv <= Q - kArmijo * tau * 2.0 * Q * dk2) {
        double const sv = 1.0 / std::sqrt(Ev);
        for (std::size_t i = 0; i < n; ++i) u[i] = v[i] * sv;
        B = Bv * std::pow(sv, q);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // No decrease at the step floor: the quotient is flat to round-off here.
      out.stalled = true;
      out.converged = true;
      tau = kMinStep;
      break;
    }
    out.iterations = it + 1;
  }
  out.quotient = std::pow(B, -2.0 / q);
  out.u = std::move(u);
  return out;
}

}  // namespace emden
