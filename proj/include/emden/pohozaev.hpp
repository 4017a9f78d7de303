#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "emden/core/grid.hpp"
#include "emden/core/problem.hpp"
#include "emden/core/weight.hpp"

namespace emden {

/// N - (p/2)(N - 2): the exponent for which h = k(r) r^{-delta0} makes the
/// Pohozaev identity reduce to a condition on <grad k, x>.
double delta0(int N, double p);

struct PohozaevIntegral {
  double value = 0.0;     // int r k'(r) r^{-delta} |u|^p
  double absolute = 0.0;  // int |r k'(r)| r^{-delta} |u|^p
  /// Last node carries more than 10x the mean nodal contribution to `absolute`.
  bool tail_warning = false;
  double relative() const { return absolute > 0.0 ? std::abs(value) / absolute : 0.0; }
};

/// Nodal quadrature of r k'(r) r^{-delta} |u|^p. delta must equal delta0(N, p).
PohozaevIntegral pohozaev_lhs(RadialFunction const& u, WeightSpec const& k_profile, double delta,
                              ProblemSpec const& spec);

/// k = h r^{delta0}, the profile of the decomposition h = k r^{-delta0}.
WeightSpec pohozaev_profile(ProblemSpec const& spec);

struct IdentityGap {
  double gap = 0.0;
  bool zero_input = false;
  double energy_term = 0.0;      // (N-2)/2 ||grad u||^2
  double nonlinear_term = 0.0;   // (N-2)/2 int h |u|^p
  double derivative_term = 0.0;  // (1/p) int <grad k, x> r^{-delta0} |u|^p
};

/// |energy - nonlinear - derivative| normalized by the largest term.
IdentityGap pohozaev_identity_gap(RadialFunction const& u, ProblemSpec const& spec);

enum class CertificateVerdict { nonexistence_certified, no_certificate, inconclusive };
char const* to_string(CertificateVerdict v);

struct SignSample {
  double r;
  double value;  // r k'(r) r^{-delta0} = r h'(r) + delta0 h(r)
};

struct Certificate {
  CertificateVerdict verdict = CertificateVerdict::inconclusive;
  double delta0 = 0.0;
  int sign_at_origin = 0;    // -1, 0, +1
  int sign_at_infinity = 0;
  std::optional<double> sign_change;  // first radius where the sign flips, if found
  std::string method;                 // "analytic" or "scan"
  std::string reason;
  std::vector<SignSample> evidence;
};

/// Sign-definiteness of <grad k, x> for h = k(r) r^{-delta0}. Single-signed
/// everywhere including both ends certifies that no nontrivial solution exists.
Certificate nonexistence_certificate(WeightSpec const& h, int N, double p);

}  // namespace emden
