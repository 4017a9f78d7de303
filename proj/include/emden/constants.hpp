#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "emden/core/descent.hpp"
#include "emden/core/grid.hpp"
#include "emden/core/problem.hpp"
#include "emden/core/weight.hpp"

namespace emden {

/// u_{delta,sigma}(r) = (1 + (r/sigma)^{2-delta})^{-(N-2)/(2-delta)}, the
/// Hardy-Sobolev extremal and its dilations.
class ExtremalFamily {
 public:
  ExtremalFamily(int N, double delta, double sigma = 1.0);

  int dimension() const { return N_; }
  double delta() const { return delta_; }
  double sigma() const { return sigma_; }
  /// p(N, delta) = 2 (N - delta) / (N - 2).
  double exponent() const;

  double operator()(double r) const;
  double derivative(double r) const;

  /// ||grad u||_2^2 and int |x|^{-delta} u^p in closed form (Beta integrals).
  double gradient_norm_sq() const;
  double weighted_integral() const;

  /// Nodal samples of u and of v = u / ||grad u||_2 (continuous normalization).
  RadialFunction sample(GridPtr grid) const;
  RadialFunction normalized(GridPtr grid) const;
  double normalized_value(double r) const;

 private:
  int N_;
  double delta_;
  double sigma_;
};

/// Hardy-Sobolev constant K(N, delta), 0 <= delta < 2. The closed form is
/// checked against shell quadrature of the extremal before it is cached.
double hardy_sobolev_constant(int N, double delta);

/// (int |x|^{-delta} |u|^p)^{1/p} / ||grad u||_2 on the grid, p = p(N, delta).
double hardy_sobolev_quotient(RadialFunction const& u, double delta, int N);

enum class DomainKind { whole, ball, exterior };

struct Domain {
  DomainKind kind = DomainKind::whole;
  double radius = 0.0;

  static Domain whole() { return {DomainKind::whole, 0.0}; }
  static Domain ball(double r) { return {DomainKind::ball, r}; }
  static Domain exterior(double r) { return {DomainKind::exterior, r}; }
  std::string name() const;
};

struct BestConstantResult {
  double value = 0.0;
  bool infinite = false;
  Domain domain;
  std::optional<RadialFunction> minimizer;  // normalized to int k |u|^q = 1
  int iterations = 0;
  double residual = 0.0;
  int start = -1;  // index of the winning start
  bool converged = true;
};

struct RayleighOptions {
  DescentOptions descent;
  std::uint64_t seed = 7;
  /// When false, an unconverged best start is still reported (converged =
  /// false); its value remains an upper bound. Infima that are not attained,
  /// such as dilation-invariant weights on balls or exteriors, need this.
  bool require_convergence = true;
};

/// inf { ||grad u||^2 : int k |u|^q = 1 } over radial u supported in the
/// domain; an upper bound on the true value. Five starts, best kept.
BestConstantResult rayleigh_min(Domain const& domain, WeightSpec const& k, double q,
                                GridPtr const& grid, RayleighOptions const& opts = {});

struct SPoint {
  double r = 0.0;
  double value = 0.0;  // best bound over this domain and the nested ones
  bool infinite = false;
  double raw = 0.0;    // direct minimization on this domain alone (+inf when infinite)
};

struct SProfile {
  std::vector<SPoint> exterior;  // S over {|x| > r}
  std::vector<SPoint> origin;    // S over B_r(0)
  double s_infinity = 0.0;
  double s_origin = 0.0;
  bool infinity_flag = false;
  bool origin_flag = false;
  /// Monotonicity of the raw curves; the reported values are monotone by
  /// construction.
  bool exterior_monotone = true;
  bool origin_monotone = true;
};

struct SProfileOptions {
  /// Each radius gets its own grid of scale r; the log map keeps both the
  /// domain boundary and the unit scale resolved.
  MapKind map = MapKind::log_uniform;
  int M = 2000;
  /// Growth factor across the last decade that marks a divergent curve.
  double growth_factor = 1.2;
  double monotone_rtol = 1e-6;
  RayleighOptions rayleigh;
};

/// Default radii 10^{-3} .. 10^{3} in half-decade steps.
std::vector<double> default_s_radii();

SProfile s_profile(WeightSpec const& k, double q, int N, std::vector<double> const& r_list,
                   SProfileOptions const& opts = {});

enum class Location { origin, infinity, off_origin };

/// Closed interval of values; lower == upper for a point value. Infinite
/// bounds stand for the infinity flag.
struct SInterval {
  double lower = 0.0;
  double upper = 0.0;
  bool infinite() const { return std::isinf(lower); }
};

/// Local best constant of k(|x|) |x|^{-delta} at the given location from the
/// Hardy-Sobolev constant. `radius` is used for off_origin when delta = 0.
SInterval analytic_S(WeightSpec const& k_profile, double delta, double q, int N, Location where,
                     double radius = 1.0);

struct ThresholdTerm {
  std::string point;  // "0", "inf", or "r=<value>"
  OrbitLength orbit;
  SInterval s;
};

struct C0Result {
  double value = 0.0;  // from the lower end of each S interval
  double upper = 0.0;
  bool infinite = false;
  double delta = 0.0;  // N - p (N-2)/2
  std::vector<ThresholdTerm> terms;
};

/// c_0 = (1/2 - 1/p) min over finite-orbit points of |G_x| (S^x_{h+})^{p/(p-2)}.
/// Analytic from the envelope of h+; otherwise falls back to `numeric`.
C0Result c0_threshold(ProblemSpec const& spec, SProfile const* numeric = nullptr);

enum class BoundVerdict { satisfied, unsatisfied, inconclusive };
char const* to_string(BoundVerdict v);

struct TestFunctionResult {
  BoundVerdict verdict = BoundVerdict::inconclusive;
  std::optional<double> witness_sigma;
  double k_c = 0.0;
  double bound = 0.0;
  /// Per sigma: int h v^p and int (h - k_c |x|^{-delta}) v^p.
  std::vector<double> sigma;
  std::vector<double> mass;
  std::vector<double> surplus;
  std::string reason;
};

/// Scan dilations v_{delta,sigma} for int h v^p > 0 and a nonnegative
/// surplus over the comparison weight k_c |x|^{-delta}.
TestFunctionResult test_function_bound(ProblemSpec const& spec, std::vector<double> const& sigma_grid);

/// Direct check with a given profile: int h |u|^p at ||grad u|| = 1 against
/// sup_x |G_x|^{-(p-2)/2} (S^x_{h+})^{-p/2}.
TestFunctionResult test_function_bound(ProblemSpec const& spec, RadialFunction const& u);

}  // namespace emden
