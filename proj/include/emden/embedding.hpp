#pragma once

#include <optional>
#include <string>
#include <vector>

#include "emden/core/quadrature.hpp"
#include "emden/core/weight.hpp"
#include "emden/kernels.hpp"

namespace emden {

enum class Verdict { holds, fails, inconclusive };
char const* to_string(Verdict v);

/// Fraction of the sphere |y| = r lying inside B_rho(x) with |x| = d, in R^N.
double sphere_fraction_in_ball(double r, double d, double rho, int N);

enum class MassMethod { automatic, monte_carlo };

struct BallMassOptions {
  MassMethod method = MassMethod::automatic;
  kernels::BallSampling sampling;
  /// Monte Carlo results with std_error / value above this are flagged.
  double max_rel_error = 0.1;
};

struct BallMass {
  double value = 0.0;  // +inf when the mass diverges
  double std_error = 0.0;
  bool monte_carlo = false;
  bool inconclusive = false;
  /// Mass of B_rho(x) \ B_R(0) for each requested cutoff R (same order).
  std::vector<double> outside;
};

/// int_{B_rho(x)} k+ over R^N with N = x.size(). Radial weights use 1-D
/// quadrature against the exact sphere fraction inside the ball; other
/// weights use stratified Monte Carlo with a reported standard error.
BallMass ball_mass(WeightSpec const& k, Point const& x, double rho,
                   std::vector<double> const& cutoffs = {}, BallMassOptions const& opts = {});

/// rho^{(1 - N/2) q} int_{B_rho(x)} k+; the standard error is scaled alike.
BallMass mazja_functional(WeightSpec const& k, double q, Point const& x, double rho,
                          BallMassOptions const& opts = {});

struct ProbeGrid {
  std::vector<Point> centers;
  std::vector<double> radii;
  std::vector<double> cutoffs;  // R for the mass escaping to infinity
  std::vector<double> scales;   // upper bounds on rho for the small-ball limit
};

/// Centers {0} and 2^j e_i (j = -4..4), radii 2^-10..2^10, cutoffs
/// 2^0..2^6, scales 2^-10..2^0.
ProbeGrid default_probe_grid(int N);

struct CurvePoint {
  double at = 0.0;
  double value = 0.0;  // +inf when some probe mass diverges
};

struct EmbeddingReport {
  int N = 0;
  double q = 0.0;
  double sup_estimate = 0.0;  // sup over all probes of the scaled ball mass
  bool sup_infinite = false;
  std::vector<CurvePoint> tail_curve;         // (R, sup of scaled mass outside B_R)
  std::vector<CurvePoint> small_scale_curve;  // (scale, sup over rho < scale)
  Verdict continuity = Verdict::inconclusive;
  Verdict compactness = Verdict::inconclusive;
  std::string rationale;
  /// Exponents of the scaled mass at the origin, at infinity and at interior
  /// points (rho -> 0). Present when the verdict came from the envelope.
  std::optional<double> origin_exponent;
  std::optional<double> infinity_exponent;
  double interior_exponent = 0.0;
  bool monte_carlo = false;
  bool sampling_inconclusive = false;
  double exponent_tolerance = 0.0;
};

/// Continuity and compactness of D^{1,2}(R^N) in L^q(R^N, k+). Verdicts are
/// decided from envelope exponents; probe curves are attached as evidence.
EmbeddingReport compactness_check(WeightSpec const& k, double q, int N,
                                  std::optional<ProbeGrid> probes = std::nullopt,
                                  BallMassOptions const& opts = {});

enum class Criterion {
  integrable_power,      // int k^{2*/(2*-q)} < inf
  critical_decay,        // k <= f |x|^{-(N - q(N-2)/2)}, f -> 0 at 0 and infinity
  hardy_weighted,        // int k^{p/(p-q)} |x|^{delta q/(p-q)} < inf, p = p(N, delta)
  dominated,             // tail integral of k (k/h)^{(q-z)/(p-q)} against h
  algebraic_decay,       // 0 <= h <= C (1+|x|^2)^-a
  lebesgue_bounded,      // 0 <= h in L^s and L^inf
  radial_split,          // h+ = k1 + k2 for radial h
  translates,            // h+ <= sum a_i f(x - p_i) |x - p_i|^{(N-2)p/2 - N}
  radial_supercritical,  // p >= 2*, radial_split
};

char const* to_string(Criterion c);
std::optional<Criterion> criterion_from_string(std::string const& s);

struct CriterionParams {
  int N = 3;
  std::optional<double> p;        // dominated, algebraic_decay exponent
  std::optional<double> delta;    // hardy_weighted
  std::optional<double> z;        // dominated, 0 <= z <= q
  std::optional<WeightSpec> h;    // dominated
  double R = 1.0;                 // dominated
  std::optional<double> a;        // algebraic_decay
  std::optional<double> s;        // lebesgue_bounded
  std::optional<WeightSpec> k1;   // radial_split decomposition
  std::optional<WeightSpec> k2;
};

struct CriterionResult {
  Criterion criterion = Criterion::integrable_power;
  Verdict verdict = Verdict::inconclusive;
  std::string reason;
  std::optional<ShellIntegral> integral;
  /// Positivity of h on the support of k is only sampled, never proved.
  bool positivity_assumed = false;
};

/// Checks one sufficient condition for a compact embedding (or, for the
/// classical presets, for solvability; there q is the equation's exponent p).
/// holds needs finite envelope exponents and a converged quadrature; fails
/// needs exponents certifying that the hypothesis is violated.
CriterionResult sufficient_criterion(WeightSpec const& k, double q, Criterion id,
                                     CriterionParams const& params = {});

}  // namespace emden
