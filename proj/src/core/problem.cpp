#include "emden/core/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "emden/core/error.hpp"

namespace emden {

double OrbitLength::as_double() const {
  return infinite ? std::numeric_limits<double>::infinity() : static_cast<double>(count);
}

GroupSpec GroupSpec::cyclic(std::uint64_t m) {
  require(m >= 1, "cyclic group order must be at least 1");
  return GroupSpec(GroupKind::cyclic, m);
}

OrbitLength GroupSpec::orbit_length(std::span<const double> x) const {
  bool const origin = std::all_of(x.begin(), x.end(), [](double v) { return v == 0.0; });
  if (origin) return {1, false};
  switch (kind_) {
    case GroupKind::trivial:
      return {1, false};
    case GroupKind::cyclic: {
      bool const on_axis = (x.size() < 1 || x[0] == 0.0) && (x.size() < 2 || x[1] == 0.0);
      return {on_axis ? 1 : m_, false};
    }
    case GroupKind::full_rotation:
      return {0, true};
  }
  return {1, false};
}

OrbitLength GroupSpec::min_orbit_at_radius(double r, int N) const {
  if (r == 0.0) return {1, false};
  switch (kind_) {
    case GroupKind::trivial:
      return {1, false};
    case GroupKind::cyclic:
      // the rotation axis (x1 = x2 = 0) is nontrivial for N >= 3
      return {N >= 3 ? 1 : m_, false};
    case GroupKind::full_rotation:
      return {0, true};
  }
  return {1, false};
}

std::string GroupSpec::name() const {
  switch (kind_) {
    case GroupKind::trivial: return "trivial";
    case GroupKind::cyclic: return "cyclic:" + std::to_string(m_);
    case GroupKind::full_rotation: return "radial";
  }
  return "trivial";
}

void ProblemSpec::validate() const {
  if (N < 3) fail(ErrorKind::invalid_argument, "dimension N must satisfy N >= 3 (got " + std::to_string(N) + ")");
  if (!(p > 2.0) || !std::isfinite(p)) {
    fail(ErrorKind::invalid_argument, "exponent p must satisfy p > 2");
  }
  bool positive_somewhere = false;
  if (weight.radial()) {
    for (double r : probe_radii()) {
      double const v = weight.positive_value(r);
      if (!std::isfinite(v) && r > 0.0) {
        fail(ErrorKind::invalid_argument, "weight is not finite at probe radius " + std::to_string(r));
      }
      if (v > 0.0) positive_somewhere = true;
    }
  } else {
    auto const hp = weight.positive_part();
    for (double r : probe_radii()) {
      for (int axis = 0; axis < N && !positive_somewhere; ++axis) {
        for (double sign : {1.0, -1.0}) {
          Point x(N, 0.0);
          x[axis] = sign * r;
          if (hp.at(x) > 0.0) positive_somewhere = true;
        }
      }
    }
  }
  if (!positive_somewhere) {
    fail(ErrorKind::invalid_argument, "positive part of the weight vanishes at every probe point");
  }
}

ProblemSpec make_problem(int N, double p, WeightSpec weight, GroupSpec group) {
  ProblemSpec spec{N, p, std::move(weight), group};
  spec.validate();
  return spec;
}

double sphere_area(int N) {
  return 2.0 * std::pow(std::numbers::pi, N / 2.0) / std::tgamma(N / 2.0);
}

char const* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::evaluation: return "evaluation";
    case ErrorKind::undefined_quotient: return "undefined_quotient";
    case ErrorKind::nehari_undefined: return "nehari_undefined";
    case ErrorKind::non_convergence: return "non_convergence";
    case ErrorKind::unsupported: return "unsupported";
    case ErrorKind::wrong_exponent: return "wrong_exponent";
    case ErrorKind::inconclusive: return "inconclusive";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

}  // namespace emden
