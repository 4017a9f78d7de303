#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "emden/core/weight.hpp"

namespace emden {

/// Orbit length |G x|: a natural number or infinity.
struct OrbitLength {
  std::uint64_t count = 1;
  bool infinite = false;

  double as_double() const;
  friend bool operator==(OrbitLength const&, OrbitLength const&) = default;
};

enum class GroupKind { trivial, cyclic, full_rotation };

/// Compact symmetry group acting on R^N. `cyclic(m)` rotates the plane of
/// the first two coordinates by multiples of 2 pi / m.
class GroupSpec {
 public:
  static GroupSpec trivial() { return GroupSpec(GroupKind::trivial, 1); }
  static GroupSpec cyclic(std::uint64_t m);
  static GroupSpec full_rotation() { return GroupSpec(GroupKind::full_rotation, 0); }

  GroupKind kind() const { return kind_; }
  std::uint64_t order() const { return m_; }

  OrbitLength orbit_length(std::span<const double> x) const;
  OrbitLength orbit_length_at_infinity() const { return {1, false}; }

  /// Smallest orbit length among points at radius r > 0 in dimension N.
  OrbitLength min_orbit_at_radius(double r, int N) const;

  std::string name() const;

 private:
  GroupSpec(GroupKind k, std::uint64_t m) : kind_(k), m_(m) {}
  GroupKind kind_;
  std::uint64_t m_;
};

/// Full instance of -Lap u = h |u|^{p-2} u on R^N.
struct ProblemSpec {
  int N;
  double p;
  WeightSpec weight;
  GroupSpec group = GroupSpec::trivial();

  /// Throws invalid_argument when N < 3, p <= 2 or h+ vanishes at every probe point.
  void validate() const;

  double critical_exponent() const { return 2.0 * N / (N - 2.0); }
};

ProblemSpec make_problem(int N, double p, WeightSpec weight,
                         GroupSpec group = GroupSpec::trivial());

/// Surface area of the unit sphere in R^N.
double sphere_area(int N);

}  // namespace emden
