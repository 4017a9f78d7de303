#pragma once

#include <memory>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace emden {

using Point = std::vector<double>;

/// Leading power behaviour of a weight: h(r) ~ c0 r^a0 as r -> 0 and
/// h(r) ~ cinf r^ainf as r -> infinity. Exponents may be -inf (faster than
/// any power) for compactly concentrated families.
struct Envelope {
  bool known = false;
  double a0 = 0.0;
  double c0 = 0.0;
  double ainf = 0.0;
  double cinf = 0.0;
};

/// Limit of c r^a at the respective end: 0, c, or +inf (for c > 0).
double envelope_limit(double exponent, double coefficient, bool at_origin);

enum class Family {
  constant,
  power_law,
  shifted_power,
  broken_power,
  bump,
  product,
  signed_pair,
  sum,
  sum_of_translates,
  sampled_radial,
  clipped,
};

std::string_view family_name(Family f);

namespace detail {
struct WeightNode;
}

/// Weight function h on R^N. Immutable; copies share the underlying node.
class WeightSpec {
 public:
  static WeightSpec constant(double c);
  static WeightSpec power_law(double delta, double c = 1.0);      // c |x|^-delta
  static WeightSpec shifted_power(double delta, double c = 1.0);  // c (1+|x|)^-delta
  static WeightSpec broken_power(double c, double a0, double ainf);
  static WeightSpec bump(double height, double center, double width);
  static WeightSpec product(WeightSpec profile, double delta);  // profile(|x|) |x|^-delta
  static WeightSpec signed_pair(WeightSpec positive, WeightSpec negative);
  static WeightSpec sum(std::vector<WeightSpec> terms);
  static WeightSpec sum_of_translates(std::vector<Point> centers,
                                      std::vector<double> coefficients,
                                      WeightSpec envelope, double exponent);
  static WeightSpec sampled_radial(std::vector<double> nodes, std::vector<double> values);

  Family family() const;
  bool radial() const;

  double operator()(double r) const;             // radial evaluation
  double at(std::span<const double> x) const;    // evaluation at a point
  double derivative(double r) const;             // dh/dr, radial families only

  /// h+ and h- as weights. For signed pairs these are the given components;
  /// otherwise the pointwise clips max(0, h) and max(0, -h).
  WeightSpec positive_part() const;
  WeightSpec negative_part() const;
  double positive_value(double r) const;
  double negative_value(double r) const;

  /// True when every parameter makes the weight nonnegative by construction.
  bool nonnegative() const;

  Envelope envelope() const;

  detail::WeightNode const& node() const { return *node_; }

 private:
  explicit WeightSpec(std::shared_ptr<const detail::WeightNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const detail::WeightNode> node_;
};

namespace weights {

struct Constant {
  double c;
};
struct PowerLaw {
  double delta;
  double c;
};
struct ShiftedPower {
  double delta;
  double c;
};
struct BrokenPower {
  double c;
  double a0;
  double ainf;
};
struct Bump {
  double height;
  double center;
  double width;
};
struct Product {
  WeightSpec profile;
  double delta;
};
struct SignedPair {
  WeightSpec positive;
  WeightSpec negative;
};
struct Sum {
  std::vector<WeightSpec> terms;
};
struct Translates {
  std::vector<Point> centers;
  std::vector<double> coefficients;
  WeightSpec envelope;
  double exponent;
};
struct Sampled {
  std::vector<double> nodes;
  std::vector<double> values;
  Envelope fit;
};
struct Clipped {
  WeightSpec inner;
  bool negative;  // true: max(0, -inner)
};

using Variant = std::variant<Constant, PowerLaw, ShiftedPower, BrokenPower, Bump, Product,
                             SignedPair, Sum, Translates, Sampled, Clipped>;

}  // namespace weights

namespace detail {
struct WeightNode {
  weights::Variant data;
};
}  // namespace detail

/// Log-log least squares fit of c r^a over the given samples.
/// Returns {a, c}; requires at least two strictly positive samples.
std::pair<double, double> fit_power(std::span<const double> r, std::span<const double> v);

/// Radii used to probe weights for sign and finiteness invariants.
std::vector<double> probe_radii();

}  // namespace emden
