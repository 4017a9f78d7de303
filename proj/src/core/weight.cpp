#include "emden/core/weight.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "emden/core/error.hpp"

namespace emden {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

bool is_origin(Point const& p) {
  return std::all_of(p.begin(), p.end(), [](double v) { return v == 0.0; });
}

// Combines two envelope ends: at the origin the smaller exponent dominates,
// at infinity the larger one.
void merge_end(double& a, double& c, double a2, double c2, bool at_origin) {
  if (c2 == 0.0) return;
  if (c == 0.0) {
    a = a2;
    c = c2;
    return;
  }
  bool const other_dominates = at_origin ? (a2 < a) : (a2 > a);
  if (a2 == a) {
    c += c2;
  } else if (other_dominates) {
    a = a2;
    c = c2;
  }
}

Envelope clip_envelope(Envelope e, bool negative) {
  if (!e.known) return e;
  double const s0 = negative ? -e.c0 : e.c0;
  double const si = negative ? -e.cinf : e.cinf;
  Envelope out = e;
  if (s0 > 0.0) {
    out.c0 = s0;
  } else {
    out.a0 = kInf;
    out.c0 = 0.0;
  }
  if (si > 0.0) {
    out.cinf = si;
  } else {
    out.ainf = -kInf;
    out.cinf = 0.0;
  }
  return out;
}

Envelope fit_sampled(std::vector<double> const& nodes, std::vector<double> const& values) {
  Envelope env;
  std::vector<double> r, v;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i] > 0.0) {
      r.push_back(nodes[i]);
      v.push_back(values[i]);
    }
  }
  if (r.size() < 6 || r.back() < 100.0 * r.front()) return env;
  auto fit_range = [&](bool first) -> std::optional<std::pair<double, double>> {
    std::vector<double> rr, vv;
    for (std::size_t i = 0; i < r.size(); ++i) {
      bool const in = first ? r[i] <= 10.0 * r.front() : r[i] >= r.back() / 10.0;
      if (in) {
        if (v[i] <= 0.0) return std::nullopt;
        rr.push_back(r[i]);
        vv.push_back(v[i]);
      }
    }
    if (rr.size() < 3) return std::nullopt;
    return fit_power(rr, vv);
  };
  auto lo = fit_range(true);
  auto hi = fit_range(false);
  if (!lo || !hi) return env;
  env.known = true;
  env.a0 = lo->first;
  env.c0 = lo->second;
  env.ainf = hi->first;
  env.cinf = hi->second;
  return env;
}

}  // namespace

double envelope_limit(double exponent, double coefficient, bool at_origin) {
  if (coefficient == 0.0) return 0.0;
  if (exponent == 0.0) return coefficient;
  bool const grows = at_origin ? exponent < 0.0 : exponent > 0.0;
  return grows ? std::copysign(kInf, coefficient) : 0.0;
}

std::string_view family_name(Family f) {
  switch (f) {
    case Family::constant: return "constant";
    case Family::power_law: return "power_law";
    case Family::shifted_power: return "shifted_power";
    case Family::broken_power: return "broken_power";
    case Family::bump: return "bump";
    case Family::product: return "product";
    case Family::signed_pair: return "signed_pair";
    case Family::sum: return "sum";
    case Family::sum_of_translates: return "sum_of_translates";
    case Family::sampled_radial: return "sampled_radial";
    case Family::clipped: return "clipped";
  }
  return "unknown";
}

std::pair<double, double> fit_power(std::span<const double> r, std::span<const double> v) {
  require(r.size() == v.size() && r.size() >= 2, "power fit needs at least two samples");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  double const n = static_cast<double>(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    require(r[i] > 0.0 && v[i] > 0.0, "power fit needs positive samples");
    double const x = std::log(r[i]);
    double const y = std::log(v[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double const den = n * sxx - sx * sx;
  require(den > 0.0, "power fit needs distinct radii");
  double const slope = (n * sxy - sx * sy) / den;
  double const intercept = (sy - slope * sx) / n;
  return {slope, std::exp(intercept)};
}

std::vector<double> probe_radii() {
  std::vector<double> r;
  for (int j = -60; j <= 60; ++j) r.push_back(std::pow(10.0, j / 10.0));
  return r;
}

// -- construction -----------------------------------------------------------

WeightSpec WeightSpec::constant(double c) {
  require(std::isfinite(c), "constant weight must be finite");
  return WeightSpec(std::make_shared<detail::WeightNode>(detail::WeightNode{weights::Constant{c}}));
}

WeightSpec WeightSpec::power_law(double delta, double c) {
  require(std::isfinite(delta) && std::isfinite(c), "power_law parameters must be finite");
  return WeightSpec(
      std::make_shared<detail::WeightNode>(detail::WeightNode{weights::PowerLaw{delta, c}}));
}

WeightSpec WeightSpec::shifted_power(double delta, double c) {
  require(std::isfinite(delta) && std::isfinite(c), "shifted_power parameters must be finite");
  return WeightSpec(
      std::make_shared<detail::WeightNode>(detail::WeightNode{weights::ShiftedPower{delta, c}}));
}

WeightSpec WeightSpec::broken_power(double c, double a0, double ainf) {
  require(std::isfinite(c) && std::isfinite(a0) && std::isfinite(ainf),
          "broken_power parameters must be finite");
  return WeightSpec(
      std::make_shared<detail::WeightNode>(detail::WeightNode{weights::BrokenPower{c, a0, ainf}}));
}

WeightSpec WeightSpec::bump(double height, double center, double width) {
  require(std::isfinite(height) && std::isfinite(center), "bump parameters must be finite");
  require(width > 0.0 && std::isfinite(width), "bump width must be positive");
  return WeightSpec(std::make_shared<detail::WeightNode>(
      detail::WeightNode{weights::Bump{height, center, width}}));
}

WeightSpec WeightSpec::product(WeightSpec profile, double delta) {
  require(std::isfinite(delta), "product exponent must be finite");
  require(profile.radial(), "product profile must be radial");
  return WeightSpec(std::make_shared<detail::WeightNode>(
      detail::WeightNode{weights::Product{std::move(profile), delta}}));
}

WeightSpec WeightSpec::signed_pair(WeightSpec positive, WeightSpec negative) {
  require(positive.radial() && negative.radial(), "signed_pair components must be radial");
  for (double r : probe_radii()) {
    require(positive(r) >= 0.0, "signed_pair positive component is negative at a probe point");
    require(negative(r) >= 0.0, "signed_pair negative component is negative at a probe point");
  }
  return WeightSpec(std::make_shared<detail::WeightNode>(
      detail::WeightNode{weights::SignedPair{std::move(positive), std::move(negative)}}));
}

WeightSpec WeightSpec::sum(std::vector<WeightSpec> terms) {
  require(!terms.empty(), "sum needs at least one term");
  for (auto const& t : terms) require(t.radial(), "sum terms must be radial");
  return WeightSpec(
      std::make_shared<detail::WeightNode>(detail::WeightNode{weights::Sum{std::move(terms)}}));
}

WeightSpec WeightSpec::sum_of_translates(std::vector<Point> centers,
                                         std::vector<double> coefficients, WeightSpec envelope,
                                         double exponent) {
  require(!centers.empty(), "sum_of_translates needs at least one center");
  require(centers.size() == coefficients.size(), "one coefficient per center required");
  for (auto const& c : centers) {
    require(c.size() == centers.front().size(), "centers must share a dimension");
  }
  require(envelope.radial(), "translate envelope must be radial");
  require(std::isfinite(exponent), "translate exponent must be finite");
  return WeightSpec(std::make_shared<detail::WeightNode>(detail::WeightNode{weights::Translates{
      std::move(centers), std::move(coefficients), std::move(envelope), exponent}}));
}

WeightSpec WeightSpec::sampled_radial(std::vector<double> nodes, std::vector<double> values) {
  require(nodes.size() == values.size() && nodes.size() >= 2,
          "sampled weight needs matching node/value lists of length >= 2");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    require(std::isfinite(nodes[i]) && std::isfinite(values[i]), "sampled weight must be finite");
    require(nodes[i] >= 0.0, "sampled nodes must be nonnegative");
    if (i > 0) require(nodes[i] > nodes[i - 1], "sampled nodes must be strictly increasing");
  }
  Envelope fit = fit_sampled(nodes, values);
  return WeightSpec(std::make_shared<detail::WeightNode>(
      detail::WeightNode{weights::Sampled{std::move(nodes), std::move(values), fit}}));
}

// -- queries ----------------------------------------------------------------

Family WeightSpec::family() const {
  return std::visit(overloaded{
                        [](weights::Constant const&) { return Family::constant; },
                        [](weights::PowerLaw const&) { return Family::power_law; },
                        [](weights::ShiftedPower const&) { return Family::shifted_power; },
                        [](weights::BrokenPower const&) { return Family::broken_power; },
                        [](weights::Bump const&) { return Family::bump; },
                        [](weights::Product const&) { return Family::product; },
                        [](weights::SignedPair const&) { return Family::signed_pair; },
                        [](weights::Sum const&) { return Family::sum; },
                        [](weights::Translates const&) { return Family::sum_of_translates; },
                        [](weights::Sampled const&) { return Family::sampled_radial; },
                        [](weights::Clipped const&) { return Family::clipped; },
                    },
                    node_->data);
}

bool WeightSpec::radial() const {
  if (auto const* t = std::get_if<weights::Translates>(&node_->data)) {
    return std::all_of(t->centers.begin(), t->centers.end(), is_origin);
  }
  if (auto const* c = std::get_if<weights::Clipped>(&node_->data)) return c->inner.radial();
  return true;
}

namespace {

double sampled_value(weights::Sampled const& s, double r) {
  auto const& x = s.nodes;
  auto const& y = s.values;
  if (r < x.front()) {
    if (s.fit.known && r > 0.0) return s.fit.c0 * std::pow(r, s.fit.a0);
    return y.front();
  }
  if (r > x.back()) {
    if (s.fit.known) return s.fit.cinf * std::pow(r, s.fit.ainf);
    return y.back();
  }
  auto it = std::upper_bound(x.begin(), x.end(), r);
  std::size_t j = static_cast<std::size_t>(it - x.begin());
  if (j >= x.size()) return y.back();
  std::size_t const i = j - 1;
  double const x0 = x[i], x1 = x[j], y0 = y[i], y1 = y[j];
  if (x0 > 0.0 && y0 > 0.0 && y1 > 0.0) {
    double const t = std::log(r / x0) / std::log(x1 / x0);
    return y0 * std::pow(y1 / y0, t);
  }
  return y0 + (y1 - y0) * (r - x0) / (x1 - x0);
}

double sampled_derivative(weights::Sampled const& s, double r) {
  auto const& x = s.nodes;
  auto const& y = s.values;
  if (r < x.front()) {
    if (s.fit.known && r > 0.0) return s.fit.a0 * s.fit.c0 * std::pow(r, s.fit.a0 - 1.0);
    return 0.0;
  }
  if (r >= x.back()) {
    if (s.fit.known) return s.fit.ainf * s.fit.cinf * std::pow(r, s.fit.ainf - 1.0);
    return 0.0;
  }
  auto it = std::upper_bound(x.begin(), x.end(), r);
  std::size_t const j = static_cast<std::size_t>(it - x.begin());
  std::size_t const i = j - 1;
  double const x0 = x[i], x1 = x[j], y0 = y[i], y1 = y[j];
  if (x0 > 0.0 && y0 > 0.0 && y1 > 0.0) {
    double const slope = std::log(y1 / y0) / std::log(x1 / x0);
    return slope * sampled_value(s, r) / r;
  }
  return (y1 - y0) / (x1 - x0);
}

}  // namespace

double WeightSpec::operator()(double r) const {
  return std::visit(
      overloaded{
          [](weights::Constant const& w) { return w.c; },
          [r](weights::PowerLaw const& w) {
            if (w.c == 0.0) return 0.0;
            return w.c * std::pow(r, -w.delta);
          },
          [r](weights::ShiftedPower const& w) { return w.c * std::pow(1.0 + r, -w.delta); },
          [r](weights::BrokenPower const& w) {
            if (w.c == 0.0) return 0.0;
            return w.c * std::pow(r, r < 1.0 ? w.a0 : w.ainf);
          },
          [r](weights::Bump const& w) {
            double const z = (r - w.center) / w.width;
            return w.height * std::exp(-z * z);
          },
          [r](weights::Product const& w) {
            double const k = w.profile(r);
            if (k == 0.0) return 0.0;
            return k * std::pow(r, -w.delta);
          },
          [r](weights::SignedPair const& w) { return w.positive(r) - w.negative(r); },
          [r](weights::Sum const& w) {
            double s = 0.0;
            for (auto const& t : w.terms) s += t(r);
            return s;
          },
          [this, r](weights::Translates const& w) {
            require(radial(), "sum_of_translates with off-origin centers is not radial");
            double const f = w.envelope(r);
            double s = 0.0;
            for (double a : w.coefficients) s += a;
            if (s == 0.0 || f == 0.0) return 0.0;
            return s * f * std::pow(r, w.exponent);
          },
          [r](weights::Sampled const& w) { return sampled_value(w, r); },
          [r](weights::Clipped const& w) {
            double const v = w.inner(r);
            return std::max(0.0, w.negative ? -v : v);
          },
      },
      node_->data);
}

double WeightSpec::at(std::span<const double> x) const {
  if (auto const* t = std::get_if<weights::Translates>(&node_->data)) {
    double s = 0.0;
    for (std::size_t i = 0; i < t->centers.size(); ++i) {
      auto const& p = t->centers[i];
      require(p.size() == x.size(), "point dimension does not match translate centers");
      double d2 = 0.0;
      for (std::size_t j = 0; j < x.size(); ++j) d2 += (x[j] - p[j]) * (x[j] - p[j]);
      double const d = std::sqrt(d2);
      double const f = t->envelope(d);
      if (t->coefficients[i] == 0.0 || f == 0.0) continue;
      s += t->coefficients[i] * f * std::pow(d, t->exponent);
    }
    return s;
  }
  if (auto const* c = std::get_if<weights::Clipped>(&node_->data)) {
    double const v = c->inner.at(x);
    return std::max(0.0, c->negative ? -v : v);
  }
  return (*this)(norm(x));
}

double WeightSpec::derivative(double r) const {
  return std::visit(
      overloaded{
          [](weights::Constant const&) { return 0.0; },
          [r](weights::PowerLaw const& w) {
            if (w.c == 0.0 || w.delta == 0.0) return 0.0;
            return -w.delta * w.c * std::pow(r, -w.delta - 1.0);
          },
          [r](weights::ShiftedPower const& w) {
            if (w.delta == 0.0) return 0.0;
            return -w.delta * w.c * std::pow(1.0 + r, -w.delta - 1.0);
          },
          [r](weights::BrokenPower const& w) {
            double const a = r < 1.0 ? w.a0 : w.ainf;
            if (a == 0.0 || w.c == 0.0) return 0.0;
            return w.c * a * std::pow(r, a - 1.0);
          },
          [r](weights::Bump const& w) {
            double const z = (r - w.center) / w.width;
            return -2.0 * z / w.width * w.height * std::exp(-z * z);
          },
          [r](weights::Product const& w) {
            double const k = w.profile(r);
            double const dk = w.profile.derivative(r);
            double out = 0.0;
            if (dk != 0.0) out += dk * std::pow(r, -w.delta);
            if (k != 0.0 && w.delta != 0.0) out -= w.delta * k * std::pow(r, -w.delta - 1.0);
            return out;
          },
          [r](weights::SignedPair const& w) {
            return w.positive.derivative(r) - w.negative.derivative(r);
          },
          [r](weights::Sum const& w) {
            double s = 0.0;
            for (auto const& t : w.terms) s += t.derivative(r);
            return s;
          },
          [this, r](weights::Translates const& w) {
            require(radial(), "sum_of_translates with off-origin centers is not radial");
            double s = 0.0;
            for (double a : w.coefficients) s += a;
            double const f = w.envelope(r);
            double const df = w.envelope.derivative(r);
            double out = 0.0;
            if (df != 0.0) out += df * std::pow(r, w.exponent);
            if (f != 0.0 && w.exponent != 0.0) out += f * w.exponent * std::pow(r, w.exponent - 1.0);
            return s * out;
          },
          [r](weights::Sampled const& w) { return sampled_derivative(w, r); },
          [r](weights::Clipped const& w) {
            double const v = w.inner(r);
            double const s = w.negative ? -v : v;
            if (s <= 0.0) return 0.0;
            double const d = w.inner.derivative(r);
            return w.negative ? -d : d;
          },
      },
      node_->data);
}

bool WeightSpec::nonnegative() const {
  return std::visit(
      overloaded{
          [](weights::Constant const& w) { return w.c >= 0.0; },
          [](weights::PowerLaw const& w) { return w.c >= 0.0; },
          [](weights::ShiftedPower const& w) { return w.c >= 0.0; },
          [](weights::BrokenPower const& w) { return w.c >= 0.0; },
          [](weights::Bump const& w) { return w.height >= 0.0; },
          [](weights::Product const& w) { return w.profile.nonnegative(); },
          [](weights::SignedPair const&) { return false; },
          [](weights::Sum const& w) {
            return std::all_of(w.terms.begin(), w.terms.end(),
                               [](WeightSpec const& t) { return t.nonnegative(); });
          },
          [](weights::Translates const& w) {
            return w.envelope.nonnegative() &&
                   std::all_of(w.coefficients.begin(), w.coefficients.end(),
                               [](double a) { return a >= 0.0; });
          },
          [](weights::Sampled const& w) {
            return std::all_of(w.values.begin(), w.values.end(), [](double v) { return v >= 0.0; });
          },
          [](weights::Clipped const&) { return true; },
      },
      node_->data);
}

WeightSpec WeightSpec::positive_part() const {
  if (auto const* s = std::get_if<weights::SignedPair>(&node_->data)) return s->positive;
  if (nonnegative()) return *this;
  return WeightSpec(
      std::make_shared<detail::WeightNode>(detail::WeightNode{weights::Clipped{*this, false}}));
}

WeightSpec WeightSpec::negative_part() const {
  if (auto const* s = std::get_if<weights::SignedPair>(&node_->data)) return s->negative;
  if (nonnegative()) return constant(0.0);
  return WeightSpec(
      std::make_shared<detail::WeightNode>(detail::WeightNode{weights::Clipped{*this, true}}));
}

double WeightSpec::positive_value(double r) const {
  if (auto const* s = std::get_if<weights::SignedPair>(&node_->data)) return s->positive(r);
  return std::max(0.0, (*this)(r));
}

double WeightSpec::negative_value(double r) const {
  if (auto const* s = std::get_if<weights::SignedPair>(&node_->data)) return s->negative(r);
  return std::max(0.0, -(*this)(r));
}

Envelope WeightSpec::envelope() const {
  return std::visit(
      overloaded{
          [](weights::Constant const& w) { return Envelope{true, 0.0, w.c, 0.0, w.c}; },
          [](weights::PowerLaw const& w) {
            return Envelope{true, -w.delta, w.c, -w.delta, w.c};
          },
          [](weights::ShiftedPower const& w) { return Envelope{true, 0.0, w.c, -w.delta, w.c}; },
          [](weights::BrokenPower const& w) { return Envelope{true, w.a0, w.c, w.ainf, w.c}; },
          [this](weights::Bump const&) { return Envelope{true, 0.0, (*this)(0.0), -kInf, 0.0}; },
          [](weights::Product const& w) {
            Envelope e = w.profile.envelope();
            e.a0 -= w.delta;
            e.ainf -= w.delta;
            return e;
          },
          [](weights::SignedPair const& w) {
            Envelope p = w.positive.envelope();
            Envelope n = w.negative.envelope();
            if (!p.known || !n.known) return Envelope{};
            Envelope e = p;
            merge_end(e.a0, e.c0, n.a0, -n.c0, true);
            merge_end(e.ainf, e.cinf, n.ainf, -n.cinf, false);
            return e;
          },
          [](weights::Sum const& w) {
            Envelope e{true, 0.0, 0.0, 0.0, 0.0};
            for (auto const& t : w.terms) {
              Envelope te = t.envelope();
              if (!te.known) return Envelope{};
              merge_end(e.a0, e.c0, te.a0, te.c0, true);
              merge_end(e.ainf, e.cinf, te.ainf, te.cinf, false);
            }
            return e;
          },
          [](weights::Translates const& w) {
            Envelope f = w.envelope.envelope();
            if (!f.known) return Envelope{};
            double total = 0.0, total_abs = 0.0;
            for (double a : w.coefficients) {
              total += a;
              total_abs += std::abs(a);
            }
            bool const all_at_origin = std::all_of(w.centers.begin(), w.centers.end(), is_origin);
            Envelope e;
            e.known = true;
            e.a0 = f.a0 + w.exponent;
            e.c0 = (all_at_origin ? total : total_abs) * f.c0;
            e.ainf = f.ainf + w.exponent;
            e.cinf = total * f.cinf;
            return e;
          },
          [](weights::Sampled const& w) { return w.fit; },
          [](weights::Clipped const& w) { return clip_envelope(w.inner.envelope(), w.negative); },
      },
      node_->data);
}

}  // namespace emden
