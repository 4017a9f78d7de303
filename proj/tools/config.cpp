#include "config.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

#include "emden/core/error.hpp"

namespace emden::cli {

namespace {

[[noreturn]] void bad(std::string const& msg) { throw ConfigError(msg); }

void allow_keys(json const& j, std::string const& where, std::set<std::string> const& keys) {
  if (!j.is_object()) bad(where + " must be a JSON object");
  for (auto const& [key, _] : j.items())
    if (!keys.count(key)) bad("unknown key \"" + key + "\" in " + where);
}

double get_number(json const& j, char const* key, std::string const& where) {
  if (!j.contains(key)) bad(where + " is missing \"" + key + "\"");
  auto const& v = j.at(key);
  if (!v.is_number()) bad(where + "." + key + " must be a number");
  return v.get<double>();
}

double get_number(json const& j, char const* key, std::string const& where, double fallback) {
  return j.contains(key) ? get_number(j, key, where) : fallback;
}

std::optional<double> get_optional(json const& j, char const* key, std::string const& where) {
  if (!j.contains(key)) return std::nullopt;
  return get_number(j, key, where);
}

long long get_int(json const& j, char const* key, std::string const& where, long long fallback) {
  if (!j.contains(key)) return fallback;
  auto const& v = j.at(key);
  if (!v.is_number_integer()) bad(where + "." + key + " must be an integer");
  return v.get<long long>();
}

std::vector<double> get_doubles(json const& j, char const* key, std::string const& where) {
  if (!j.contains(key)) return {};
  auto const& v = j.at(key);
  if (!v.is_array()) bad(where + "." + key + " must be an array of numbers");
  std::vector<double> out;
  for (auto const& e : v) {
    if (!e.is_number()) bad(where + "." + key + " must be an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::vector<Point> get_points(json const& j, char const* key, std::string const& where) {
  if (!j.contains(key)) bad(where + " is missing \"" + key + "\"");
  auto const& v = j.at(key);
  if (!v.is_array()) bad(where + "." + key + " must be an array of points");
  std::vector<Point> out;
  for (auto const& e : v) {
    if (!e.is_array()) bad(where + "." + key + " must be an array of points");
    Point p;
    for (auto const& c : e) {
      if (!c.is_number()) bad(where + "." + key + " must hold numeric coordinates");
      p.push_back(c.get<double>());
    }
    out.push_back(std::move(p));
  }
  return out;
}

bool get_bool(json const& j, char const* key, std::string const& where, bool fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_boolean()) bad(where + "." + key + " must be a boolean");
  return j.at(key).get<bool>();
}

std::string get_string(json const& j, char const* key, std::string const& where, std::string fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_string()) bad(where + "." + key + " must be a string");
  return j.at(key).get<std::string>();
}

json points_json(std::vector<Point> const& pts) {
  json a = json::array();
  for (auto const& p : pts) a.push_back(p);
  return a;
}

ProbeGrid parse_probes(json const& j) {
  std::string const where = "embedding.probes";
  allow_keys(j, where, {"centers", "radii", "cutoffs", "scales"});
  ProbeGrid g;
  g.centers = get_points(j, "centers", where);
  g.radii = get_doubles(j, "radii", where);
  g.cutoffs = get_doubles(j, "cutoffs", where);
  g.scales = get_doubles(j, "scales", where);
  if (g.centers.empty() || g.radii.empty()) bad(where + " needs at least one center and one radius");
  return g;
}

json probes_json(ProbeGrid const& g) {
  return {{"centers", points_json(g.centers)}, {"radii", g.radii}, {"cutoffs", g.cutoffs}, {"scales", g.scales}};
}

}  // namespace

json num(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

namespace {

void dump_into(std::string& out, json const& j, int depth) {
  auto const pad = [&](int d) { out.append(static_cast<std::size_t>(2 * d), ' '); };
  switch (j.type()) {
    case json::value_t::number_float: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", j.get<double>());
      out += buf;
      return;
    }
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto const& [key, value] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        pad(depth + 1);
        out += json(key).dump();
        out += ": ";
        dump_into(out, value, depth + 1);
      }
      out += "\n";
      pad(depth);
      out += "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        pad(depth + 1);
        dump_into(out, j[i], depth + 1);
      }
      out += "\n";
      pad(depth);
      out += "]";
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::string dump17(json const& j) {
  std::string out;
  dump_into(out, j, 0);
  out += "\n";
  return out;
}

WeightSpec weight_from_json(json const& j) {
  if (!j.is_object()) bad("weight must be a JSON object");
  std::string const family = get_string(j, "family", "weight", "");
  std::string const where = "weight(" + family + ")";
  try {
    if (family == "constant") {
      allow_keys(j, where, {"family", "c"});
      return WeightSpec::constant(get_number(j, "c", where));
    }
    if (family == "power_law" || family == "shifted_power") {
      allow_keys(j, where, {"family", "delta", "c"});
      double const d = get_number(j, "delta", where);
      double const c = get_number(j, "c", where, 1.0);
      return family == "power_law" ? WeightSpec::power_law(d, c) : WeightSpec::shifted_power(d, c);
    }
    if (family == "broken_power") {
      allow_keys(j, where, {"family", "c", "a0", "ainf"});
      return WeightSpec::broken_power(get_number(j, "c", where), get_number(j, "a0", where),
                                      get_number(j, "ainf", where));
    }
    if (family == "bump") {
      allow_keys(j, where, {"family", "height", "center", "width"});
      return WeightSpec::bump(get_number(j, "height", where), get_number(j, "center", where),
                              get_number(j, "width", where));
    }
    if (family == "product") {
      allow_keys(j, where, {"family", "profile", "delta"});
      if (!j.contains("profile")) bad(where + " is missing \"profile\"");
      return WeightSpec::product(weight_from_json(j.at("profile")), get_number(j, "delta", where));
    }
    if (family == "signed_pair") {
      allow_keys(j, where, {"family", "positive", "negative"});
      if (!j.contains("positive") || !j.contains("negative"))
        bad(where + " needs \"positive\" and \"negative\"");
      return WeightSpec::signed_pair(weight_from_json(j.at("positive")), weight_from_json(j.at("negative")));
    }
    if (family == "sum") {
      allow_keys(j, where, {"family", "terms"});
      if (!j.contains("terms") || !j.at("terms").is_array()) bad(where + " needs a \"terms\" array");
      std::vector<WeightSpec> terms;
      for (auto const& t : j.at("terms")) terms.push_back(weight_from_json(t));
      return WeightSpec::sum(std::move(terms));
    }
    if (family == "sum_of_translates") {
      allow_keys(j, where, {"family", "centers", "coefficients", "envelope", "exponent"});
      if (!j.contains("envelope")) bad(where + " is missing \"envelope\"");
      return WeightSpec::sum_of_translates(get_points(j, "centers", where), get_doubles(j, "coefficients", where),
                                           weight_from_json(j.at("envelope")), get_number(j, "exponent", where));
    }
    if (family == "sampled_radial") {
      allow_keys(j, where, {"family", "nodes", "values"});
      return WeightSpec::sampled_radial(get_doubles(j, "nodes", where), get_doubles(j, "values", where));
    }
  } catch (Error const& e) {
    bad(where + ": " + e.what());
  }
  if (family.empty()) bad("weight is missing \"family\"");
  bad("unknown weight family \"" + family + "\"");
}

json weight_to_json(WeightSpec const& w) {
  using namespace weights;
  return std::visit(
      [](auto const& d) -> json {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Constant>) {
          return {{"family", "constant"}, {"c", d.c}};
        } else if constexpr (std::is_same_v<T, PowerLaw>) {
          return {{"family", "power_law"}, {"delta", d.delta}, {"c", d.c}};
        } else if constexpr (std::is_same_v<T, ShiftedPower>) {
          return {{"family", "shifted_power"}, {"delta", d.delta}, {"c", d.c}};
        } else if constexpr (std::is_same_v<T, BrokenPower>) {
          return {{"family", "broken_power"}, {"c", d.c}, {"a0", d.a0}, {"ainf", d.ainf}};
        } else if constexpr (std::is_same_v<T, Bump>) {
          return {{"family", "bump"}, {"height", d.height}, {"center", d.center}, {"width", d.width}};
        } else if constexpr (std::is_same_v<T, Product>) {
          return {{"family", "product"}, {"profile", weight_to_json(d.profile)}, {"delta", d.delta}};
        } else if constexpr (std::is_same_v<T, SignedPair>) {
          return {{"family", "signed_pair"},
                  {"positive", weight_to_json(d.positive)},
                  {"negative", weight_to_json(d.negative)}};
        } else if constexpr (std::is_same_v<T, Sum>) {
          json terms = json::array();
          for (auto const& t : d.terms) terms.push_back(weight_to_json(t));
          return {{"family", "sum"}, {"terms", terms}};
        } else if constexpr (std::is_same_v<T, Translates>) {
          return {{"family", "sum_of_translates"},
                  {"centers", points_json(d.centers)},
                  {"coefficients", d.coefficients},
                  {"envelope", weight_to_json(d.envelope)},
                  {"exponent", d.exponent}};
        } else if constexpr (std::is_same_v<T, Sampled>) {
          return {{"family", "sampled_radial"}, {"nodes", d.nodes}, {"values", d.values}};
        } else {
          return {{"family", "clipped"}, {"inner", weight_to_json(d.inner)}, {"negative", d.negative}};
        }
      },
      w.node().data);
}

GroupSpec group_from_string(std::string const& s) {
  if (s == "trivial") return GroupSpec::trivial();
  if (s == "radial") return GroupSpec::full_rotation();
  if (s.rfind("cyclic:", 0) == 0) {
    std::string const m = s.substr(7);
    if (m.empty() || m.find_first_not_of("0123456789") != std::string::npos)
      bad("group \"" + s + "\": cyclic order must be a positive integer");
    unsigned long long const order = std::stoull(m);
    if (order < 1) bad("group \"" + s + "\": cyclic order must be at least 1");
    return GroupSpec::cyclic(order);
  }
  bad("group must be \"trivial\", \"cyclic:m\" or \"radial\" (got \"" + s + "\")");
}

RunConfig parse_config(json const& j) {
  allow_keys(j, "config",
             {"N", "p", "weight", "group", "grid", "solver", "embedding", "sconst", "threshold", "dichotomy",
              "pohozaev"});
  RunConfig c;
  if (!j.contains("N") || !j.at("N").is_number_integer()) bad("config needs an integer \"N\"");
  c.N = j.at("N").get<int>();
  c.p = get_number(j, "p", "config");
  if (!j.contains("weight")) bad("config is missing \"weight\"");
  c.weight = weight_to_json(weight_from_json(j.at("weight")));

  c.group = get_string(j, "group", "config", "trivial");
  group_from_string(c.group);

  if (j.contains("grid")) {
    auto const& g = j.at("grid");
    allow_keys(g, "grid", {"map", "M", "L"});
    std::string const map = get_string(g, "map", "grid", "algebraic");
    if (map == "algebraic") c.grid.map = MapKind::algebraic;
    else if (map == "log") c.grid.map = MapKind::log_uniform;
    else bad("grid.map must be \"algebraic\" or \"log\"");
    c.grid.M = static_cast<int>(get_int(g, "M", "grid", c.grid.M));
    c.grid.L = get_number(g, "L", "grid", c.grid.L);
  }
  if (c.grid.M < 8) bad("grid.M must satisfy M >= 8");
  if (!(c.grid.L > 0.0)) bad("grid.L must satisfy L > 0");

  if (j.contains("solver")) {
    auto const& s = j.at("solver");
    allow_keys(s, "solver", {"tol", "max_descent", "max_newton", "max_iterations", "seed"});
    c.solver.tol = get_number(s, "tol", "solver", c.solver.tol);
    long long const cap = get_int(s, "max_iterations", "solver", -1);
    c.solver.max_descent = static_cast<int>(get_int(s, "max_descent", "solver", cap >= 0 ? cap : c.solver.max_descent));
    c.solver.max_newton = static_cast<int>(get_int(s, "max_newton", "solver", cap >= 0 ? cap : c.solver.max_newton));
    long long const seed = get_int(s, "seed", "solver", 1);
    if (seed < 0) bad("solver.seed must be nonnegative");
    c.solver.seed = static_cast<std::uint64_t>(seed);
  }
  if (!(c.solver.tol > 0.0)) bad("solver.tol must satisfy tol > 0");
  if (c.solver.max_descent < 0 || c.solver.max_newton < 0) bad("solver iteration limits must be nonnegative");

  if (j.contains("embedding")) {
    auto const& e = j.at("embedding");
    std::string const where = "embedding";
    allow_keys(e, where, {"q", "criteria", "samples", "probes", "delta", "z", "h", "a", "s", "R", "k1", "k2"});
    auto& E = c.embedding;
    E.q = get_optional(e, "q", where);
    if (e.contains("criteria")) {
      if (!e.at("criteria").is_array()) bad("embedding.criteria must be an array of names");
      for (auto const& name : e.at("criteria")) {
        if (!name.is_string() || !criterion_from_string(name.get<std::string>()))
          bad("unknown criterion " + name.dump());
        E.criteria.push_back(name.get<std::string>());
      }
    }
    long long const samples = get_int(e, "samples", where, static_cast<long long>(E.samples));
    if (samples < 64) bad("embedding.samples must be at least 64");
    E.samples = static_cast<std::uint64_t>(samples);
    if (e.contains("probes")) E.probes = parse_probes(e.at("probes"));
    E.delta = get_optional(e, "delta", where);
    E.z = get_optional(e, "z", where);
    E.a = get_optional(e, "a", where);
    E.s = get_optional(e, "s", where);
    E.R = get_number(e, "R", where, E.R);
    if (e.contains("h")) E.h = weight_to_json(weight_from_json(e.at("h")));
    if (e.contains("k1")) E.k1 = weight_to_json(weight_from_json(e.at("k1")));
    if (e.contains("k2")) E.k2 = weight_to_json(weight_from_json(e.at("k2")));
  }

  if (j.contains("sconst")) {
    auto const& s = j.at("sconst");
    allow_keys(s, "sconst", {"q", "domain", "radius", "profile", "radii", "M"});
    auto& S = c.sconst;
    S.q = get_optional(s, "q", "sconst");
    S.domain = get_string(s, "domain", "sconst", S.domain);
    if (S.domain != "whole" && S.domain != "ball" && S.domain != "exterior")
      bad("sconst.domain must be \"whole\", \"ball\" or \"exterior\"");
    S.radius = get_number(s, "radius", "sconst", S.radius);
    if (!(S.radius > 0.0)) bad("sconst.radius must be positive");
    S.profile = get_bool(s, "profile", "sconst", false);
    S.radii = get_doubles(s, "radii", "sconst");
    for (double r : S.radii)
      if (!(r > 0.0)) bad("sconst.radii must be positive");
    S.M = static_cast<int>(get_int(s, "M", "sconst", S.M));
    if (S.M < 8) bad("sconst.M must satisfy M >= 8");
  }

  if (j.contains("threshold")) {
    auto const& t = j.at("threshold");
    allow_keys(t, "threshold", {"numeric", "sigmas"});
    c.threshold.numeric = get_bool(t, "numeric", "threshold", false);
    c.threshold.sigmas = get_doubles(t, "sigmas", "threshold");
  }

  if (j.contains("dichotomy")) {
    auto const& d = j.at("dichotomy");
    allow_keys(d, "dichotomy", {"deltas"});
    c.deltas = get_doubles(d, "deltas", "dichotomy");
  }

  if (j.contains("pohozaev")) {
    auto const& p = j.at("pohozaev");
    allow_keys(p, "pohozaev", {"solve"});
    c.pohozaev_solve = get_bool(p, "solve", "pohozaev", false);
  }

  try {
    problem_from(c).validate();
  } catch (Error const& e) {
    bad(e.what());
  }
  return c;
}

json emit_config(RunConfig const& c) {
  json j;
  j["N"] = c.N;
  j["p"] = c.p;
  j["weight"] = c.weight;
  j["group"] = c.group;
  j["grid"] = {{"map", c.grid.map == MapKind::algebraic ? "algebraic" : "log"}, {"M", c.grid.M}, {"L", c.grid.L}};
  j["solver"] = {{"tol", c.solver.tol},
                 {"max_descent", c.solver.max_descent},
                 {"max_newton", c.solver.max_newton},
                 {"seed", c.solver.seed}};

  auto const& E = c.embedding;
  json e = {{"criteria", E.criteria}, {"samples", E.samples}, {"R", E.R}};
  if (E.q) e["q"] = *E.q;
  if (E.probes) e["probes"] = probes_json(*E.probes);
  if (E.delta) e["delta"] = *E.delta;
  if (E.z) e["z"] = *E.z;
  if (E.a) e["a"] = *E.a;
  if (E.s) e["s"] = *E.s;
  if (E.h) e["h"] = *E.h;
  if (E.k1) e["k1"] = *E.k1;
  if (E.k2) e["k2"] = *E.k2;
  j["embedding"] = e;

  auto const& S = c.sconst;
  json s = {{"domain", S.domain}, {"radius", S.radius}, {"profile", S.profile}, {"radii", S.radii}, {"M", S.M}};
  if (S.q) s["q"] = *S.q;
  j["sconst"] = s;

  j["threshold"] = {{"numeric", c.threshold.numeric}, {"sigmas", c.threshold.sigmas}};
  j["dichotomy"] = {{"deltas", c.deltas}};
  j["pohozaev"] = {{"solve", c.pohozaev_solve}};
  return j;
}

ProblemSpec problem_from(RunConfig const& c) {
  return ProblemSpec{c.N, c.p, weight_from_json(c.weight), group_from_string(c.group)};
}

GridPtr grid_from(RunConfig const& c) { return build_grid(c.grid.map, c.grid.M, c.grid.L, c.N); }

SolverOptions solver_options_from(RunConfig const& c) {
  SolverOptions o;
  o.tol = c.solver.tol;
  o.max_descent = c.solver.max_descent;
  o.max_newton = c.solver.max_newton;
  o.seed = c.solver.seed;
  return o;
}

}  // namespace emden::cli
