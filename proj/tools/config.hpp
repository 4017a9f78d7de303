#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "emden/core/grid.hpp"
#include "emden/core/problem.hpp"
#include "emden/embedding.hpp"
#include "emden/solver.hpp"

namespace emden::cli {

using json = nlohmann::json;

/// Raised for malformed or invalid configuration (exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GridConfig {
  MapKind map = MapKind::algebraic;
  int M = 2000;
  double L = 1.0;
};

struct SolverConfig {
  double tol = 1e-8;
  int max_descent = 500;
  int max_newton = 50;
  std::uint64_t seed = 1;
};

struct EmbeddingConfig {
  std::optional<double> q;  // defaults to p
  std::vector<std::string> criteria;
  std::uint64_t samples = std::uint64_t{1} << 16;
  std::optional<ProbeGrid> probes;
  std::optional<double> delta;
  std::optional<double> z;
  std::optional<json> h;
  std::optional<json> k1;
  std::optional<json> k2;
  std::optional<double> a;
  std::optional<double> s;
  double R = 1.0;
};

struct SconstConfig {
  std::optional<double> q;  // defaults to p
  std::string domain = "whole";
  double radius = 1.0;
  bool profile = false;
  std::vector<double> radii;  // empty: default radii
  int M = 2000;
};

struct ThresholdConfig {
  bool numeric = false;
  std::vector<double> sigmas;  // empty: 10^{j/2}, j = -6..6
};

struct RunConfig {
  int N = 3;
  double p = 4.0;
  json weight;  // canonical weight object
  std::string group = "trivial";
  GridConfig grid;
  SolverConfig solver;
  EmbeddingConfig embedding;
  SconstConfig sconst;
  ThresholdConfig threshold;
  std::vector<double> deltas;  // dichotomy sweep
  bool pohozaev_solve = false;
};

RunConfig parse_config(json const& j);
json emit_config(RunConfig const& c);

WeightSpec weight_from_json(json const& j);
json weight_to_json(WeightSpec const& w);
GroupSpec group_from_string(std::string const& s);

ProblemSpec problem_from(RunConfig const& c);
GridPtr grid_from(RunConfig const& c);
SolverOptions solver_options_from(RunConfig const& c);

/// Finite numbers as JSON numbers, infinities as the strings "inf"/"-inf",
/// NaN as null.
json num(double v);

/// Pretty-printed JSON with every floating-point value written using 17
/// significant digits.
std::string dump17(json const& j);

}  // namespace emden::cli
