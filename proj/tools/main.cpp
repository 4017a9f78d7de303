#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "config.hpp"
#include "emden/constants.hpp"
#include "emden/core/error.hpp"
#include "emden/embedding.hpp"
#include "emden/pohozaev.hpp"
#include "emden/solver.hpp"

#ifndef EMDEN_VERSION
#define EMDEN_VERSION "0.0.0"
#endif

using namespace emden;
using namespace emden::cli;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitIo = 4;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Outcome {
  json results;
  json tolerances;
  int exit_code = kExitOk;
  std::optional<std::string> profile_csv;
  std::optional<std::string> table_csv;
};

bool g_verbose = false;

void log(std::string const& msg) {
  if (g_verbose) std::cerr << "[emden] " << msg << "\n";
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string profile_csv(RadialFunction const& u) {
  std::string out = "r,u\n";
  auto const r = u.grid()->nodes();
  for (std::size_t i = 0; i < u.size(); ++i) out += fmt17(r[i]) + "," + fmt17(u[i]) + "\n";
  return out;
}

json pairs_json(std::vector<std::pair<double, double>> const& v) {
  json a = json::array();
  for (auto const& [x, y] : v) a.push_back({num(x), num(y)});
  return a;
}

json solve_json(SolveResult const& r) {
  return {{"status", to_string(r.status)},
          {"message", r.message},
          {"level", num(r.level)},
          {"nehari_residual", num(r.nehari_residual)},
          {"pde_residual", num(r.pde_residual)},
          {"pohozaev_residual", r.pohozaev_residual ? num(*r.pohozaev_residual) : json(nullptr)},
          {"descent_iterations", r.descent_iterations},
          {"newton_iterations", r.newton_iterations},
          {"concentration",
           {{"verdict", to_string(r.concentration.verdict)},
            {"tail_fraction", pairs_json(r.concentration.tail_fraction)},
            {"peak_ball_fraction", pairs_json(r.concentration.peak_ball_fraction)}}}};
}

json certificate_json(Certificate const& c) {
  json evidence = json::array();
  for (auto const& s : c.evidence) evidence.push_back({num(s.r), num(s.value)});
  return {{"verdict", to_string(c.verdict)},
          {"delta0", num(c.delta0)},
          {"sign_at_origin", c.sign_at_origin},
          {"sign_at_infinity", c.sign_at_infinity},
          {"sign_change", c.sign_change ? num(*c.sign_change) : json(nullptr)},
          {"method", c.method},
          {"reason", c.reason},
          {"evidence", evidence}};
}

json curve_json(std::vector<CurvePoint> const& v) {
  json a = json::array();
  for (auto const& p : v) a.push_back({num(p.at), num(p.value)});
  return a;
}

json s_points_json(std::vector<SPoint> const& v) {
  json a = json::array();
  for (auto const& p : v) a.push_back({num(p.r), p.infinite ? json("inf") : num(p.value), num(p.raw)});
  return a;
}

json interval_json(SInterval const& s) { return {{"lower", num(s.lower)}, {"upper", num(s.upper)}}; }

json optional_num(std::optional<double> const& v) { return v ? num(*v) : json(nullptr); }

// --- subcommands ------------------------------------------------------------

Outcome cmd_solve(RunConfig const& cfg) {
  auto const spec = problem_from(cfg);
  auto const grid = grid_from(cfg);
  log("solving on " + std::to_string(cfg.grid.M) + " nodes");
  auto const res = solve(spec, grid, solver_options_from(cfg));
  log(std::string("status ") + to_string(res.status));

  Outcome o;
  o.results = solve_json(res);
  o.tolerances = {{"tol", cfg.solver.tol}};
  if (res.solution) o.profile_csv = profile_csv(*res.solution);
  if (res.status != SolveStatus::converged) o.exit_code = kExitSolver;
  return o;
}

Outcome cmd_embed(RunConfig const& cfg) {
  auto const k = weight_from_json(cfg.weight);
  auto const& E = cfg.embedding;
  double const q = E.q.value_or(cfg.p);
  BallMassOptions bo;
  bo.sampling.samples = E.samples;
  log("compactness check, q = " + fmt17(q));
  auto const rep = compactness_check(k, q, cfg.N, E.probes, bo);

  json results = {{"q", q},
                  {"N", cfg.N},
                  {"continuity", to_string(rep.continuity)},
                  {"compactness", to_string(rep.compactness)},
                  {"rationale", rep.rationale},
                  {"sup_estimate", rep.sup_infinite ? json("inf") : num(rep.sup_estimate)},
                  {"origin_exponent", optional_num(rep.origin_exponent)},
                  {"infinity_exponent", optional_num(rep.infinity_exponent)},
                  {"interior_exponent", num(rep.interior_exponent)},
                  {"monte_carlo", rep.monte_carlo},
                  {"sampling_inconclusive", rep.sampling_inconclusive},
                  {"tail_curve", curve_json(rep.tail_curve)},
                  {"small_scale_curve", curve_json(rep.small_scale_curve)}};

  CriterionParams params;
  params.N = cfg.N;
  params.p = cfg.p;
  params.delta = E.delta;
  params.z = E.z;
  params.R = E.R;
  params.a = E.a;
  params.s = E.s;
  if (E.h) params.h = weight_from_json(*E.h);
  if (E.k1) params.k1 = weight_from_json(*E.k1);
  if (E.k2) params.k2 = weight_from_json(*E.k2);
  json criteria = json::array();
  for (auto const& name : E.criteria) {
    auto const id = *criterion_from_string(name);
    auto const cr = sufficient_criterion(k, q, id, params);
    json row = {{"criterion", name},
                {"verdict", to_string(cr.verdict)},
                {"reason", cr.reason},
                {"positivity_assumed", cr.positivity_assumed}};
    if (cr.integral)
      row["integral"] = {{"value", num(cr.integral->value)},
                         {"status", to_string(cr.integral->status)},
                         {"ratio", num(cr.integral->ratio)},
                         {"shells", cr.integral->shells}};
    criteria.push_back(row);
  }
  results["criteria"] = criteria;

  Outcome o;
  o.results = results;
  o.tolerances = {{"exponent_tolerance", rep.exponent_tolerance},
                  {"monte_carlo_max_rel_error", bo.max_rel_error},
                  {"samples", E.samples}};
  return o;
}

Outcome cmd_dichotomy(RunConfig const& cfg) {
  if (cfg.deltas.empty()) throw ConfigError("dichotomy needs a nonempty delta grid (dichotomy.deltas)");
  if (cfg.weight.at("family") != "shifted_power")
    throw ConfigError("dichotomy requires the shifted_power weight family");
  double const c = cfg.weight.at("c").get<double>();
  auto const grid = grid_from(cfg);
  auto const opts = solver_options_from(cfg);
  std::size_t const n = cfg.deltas.size();

  struct Row {
    Certificate cert;
    std::optional<SolveResult> solve;
    std::string error;
  };
  std::vector<Row> rows(n);

#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t i = 0; i < n; ++i) {
    double const d = cfg.deltas[i];
    try {
      auto const w = WeightSpec::shifted_power(d, c);
      rows[i].cert = nonexistence_certificate(w, cfg.N, cfg.p);
      if (rows[i].cert.verdict != CertificateVerdict::nonexistence_certified)
        rows[i].solve = solve(ProblemSpec{cfg.N, cfg.p, w, group_from_string(cfg.group)}, grid, opts);
    } catch (std::exception const& e) {
      rows[i].error = e.what();
    }
  }

  json table = json::array();
  std::string csv = "delta,certificate,solver_status,level,nehari_residual,pde_residual,exclusive\n";
  bool all_exclusive = true;
  for (std::size_t i = 0; i < n; ++i) {
    auto const& row = rows[i];
    bool const certified = row.cert.verdict == CertificateVerdict::nonexistence_certified;
    bool const converged = row.solve && row.solve->status == SolveStatus::converged;
    bool const exclusive = !(certified && converged);
    all_exclusive = all_exclusive && exclusive;
    std::string const status =
        !row.error.empty() ? "error" : row.solve ? to_string(row.solve->status) : "not_attempted";
    json j = {{"delta", cfg.deltas[i]},
              {"certificate", row.error.empty() ? to_string(row.cert.verdict) : "error"},
              {"solver_status", status},
              {"exclusive", exclusive}};
    if (!row.error.empty()) j["error"] = row.error;
    if (row.solve) {
      j["level"] = num(row.solve->level);
      j["nehari_residual"] = num(row.solve->nehari_residual);
      j["pde_residual"] = num(row.solve->pde_residual);
      j["message"] = row.solve->message;
    }
    table.push_back(j);
    csv += fmt17(cfg.deltas[i]) + "," + j["certificate"].get<std::string>() + "," + status + ",";
    if (row.solve)
      csv += fmt17(row.solve->level) + "," + fmt17(row.solve->nehari_residual) + "," +
             fmt17(row.solve->pde_residual);
    else
      csv += ",,";
    csv += std::string(",") + (exclusive ? "true" : "false") + "\n";
    log("delta " + fmt17(cfg.deltas[i]) + ": " + j["certificate"].get<std::string>() + ", " + status);
  }

  Outcome o;
  o.results = {{"delta0", delta0(cfg.N, cfg.p)}, {"exclusivity_holds", all_exclusive}, {"rows", table}};
  o.tolerances = {{"tol", cfg.solver.tol}};
  o.table_csv = csv;
  return o;
}

Outcome cmd_sconst(RunConfig const& cfg) {
  auto const k = weight_from_json(cfg.weight);
  auto const& S = cfg.sconst;
  double const q = S.q.value_or(cfg.p);
  Outcome o;

  if (S.profile) {
    SProfileOptions so;
    so.M = S.M;
    auto const radii = S.radii.empty() ? default_s_radii() : S.radii;
    log("s-profile over " + std::to_string(radii.size()) + " radii");
    auto const prof = s_profile(k, q, cfg.N, radii, so);
    o.results = {{"q", q},
                 {"exterior", s_points_json(prof.exterior)},
                 {"origin", s_points_json(prof.origin)},
                 {"s_infinity", num(prof.s_infinity)},
                 {"s_origin", num(prof.s_origin)},
                 {"infinity_flag", prof.infinity_flag},
                 {"origin_flag", prof.origin_flag},
                 {"exterior_monotone", prof.exterior_monotone},
                 {"origin_monotone", prof.origin_monotone}};
    o.tolerances = {{"growth_factor", so.growth_factor},
                    {"monotone_rtol", so.monotone_rtol},
                    {"gtol", so.rayleigh.descent.gtol}};
    return o;
  }

  Domain dom = Domain::whole();
  if (S.domain == "ball") dom = Domain::ball(S.radius);
  if (S.domain == "exterior") dom = Domain::exterior(S.radius);
  auto grid = grid_from(cfg);
  if (dom.kind != DomainKind::whole) grid = build_grid(cfg.grid.map, cfg.grid.M, S.radius, cfg.N);
  RayleighOptions ro;
  ro.require_convergence = dom.kind == DomainKind::whole;
  log("rayleigh minimization on " + dom.name());
  auto const res = rayleigh_min(dom, k, q, grid, ro);
  o.results = {{"q", q},
               {"domain", dom.name()},
               {"value", res.infinite ? json("inf") : num(res.value)},
               {"infinite", res.infinite},
               {"converged", res.converged},
               {"iterations", res.iterations},
               {"residual", num(res.residual)},
               {"start", res.start}};
  o.tolerances = {{"gtol", ro.descent.gtol}};
  if (res.minimizer) o.profile_csv = profile_csv(*res.minimizer);
  return o;
}

Outcome cmd_threshold(RunConfig const& cfg) {
  auto const spec = problem_from(cfg);
  std::optional<SProfile> prof;
  if (cfg.threshold.numeric) {
    SProfileOptions so;
    so.M = cfg.sconst.M;
    log("numeric s-profile for the threshold");
    prof = s_profile(spec.weight.positive_part(), cfg.p, cfg.N, default_s_radii(), so);
  }
  auto const c0 = c0_threshold(spec, prof ? &*prof : nullptr);

  std::vector<double> sigmas = cfg.threshold.sigmas;
  if (sigmas.empty())
    for (int j = -6; j <= 6; ++j) sigmas.push_back(std::pow(10.0, j / 2.0));
  auto const tf = test_function_bound(spec, sigmas);

  json terms = json::array();
  for (auto const& t : c0.terms)
    terms.push_back({{"point", t.point},
                     {"orbit", t.orbit.infinite ? json("inf") : json(t.orbit.count)},
                     {"S", interval_json(t.s)}});
  json test_fn = {{"verdict", to_string(tf.verdict)},
                  {"witness_sigma", optional_num(tf.witness_sigma)},
                  {"k_c", num(tf.k_c)},
                  {"bound", num(tf.bound)},
                  {"reason", tf.reason},
                  {"sigma", tf.sigma},
                  {"mass", tf.mass},
                  {"surplus", tf.surplus}};

  Outcome o;
  o.results = {{"c0", c0.infinite ? json("inf") : num(c0.value)},
               {"c0_upper", num(c0.upper)},
               {"infinite", c0.infinite},
               {"delta", num(c0.delta)},
               {"group", spec.group.name()},
               {"terms", terms},
               {"test_function", test_fn}};
  o.tolerances = {{"exponent_tolerance", 1e-9}, {"surplus_tolerance", 1e-10}};
  return o;
}

Outcome cmd_pohozaev(RunConfig const& cfg) {
  auto const spec = problem_from(cfg);
  auto const cert = nonexistence_certificate(spec.weight, cfg.N, cfg.p);
  Outcome o;
  o.results = {{"certificate", certificate_json(cert)}};
  o.tolerances = {{"delta_tolerance", 1e-12}, {"sampled_margin", 10.0}, {"identity_tolerance", 1e-3}};
  if (cfg.pohozaev_solve) {
    log("solving for the identity check");
    auto const res = solve(spec, grid_from(cfg), solver_options_from(cfg));
    json s = solve_json(res);
    if (res.solution) {
      auto const lhs = pohozaev_lhs(*res.solution, pohozaev_profile(spec), delta0(cfg.N, cfg.p), spec);
      auto const gap = pohozaev_identity_gap(*res.solution, spec);
      s["pohozaev_integral"] = {{"value", num(lhs.value)},
                                {"absolute", num(lhs.absolute)},
                                {"relative", num(lhs.relative())},
                                {"tail_warning", lhs.tail_warning}};
      s["identity_gap"] = {{"gap", num(gap.gap)},
                           {"energy_term", num(gap.energy_term)},
                           {"nonlinear_term", num(gap.nonlinear_term)},
                           {"derivative_term", num(gap.derivative_term)}};
      o.profile_csv = profile_csv(*res.solution);
    }
    o.results["solution"] = s;
    o.tolerances["tol"] = cfg.solver.tol;
    if (res.status != SolveStatus::converged) o.exit_code = kExitSolver;
  }
  return o;
}

// --- plumbing ---------------------------------------------------------------

std::string read_file(std::string const& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path);
  return ss.str();
}

void write_file(std::string const& path, std::string const& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  out.flush();
  if (!out) throw IoError("cannot write " + path);
}

int exit_for(Error const& e) {
  switch (e.kind()) {
    case ErrorKind::invalid_argument:
      return kExitConfig;
    case ErrorKind::io:
      return kExitIo;
    default:
      return kExitSolver;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted Emden-Fowler toolkit"};
  app.set_version_flag("--version", EMDEN_VERSION);
  app.require_subcommand(1);

  std::string config_path, out_path, profile_path;
  int threads = 0;

  std::vector<std::pair<std::string, std::string>> const commands = {
      {"solve", "ground state by Nehari minimization and Newton"},
      {"embed", "continuity and compactness of the weighted embedding"},
      {"dichotomy", "certificate or solver over a delta grid"},
      {"sconst", "best constants on whole space, balls or exteriors"},
      {"threshold", "c0 threshold and the test-function bound"},
      {"pohozaev", "nonexistence certificate from the Pohozaev identity"}};
  for (auto const& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "JSON run configuration")->required();
    sub->add_option("--out", out_path, "report path (default: stdout)");
    sub->add_option("--profile", profile_path, "CSV path for the computed profile");
    sub->add_option("--threads", threads, "OpenMP thread count")->check(CLI::PositiveNumber);
    sub->add_flag("--verbose", g_verbose, "progress on stderr");
  }

  try {
    app.parse(argc, argv);
  } catch (CLI::ParseError const& e) {
    int const code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  std::string const command = app.get_subcommands().front()->get_name();
  if (threads > 0) omp_set_num_threads(threads);

  RunConfig cfg;
  json echo;
  try {
    json raw;
    try {
      raw = json::parse(read_file(config_path));
    } catch (json::parse_error const& e) {
      throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    cfg = parse_config(raw);
    echo = emit_config(cfg);
  } catch (IoError const& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (ConfigError const& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return kExitConfig;
  }

  auto const t0 = std::chrono::steady_clock::now();
  Outcome outcome;
  try {
    if (command == "solve") outcome = cmd_solve(cfg);
    else if (command == "embed") outcome = cmd_embed(cfg);
    else if (command == "dichotomy") outcome = cmd_dichotomy(cfg);
    else if (command == "sconst") outcome = cmd_sconst(cfg);
    else if (command == "threshold") outcome = cmd_threshold(cfg);
    else outcome = cmd_pohozaev(cfg);
  } catch (ConfigError const& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return kExitConfig;
  } catch (Error const& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_for(e);
  }
  double const seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  json report = {{"command", command},
                 {"version", EMDEN_VERSION},
                 {"config", echo},
                 {"results", outcome.results},
                 {"tolerances", outcome.tolerances},
                 {"timings", {{"wall_seconds", seconds}}}};
  try {
    std::string const text = dump17(report);
    if (out_path.empty()) std::cout << text;
    else write_file(out_path, text);
    if (!profile_path.empty() && outcome.profile_csv) write_file(profile_path, *outcome.profile_csv);
    if (outcome.table_csv && !out_path.empty()) write_file(out_path + ".csv", *outcome.table_csv);
  } catch (IoError const& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  if (outcome.exit_code == kExitSolver) std::cerr << "solver did not converge\n";
  return outcome.exit_code;
}
