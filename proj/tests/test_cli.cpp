#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "config.hpp"
#include "doctest.h"

using namespace emden;
using namespace emden::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch() {
  auto const dir = fs::temp_directory_path() / ("emden_cli_test_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

fs::path write(std::string const& name, std::string const& text) {
  auto const path = scratch() / name;
  std::ofstream(path) << text;
  return path;
}

std::string slurp(fs::path const& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run(std::string const& args) {
  std::string const cmd = std::string(EMDEN_CLI_PATH) + " " + args + " 2>" + (scratch() / "stderr.txt").string();
  int const status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

json run_json(std::string const& command, fs::path const& cfg, int expected = 0) {
  auto const out = scratch() / (command + ".json");
  REQUIRE(run(command + " --config " + cfg.string() + " --out " + out.string()) == expected);
  return json::parse(slurp(out));
}

}  // namespace

TEST_CASE("config round trip is canonical and stable") {
  auto const raw = json::parse(R"({
    "N": 3, "p": 4.0,
    "weight": {"family": "sum", "terms": [
      {"family": "shifted_power", "delta": 1.5},
      {"family": "product", "profile": {"family": "bump", "height": 1, "center": 2, "width": 0.5}, "delta": 0.3}]},
    "group": "cyclic:4",
    "grid": {"map": "log", "M": 512, "L": 0.1},
    "solver": {"tol": 1e-9, "max_iterations": 7, "seed": 3},
    "embedding": {"q": 3.5, "criteria": ["critical_decay"], "samples": 4096,
                  "h": {"family": "sum_of_translates", "centers": [[0, 0, 1]], "coefficients": [0.5],
                        "envelope": {"family": "broken_power", "c": 1, "a0": 0, "ainf": -3}, "exponent": 1.0},
                  "probes": {"centers": [[0, 0, 0]], "radii": [0.5, 1], "cutoffs": [2], "scales": [1]}},
    "sconst": {"domain": "ball", "radius": 2.0},
    "dichotomy": {"deltas": [0.1, 0.2]}
  })");
  auto const once = emit_config(parse_config(raw));
  auto const twice = emit_config(parse_config(once));
  CHECK(once == twice);
  CHECK(dump17(once) == dump17(twice));
  CHECK(json::parse(dump17(once)) == once);
  CHECK(once["solver"]["max_descent"] == 7);
  CHECK(once["solver"]["max_newton"] == 7);
  CHECK(once["weight"]["terms"][0]["c"] == 1.0);
}

TEST_CASE("every weight family survives JSON") {
  std::vector<WeightSpec> const ws = {
      WeightSpec::constant(2.0),
      WeightSpec::power_law(1.0, 0.5),
      WeightSpec::shifted_power(1.5, 3.0),
      WeightSpec::broken_power(1.0, 0.5, -2.0),
      WeightSpec::bump(1.0, 2.0, 0.25),
      WeightSpec::product(WeightSpec::shifted_power(1.0), 0.5),
      WeightSpec::signed_pair(WeightSpec::constant(1.0), WeightSpec::bump(1.0, 5.0, 0.1)),
      WeightSpec::sampled_radial({0.5, 1.0, 2.0, 4.0}, {1.0, 0.5, 0.25, 0.125}),
  };
  for (auto const& w : ws) {
    auto const j = weight_to_json(w);
    auto const back = weight_from_json(json::parse(dump17(j)));
    CHECK(weight_to_json(back) == j);
    for (double r : {0.3, 1.0, 3.7}) CHECK(back(r) == w(r));
  }
}

TEST_CASE("floats are written with 17 significant digits") {
  auto const text = dump17(json{{"x", 0.1}, {"inf", num(1.0 / 0.0)}});
  CHECK(text.find("0.10000000000000001") != std::string::npos);
  CHECK(text.find("\"inf\"") != std::string::npos);
}

TEST_CASE("invalid configs are rejected with the violated condition") {
  auto const check = [](char const* text, char const* needle) {
    try {
      parse_config(json::parse(text));
      FAIL("accepted: " << text);
    } catch (ConfigError const& e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  check(R"({"N": 2, "p": 4, "weight": {"family": "constant", "c": 1}})", "N >= 3");
  check(R"({"N": 3, "p": 2, "weight": {"family": "constant", "c": 1}})", "p > 2");
  check(R"({"N": 3, "p": 4, "weight": {"family": "nope"}})", "unknown weight family");
  check(R"({"N": 3, "p": 4, "weight": {"family": "constant", "c": 1}, "group": "cyclic:0"})", "cyclic");
  check(R"({"N": 3, "p": 4, "weight": {"family": "constant", "c": 1}, "grid": {"M": 4}})", "M >= 8");
  check(R"({"N": 3, "p": 4, "weight": {"family": "constant", "c": 1}, "typo": 1})", "unknown key");
}

TEST_CASE("binary: exit codes") {
  auto const good = write("good.json", R"({"N": 3, "p": 4, "weight": {"family": "shifted_power", "delta": 1.5}})");
  auto const profile = scratch() / "profile.csv";
  auto const out = scratch() / "solve.json";
  CHECK(run("solve --config " + good.string() + " --out " + out.string() + " --profile " + profile.string()) == 0);
  auto const report = json::parse(slurp(out));
  CHECK(report["results"]["status"] == "converged");
  CHECK(report["command"] == "solve");
  CHECK(report["tolerances"]["tol"] == 1e-8);
  auto const csv = slurp(profile);
  CHECK(csv.rfind("r,u\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2001);

  auto const n2 = write("n2.json", R"({"N": 2, "p": 4, "weight": {"family": "shifted_power", "delta": 1.5}})");
  CHECK(run("solve --config " + n2.string()) == 2);
  CHECK(slurp(scratch() / "stderr.txt").find("N >= 3") != std::string::npos);

  auto const capped = write("capped.json",
                            R"({"N": 3, "p": 4, "weight": {"family": "shifted_power", "delta": 1.5},
                                "solver": {"max_iterations": 1}})");
  auto const failed = run_json("solve", capped, 3);
  CHECK(failed["results"]["status"] == "failed");
  CHECK(failed["results"]["pde_residual"].get<double>() > 1e-8);

  CHECK(run("solve --config " + (scratch() / "missing.json").string()) == 4);
  CHECK(run("solve --config " + good.string() + " --out /nonexistent_dir/x.json") == 4);
  CHECK(run("solve") == 2);
  CHECK(run("solve --config " + write("broken.json", "{\"N\": 3,").string()) == 2);
}

TEST_CASE("binary: deterministic reports") {
  auto const cfg = write("det.json", R"({"N": 3, "p": 4, "weight": {"family": "shifted_power", "delta": 2.0}})");
  auto a = run_json("solve", cfg);
  auto b = run_json("solve", cfg);
  a.erase("timings");
  b.erase("timings");
  CHECK(dump17(a) == dump17(b));
}

TEST_CASE("binary: dichotomy sweep") {
  auto const cfg = write("dich.json", R"({"N": 3, "p": 4, "weight": {"family": "shifted_power", "delta": 1},
                                          "dichotomy": {"deltas": [0.5, 0.75, 1.0, 1.25, 1.5, 2.0]}})");
  auto const out = scratch() / "dich.json.out";
  REQUIRE(run("dichotomy --config " + cfg.string() + " --out " + out.string()) == 0);
  auto const r = json::parse(slurp(out))["results"];
  CHECK(r["exclusivity_holds"] == true);
  for (int i = 0; i < 3; ++i) {
    CHECK(r["rows"][i]["certificate"] == "nonexistence_certified");
    CHECK(r["rows"][i]["solver_status"] == "not_attempted");
  }
  for (int i = 3; i < 6; ++i) {
    CHECK(r["rows"][i]["solver_status"] == "converged");
    CHECK(r["rows"][i]["level"].get<double>() > 0.0);
  }
  auto const csv = slurp(out.string() + ".csv");
  CHECK(csv.rfind("delta,certificate,solver_status,level", 0) == 0);

  auto const empty = write("empty.json", R"({"N": 3, "p": 4, "weight": {"family": "shifted_power", "delta": 1},
                                             "dichotomy": {"deltas": []}})");
  CHECK(run("dichotomy --config " + empty.string()) == 2);
}

TEST_CASE("binary: embed, sconst, threshold, pohozaev") {
  auto const sp = write("sp.json", R"({"N": 3, "p": 4, "weight": {"family": "shifted_power", "delta": 1.5}})");
  CHECK(run_json("embed", sp)["results"]["compactness"] == "holds");

  auto const pl = write("pl.json", R"({"N": 3, "p": 4, "weight": {"family": "power_law", "delta": 1}})");
  auto const emb = run_json("embed", pl)["results"];
  CHECK(emb["compactness"] == "fails");
  for (auto const& pt : emb["small_scale_curve"])
    CHECK(pt[1].get<double>() == doctest::Approx(2.0 * 3.141592653589793).epsilon(1e-3));

  std::string nodes = "[", values = "[";
  for (int i = 0; i < 5; ++i) {
    double const r = 0.5 + i;
    nodes += (i ? "," : "") + std::to_string(r);
    values += (i ? "," : "") + std::to_string(1.0 / (1.0 + r));
  }
  auto const sampled = write("sampled.json", R"({"N": 3, "p": 4, "weight": {"family": "sampled_radial", "nodes": )" +
                                                 nodes + "], \"values\": " + values + "]}}");
  auto const inc = run_json("embed", sampled)["results"];
  CHECK(inc["compactness"] == "inconclusive");
  CHECK_FALSE(inc["tail_curve"].empty());

  auto const S = run_json("sconst", pl)["results"];
  CHECK(S["value"].get<double>() == doctest::Approx(2.894).epsilon(0.01));

  auto const prof = run_json("sconst", write("prof.json", R"({"N": 3, "p": 4,
      "weight": {"family": "shifted_power", "delta": 1.5}, "sconst": {"profile": true}})"))["results"];
  CHECK(prof["infinity_flag"] == true);
  CHECK(prof["origin_flag"] == true);

  auto const th = run_json("threshold", pl)["results"];
  double const s0 = th["terms"][0]["S"]["lower"].get<double>();
  CHECK(th["c0"].get<double>() == doctest::Approx(0.25 * s0 * s0).epsilon(1e-12));

  auto const cert = run_json("pohozaev", write("half.json", R"({"N": 3, "p": 4,
      "weight": {"family": "shifted_power", "delta": 0.5}})"))["results"];
  CHECK(cert["certificate"]["verdict"] == "nonexistence_certified");
}
