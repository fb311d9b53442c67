#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "tracelab/harness.hpp"
#include "tracelab/oracle.hpp"

using namespace tracelab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json well4_doc() {
  return json::parse(R"({
    "tasks": ["spectrum", "trace"],
    "potential": { "well4": { "kind": "step", "segments": [[0, 1, -4]] } }
  })");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("tracelab_unit_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("empty potential list") {
  const RunConfig cfg = parse_config(json::object());
  CHECK(cfg.potentials.empty());
  const RunResult res = run_config(cfg);
  CHECK(res.exit_code == 0);
  CHECK(res.failures.empty());
  CHECK(res.report["summary"]["exit_code"] == 0);
}

TEST_CASE("single well passes the trace check") {
  const RunResult res = run_config(parse_config(well4_doc()));
  CHECK(res.exit_code == 0);
  bool seen = false;
  for (const auto& ck : res.checks) {
    if (ck.name != "trace identity") continue;
    seen = true;
    CHECK(ck.passed);
    CHECK(ck.observed <= 1e-5);
  }
  CHECK(seen);
}

TEST_CASE("forced tolerance fails the trace check") {
  json doc = well4_doc();
  doc["tolerances"] = {{"trace", 1e-15}};
  const RunResult res = run_config(parse_config(doc));
  CHECK(res.exit_code == 1);
  REQUIRE(res.failures.size() == 1);
  CHECK(res.failures[0].find("trace identity") != std::string::npos);
}

TEST_CASE("tolerance scaling") {
  RunConfig cfg = default_config();
  const double before = cfg.tolerances.det_match;
  scale_tolerances(cfg, 3.0);
  CHECK(cfg.tolerances.det_match == doctest::Approx(3.0 * before));
  for (const auto& np : cfg.potentials) {
    if (np.trace_tolerance) CHECK(*np.trace_tolerance > 1e-4);
  }
  CHECK_THROWS_AS(scale_tolerances(cfg, 0.0), ConfigError);
}

TEST_CASE("malformed configs are rejected") {
  const char* bad[] = {
      R"([1, 2])",
      R"({"colour": 1})",
      R"({"p": 1.5})",
      R"({"tasks": ["spectrum", "plot"]})",
      R"({"tasks": []})",
      R"({"sweep": [0]})",
      R"({"seed": 1.5})",
      R"({"tolerances": {"trace": -1}})",
      R"({"tolerances": {"tracee": 1}})",
      R"({"bounds": {"n": 2}})",
      R"({"potential": {"a": {"kind": "cube"}}})",
      R"({"potential": {"a": {"kind": "step"}}})",
      R"({"potential": {"a": {"kind": "step", "segments": [[1, 0, -1]]}}})",
      R"({"potential": {"a": {"kind": "gaussian", "amplitude": [1, 2, 3], "width": 1}}})",
      R"({"potential": {"a": {"kind": "gaussian", "amplitude": 1, "width": 1, "depth": 2}}})",
      R"({"p": 0.75, "potential": {"a": {"kind": "power_tail", "amplitude": 1, "exponent": 1.5}}})",
  };
  for (const char* text : bad) {
    CAPTURE(text);
    CHECK_THROWS_AS(parse_config(json::parse(text)), ConfigError);
  }
  CHECK_THROWS_AS(load_config("/nonexistent/tracelab.json"), ConfigError);
}

TEST_CASE("config round trip") {
  const RunConfig cfg = default_config();
  const RunConfig back = parse_config(config_to_json(cfg));
  CHECK(config_to_json(back) == config_to_json(cfg));
  REQUIRE(back.potentials.size() == cfg.potentials.size());
  for (std::size_t i = 1; i < back.potentials.size(); ++i) {
    CHECK(back.potentials[i - 1].id < back.potentials[i].id);
  }
  CHECK(back.sweep.size() == 5);
}

TEST_CASE("theorem row for the free operator") {
  RunConfig cfg;
  cfg.potentials.push_back({"zero", PotentialSpec::zero(), {}});
  const TheoremReport rep = theorem_report(cfg);
  REQUIRE(rep.rows.size() == 1);
  CHECK(rep.rows[0].lhs == 0.0);
  CHECK(rep.rows[0].ratio == 0.0);
}

TEST_CASE("theorem row for the real well") {
  RunConfig cfg;
  cfg.p = 0.5;
  cfg.potentials.push_back({"well4", PotentialSpec::step({{0.0, 1.0, -4.0}}), {}});
  const TheoremReport rep = theorem_report(cfg);
  REQUIRE(rep.rows.size() == 1);
  const double kappa = well_bound_states(4.0, 1.0).at(0);
  const TheoremRow& r = rep.rows[0];
  CHECK(r.lhs == doctest::Approx(kappa).epsilon(1e-9));
  CHECK(r.m1 == doctest::Approx(4.0));
  CHECK(r.mp == doctest::Approx(8.0 / 3.0));
  CHECK(r.ratio == doctest::Approx(kappa / ((8.0 / 3.0) * 2.0 + 4.0)).epsilon(1e-9));
  CHECK(r.ratio == doctest::Approx(0.068361969459132613).epsilon(1e-9));
  for (const auto& ck : rep.checks) {
    CAPTURE(ck.name);
    CHECK(ck.passed);
  }
}

TEST_CASE("csv output and determinism") {
  json doc = well4_doc();
  doc["tasks"] = {"spectrum", "trace", "theorem"};
  doc["seed"] = 9;
  const RunConfig cfg = parse_config(doc);
  const fs::path a = scratch_dir("a"), b = scratch_dir("b");
  run_config(cfg, {a.string(), "csv", true});
  run_config(cfg, {b.string(), "csv", true});
  for (const char* name : {"spectrum.csv", "trace.csv", "checks.csv", "theorem.csv", "constants.json"}) {
    CAPTURE(name);
    REQUIRE(fs::exists(a / name));
    CHECK(slurp(a / name) == slurp(b / name));
  }
  CHECK(slurp(a / "theorem.csv").rfind("id,c,lhs,m1,mp,rhs_core,ratio\n", 0) == 0);
  CHECK(slurp(a / "spectrum.csv").rfind("id,c,k,lambda,residual\n", 0) == 0);
  CHECK(fs::exists(a / "well4_c0_k.svg"));
  CHECK(fs::exists(a / "well4_c0_lambda.svg"));

  const fs::path j1 = scratch_dir("j1"), j2 = scratch_dir("j2");
  run_config(cfg, {j1.string(), "json", false});
  run_config(cfg, {j2.string(), "json", false});
  CHECK(slurp(j1 / "report.json") == slurp(j2 / "report.json"));
  const json rep = json::parse(slurp(j1 / "report.json"));
  CHECK(rep["schema_version"] == 1);
  CHECK(rep["entries"].size() == 1);
}

TEST_CASE("svg plots") {
  const std::string k = kplane_svg("t", {cplx(0.5, 1.0)}, 2.0, 4.0);
  CHECK(k.rfind("<svg", 0) == 0);
  CHECK(k.find("<circle") != std::string::npos);
  CHECK(lambda_svg("t", {}, 1.0).find("</svg>") != std::string::npos);
}
