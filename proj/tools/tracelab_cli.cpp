// tracelab: spectra, trace identity and operator bounds for complex
// potentials on the half-line.
//
//   tracelab all --config run.json --out reports --svg
//   tracelab theorem --out reports --tol-scale 2

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "tracelab/harness.hpp"

using namespace tracelab;

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks for Schrodinger operators with complex potentials"};
  app.require_subcommand(1);

  std::string config_path;
  OutputOptions out;
  std::optional<std::uint64_t> seed;
  double tol_scale = 1.0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON run configuration (default corpus if absent)")
        ->check(CLI::ExistingFile);
    sub->add_option("--out", out.out_dir, "directory for report files");
    sub->add_option("--format", out.format, "report format")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_flag("--svg", out.svg, "write k-plane and lambda-plane plots");
    sub->add_option("--seed", seed, "seed for randomized checks");
    sub->add_option("--tol-scale", tol_scale, "multiply every tolerance")
        ->check(CLI::PositiveNumber);
  };
  struct Command {
    const char* name;
    const char* help;
    std::set<Task> tasks;
  };
  const Command commands[] = {
      {"spectrum", "find eigenvalues", {Task::spectrum}},
      {"trace", "check the trace identity", {Task::spectrum, Task::trace}},
      {"bounds", "operator-norm, Schatten and determinant checks", {Task::bounds}},
      {"theorem", "eigenvalue sum table", {Task::spectrum, Task::theorem}},
      {"all", "every task requested by the config", {}},
  };
  std::vector<std::pair<CLI::App*, const Command*>> subs;
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    add_common(sub);
    subs.emplace_back(sub, &c);
  }
  CLI11_PARSE(app, argc, argv);

  RunConfig cfg;
  try {
    cfg = config_path.empty() ? default_config() : load_config(config_path);
    for (const auto& [sub, cmd] : subs) {
      if (sub->parsed() && !cmd->tasks.empty()) cfg.tasks = cmd->tasks;
    }
    if (seed) cfg.seed = *seed;
    scale_tolerances(cfg, tol_scale);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  RunResult res;
  try {
    res = run_config(cfg, out);
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
  std::size_t passed = 0;
  for (const auto& ck : res.checks) passed += ck.passed ? 1 : 0;
  std::printf("%zu of %zu checks passed\n", passed, res.checks.size());
  for (const auto& line : res.failures) std::printf("FAILED %s\n", line.c_str());
  if (!res.theorem.rows.empty()) {
    std::printf("%-10s %-12s %5s %12s %12s %12s\n", "id", "c", "zeros", "lhs", "rhs_core", "ratio");
    for (const auto& r : res.theorem.rows) {
      std::printf("%-10s %-12g %5d %12.6g %12.6g %12.6g\n", r.id.c_str(), r.c.real(), r.zeros,
                  r.lhs, r.rhs_core, r.ratio);
    }
  }
  for (const auto& c : res.theorem.constants) {
    std::printf("%s = %.6g (stability %.2g)\n", c.name.c_str(), c.value, c.stability);
  }
  return res.exit_code;
}
