#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "tracelab/bs_operator.hpp"
#include "tracelab/common.hpp"
#include "tracelab/potential.hpp"
#include "tracelab/spectra.hpp"
#include "tracelab/traceform.hpp"

namespace tracelab {

enum class Task { spectrum, trace, bounds, theorem };

const char* to_string(Task t);
Task parse_task(const std::string& name);  // throws ConfigError

struct NamedPotential {
  std::string id;
  PotentialSpec spec;
  // Overrides Tolerances::trace for this potential.
  std::optional<double> trace_tolerance;
};

// Every check compares an observed value with an expected bound.
struct Tolerances {
  double trace = 1e-5;         // discrepancy <= trace (1 + |lhs|)
  double residual = 1e-8;      // |a(k)| at reported zeros
  double bound_slack = 1e-8;   // relative slack on operator-norm and disk bounds
  double det_match = 1e-4;     // |det(I + UM) - a(k)| / |a(k)|
  double fd_match = 1e-4;      // finite-difference eigenvalues, relative
  double scaling_stability = 0.05;
  double slope_slack = 0.05;
  double theorem_spread = 50.0;
  double constant_stability = 0.1;

  void scale(double factor);
};

struct BoundsSettings {
  int n = 400;                 // Nystrom nodes for the k sweep
  int k_count = 10;
  int scaling_k_count = 8;
  int scaling_n = 200;         // doubled for the stability check
  double scaling_length = 60.0;  // power tails are cut at scaling_length / |k|
  int xi_samples = 100;
  bool fd_oracle = true;       // compare compact potentials with fd_spectrum at c = 1
};

struct RunConfig {
  std::vector<NamedPotential> potentials;  // ascending id
  double p = 0.25;
  std::set<Task> tasks{Task::spectrum, Task::trace, Task::bounds, Task::theorem};
  std::vector<cplx> sweep{1.0};  // ascending (Re, Im)
  Tolerances tolerances;
  BoundsSettings bounds;
  std::uint64_t seed = 0;
};

// JSON document:
//   { "p": 0.5, "tasks": ["spectrum", "trace"], "sweep": [0.5, [1, 0.2]],
//     "seed": 7, "tolerances": { "trace": 1e-6 }, "bounds": { "n": 200 },
//     "potential": { "<id>": { "kind": "step", "segments": [[0, 1, -4]] } } }
// Complex numbers are a number or [re, im]. Kinds and their fields:
//   step: segments [[lo, hi, value]]; gaussian: amplitude, width, center;
//   exp_decay: amplitude, rate; power_tail: amplitude, exponent;
//   sampled: grid, values. Each potential may set "trace_tolerance".
RunConfig parse_config(const nlohmann::json& doc);
// Multiplies every tolerance, including per-potential trace tolerances.
void scale_tolerances(RunConfig& cfg, double factor);
RunConfig load_config(const std::string& path);
nlohmann::json config_to_json(const RunConfig& cfg);
nlohmann::json potential_to_json(const PotentialSpec& V);

// Steps, a Gaussian, complex-phase wells, exponential decay and power tails
// with q in {1.5, 2, 3}; p = 0.25 and the amplitude sweep {0.25, 0.5, 1, 2, 4}.
RunConfig default_config();

struct Check {
  std::string name;
  std::string module;
  std::string subject;  // "<id> c=<c>" or a sweep description
  std::string inputs;
  double observed = 0.0;
  double expected = 0.0;
  bool passed = true;
  bool numerical_failure = false;
};

struct TheoremRow {
  std::string id;
  cplx c = 1.0;
  int zeros = 0;
  double lhs = 0.0;  // sum of Im k_j
  double m1 = 0.0;
  double mp = 0.0;
  double rhs_core = 0.0;  // mp m1^p + m1
  double ratio = 0.0;     // lhs / rhs_core, 0 when rhs_core = 0
};

struct ConstantEstimate {
  std::string name;
  double value = 0.0;
  double stability = 0.0;  // relative change under refinement
  double threshold = 0.0;
};

struct TheoremReport {
  std::vector<TheoremRow> rows;
  std::vector<ConstantEstimate> constants;
  std::vector<Check> checks;
};

// Rows for spectra[i], which belongs to potential ids[i] scaled by cs[i].
// theorem_C is re-estimated from a spectrum computed with tightened
// integrator tolerances for its maximizing row.
TheoremReport theorem_report(const RunConfig& cfg, const std::vector<std::string>& ids,
                             const std::vector<cplx>& cs,
                             const std::vector<SpectrumResult>& spectra);
// Computes the spectra itself.
TheoremReport theorem_report(const RunConfig& cfg);

struct ScalingPoint {
  double k = 0.0;
  double s1 = 0.0;       // base grid
  double s1_fine = 0.0;  // doubled grid
  double scaled = 0.0;   // |k|^(1-p) s1_fine / mp
};

struct ScalingSweep {
  double p = 0.0;
  std::vector<ScalingPoint> points;  // ascending k, log-spaced in [1e-3 R, R]
  double sup = 0.0;
  double sup_fine = 0.0;
  double stability = 0.0;  // |sup_fine - sup| / sup_fine
  double slope = 0.0;      // log-log slope between the two smallest k
};

// s1 of the discretized operator at real k. Power tails use geometric panels
// on [0, length / k], other potentials the default grid; panels are no wider
// than pi / k. The doubled grid doubles n and halves the panel cap.
ScalingSweep s1_scaling_sweep(const PotentialSpec& V, double p, int k_count = 8, int n = 200,
                              double length = 60.0);

struct BoundsSample {
  cplx k;
  SchattenReport norms;  // singular values dropped
  double bound = 0.0;    // int |V| / |k|
  cplx det;
  // Compared only for Im k >= 0.1 and |a(k)| >= 0.05, on a grid refined by
  // det_refinement.
  std::optional<cplx> jost;
  std::optional<cplx> det_refined;
};

struct BoundsReport {
  std::vector<BoundsSample> samples;
  ScalingSweep scaling;
  double functional_ratio = 0.0;  // max ||l_xi||^2 / (|xi|^p sum w x^p |V|)
  double holder_slope = 0.0;
  double holder_eta = 0.0;
  bool det_checked = false;  // false when the grid cuts too much tail
  // The plain Nystrom determinant converges as n^-2 (kernel kink on the
  // diagonal); the comparison grid has n * det_refinement nodes, with
  // det_refinement = clamp(2^ceil(log2(int|V| / 8)), 1, 4).
  int det_refinement = 1;
  std::vector<std::string> notes;
};

BoundsReport bounds_report(const PotentialSpec& V, double p, const BoundsSettings& settings,
                           std::uint64_t seed);

struct OutputOptions {
  std::string out_dir;  // empty: nothing written
  std::string format = "json";
  bool svg = false;
};

struct RunResult {
  int exit_code = 0;  // 0 pass, 1 invariant violation, 3 numerical failure
  nlohmann::json report;
  std::vector<Check> checks;
  TheoremReport theorem;
  std::vector<std::string> failures;  // one summary line per failed check
};

RunResult run_config(const RunConfig& cfg, const OutputOptions& out = {});

// k-plane scatter with the circles |k| = m1 and |k| = R.
std::string kplane_svg(const std::string& title, const std::vector<cplx>& ks, double m1, double R);
// lambda-plane scatter with the disk |lambda| <= m1^2.
std::string lambda_svg(const std::string& title, const std::vector<cplx>& lambdas, double m1);

}  // namespace tracelab
