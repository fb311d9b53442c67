#include "tracelab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "tracelab/blaschke.hpp"
#include "tracelab/jost.hpp"
#include "tracelab/oracle.hpp"

namespace tracelab {

using nlohmann::json;

const char* to_string(Task t) {
  switch (t) {
    case Task::spectrum: return "spectrum";
    case Task::trace: return "trace";
    case Task::bounds: return "bounds";
    case Task::theorem: return "theorem";
  }
  return "?";
}

Task parse_task(const std::string& name) {
  for (Task t : {Task::spectrum, Task::trace, Task::bounds, Task::theorem}) {
    if (name == to_string(t)) return t;
  }
  throw ConfigError("unknown task '" + name + "'");
}

void Tolerances::scale(double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    throw ConfigError("tolerance scale must be positive");
  }
  trace *= factor;
  residual *= factor;
  bound_slack *= factor;
  det_match *= factor;
  fd_match *= factor;
  scaling_stability *= factor;
  slope_slack *= factor;
  constant_stability *= factor;
}

void scale_tolerances(RunConfig& cfg, double factor) {
  cfg.tolerances.scale(factor);
  for (auto& p : cfg.potentials) {
    if (p.trace_tolerance) *p.trace_tolerance *= factor;
  }
}

// ---------------------------------------------------------------- config

namespace {

json cjson(cplx z) { return json::array({z.real(), z.imag()}); }

cplx parse_complex(const json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  throw ConfigError(where + ": expected a number or [re, im]");
}

double parse_number(const json& obj, const char* key, const std::string& where,
                    std::optional<double> fallback = std::nullopt) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    throw ConfigError(where + ": missing '" + key + "'");
  }
  if (!obj.at(key).is_number()) throw ConfigError(where + ": '" + key + "' must be a number");
  return obj.at(key).get<double>();
}

void reject_unknown(const json& obj, std::initializer_list<const char*> known,
                    const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; })) {
      throw ConfigError(where + ": unknown key '" + key + "'");
    }
  }
}

NamedPotential parse_potential(const std::string& id, const json& j) {
  const std::string where = "potential." + id;
  if (!j.is_object()) throw ConfigError(where + ": expected a table");
  if (!j.contains("kind") || !j["kind"].is_string()) {
    throw ConfigError(where + ": missing 'kind'");
  }
  const std::string kind = j["kind"].get<std::string>();
  NamedPotential np{id, PotentialSpec(), std::nullopt};
  if (j.contains("trace_tolerance")) {
    np.trace_tolerance = parse_number(j, "trace_tolerance", where);
    if (!(*np.trace_tolerance > 0.0)) throw ConfigError(where + ": trace_tolerance must be > 0");
  }
  try {
    if (kind == "step") {
      reject_unknown(j, {"kind", "segments", "trace_tolerance"}, where);
      if (!j.contains("segments") || !j["segments"].is_array()) {
        throw ConfigError(where + ": step needs 'segments'");
      }
      std::vector<StepSegment> segs;
      for (const auto& s : j["segments"]) {
        if (!s.is_array() || s.size() != 3 || !s[0].is_number() || !s[1].is_number()) {
          throw ConfigError(where + ": segment must be [lo, hi, value]");
        }
        segs.push_back({s[0].get<double>(), s[1].get<double>(), parse_complex(s[2], where)});
      }
      np.spec = PotentialSpec::step(std::move(segs));
    } else if (kind == "gaussian") {
      reject_unknown(j, {"kind", "amplitude", "width", "center", "trace_tolerance"}, where);
      if (!j.contains("amplitude")) throw ConfigError(where + ": missing 'amplitude'");
      np.spec = PotentialSpec::gaussian(parse_complex(j["amplitude"], where),
                                        parse_number(j, "width", where),
                                        parse_number(j, "center", where, 0.0));
    } else if (kind == "exp_decay") {
      reject_unknown(j, {"kind", "amplitude", "rate", "trace_tolerance"}, where);
      if (!j.contains("amplitude")) throw ConfigError(where + ": missing 'amplitude'");
      np.spec = PotentialSpec::exp_decay(parse_complex(j["amplitude"], where),
                                         parse_number(j, "rate", where));
    } else if (kind == "power_tail") {
      reject_unknown(j, {"kind", "amplitude", "exponent", "trace_tolerance"}, where);
      if (!j.contains("amplitude")) throw ConfigError(where + ": missing 'amplitude'");
      np.spec = PotentialSpec::power_tail(parse_complex(j["amplitude"], where),
                                          parse_number(j, "exponent", where));
    } else if (kind == "sampled") {
      reject_unknown(j, {"kind", "grid", "values", "trace_tolerance"}, where);
      if (!j.contains("grid") || !j.contains("values") || !j["grid"].is_array() ||
          !j["values"].is_array()) {
        throw ConfigError(where + ": sampled needs 'grid' and 'values'");
      }
      std::vector<double> grid;
      std::vector<cplx> values;
      for (const auto& x : j["grid"]) {
        if (!x.is_number()) throw ConfigError(where + ": grid entries must be numbers");
        grid.push_back(x.get<double>());
      }
      for (const auto& v : j["values"]) values.push_back(parse_complex(v, where));
      np.spec = PotentialSpec::sampled(std::move(grid), std::move(values));
    } else {
      throw ConfigError(where + ": unknown kind '" + kind + "'");
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
  return np;
}

bool complex_less(cplx a, cplx b) {
  return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
}

}  // namespace

RunConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a table");
  reject_unknown(doc, {"p", "tasks", "sweep", "seed", "tolerances", "bounds", "potential"},
                 "config");
  RunConfig cfg;
  cfg.p = parse_number(doc, "p", "config", cfg.p);
  if (!(cfg.p > 0.0 && cfg.p < 1.0)) throw ConfigError("config: p must lie in (0, 1)");
  if (doc.contains("tasks")) {
    if (!doc["tasks"].is_array()) throw ConfigError("config: 'tasks' must be a list");
    cfg.tasks.clear();
    for (const auto& t : doc["tasks"]) {
      if (!t.is_string()) throw ConfigError("config: task names must be strings");
      cfg.tasks.insert(parse_task(t.get<std::string>()));
    }
    if (cfg.tasks.empty()) throw ConfigError("config: task set is empty");
  }
  if (doc.contains("sweep")) {
    if (!doc["sweep"].is_array() || doc["sweep"].empty()) {
      throw ConfigError("config: 'sweep' must be a nonempty list");
    }
    cfg.sweep.clear();
    for (const auto& c : doc["sweep"]) {
      const cplx z = parse_complex(c, "sweep");
      if (z == 0.0 || !std::isfinite(std::abs(z))) {
        throw ConfigError("config: sweep scalars must be finite and nonzero");
      }
      cfg.sweep.push_back(z);
    }
    std::sort(cfg.sweep.begin(), cfg.sweep.end(), complex_less);
    cfg.sweep.erase(std::unique(cfg.sweep.begin(), cfg.sweep.end()), cfg.sweep.end());
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_integer()) throw ConfigError("config: seed must be an integer");
    cfg.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("tolerances")) {
    const json& t = doc["tolerances"];
    if (!t.is_object()) throw ConfigError("config: 'tolerances' must be a table");
    reject_unknown(t,
                   {"trace", "residual", "bound_slack", "det_match", "fd_match",
                    "scaling_stability", "slope_slack", "theorem_spread", "constant_stability"},
                   "tolerances");
    Tolerances& tol = cfg.tolerances;
    for (auto [key, ptr] : std::initializer_list<std::pair<const char*, double*>>{
             {"trace", &tol.trace},
             {"residual", &tol.residual},
             {"bound_slack", &tol.bound_slack},
             {"det_match", &tol.det_match},
             {"fd_match", &tol.fd_match},
             {"scaling_stability", &tol.scaling_stability},
             {"slope_slack", &tol.slope_slack},
             {"theorem_spread", &tol.theorem_spread},
             {"constant_stability", &tol.constant_stability}}) {
      *ptr = parse_number(t, key, "tolerances", *ptr);
      if (!(*ptr >= 0.0)) throw ConfigError(std::string("tolerances: '") + key + "' must be >= 0");
    }
  }
  if (doc.contains("bounds")) {
    const json& b = doc["bounds"];
    if (!b.is_object()) throw ConfigError("config: 'bounds' must be a table");
    reject_unknown(b,
                   {"n", "k_count", "scaling_k_count", "scaling_n", "scaling_length",
                    "xi_samples", "fd_oracle"},
                   "bounds");
    BoundsSettings& s = cfg.bounds;
    auto count = [&](const char* key, int& out, int lo) {
      if (!b.contains(key)) return;
      if (!b[key].is_number_integer() || b[key].get<int>() < lo) {
        throw ConfigError(std::string("bounds: '") + key + "' must be an integer >= " +
                          std::to_string(lo));
      }
      out = b[key].get<int>();
    };
    count("n", s.n, 10);
    count("k_count", s.k_count, 1);
    count("scaling_k_count", s.scaling_k_count, 3);
    count("scaling_n", s.scaling_n, 10);
    count("xi_samples", s.xi_samples, 1);
    s.scaling_length = parse_number(b, "scaling_length", "bounds", s.scaling_length);
    if (!(s.scaling_length > 0.0)) throw ConfigError("bounds: scaling_length must be > 0");
    if (b.contains("fd_oracle")) {
      if (!b["fd_oracle"].is_boolean()) throw ConfigError("bounds: fd_oracle must be a boolean");
      s.fd_oracle = b["fd_oracle"].get<bool>();
    }
  }
  if (doc.contains("potential")) {
    if (!doc["potential"].is_object()) throw ConfigError("config: 'potential' must be a table");
    // nlohmann::json keeps object keys sorted, so ids come out ascending
    for (const auto& [id, body] : doc["potential"].items()) {
      NamedPotential np = parse_potential(id, body);
      if (const auto* pt = std::get_if<PowerTailFamily>(&np.spec.family())) {
        if (!(cfg.p < pt->exponent - 1.0)) {
          throw ConfigError("potential." + id + ": power tail needs p < exponent - 1");
        }
      }
      cfg.potentials.push_back(std::move(np));
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse error: " + std::string(e.what()));
  }
  return parse_config(doc);
}

json potential_to_json(const PotentialSpec& V) {
  json j;
  j["kind"] = std::string(V.kind());
  std::visit(
      [&](const auto& f) {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, StepFamily>) {
          j["segments"] = json::array();
          for (const auto& s : f.segments) {
            j["segments"].push_back(json::array({s.lo, s.hi, cjson(s.value)}));
          }
        } else if constexpr (std::is_same_v<F, GaussianFamily>) {
          j["amplitude"] = cjson(f.amplitude);
          j["width"] = f.width;
          j["center"] = f.center;
        } else if constexpr (std::is_same_v<F, ExpDecayFamily>) {
          j["amplitude"] = cjson(f.amplitude);
          j["rate"] = f.rate;
        } else if constexpr (std::is_same_v<F, PowerTailFamily>) {
          j["amplitude"] = cjson(f.amplitude);
          j["exponent"] = f.exponent;
        } else {
          j["grid"] = f.grid;
          j["values"] = json::array();
          for (const cplx& v : f.values) j["values"].push_back(cjson(v));
        }
      },
      V.family());
  return j;
}

json config_to_json(const RunConfig& cfg) {
  json j;
  j["p"] = cfg.p;
  j["seed"] = cfg.seed;
  j["tasks"] = json::array();
  for (Task t : cfg.tasks) j["tasks"].push_back(to_string(t));
  j["sweep"] = json::array();
  for (const cplx& c : cfg.sweep) j["sweep"].push_back(cjson(c));
  const Tolerances& t = cfg.tolerances;
  j["tolerances"] = {{"trace", t.trace},
                     {"residual", t.residual},
                     {"bound_slack", t.bound_slack},
                     {"det_match", t.det_match},
                     {"fd_match", t.fd_match},
                     {"scaling_stability", t.scaling_stability},
                     {"slope_slack", t.slope_slack},
                     {"theorem_spread", t.theorem_spread},
                     {"constant_stability", t.constant_stability}};
  const BoundsSettings& b = cfg.bounds;
  j["bounds"] = {{"n", b.n},
                 {"k_count", b.k_count},
                 {"scaling_k_count", b.scaling_k_count},
                 {"scaling_n", b.scaling_n},
                 {"scaling_length", b.scaling_length},
                 {"xi_samples", b.xi_samples},
                 {"fd_oracle", b.fd_oracle}};
  j["potential"] = json::object();
  for (const auto& p : cfg.potentials) {
    json body = potential_to_json(p.spec);
    if (p.trace_tolerance) body["trace_tolerance"] = *p.trace_tolerance;
    j["potential"][p.id] = body;
  }
  return j;
}

RunConfig default_config() {
  RunConfig cfg;
  cfg.p = 0.25;
  cfg.sweep = {0.25, 0.5, 1.0, 2.0, 4.0};
  const cplx rot = std::polar(1.0, pi / 4);
  cfg.potentials = {
      {"cwell", PotentialSpec::step({{0.0, 1.0, -4.0 * rot}}), std::nullopt},
      {"expdecay", PotentialSpec::exp_decay({-5.0, 1.0}, 1.0), std::nullopt},
      {"gauss", PotentialSpec::gaussian({-6.0, 2.0}, 1.0, 0.5), std::nullopt},
      // a(k) at small real k is ill-conditioned for this slow tail
      {"pow15", PotentialSpec::power_tail({0.1, 0.1}, 1.5), 1e-4},
      {"pow2", PotentialSpec::power_tail({-0.2, 0.1}, 2.0), std::nullopt},
      {"pow3", PotentialSpec::power_tail({-6.0, 2.0}, 3.0), std::nullopt},
      {"twostep", PotentialSpec::step({{0.0, 0.5, {-6.0, 2.0}}, {0.5, 1.5, {-2.0, -1.0}}}),
       std::nullopt},
      {"well16", PotentialSpec::step({{0.0, 1.0, -16.0}}), std::nullopt},
      {"well4", PotentialSpec::step({{0.0, 1.0, -4.0}}), std::nullopt},
  };
  std::sort(cfg.potentials.begin(), cfg.potentials.end(),
            [](const NamedPotential& a, const NamedPotential& b) { return a.id < b.id; });
  return cfg;
}

// ---------------------------------------------------------------- helpers

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::string cstr(cplx z) {
  if (z.imag() == 0.0) return num(z.real());
  return "(" + num(z.real()) + "," + num(z.imag()) + ")";
}

std::string subject_of(const std::string& id, cplx c) { return id + " c=" + cstr(c); }

Check make_check(std::string name, std::string module, std::string subject, std::string inputs,
                 double observed, double expected, bool passed) {
  return {std::move(name), std::move(module), std::move(subject), std::move(inputs),
          observed,        expected,          passed,             false};
}

// observed <= expected, with NaN counted as failure
Check upper(std::string name, std::string module, std::string subject, std::string inputs,
            double observed, double expected) {
  const bool ok = observed <= expected;
  return make_check(std::move(name), std::move(module), std::move(subject), std::move(inputs),
                    observed, expected, ok);
}

Check lower(std::string name, std::string module, std::string subject, std::string inputs,
            double observed, double expected) {
  const bool ok = observed >= expected;
  return make_check(std::move(name), std::move(module), std::move(subject), std::move(inputs),
                    observed, expected, ok);
}

json check_json(const Check& c) {
  return {{"name", c.name},         {"module", c.module},     {"subject", c.subject},
          {"inputs", c.inputs},     {"observed", c.observed}, {"expected", c.expected},
          {"passed", c.passed},     {"numerical_failure", c.numerical_failure}};
}

json spectrum_json(const SpectrumResult& sp) {
  json pts = json::array();
  for (const auto& p : sp.points) {
    pts.push_back({{"k", cjson(p.k)},
                   {"lambda", cjson(p.lambda)},
                   {"residual", p.residual},
                   {"multiplicity", p.multiplicity}});
  }
  return {{"points", pts},
          {"winding", sp.winding},
          {"region",
           {sp.region.re_lo, sp.region.re_hi, sp.region.im_lo, sp.region.im_hi}},
          {"warnings", sp.warnings}};
}

json trace_json(const TraceReport& tr) {
  return {{"R", tr.R},
          {"zeros", tr.zeros},
          {"s1", tr.sums.s1},
          {"s3", tr.sums.s3},
          {"lhs", tr.lhs},
          {"rhs", tr.rhs},
          {"discrepancy", tr.discrepancy},
          {"interval_part", tr.interval_part},
          {"arc_part", cjson(tr.arc_part)},
          {"nodes", {tr.contour.n_interval, tr.contour.n_arc}},
          {"grading", tr.contour.grading},
          {"indent", tr.contour.indent},
          {"convergence_change", tr.convergence_change},
          {"near_resonance", tr.near_resonance},
          {"notes", tr.notes}};
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<cplx> filtered_ks(const std::vector<SpectralPoint>& pts, double min_decay) {
  std::vector<cplx> ks;
  for (const auto& p : pts) {
    if (p.k.imag() >= min_decay) ks.insert(ks.end(), p.multiplicity, p.k);
  }
  return ks;
}

// Supremum of |log a(k)| |k| / m1 on |k| = R, principal branch (|log a| < 1 there).
double arc_bound_ratio(const PotentialSpec& V, double R, double m1, int samples,
                       const JostOptions& opts) {
  double sup = 0.0;
  for (int j = 0; j < samples; ++j) {
    const cplx k = std::polar(R, pi * (j + 0.5) / samples);
    sup = std::max(sup, std::abs(std::log(jost_a(V, k, opts))) * R / m1);
  }
  return sup;
}

}  // namespace

// ---------------------------------------------------------------- theorem

TheoremReport theorem_report(const RunConfig& cfg, const std::vector<std::string>& ids,
                             const std::vector<cplx>& cs,
                             const std::vector<SpectrumResult>& spectra) {
  if (ids.size() != spectra.size() || cs.size() != spectra.size()) {
    throw std::invalid_argument("theorem_report: ids, scalars and spectra differ in length");
  }
  const Tolerances& tol = cfg.tolerances;
  TheoremReport rep;
  std::vector<PotentialSpec> scaled;
  for (std::size_t i = 0; i < spectra.size(); ++i) {
    const auto it = std::find_if(cfg.potentials.begin(), cfg.potentials.end(),
                                 [&](const NamedPotential& p) { return p.id == ids[i]; });
    if (it == cfg.potentials.end()) throw std::invalid_argument("unknown potential " + ids[i]);
    const PotentialSpec V = it->spec.scaled(cs[i]);
    scaled.push_back(V);
    const Moments m = moments(V, cfg.p);
    TheoremRow row;
    row.id = ids[i];
    row.c = cs[i];
    row.m1 = m.l1;
    row.mp = m.weighted;
    row.rhs_core = m.weighted * std::pow(m.l1, cfg.p) + m.l1;
    double cubic_sum = 0.0, worst_cubic = -std::numeric_limits<double>::infinity();
    double worst_disk = 0.0;
    int nonreal = 0;
    const double R = 2.0 * m.l1;
    for (const auto& p : spectra[i].points) {
      for (int r = 0; r < p.multiplicity; ++r) {
        ++row.zeros;
        row.lhs += p.k.imag();
        const double cubic = (p.k * p.k * p.k).imag() / (3.0 * R * R);
        cubic_sum += cubic;
        worst_cubic = std::max(worst_cubic, cubic - 0.25 * p.k.imag());
        if (std::abs(p.k.real()) > 1e-8 * std::abs(p.k)) {
          worst_disk = std::max(worst_disk, std::abs(p.k) / m.l1);
          ++nonreal;
        }
      }
    }
    row.ratio = row.rhs_core > 0.0 ? row.lhs / row.rhs_core : 0.0;
    const std::string subj = subject_of(row.id, row.c);
    if (nonreal > 0) {
      rep.checks.push_back(upper("disk |k_j| <= m1", "harness", subj,
                                 "per non-real lambda_j, |k_j| / m1", worst_disk,
                                 1.0 + tol.bound_slack));
    }
    if (row.zeros > 0) {
      rep.checks.push_back(upper("cubic lemma", "harness", subj,
                                 "max_j Im k_j^3/(3R^2) - Im k_j/4, R = 2 m1", worst_cubic,
                                 1e-15 * (1.0 + row.lhs)));
      rep.checks.push_back(lower("cubic absorption", "harness", subj,
                                 "sum Im k_j - sum Im k_j^3/(3R^2) - (3/4) sum Im k_j",
                                 row.lhs - cubic_sum - 0.75 * row.lhs, -1e-15 * (1.0 + row.lhs)));
    }
    rep.rows.push_back(row);
  }

  // boundedness witness across each potential's amplitude sweep
  std::vector<std::string> seen;
  for (const auto& row : rep.rows) {
    if (std::find(seen.begin(), seen.end(), row.id) != seen.end()) continue;
    seen.push_back(row.id);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    int nonzero = 0, total = 0;
    for (const auto& r : rep.rows) {
      if (r.id != row.id) continue;
      ++total;
      if (r.lhs > 0.0) {
        ++nonzero;
        lo = std::min(lo, r.ratio);
        hi = std::max(hi, r.ratio);
      }
    }
    if (nonzero >= 2) {
      rep.checks.push_back(upper("theorem ratio spread", "harness", row.id,
                                 "max/min ratio over " + std::to_string(nonzero) + " of " +
                                     std::to_string(total) + " sweep rows with zeros",
                                 hi / lo, tol.theorem_spread));
    }
  }

  ConstantEstimate theorem_c{"theorem_C", 0.0, 0.0, tol.constant_stability};
  std::size_t best = rep.rows.size();
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    if (best == rep.rows.size() || rep.rows[i].ratio > rep.rows[best].ratio) best = i;
  }
  if (best < rep.rows.size()) {
    theorem_c.value = rep.rows[best].ratio;
    if (rep.rows[best].zeros > 0) {
      SpectrumOptions tight;
      tight.jost.rtol = 1e-12;
      tight.jost.atol = 1e-15;
      const SpectrumResult again = find_spectrum(scaled[best], tight);
      double lhs = 0.0;
      for (const auto& p : again.points) lhs += p.multiplicity * p.k.imag();
      const double ratio = lhs / rep.rows[best].rhs_core;
      theorem_c.stability = std::abs(ratio - theorem_c.value) / theorem_c.value;
    }
  }
  rep.checks.push_back(upper("theorem_C finite", "harness", "all rows", "max ratio",
                             theorem_c.value, std::numeric_limits<double>::max()));
  rep.checks.push_back(upper("theorem_C stability", "harness", "all rows",
                             "relative change with tightened integrator", theorem_c.stability,
                             theorem_c.threshold));
  rep.constants.push_back(theorem_c);
  return rep;
}

TheoremReport theorem_report(const RunConfig& cfg) {
  std::vector<std::string> ids;
  std::vector<cplx> cs;
  std::vector<SpectrumResult> spectra;
  for (const auto& np : cfg.potentials) {
    for (const cplx& c : cfg.sweep) {
      ids.push_back(np.id);
      cs.push_back(c);
      spectra.push_back(find_spectrum(np.spec.scaled(c)));
    }
  }
  return theorem_report(cfg, ids, cs, spectra);
}

// ---------------------------------------------------------------- bounds

ScalingSweep s1_scaling_sweep(const PotentialSpec& V, double p, int k_count, int n,
                              double length) {
  if (k_count < 3) throw std::invalid_argument("scaling sweep needs at least 3 k values");
  ScalingSweep sw;
  sw.p = p;
  const double R = radius(V);
  const double mp = moments(V, p).weighted;
  if (R == 0.0 || mp == 0.0) return sw;
  const bool tail = std::holds_alternative<PowerTailFamily>(V.family());
  for (int i = 0; i < k_count; ++i) {
    const double k = R * std::pow(1e-3, 1.0 - static_cast<double>(i) / (k_count - 1));
    ScalingPoint pt;
    pt.k = k;
    for (int fine = 0; fine < 2; ++fine) {
      GridOptions opts;
      if (tail) {
        opts.x_max = length / k;
        opts.spacing = PanelSpacing::geometric;
      }
      opts.max_panel_width = pi / k / (fine + 1);
      const QuadratureGrid g = make_grid(V, n * (fine + 1), opts);
      const double s1 = schatten_report(discretize(V, Wavenumber(k, 0.0), g)).s1;
      (fine ? pt.s1_fine : pt.s1) = s1;
    }
    pt.scaled = std::pow(k, 1.0 - p) * pt.s1_fine / mp;
    sw.sup = std::max(sw.sup, std::pow(k, 1.0 - p) * pt.s1 / mp);
    sw.sup_fine = std::max(sw.sup_fine, pt.scaled);
    sw.points.push_back(pt);
  }
  sw.stability = std::abs(sw.sup_fine - sw.sup) / sw.sup_fine;
  sw.slope = std::log(sw.points[1].s1_fine / sw.points[0].s1_fine) /
             std::log(sw.points[1].k / sw.points[0].k);
  return sw;
}

BoundsReport bounds_report(const PotentialSpec& V, double p, const BoundsSettings& settings,
                           std::uint64_t seed) {
  BoundsReport rep;
  const double R = radius(V);
  if (R == 0.0) {
    rep.notes.push_back("V = 0: all operators vanish");
    return rep;
  }
  const double m1 = 0.5 * R;
  const QuadratureGrid grid = make_grid(V, settings.n);
  const double lost = V.tail_mass(grid.x_max);
  rep.det_checked = lost <= 1e-9 * m1;
  if (!rep.det_checked) {
    rep.notes.push_back("grid ends at x = " + num(grid.x_max) + " with tail mass " + num(lost) +
                        "; determinant comparison skipped");
  }
  rep.det_refinement = 1;
  while (rep.det_refinement < 4 && m1 > 8.0 * rep.det_refinement) rep.det_refinement *= 2;
  const QuadratureGrid fine =
      rep.det_refinement > 1 ? make_grid(V, settings.n * rep.det_refinement) : grid;
  int near_zero = 0;
  static constexpr double angles[] = {0.0,    pi / 2, pi / 3,     pi,     2 * pi / 3,
                                      pi / 6, 0.0,    5 * pi / 6, pi / 4, pi};
  for (int j = 0; j < settings.k_count; ++j) {
    const double t = settings.k_count > 1 ? static_cast<double>(j) / (settings.k_count - 1) : 0.5;
    const double r = R * 0.05 * std::pow(40.0, t);
    const cplx k = std::polar(r, angles[j % 10]);
    const cplx kk(k.real(), std::max(0.0, k.imag()));
    const DiscretizedBS M = discretize(V, Wavenumber(kk), grid);
    BoundsSample s{kk, schatten_report(M), m1 / r, perturbation_det(M), std::nullopt, std::nullopt};
    s.norms.singular_values.clear();
    if (rep.det_checked && kk.imag() >= 0.1) {
      const cplx a = jost_a(V, kk);
      if (std::abs(a) >= 0.05) {
        s.jost = a;
        s.det_refined = rep.det_refinement > 1 ? perturbation_det(discretize(V, Wavenumber(kk), fine))
                                               : s.det;
      } else {
        ++near_zero;
      }
    }
    rep.samples.push_back(s);
  }
  if (near_zero > 0) {
    rep.notes.push_back(std::to_string(near_zero) +
                        " k value(s) with |a(k)| < 0.05 left out of the determinant comparison");
  }

  // functional bound on random frequencies
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> expo(-2.0, 2.0);
  std::bernoulli_distribution sign(0.5);
  double moment = 0.0;
  for (int i = 0; i < grid.n; ++i) {
    moment += grid.weights[i] * std::pow(grid.nodes[i], p) * V.abs_at(grid.nodes[i]);
  }
  for (int i = 0; i < settings.xi_samples; ++i) {
    const double xi = (sign(rng) ? -1.0 : 1.0) * std::pow(10.0, expo(rng)) * std::max(1.0, m1);
    const double norm2 = sine_functional(V, xi, grid).norm2();
    rep.functional_ratio = std::max(rep.functional_ratio, norm2 / (std::pow(std::abs(xi), p) * moment));
  }

  // Holder exponent of xi -> G_xi in S1 at fixed eta
  rep.holder_eta = std::max(1.0, 0.25 * R);
  std::vector<double> lx, ly;
  for (int i = 0; i < 8; ++i) {
    const double d = rep.holder_eta * std::pow(10.0, -3.0 + 3.0 * i / 7.0);
    const double s = sine_rank_one(V, rep.holder_eta + d, rep.holder_eta, grid).s1_difference;
    if (s > 0.0) {
      lx.push_back(std::log(d));
      ly.push_back(std::log(s));
    }
  }
  rep.holder_slope = lx.size() >= 2 ? least_squares_slope(lx, ly) : 0.0;
  return rep;
}

namespace {

json bounds_json(const BoundsReport& b) {
  json samples = json::array();
  for (const auto& s : b.samples) {
    json j{{"k", cjson(s.k)},
           {"s1", s.norms.s1},
           {"s2", s.norms.s2},
           {"opnorm", s.norms.opnorm},
           {"bound", s.bound},
           {"det", cjson(s.det)}};
    if (s.jost) j["jost"] = cjson(*s.jost);
    if (s.det_refined) j["det_refined"] = cjson(*s.det_refined);
    samples.push_back(j);
  }
  json out{{"samples", samples},
           {"functional_ratio", b.functional_ratio},
           {"holder_eta", b.holder_eta},
           {"holder_slope", b.holder_slope},
           {"det_checked", b.det_checked},
           {"det_refinement", b.det_refinement},
           {"notes", b.notes}};
  if (!b.scaling.points.empty()) {
    json pts = json::array();
    for (const auto& p : b.scaling.points) {
      pts.push_back({{"k", p.k}, {"s1", p.s1}, {"s1_fine", p.s1_fine}, {"scaled", p.scaled}});
    }
    out["scaling"] = {{"p", b.scaling.p},
                      {"points", pts},
                      {"sup", b.scaling.sup},
                      {"sup_fine", b.scaling.sup_fine},
                      {"stability", b.scaling.stability},
                      {"slope", b.scaling.slope}};
  }
  return out;
}

void bounds_checks(const BoundsReport& b, double p, const Tolerances& tol,
                   const std::string& subj, std::vector<Check>& out) {
  if (b.samples.empty()) return;
  double op = 0.0, hs = 0.0, det_excess = -std::numeric_limits<double>::infinity();
  double det_rel = 0.0;
  int det_count = 0;
  for (const auto& s : b.samples) {
    op = std::max(op, s.norms.opnorm / s.bound);
    hs = std::max(hs, s.norms.s2 / s.bound);
    det_excess = std::max(det_excess, std::log(std::abs(s.det)) - s.norms.s1);
    if (s.jost && s.det_refined) {
      ++det_count;
      det_rel = std::max(det_rel, std::abs(*s.det_refined - *s.jost) / std::abs(*s.jost));
    }
  }
  const std::string ks = std::to_string(b.samples.size()) + " k values, Im k >= 0";
  out.push_back(upper("opnorm <= int|V|/|k|", "bs_operator", subj, ks + "; max ratio", op,
                      1.0 + tol.bound_slack));
  out.push_back(upper("s2 <= int|V|/|k|", "bs_operator", subj, ks + "; max ratio", hs,
                      1.0 + tol.bound_slack));
  out.push_back(upper("|det| <= exp(s1)", "bs_operator", subj, ks + "; max log|det| - s1",
                      det_excess, 1e-10));
  if (det_count > 0) {
    out.push_back(upper("det(I+UM) = a(k)", "bs_operator", subj,
                        std::to_string(det_count) + " k values with Im k >= 0.1, n = " +
                            std::to_string(b.det_refinement) + " x base; max rel diff",
                        det_rel, tol.det_match));
  }
  out.push_back(upper("||l_xi||^2 <= |xi|^p int x^p|V|", "bs_operator", subj,
                      "random xi; max ratio", b.functional_ratio, 1.0 + 1e-12));
  out.push_back(lower("Holder slope", "bs_operator", subj,
                      "eta = " + num(b.holder_eta) + "; log-log slope of S1 difference",
                      b.holder_slope, p / 2 - tol.slope_slack));
  if (!b.scaling.points.empty()) {
    out.push_back(upper("S1 scaling sup stable", "bs_operator", subj,
                        "sup |k|^(1-p) s1 / int x^p|V|, n vs 2n; relative change",
                        b.scaling.stability, tol.scaling_stability));
    out.push_back(lower("S1 scaling slope", "bs_operator", subj,
                        "log-log slope of s1 at the three smallest real k", b.scaling.slope,
                        -(1.0 - p) - tol.slope_slack));
  }
}

// ---------------------------------------------------------------- output

std::string svg_header(const std::string& title) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"420\" height=\"440\" "
         "viewBox=\"0 0 420 440\">\n<rect width=\"420\" height=\"440\" fill=\"white\"/>\n"
         "<text x=\"210\" y=\"20\" font-family=\"sans-serif\" font-size=\"13\" "
         "text-anchor=\"middle\">" +
         title + "</text>\n";
}

struct Frame {
  double extent;
  double cx = 210, cy = 230, half = 190;
  double px(double x) const { return cx + half * x / extent; }
  double py(double y) const { return cy - half * y / extent; }
};

std::string axes(const Frame& f) {
  return "<line x1=\"20\" y1=\"" + num(f.cy) + "\" x2=\"400\" y2=\"" + num(f.cy) +
         "\" stroke=\"#999\"/>\n<line x1=\"" + num(f.cx) + "\" y1=\"40\" x2=\"" + num(f.cx) +
         "\" y2=\"420\" stroke=\"#999\"/>\n";
}

std::string circle(const Frame& f, double r, const char* colour, const char* fill) {
  return "<circle cx=\"" + num(f.cx) + "\" cy=\"" + num(f.cy) + "\" r=\"" +
         num(f.half * r / f.extent) + "\" stroke=\"" + colour + "\" fill=\"" + fill + "\"/>\n";
}

std::string dots(const Frame& f, const std::vector<cplx>& zs) {
  std::string s;
  for (const cplx& z : zs) {
    s += "<circle cx=\"" + num(f.px(z.real())) + "\" cy=\"" + num(f.py(z.imag())) +
         "\" r=\"3\" fill=\"#c00\"/>\n";
  }
  return s;
}

double extent_of(const std::vector<cplx>& zs, double r) {
  double e = r;
  for (const cplx& z : zs) e = std::max(e, std::abs(z));
  return e > 0.0 ? 1.1 * e : 1.0;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + "\"";
}

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string c17(cplx z) {
  if (z.imag() == 0.0) return g17(z.real());
  return g17(z.real()) + (z.imag() < 0 ? "" : "+") + g17(z.imag()) + "i";
}

std::string file_stem(const std::string& id, std::size_t index) {
  return id + "_c" + std::to_string(index);
}

}  // namespace

std::string kplane_svg(const std::string& title, const std::vector<cplx>& ks, double m1,
                       double R) {
  const Frame f{extent_of(ks, std::max(m1, R))};
  return svg_header(title) + axes(f) + circle(f, m1, "#06c", "none") +
         circle(f, R, "#999", "none") + dots(f, ks) + "</svg>\n";
}

std::string lambda_svg(const std::string& title, const std::vector<cplx>& lambdas, double m1) {
  const Frame f{extent_of(lambdas, m1 * m1)};
  return svg_header(title) + circle(f, m1 * m1, "#06c", "#eef4fb") + axes(f) +
         dots(f, lambdas) + "</svg>\n";
}

// ---------------------------------------------------------------- run

RunResult run_config(const RunConfig& cfg, const OutputOptions& out) {
  RunResult res;
  const Tolerances& tol = cfg.tolerances;
  const bool want_spectrum = cfg.tasks.count(Task::spectrum) || cfg.tasks.count(Task::trace) ||
                             cfg.tasks.count(Task::theorem);
  std::vector<std::string> ids;
  std::vector<cplx> cs;
  std::vector<SpectrumResult> spectra;
  ConstantEstimate arc_c{"arc_bound_C", 0.0, 0.0, tol.constant_stability};
  ConstantEstimate s1_c{"s1_scaling_C", 0.0, 0.0, tol.scaling_stability};
  bool have_arc = false, have_s1 = false;
  json entries = json::array();
  std::vector<std::string> spectrum_csv, trace_csv;
  std::vector<std::pair<std::string, std::string>> svgs;

  // the amplitude closest to 1 carries the c-invariant checks
  std::size_t unit = 0;
  for (std::size_t i = 0; i < cfg.sweep.size(); ++i) {
    if (std::abs(cfg.sweep[i] - 1.0) < std::abs(cfg.sweep[unit] - 1.0)) unit = i;
  }

  for (const auto& np : cfg.potentials) {
    for (std::size_t ci = 0; ci < cfg.sweep.size(); ++ci) {
      const cplx c = cfg.sweep[ci];
      const PotentialSpec V = np.spec.scaled(c);
      const std::string subj = subject_of(np.id, c);
      const Moments m = moments(V, cfg.p);
      const double R = radius(V);
      json entry{{"id", np.id},
                 {"c", cjson(c)},
                 {"potential", potential_to_json(V)},
                 {"m1", m.l1},
                 {"mp", m.weighted},
                 {"R", R}};
      auto guarded = [&](const char* module, const auto& body) {
        try {
          body();
        } catch (const std::exception& e) {
          Check ck = make_check("numerical failure", module, subj, e.what(), 0.0, 0.0, false);
          ck.numerical_failure = true;
          res.checks.push_back(ck);
          entry[std::string(module) + "_error"] = e.what();
        }
      };

      std::optional<SpectrumResult> sp;
      if (want_spectrum) {
        guarded("spectra", [&] {
          sp = find_spectrum(V);
          entry["spectrum"] = spectrum_json(*sp);
          ids.push_back(np.id);
          cs.push_back(c);
          spectra.push_back(*sp);
          double worst_res = 0.0, worst_disk = 0.0, worst_real = 0.0;
          int count = 0, nonreal = 0;
          for (const auto& p : sp->points) {
            count += p.multiplicity;
            worst_res = std::max(worst_res, p.residual);
            // k on the imaginary axis (to rounding) gives a real negative lambda;
            // the disk bound is only logged for those
            const double ratio = std::abs(p.lambda) / (m.l1 * m.l1);
            if (std::abs(p.k.real()) <= 1e-8 * std::abs(p.k)) {
              worst_real = std::max(worst_real, ratio);
            } else {
              worst_disk = std::max(worst_disk, ratio);
              ++nonreal;
            }
            spectrum_csv.push_back(csv_escape(np.id) + "," + c17(c) + "," + c17(p.k) + "," +
                                   c17(p.lambda) + "," + g17(p.residual));
          }
          res.checks.push_back(upper("zero residual", "spectra", subj, "max |a(k_j)|",
                                     worst_res, tol.residual));
          res.checks.push_back(make_check("zero count = winding", "spectra", subj,
                                          "found zeros vs winding number", count, sp->winding,
                                          count == sp->winding));
          if (nonreal > 0) {
            res.checks.push_back(upper("disk |lambda| <= m1^2", "spectra", subj,
                                       "max |lambda_j| / m1^2 over non-real lambda_j", worst_disk,
                                       1.0 + tol.bound_slack));
          }
          if (count > nonreal) entry["negative_lambda_disk_ratio"] = worst_real;
        });
        if (sp && cfg.bounds.fd_oracle && ci == unit && c == 1.0 && V.compact() &&
            !V.is_zero()) {
          guarded("oracle", [&] {
            const FDSpectrumResult fd = fd_spectrum(V);
            const std::vector<cplx> ks = filtered_ks(sp->points, FDOptions{}.min_decay);
            double worst = 0.0;
            for (const cplx& lam : fd.eigenvalues) {
              double best = std::numeric_limits<double>::infinity();
              for (const cplx& k : ks) best = std::min(best, std::abs(k * k - lam) / std::abs(lam));
              worst = std::max(worst, best);
            }
            entry["fd_oracle"] = {{"L", fd.L}, {"n", fd.n}, {"eigenvalues", json::array()}};
            for (const cplx& lam : fd.eigenvalues) entry["fd_oracle"]["eigenvalues"].push_back(cjson(lam));
            res.checks.push_back(make_check("fd count match", "oracle", subj,
                                            "fd_spectrum L=20 n=4000 vs find_spectrum",
                                            static_cast<double>(fd.eigenvalues.size()),
                                            static_cast<double>(ks.size()),
                                            fd.eigenvalues.size() == ks.size()));
            if (!fd.eigenvalues.empty()) {
              res.checks.push_back(upper("fd eigenvalue match", "oracle", subj,
                                         "max relative distance to nearest zero", worst,
                                         tol.fd_match));
            }
          });
        }
      }

      if (cfg.tasks.count(Task::trace) && sp) {
        guarded("traceform", [&] {
          const TraceReport tr = trace_report(V, *sp);
          entry["trace"] = trace_json(tr);
          const double t = np.trace_tolerance.value_or(tol.trace);
          res.checks.push_back(upper("trace identity", "traceform", subj,
                                     "|lhs - rhs| / (1 + |lhs|), R = " + num(tr.R),
                                     tr.discrepancy / (1.0 + std::abs(tr.lhs)), t));
          trace_csv.push_back(csv_escape(np.id) + "," + c17(c) + "," + g17(tr.R) + "," +
                              std::to_string(tr.zeros) + "," + g17(tr.lhs) + "," + g17(tr.rhs) +
                              "," + g17(tr.discrepancy));
          if (!V.is_zero()) {
            const double coarse = arc_bound_ratio(V, tr.R, m.l1, 32, JostOptions{});
            JostOptions tight;
            tight.rtol = 1e-12;
            tight.atol = 1e-15;
            const double fine = arc_bound_ratio(V, tr.R, m.l1, 64, tight);
            entry["arc_bound_ratio"] = fine;
            if (!have_arc || fine > arc_c.value) {
              arc_c.value = fine;
              arc_c.stability = std::abs(fine - coarse) / fine;
            }
            have_arc = true;
          }
        });
      }

      if (cfg.tasks.count(Task::bounds)) {
        guarded("bs_operator", [&] {
          BoundsReport b = bounds_report(V, cfg.p, cfg.bounds,
                                         cfg.seed + 7919 * static_cast<std::uint64_t>(entries.size()));
          if (ci == unit && !V.is_zero()) {
            b.scaling = s1_scaling_sweep(V, cfg.p, cfg.bounds.scaling_k_count,
                                         cfg.bounds.scaling_n, cfg.bounds.scaling_length);
            if (!have_s1 || b.scaling.sup_fine > s1_c.value) {
              s1_c.value = b.scaling.sup_fine;
              s1_c.stability = b.scaling.stability;
            }
            have_s1 = true;
          }
          entry["bounds"] = bounds_json(b);
          bounds_checks(b, cfg.p, tol, subj, res.checks);
        });
      }

      if (out.svg && sp) {
        std::vector<cplx> ks, ls;
        for (const auto& p : sp->points) {
          ks.push_back(p.k);
          ls.push_back(p.lambda);
        }
        const std::string stem = file_stem(np.id, ci);
        svgs.emplace_back(stem + "_k.svg", kplane_svg(subj + ", k-plane", ks, m.l1, R));
        svgs.emplace_back(stem + "_lambda.svg", lambda_svg(subj + ", lambda-plane", ls, m.l1));
      }
      entries.push_back(entry);
    }
  }

  if (cfg.tasks.count(Task::theorem)) {
    try {
      res.theorem = theorem_report(cfg, ids, cs, spectra);
      res.checks.insert(res.checks.end(), res.theorem.checks.begin(), res.theorem.checks.end());
    } catch (const std::exception& e) {
      Check ck = make_check("numerical failure", "harness", "theorem", e.what(), 0, 0, false);
      ck.numerical_failure = true;
      res.checks.push_back(ck);
    }
  }
  if (have_arc) {
    res.theorem.constants.push_back(arc_c);
    res.checks.push_back(upper("arc_bound_C stability", "harness", "all rows",
                               "32 vs 64 arc samples, tightened integrator", arc_c.stability,
                               arc_c.threshold));
  }
  if (have_s1) {
    res.theorem.constants.push_back(s1_c);
    res.checks.push_back(upper("s1_scaling_C stability", "harness", "all rows",
                               "n vs 2n Nystrom grid", s1_c.stability, s1_c.threshold));
  }

  bool numerical = false, violated = false;
  json checks = json::array();
  for (const auto& ck : res.checks) {
    checks.push_back(check_json(ck));
    if (ck.passed) continue;
    (ck.numerical_failure ? numerical : violated) = true;
    res.failures.push_back("[" + ck.module + "] " + ck.name + " (" + ck.subject + "): " +
                           (ck.numerical_failure ? ck.inputs
                                                 : "observed " + num(ck.observed) +
                                                       ", expected " + num(ck.expected) + "; " +
                                                       ck.inputs));
  }
  res.exit_code = numerical ? 3 : (violated ? 1 : 0);

  json rows = json::array();
  for (const auto& r : res.theorem.rows) {
    rows.push_back({{"id", r.id},
                    {"c", cjson(r.c)},
                    {"zeros", r.zeros},
                    {"lhs", r.lhs},
                    {"m1", r.m1},
                    {"mp", r.mp},
                    {"rhs_core", r.rhs_core},
                    {"ratio", r.ratio}});
  }
  json constants = json::array();
  for (const auto& c : res.theorem.constants) {
    constants.push_back({{"name", c.name},
                         {"value", c.value},
                         {"stability", c.stability},
                         {"threshold", c.threshold}});
  }
  res.report = {{"schema_version", 1},
                {"config", config_to_json(cfg)},
                {"entries", entries},
                {"theorem", rows},
                {"constants", constants},
                {"checks", checks},
                {"summary",
                 {{"checks", res.checks.size()},
                  {"failed", res.failures.size()},
                  {"exit_code", res.exit_code}}}};

  if (!out.out_dir.empty()) {
    namespace fs = std::filesystem;
    const fs::path dir(out.out_dir);
    fs::create_directories(dir);
    if (out.format == "csv") {
      std::string s = "id,c,k,lambda,residual\n";
      for (const auto& line : spectrum_csv) s += line + "\n";
      write_file(dir / "spectrum.csv", s);
      s = "id,c,R,zeros,lhs,rhs,discrepancy\n";
      for (const auto& line : trace_csv) s += line + "\n";
      write_file(dir / "trace.csv", s);
      s = "module,name,subject,observed,expected,passed\n";
      for (const auto& ck : res.checks) {
        s += csv_escape(ck.module) + "," + csv_escape(ck.name) + "," + csv_escape(ck.subject) +
             "," + g17(ck.observed) + "," + g17(ck.expected) + "," +
             (ck.passed ? "true" : "false") + "\n";
      }
      write_file(dir / "checks.csv", s);
    } else {
      write_file(dir / "report.json", res.report.dump(2) + "\n");
    }
    if (cfg.tasks.count(Task::theorem)) {
      std::string s = "id,c,lhs,m1,mp,rhs_core,ratio\n";
      for (const auto& r : res.theorem.rows) {
        s += csv_escape(r.id) + "," + c17(r.c) + "," + g17(r.lhs) + "," + g17(r.m1) + "," +
             g17(r.mp) + "," + g17(r.rhs_core) + "," + g17(r.ratio) + "\n";
      }
      write_file(dir / "theorem.csv", s);
    }
    write_file(dir / "constants.json", json{{"schema_version", 1}, {"constants", constants}}.dump(2) + "\n");
    for (const auto& [name, text] : svgs) write_file(dir / name, text);
  }
  return res;
}

}  // namespace tracelab
