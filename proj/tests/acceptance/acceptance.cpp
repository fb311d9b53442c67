// Acceptance criteria 1-10. One PASS/FAIL line per criterion; exit status 1
// if any criterion fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "tracelab/blaschke.hpp"
#include "tracelab/bs_operator.hpp"
#include "tracelab/harness.hpp"
#include "tracelab/jost.hpp"
#include "tracelab/oracle.hpp"
#include "tracelab/spectra.hpp"
#include "tracelab/traceform.hpp"

using namespace tracelab;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

cplx well_a(cplx k, double v0) {
  const cplx kap = std::sqrt(k * k + v0);
  return std::exp(I * k) * (std::cos(kap) - I * (k / kap) * std::sin(kap));
}

PotentialSpec corpus(const std::string& id) {
  for (const auto& np : default_config().potentials) {
    if (np.id == id) return np.spec;
  }
  throw std::out_of_range("no corpus member " + id);
}

// Spectra of the default corpus over its amplitude sweep, shared by 5 and 9.
struct CorpusSpectra {
  RunConfig cfg = default_config();
  std::vector<std::string> ids;
  std::vector<cplx> cs;
  std::vector<SpectrumResult> spectra;
};

const CorpusSpectra& corpus_spectra() {
  static const CorpusSpectra cache = [] {
    CorpusSpectra s;
    for (const auto& np : s.cfg.potentials) {
      for (cplx c : s.cfg.sweep) {
        s.ids.push_back(np.id);
        s.cs.push_back(c);
        s.spectra.push_back(find_spectrum(np.spec.scaled(c)));
      }
    }
    return s;
  }();
  return cache;
}

Outcome blaschke_identity() {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> count(1, 8);
  std::uniform_real_distribution<double> mod(0.05, 2.0), arg(0.01, pi - 0.01);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    std::vector<cplx> ks;
    const int n = count(rng);
    for (int j = 0; j < n; ++j) ks.push_back(std::polar(mod(rng), arg(rng)));
    const ZeroSet zs = make_zero_set(ks);
    const double R = 4.0 * zs.max_modulus;
    const PowerSums s = power_sums(zs);
    const double lhs = 2.0 * pi * R * R * s.s1 - (2.0 * pi / 3.0) * s.s3;
    const ContourIntegral c = contour_log_integral([&](cplx k) { return blaschke_eval(zs, k); }, {R});
    worst = std::max(worst, std::abs(c.total.real() - lhs) / (1.0 + std::abs(lhs)));
  }
  return {worst <= 1e-6, fmt("20 zero sets, max |rhs - lhs| / (1 + |lhs|) = %.3g (tol 1e-6)", worst)};
}

Outcome jost_closed_form() {
  const auto V = PotentialSpec::step({{0.0, 1.0, -2.0}});
  double worst = 0.0;
  int points = 0;
  for (int i = 0; i < 10; ++i) {
    for (double im : {0.0, 0.25, 1.0, 2.5, 6.0}) {
      const cplx k(-9.0 + 2.0 * i + 0.1, im);
      const JostValue v = jost_function(V, Wavenumber(k));
      worst = std::max(worst, std::abs(v.a - well_a(k, 2.0)));
      ++points;
    }
  }
  return {worst <= 1e-8, fmt("%g k-points, max |a - closed form| = %.3g (tol 1e-8)", points, worst)};
}

Outcome determinant_identification() {
  const char* ids[] = {"cwell", "expdecay", "gauss", "twostep", "well4"};
  double worst = 0.0;
  std::string where, skipped;
  for (const char* id : ids) {
    const PotentialSpec V = corpus(id);
    const QuadratureGrid grid = make_grid(V, 400);
    // candidates on a fixed spiral; relative accuracy is meaningless next to a
    // zero of a, so candidates with |a| < 0.05 are passed over
    int used = 0;
    for (int j = 0; used < 10; ++j) {
      if (j >= 40) throw std::runtime_error(std::string(id) + ": too few k away from zeros");
      const double r = 0.5 * std::pow(40.0, (j % 10) / 9.0) * (1.0 + 0.1 * (j / 10));
      const double theta = pi * (0.15 + 0.7 * ((j * 3) % 10) / 9.0);
      const cplx k = std::polar(r, theta);
      const cplx a = jost_function(V, Wavenumber(k)).a;
      if (std::abs(a) < 0.05) {
        skipped += std::string(id) + fmt(" %.3g%+.3gi, ", k.real(), k.imag());
        continue;
      }
      ++used;
      const cplx d = perturbation_det(discretize(V, Wavenumber(k), grid));
      const double rel = std::abs(d - a) / std::abs(a);
      if (rel > worst) {
        worst = rel;
        where = std::string(id) + fmt(" at k = %.3g%+.3gi", k.real(), k.imag());
      }
    }
  }
  return {worst <= 1e-4, fmt("5 potentials x 10 k, n = 400, max relative difference %.3g (tol 1e-4), ", worst) +
                             "worst " + where + (skipped.empty() ? "" : "; passed over " + skipped.substr(0, skipped.size() - 2))};
}

Outcome full_trace_formula() {
  const std::pair<const char*, PotentialSpec> wells[] = {
      {"real", PotentialSpec::step({{0.0, 1.0, -4.0}})},
      {"complex", PotentialSpec::step({{0.0, 1.0, -4.0 * std::polar(1.0, pi / 4)}})},
  };
  bool ok = true;
  std::string detail;
  for (const auto& [name, V] : wells) {
    const SpectrumResult sp = find_spectrum(V);
    std::vector<double> disc;
    for (int n : {64, 128, 256}) {
      TraceOptions o;
      o.adaptive = false;
      o.n_interval = o.n_arc = n;
      disc.push_back(trace_report(V, sp, o).discrepancy);
    }
    const TraceReport tr = trace_report(V, sp);
    const double rel = tr.discrepancy / (1.0 + std::abs(tr.lhs));
    const bool decreasing = disc[1] < disc[0] && disc[2] < disc[1];
    ok = ok && rel <= 1e-3 && decreasing;
    detail += std::string(name) + fmt(" well rel %.3g, nodes 64/128/256 discrepancy %.2g", rel, disc[0]) +
              fmt("/%.2g/%.2g; ", disc[1], disc[2]);
  }
  return {ok, detail + "tol 1e-3, must decrease"};
}

Outcome disk_bound() {
  const CorpusSpectra& cs = corpus_spectra();
  double worst = 0.0;
  int checked = 0;
  for (std::size_t i = 0; i < cs.spectra.size(); ++i) {
    const PotentialSpec* base = nullptr;
    for (const auto& np : cs.cfg.potentials) {
      if (np.id == cs.ids[i]) base = &np.spec;
    }
    const double m1 = moments(base->scaled(cs.cs[i]), cs.cfg.p).l1;
    for (const auto& p : cs.spectra[i].points) {
      if (p.lambda.imag() == 0.0 && p.lambda.real() >= 0.0) continue;
      worst = std::max(worst, std::abs(p.lambda) / (m1 * m1));
      ++checked;
    }
  }
  return {worst <= 1.0 + 1e-8, fmt("%g eigenvalues over %g spectra, max |lambda| / m1^2 = %.4g", checked,
                                   static_cast<double>(cs.spectra.size()), worst)};
}

Outcome operator_bounds() {
  const char* ids[] = {"cwell", "expdecay", "gauss", "pow2", "well4"};
  double worst_op = 0.0, worst_hs = 0.0;
  int violations = 0;
  for (const char* id : ids) {
    const PotentialSpec V = corpus(id);
    const double m1 = moments(V, 0.25).l1;
    const QuadratureGrid grid = make_grid(V, 400);
    for (int j = 0; j < 20; ++j) {
      const double r = 0.02 * m1 * std::pow(100.0, j / 19.0);
      const double theta = j % 4 == 0 ? 0.0 : (j % 4 == 2 ? pi : pi * (j % 7 + 1) / 8.0);
      const cplx k = std::polar(r, theta);
      const cplx kk(k.real(), std::max(0.0, k.imag()));
      const SchattenReport s = schatten_report(discretize(V, Wavenumber(kk), grid));
      const double bound = m1 / std::abs(kk);
      worst_op = std::max(worst_op, s.opnorm / bound);
      worst_hs = std::max(worst_hs, s.s2 / bound);
      if (s.opnorm > bound || s.s2 > bound) ++violations;
    }
  }
  return {violations == 0, fmt("5 potentials x 20 k (10 real), max opnorm/bound %.4g, max s2/bound %.4g, ", worst_op,
                               worst_hs) +
                               std::to_string(violations) + " violations"};
}

Outcome scaling_law() {
  bool ok = true;
  std::string detail;
  for (double p : {0.25, 0.5, 0.75}) {
    const auto V = PotentialSpec::power_tail(0.5, 1.0 + p + 0.02);
    const ScalingSweep s = s1_scaling_sweep(V, p);
    const bool good = std::isfinite(s.sup_fine) && s.stability <= 0.05 && std::abs(s.slope + (1.0 - p)) <= 0.05;
    ok = ok && good;
    detail += fmt("p=%.2g: sup %.4g", p, s.sup_fine) + fmt(", change %.2g, slope %.4g; ", s.stability, s.slope);
  }
  return {ok, detail + "need change <= 0.05 and |slope + 1 - p| <= 0.05"};
}

Outcome oracle_equivalence() {
  bool ok = true;
  double worst = 0.0;
  std::string detail;
  for (const auto& np : default_config().potentials) {
    if (!np.spec.compact()) continue;
    const SpectrumResult sp = find_spectrum(np.spec);
    const FDSpectrumResult fd = fd_spectrum(np.spec, 20.0, 4000);
    std::vector<cplx> ks;
    for (const auto& p : sp.points) {
      if (p.k.imag() >= FDOptions{}.min_decay) ks.push_back(p.k);
    }
    ok = ok && ks.size() == fd.eigenvalues.size();
    for (const cplx& lam : fd.eigenvalues) {
      double best = INFINITY;
      for (const cplx& k : ks) best = std::min(best, std::abs(k * k - lam) / std::abs(lam));
      worst = std::max(worst, best);
    }
    detail += np.id + " " + std::to_string(ks.size()) + "/" + std::to_string(fd.eigenvalues.size()) + ", ";
  }
  return {ok && worst <= 1e-4, "counts " + detail + fmt("max relative mismatch %.3g (tol 1e-4)", worst)};
}

Outcome theorem_witness() {
  const CorpusSpectra& cs = corpus_spectra();
  const TheoremReport rep = theorem_report(cs.cfg, cs.ids, cs.cs, cs.spectra);
  bool ok = true;
  double spread = 0.0, cubic = -INFINITY;
  for (const auto& ck : rep.checks) {
    if (ck.name == "theorem ratio spread") spread = std::max(spread, ck.observed);
    if (ck.name == "cubic lemma") cubic = std::max(cubic, ck.observed);
    if (ck.name == "theorem ratio spread" || ck.name == "cubic lemma" || ck.name == "theorem_C finite") {
      ok = ok && ck.passed;
    }
  }
  double C = 0.0;
  for (const auto& r : rep.rows) C = std::max(C, r.ratio);
  return {ok && std::isfinite(C), fmt("theorem_C %.4g, max spread %.4g (tol 50), max over zeros of Im k^3/(3R^2) - Im k/4 = %.3g (must be <= 0)", C,
                                      spread, cubic)};
}

double det2_relation(bool corrected) {
  const auto V = PotentialSpec::step({{0.0, 1.0, -2.0}});
  const QuadratureGrid grid = make_grid(V, 400);
  double worst = 0.0;
  for (int j = 1; j <= 10; ++j) {
    const double k = j;
    const DiscretizedBS M = discretize(V, Wavenumber(k, 0.0), grid);
    const double log_abs_a = std::log(std::abs(jost_function(V, Wavenumber(k, 0.0)).a));
    const cplx integral = V.integral();
    double rhs = -(integral / (2.0 * I * k)).real() + std::log(std::abs(det2(M)));
    if (corrected) {
      // the trace of U M also carries the oscillating part int V e^{2ikx} / (2ik)
      const cplx osc = -2.0 * (std::exp(2.0 * I * k) - 1.0) / (2.0 * I * k) / (2.0 * I * k);
      rhs += osc.real();
    }
    worst = std::max(worst, std::abs(log_abs_a - rhs));
  }
  return worst;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {1, "Blaschke contour identity", blaschke_identity},
      {2, "Jost function against the step-well closed form", jost_closed_form},
      {3, "perturbation determinant equals the Jost function", determinant_identification},
      {4, "trace formula for real and complex step wells", full_trace_formula},
      {5, "disk bound over the default corpus", disk_bound},
      {6, "operator-norm and Hilbert-Schmidt bounds", operator_bounds},
      {7, "S1 scaling law at real k", scaling_law},
      {8, "finite-difference oracle equivalence", oracle_equivalence},
      {9, "eigenvalue sum boundedness witness", theorem_witness},
      {10, "det2 relation at real k", [] {
         const double w = det2_relation(false);
         return Outcome{w <= 1e-4, fmt("step well -2 on [0,1], k = 1..10, max |lhs - rhs| = %.3g (tol 1e-4)", w)};
       }},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.passed ? 0 : 1;
    std::printf("%s %2d %s: %s\n", o.passed ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  const double w = det2_relation(true);
  std::printf("NOTE 10 with Re int V e^{2ikx}/(2ik) added to the right side: max |lhs - rhs| = %.3g (%s at 1e-4)\n", w,
              w <= 1e-4 ? "within" : "outside");
  std::printf("%d of 10 criteria passed\n", 10 - failed);
  return failed == 0 ? 0 : 1;
}
