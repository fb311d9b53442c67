#pragma once

#include <functional>
#include <string>
#include <vector>

#include "tracelab/blaschke.hpp"
#include "tracelab/common.hpp"
#include "tracelab/jost.hpp"
#include "tracelab/potential.hpp"
#include "tracelab/spectra.hpp"

namespace tracelab {

// Closed contour: [-R, R] (optionally indented over k = 0 by a half-circle of
// radius `indent`) followed by the upper half-circle |k| = R back to -R.
// Weight rho(k) = R^2 - k^2.
struct ContourSpec {
  double R = 0.0;
  int n_interval = 256;  // Gauss nodes on the interval, split evenly between halves
  int n_arc = 256;
  double grading = 3.0;  // interval nodes follow k = +-R t^grading toward 0
  double indent = 0.0;
};

struct ContourIntegral {
  cplx interval_part;  // including the indentation, if any
  cplx arc_part;
  cplx total;
  double min_abs = 0.0;    // smallest |f| on the quadrature nodes
  double inner_abs = 0.0;  // smallest |f| at the two nodes nearest k = 0
  int evaluations = 0;
  ContourSpec spec;     // node counts actually used
  double change = 0.0;  // |total(n) - total(n/2)| of the last doubling
};

using AnalyticFn = std::function<cplx(cplx)>;

// Integral of log f(k) rho(k) dk over the contour with log f continued along
// the path, on the node counts of c exactly. The real part does not depend
// on the starting branch.
ContourIntegral contour_log_integral_fixed(const AnalyticFn& f, const ContourSpec& c);

// As above, doubling both node counts until the total changes by less than
// rel_tol relative (with an absolute floor 1e-12 (1 + R^3)).
ContourIntegral contour_log_integral(const AnalyticFn& f, const ContourSpec& c,
                                     double rel_tol = 1e-8, int max_doublings = 7);

struct TraceOptions {
  double R = 0.0;  // 0: R = radius(V)
  int n_interval = 256;
  int n_arc = 256;
  double grading = 3.0;
  bool adaptive = true;  // false: use the node counts as given
  double rel_tol = 1e-8;
  int max_doublings = 7;
  JostOptions jost{};
};

struct TraceReport {
  double R = 0.0;
  PowerSums sums;
  int zeros = 0;
  double lhs = 0.0;  // 2 pi R^2 s1 - (2 pi / 3) s3
  double rhs = 0.0;  // Re of the contour integral of log a(k) rho(k)
  double discrepancy = 0.0;
  cplx arc_part;
  double interval_part = 0.0;
  ContourSpec contour;
  double convergence_change = 0.0;
  bool near_resonance = false;
  std::vector<std::string> notes;
};

// Trace identity for V with zeros taken from the spectrum. R defaults to
// 2 int |V| and is raised by 1% while a zero lies within 1e-6 of the contour.
// Slowly decaying tails are indented around k = 0 with radius 1e-3 R, and
// zeros inside the indentation are left out of the left-hand side.
TraceReport trace_report(const PotentialSpec& V, const SpectrumResult& spectrum,
                         const TraceOptions& opts = {});

}  // namespace tracelab
