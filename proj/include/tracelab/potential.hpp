#pragma once

#include <limits>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tracelab/common.hpp"

namespace tracelab {

// V = value on [lo, hi), zero elsewhere.
struct StepSegment {
  double lo = 0.0;
  double hi = 0.0;
  cplx value{};
};

struct StepFamily {
  std::vector<StepSegment> segments;
};

// V(x) = A exp(-((x - center) / width)^2)
struct GaussianFamily {
  cplx amplitude{};
  double width = 1.0;
  double center = 0.0;
};

// V(x) = A exp(-rate x)
struct ExpDecayFamily {
  cplx amplitude{};
  double rate = 1.0;
};

// V(x) = A (1 + x)^(-exponent), exponent > 1
struct PowerTailFamily {
  cplx amplitude{};
  double exponent = 2.0;
};

// Piecewise-linear interpolation of samples; zero outside [grid.front(), grid.back()].
struct SampledFamily {
  std::vector<double> grid;
  std::vector<cplx> values;
};

using PotentialFamily =
    std::variant<StepFamily, GaussianFamily, ExpDecayFamily, PowerTailFamily, SampledFamily>;

// An immutable complex potential V: [0, inf) -> C from one of the built-in
// families. Construction validates the family parameters.
class PotentialSpec {
 public:
  PotentialSpec();  // V = 0
  explicit PotentialSpec(PotentialFamily family);

  static PotentialSpec zero() { return PotentialSpec(); }
  static PotentialSpec step(std::vector<StepSegment> segments);
  static PotentialSpec gaussian(cplx amplitude, double width, double center = 0.0);
  static PotentialSpec exp_decay(cplx amplitude, double rate);
  static PotentialSpec power_tail(cplx amplitude, double exponent);
  static PotentialSpec sampled(std::vector<double> grid, std::vector<cplx> values);

  const PotentialFamily& family() const { return family_; }
  std::string_view kind() const;

  // V(x) without the x >= 0 check; callers inside the library use this.
  cplx operator()(double x) const;
  double abs_at(double x) const { return std::abs((*this)(x)); }

  bool is_zero() const;
  bool compact() const;
  // Right end of the support for compact families, +inf otherwise.
  double support_end() const;
  // Interior points where V or its derivative may jump, ascending, in (0, support_end).
  std::vector<double> breakpoints() const;
  // Integral of |V| over [x, inf).
  double tail_mass(double x) const;
  // Smallest x with tail_mass(x) <= tol (exact support end for compact families).
  double cutoff(double tol) const;
  double max_abs() const;
  // Integral of V over [0, inf).
  cplx integral() const { return tail_integral(0.0); }
  // Integral of V over [x, inf).
  cplx tail_integral(double x) const;

  // c V
  PotentialSpec scaled(cplx c) const;
  // s^2 V(s x); not available for PowerTail.
  PotentialSpec dilated(double s) const;

 private:
  PotentialFamily family_;
};

// V(x); throws std::invalid_argument for x < 0.
cplx eval(const PotentialSpec& spec, double x);

struct Moments {
  double l1 = 0.0;        // integral of |V|
  double weighted = 0.0;  // integral of x^p |V|
  double p = 0.0;
};

// Requires 0 < p < 1; PowerTail additionally requires p < exponent - 1.
Moments moments(const PotentialSpec& spec, double p);

// R = 2 * integral of |V|, the contour radius.
double radius(const PotentialSpec& spec);

}  // namespace tracelab
