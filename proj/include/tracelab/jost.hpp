#pragma once

#include <span>
#include <vector>

#include "tracelab/common.hpp"
#include "tracelab/freeresolvent.hpp"
#include "tracelab/potential.hpp"

namespace tracelab {

enum class JostMethod { ode, volterra };

const char* to_string(JostMethod m);

struct JostOptions {
  // Embedded-error tolerance of the backward integrator.
  double rtol = 1e-10;
  double atol = 1e-13;
  // The potential is cut at the first x with tail mass below tail_tol, but
  // never beyond max_length * max(1, 1/|k|); the remaining tail enters
  // through a first-order asymptotic state and its size is added to the
  // error estimate.
  double tail_tol = 1e-10;
  double max_length = 200.0;
  // Volterra panels: Gauss-Legendre order and per-panel fixed-point control.
  int panel_order = 10;
  double iteration_tol = 1e-12;
  int max_iterations = 200;
  long max_steps = 20'000'000;
};

// Jost solution f(x, k) ~ e^{ikx}, sampled on a grid in [0, x_max].
struct JostSolution {
  Wavenumber k;
  JostMethod method;
  double x_max = 0.0;
  std::vector<double> grid;
  std::vector<cplx> f_values;
  std::vector<cplx> fprime_values;
  // Integrator/truncation error estimate for f(0, k) relative to e^{0} = 1.
  double error_estimate = 0.0;
};

// a(k) = f(0, k), the perturbation determinant det(I + V R(k^2)).
struct JostValue {
  Wavenumber k;
  cplx a;
  double err = 0.0;
  JostMethod method;
};

// Truncation point used for V at wavenumber modulus k_abs.
double truncation_length(const PotentialSpec& V, double k_abs, const JostOptions& opts = {});

// Solves -f'' + V f = k^2 f with f ~ e^{ikx} at infinity. With output_points
// the solution is reported exactly at those points (ascending, >= 0);
// otherwise at the integrator's own nodes.
JostSolution jost_solution(const PotentialSpec& V, Wavenumber k,
                           JostMethod method = JostMethod::ode, const JostOptions& opts = {},
                           std::span<const double> output_points = {});

// a(k) by both methods; err = |a_ode - a_volterra|.
JostValue jost_function(const PotentialSpec& V, Wavenumber k, const JostOptions& opts = {});

// a(k) by the backward integrator alone; err is its own estimate. This is
// the evaluator used in inner loops (root finding, contour quadrature).
JostValue jost_value(const PotentialSpec& V, Wavenumber k, const JostOptions& opts = {});

// a'(k) by central differences with step 1e-6 (1 + |k|).
cplx jost_derivative(const PotentialSpec& V, cplx k, const JostOptions& opts = {});

// Evaluates a(k) for any k in the closed upper half-plane except k = 0,
// using jost_value.
cplx jost_a(const PotentialSpec& V, cplx k, const JostOptions& opts = {});

}  // namespace tracelab
