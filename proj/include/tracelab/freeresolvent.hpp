#pragma once

#include "tracelab/common.hpp"

namespace tracelab {

// Spectral parameter z = k^2 with Im k >= 0, k != 0. Real k stands for the
// boundary value of the resolvent from the upper half-plane.
class Wavenumber {
 public:
  explicit Wavenumber(cplx k);
  Wavenumber(double re, double im) : Wavenumber(cplx(re, im)) {}

  cplx value() const { return k_; }
  cplx energy() const { return k_ * k_; }
  bool real() const { return k_.imag() == 0.0; }

 private:
  cplx k_;
};

// Integral kernel of the Dirichlet resolvent (-d^2/dx^2 - k^2)^(-1) on the
// half-line: sin(k min(x,y)) exp(ik max(x,y)) / k.
cplx kernel(Wavenumber k, double x, double y);

// Boundary value from the lower side, R(k^2 - i0), for real k > 0.
cplx kernel_lower(double k, double x, double y);

}  // namespace tracelab
