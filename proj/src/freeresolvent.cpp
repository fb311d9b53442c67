#include "tracelab/freeresolvent.hpp"

#include <algorithm>
#include <cmath>

namespace tracelab {

Wavenumber::Wavenumber(cplx k) : k_(k) {
  if (!std::isfinite(k.real()) || !std::isfinite(k.imag())) {
    throw std::invalid_argument("wavenumber must be finite");
  }
  if (k.imag() < 0.0) throw std::invalid_argument("wavenumber must satisfy Im k >= 0");
  if (k == cplx(0.0)) throw std::invalid_argument("wavenumber k = 0 is excluded");
}

cplx kernel(Wavenumber wk, double x, double y) {
  if (x < 0.0 || y < 0.0) throw std::invalid_argument("resolvent kernel needs x, y >= 0");
  const cplx k = wk.value();
  const double lo = std::min(x, y);
  const double hi = std::max(x, y);
  // sin(k lo) e^{ik hi} / k = e^{ik(hi-lo)} (e^{2ik lo} - 1) / (2ik); both
  // exponentials are bounded for Im k >= 0.
  return std::exp(I * k * (hi - lo)) * lo * exprel(2.0 * I * k * lo);
}

cplx kernel_lower(double k, double x, double y) {
  if (!(k > 0.0)) throw std::invalid_argument("kernel_lower needs real k > 0");
  return std::conj(kernel(Wavenumber(k, 0.0), x, y));
}

}  // namespace tracelab
