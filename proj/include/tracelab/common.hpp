#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace tracelab {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

// Raised when an integrator, solver or root finder cannot reach its target.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised for malformed run configurations.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// (e^z - 1) / z, accurate near z = 0.
cplx exprel(cplx z);

}  // namespace tracelab
