#include "tracelab/blaschke.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tracelab {

ZeroSet make_zero_set(std::vector<cplx> zeros) {
  for (const cplx& z : zeros) {
    if (!(z.imag() > 0.0) || !std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw std::invalid_argument("zero set entries must lie in the open upper half-plane");
    }
  }
  std::stable_sort(zeros.begin(), zeros.end(),
                   [](cplx a, cplx b) { return std::abs(a) < std::abs(b); });
  ZeroSet zs;
  zs.max_modulus = zeros.empty() ? 0.0 : std::abs(zeros.back());
  zs.zeros = std::move(zeros);
  return zs;
}

ZeroSet make_zero_set(const std::vector<SpectralPoint>& points) {
  std::vector<cplx> zeros;
  for (const auto& p : points) zeros.insert(zeros.end(), p.multiplicity, p.k);
  return make_zero_set(std::move(zeros));
}

PowerSums power_sums(const ZeroSet& zs) {
  PowerSums s;
  for (const cplx& z : zs.zeros) {
    s.s1 += z.imag();
    s.s2 += (z * z).imag();
    s.s3 += (z * z * z).imag();
  }
  return s;
}

namespace {

void check_pole(cplx z, cplx k) {
  if (std::abs(k - std::conj(z)) < 1e-14) {
    throw std::invalid_argument("Blaschke product evaluated at a pole");
  }
}

}  // namespace

cplx blaschke_eval(const ZeroSet& zs, cplx k) {
  cplx b = 1.0;
  for (const cplx& z : zs.zeros) {
    check_pole(z, k);
    b *= (k - z) / (k - std::conj(z)) * (z / std::abs(z));
  }
  return b;
}

cplx blaschke_log(const ZeroSet& zs, cplx k) {
  cplx s = 0.0;
  for (const cplx& z : zs.zeros) {
    check_pole(z, k);
    const cplx factor = (k - z) / (k - std::conj(z));
    if (factor == 0.0) return {-std::numeric_limits<double>::infinity(), 0.0};
    s += std::log(factor) + I * std::arg(z);
  }
  return s;
}

cplx blaschke_log_expansion(const ZeroSet& zs, cplx k) {
  double args = 0.0;
  for (const cplx& z : zs.zeros) args += std::arg(z);
  const PowerSums p = power_sums(zs);
  return I * args - 2.0 * I * p.s1 / k - I * p.s2 / (k * k) - 2.0 * I * p.s3 / (3.0 * k * k * k);
}

double blaschke_expansion_bound(const ZeroSet& zs, double k_abs) {
  double b = 0.0;
  for (const cplx& z : zs.zeros) {
    const double r = std::abs(z) / k_abs;
    if (r >= 1.0) return std::numeric_limits<double>::infinity();
    b += 2.0 * r * r * r * r / (1.0 - r);
  }
  return b;
}

}  // namespace tracelab
