#pragma once

#include <vector>

#include "tracelab/common.hpp"
#include "tracelab/spectra.hpp"

namespace tracelab {

// Zeros in the upper half-plane, repeated by multiplicity, ascending |k|.
struct ZeroSet {
  std::vector<cplx> zeros;
  double max_modulus = 0.0;
};

// Validates Im k > 0 and sorts.
ZeroSet make_zero_set(std::vector<cplx> zeros);
ZeroSet make_zero_set(const std::vector<SpectralPoint>& points);

// s_n = sum_j Im(k_j^n)
struct PowerSums {
  double s1 = 0.0;
  double s2 = 0.0;
  double s3 = 0.0;
};

PowerSums power_sums(const ZeroSet& zs);

// B(k) = prod_j (k - k_j) / (k - conj(k_j)) * k_j / |k_j|. Throws
// std::invalid_argument within 1e-14 of a pole conj(k_j).
cplx blaschke_eval(const ZeroSet& zs, cplx k);

// Sum of per-factor principal logarithms plus i sum arg k_j. It is a
// branch of log B(k) that tends to i sum arg k_j as |k| -> inf.
cplx blaschke_log(const ZeroSet& zs, cplx k);

// i sum arg k_j - 2i s1/k - i s2/k^2 - 2i s3/(3k^3)
cplx blaschke_log_expansion(const ZeroSet& zs, cplx k);

// 2 sum_j (|k_j|/|k|)^4 / (1 - |k_j|/|k|), valid for |k| > max_modulus.
double blaschke_expansion_bound(const ZeroSet& zs, double k_abs);

}  // namespace tracelab
