#include "tracelab/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace tracelab {

std::vector<cplx> tridiagonal_eigenvalues(std::vector<cplx> d, std::vector<cplx> e) {
  const int n = static_cast<int>(d.size());
  if (n == 0) return d;
  if (static_cast<int>(e.size()) != n - 1) {
    throw std::invalid_argument("off-diagonal length must be one less than the diagonal");
  }
  e.push_back(0.0);
  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= 1e-16 * dd) break;
      }
      if (m == l) continue;
      if (iter++ == 100) throw NumericalError("tridiagonal QL did not converge");
      cplx g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      cplx r = std::sqrt(g * g + 1.0);
      const cplx gp = g + r, gm = g - r;
      g = d[m] - d[l] + e[l] / (std::abs(gp) >= std::abs(gm) ? gp : gm);
      cplx s = 1.0, c = 1.0, p = 0.0;
      int i;
      bool deflated = false;
      for (i = m - 1; i >= l; --i) {
        const cplx f = s * e[i], b = c * e[i];
        r = std::sqrt(f * f + g * g);
        e[i + 1] = r;
        if (r == 0.0) {
          // split: recover from underflow and restart this block
          d[i + 1] -= p;
          e[m] = 0.0;
          deflated = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * b;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - b;
      }
      if (deflated) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    } while (m != l);
  }
  return d;
}

namespace {

cplx sqrt_upper(cplx z) {
  cplx k = std::sqrt(z);
  return k.imag() < 0.0 ? -k : k;
}

}  // namespace

FDSpectrumResult fd_spectrum(const PotentialSpec& V, double L, int n, const FDOptions& opts) {
  if (!(L > 0.0) || n < 2) throw std::invalid_argument("fd_spectrum needs L > 0 and n >= 2");
  const double h = L / n;
  const std::vector<double> breaks = V.breakpoints();
  std::vector<cplx> d(n - 1), e(n - 2, cplx(-1.0 / (h * h)));
  for (int j = 1; j < n; ++j) {
    const double x = j * h;
    cplx v = V(x);
    for (double b : breaks) {
      if (std::abs(x - b) <= 1e-9 * h) v = 0.5 * (V(std::nextafter(b, 0.0)) + V(b));
    }
    if (V.compact() && std::abs(x - V.support_end()) <= 1e-9 * h) {
      v = 0.5 * V(std::nextafter(x, 0.0));
    }
    d[j - 1] = 2.0 / (h * h) + v;
  }
  FDSpectrumResult out;
  out.L = L;
  out.n = n;
  const double m1 = moments(V, 0.5).l1;
  const double disk = (1.0 + opts.disk_margin) * m1 * m1;
  for (const cplx& lambda : tridiagonal_eigenvalues(std::move(d), std::move(e))) {
    const double axis = lambda.real() >= 0.0 ? std::abs(lambda.imag()) : std::abs(lambda);
    if (std::abs(lambda) > disk || axis <= opts.axis_distance) continue;
    if (sqrt_upper(lambda).imag() < opts.min_decay) continue;
    out.eigenvalues.push_back(lambda);
  }
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end(), [](cplx a, cplx b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  for (const cplx& lambda : out.eigenvalues) out.k_values.push_back(sqrt_upper(lambda));
  return out;
}

std::vector<double> well_bound_states(double v0, double width) {
  if (!(v0 > 0.0) || !(width > 0.0)) throw std::invalid_argument("well needs v0, width > 0");
  const double smax = std::sqrt(v0);
  // s cos(w s) + sqrt(v0 - s^2) sin(w s) vanishes exactly at the bound states
  // and has no poles.
  auto f = [&](double s) {
    return s * std::cos(width * s) + std::sqrt(std::max(0.0, v0 - s * s)) * std::sin(width * s);
  };
  const int scan = std::max(2000, static_cast<int>(200 * width * smax));
  std::vector<double> kappas;
  double s0 = smax / scan, f0 = f(s0);
  for (int i = 2; i <= scan; ++i) {
    const double s1 = i == scan ? std::nextafter(smax, 0.0) : smax * i / scan;
    const double f1 = f(s1);
    if ((f0 < 0.0) != (f1 < 0.0)) {
      double a = s0, b = s1, fa = f0;
      while (b - a > 1e-13 * smax) {
        const double m = 0.5 * (a + b), fm = f(m);
        if ((fm < 0.0) == (fa < 0.0)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
      }
      const double s = 0.5 * (a + b);
      if (s * s < v0) kappas.push_back(std::sqrt(v0 - s * s));
    }
    s0 = s1;
    f0 = f1;
  }
  std::sort(kappas.begin(), kappas.end());
  return kappas;
}

}  // namespace tracelab
