#pragma once

#include <cmath>
#include <functional>
#include <queue>
#include <span>
#include <vector>

#include "tracelab/common.hpp"

namespace tracelab {

// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Rules are computed once per order and cached.
const GaussRule& gauss_legendre(int order);

struct Panel {
  double a;
  double b;
};

// Nodes and weights of a composite Gauss-Legendre rule over the given panels.
struct CompositeRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
CompositeRule composite_gauss(std::span<const Panel> panels, int order);

// Splits [a, b] into `count` equal panels.
std::vector<Panel> uniform_panels(double a, double b, int count);

struct AdaptiveTolerance {
  double abs = 1e-14;
  double rel = 1e-12;
  int max_intervals = 4000;
};

template <class T>
struct QuadResult {
  T value{};
  double error = 0.0;
  int intervals = 0;
};

namespace detail {

// Gauss-Kronrod 7/15 abscissae and weights (QUADPACK qk15).
inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class T, class F>
QuadResult<T> gk15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const T fc = f(center);
  T kronrod = fc * kWgk[7];
  T gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const T f1 = f(center - dx);
    const T f2 = f(center + dx);
    kronrod += (f1 + f2) * kWgk[j];
    if (j % 2 == 1) gauss += (f1 + f2) * kWg[j / 2];
  }
  QuadResult<T> r;
  r.value = kronrod * half;
  r.error = std::abs(half * (kronrod - gauss));
  r.intervals = 1;
  return r;
}

}  // namespace detail

// Globally adaptive Gauss-Kronrod quadrature of f over [a, b]. T may be
// double or cplx. Throws NumericalError if the interval budget runs out
// before the tolerance is met.
template <class T, class F>
QuadResult<T> integrate_adaptive(F&& f, double a, double b,
                                 const AdaptiveTolerance& tol = {}) {
  QuadResult<T> total;
  if (a == b) return total;
  struct Piece {
    double a, b;
    QuadResult<T> r;
    bool operator<(const Piece& o) const { return r.error < o.r.error; }
  };
  std::priority_queue<Piece> heap;
  auto first = detail::gk15<T>(f, a, b);
  heap.push({a, b, first});
  T value = first.value;
  double error = first.error;
  int count = 1;
  while (error > std::max(tol.abs, tol.rel * std::abs(value))) {
    if (count >= tol.max_intervals) {
      throw NumericalError("adaptive quadrature: interval budget exhausted on [" +
                           std::to_string(a) + ", " + std::to_string(b) + "]");
    }
    Piece worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    auto left = detail::gk15<T>(f, worst.a, mid);
    auto right = detail::gk15<T>(f, mid, worst.b);
    value += left.value + right.value - worst.r.value;
    error += left.error + right.error - worst.r.error;
    heap.push({worst.a, mid, left});
    heap.push({mid, worst.b, right});
    ++count;
  }
  // Re-sum from the leaves to shed accumulated rounding.
  T sum{};
  double err = 0.0;
  while (!heap.empty()) {
    sum += heap.top().r.value;
    err += heap.top().r.error;
    heap.pop();
  }
  total.value = sum;
  total.error = err;
  total.intervals = count;
  return total;
}

// Pairwise summation, reproducible for a fixed input order.
template <class T>
T pairwise_sum(std::span<const T> values) {
  if (values.size() <= 8) {
    T s{};
    for (const T& v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace tracelab
