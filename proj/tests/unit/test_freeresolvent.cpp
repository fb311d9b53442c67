#include <doctest.h>

#include <cmath>
#include <random>

#include <boost/math/quadrature/ooura_fourier_integrals.hpp>

#include "tracelab/freeresolvent.hpp"

using namespace tracelab;

TEST_CASE("wavenumber domain") {
  CHECK_THROWS(Wavenumber(0.0, 0.0));
  CHECK_THROWS(Wavenumber(1.0, -0.5));
  CHECK(Wavenumber(1.0, 0.0).real());
  CHECK(Wavenumber(0.0, 2.0).energy() == cplx(-4.0));
}

TEST_CASE("kernel at k = i from the sine transform") {
  // (2/pi) int_0^inf sin^2(xi) / (xi^2 + 1) d xi, with sin^2 = (1 - cos 2 xi)/2
  boost::math::quadrature::ooura_fourier_cos<double> cosine;
  const double cos_part = cosine.integrate([](double t) { return 1.0 / (t * t + 1.0); }, 2.0).first;
  const double oracle = (2.0 / pi) * (pi / 4.0 - 0.5 * cos_part);
  CHECK(oracle == doctest::Approx(std::sinh(1.0) / std::exp(1.0)).epsilon(1e-10));
  const cplx g = kernel(Wavenumber(0.0, 1.0), 1.0, 1.0);
  CHECK(std::abs(g - oracle) < 1e-12);
}

TEST_CASE("kernel boundary value at real k") {
  const cplx g = kernel(Wavenumber(1.0, 0.0), 1.0, 2.0);
  CHECK(std::abs(g - cplx(-0.35017548837401464, 0.76514740123429259)) < 1e-14);
  CHECK(std::abs(kernel_lower(1.0, 1.0, 2.0) - std::conj(g)) < 1e-14);
}

TEST_CASE("kernel vanishes on the boundary") {
  for (cplx k : {cplx(1.0, 0.0), cplx(0.3, 2.0), cplx(-4.0, 0.1)}) {
    CHECK(kernel(Wavenumber(k), 0.0, 1.7) == cplx(0.0));
    CHECK(kernel(Wavenumber(k), 2.5, 0.0) == cplx(0.0));
  }
}

TEST_CASE("kernel symmetry and uniform bound") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pos(0.0, 20.0), re(-10.0, 10.0), im(0.0, 10.0);
  for (int i = 0; i < 2000; ++i) {
    const cplx k(re(rng), i % 5 == 0 ? 0.0 : im(rng));
    if (k == 0.0) continue;
    const Wavenumber w(k);
    const double x = pos(rng), y = pos(rng);
    CHECK(kernel(w, x, y) == kernel(w, y, x));
    CHECK(std::abs(kernel(w, x, y)) <= (1.0 + 1e-12) / std::abs(k));
  }
}

TEST_CASE("kernel solves the resolvent equation away from the diagonal") {
  // -g'' - k^2 g = 0 in x for x != y, second differences
  const Wavenumber w(0.7, 0.4);
  const double y = 1.3, h = 1e-3;
  for (double x : {0.4, 2.0}) {
    const cplx d2 = (kernel(w, x + h, y) - 2.0 * kernel(w, x, y) + kernel(w, x - h, y)) / (h * h);
    CHECK(std::abs(-d2 - w.energy() * kernel(w, x, y)) < 1e-5);
  }
  // derivative jump -1 across the diagonal
  const cplx left = (kernel(w, y, y) - kernel(w, y - h, y)) / h;
  const cplx right = (kernel(w, y + h, y) - kernel(w, y, y)) / h;
  CHECK(std::abs(right - left + 1.0) < 1e-2);
}

TEST_CASE("exprel") {
  CHECK(exprel(0.0) == cplx(1.0));
  for (cplx z : {cplx(1e-9, 0.0), cplx(0.0, 1e-7), cplx(1e-3, -2e-3), cplx(0.5, 1.0), cplx(-30.0, 4.0)}) {
    const cplx naive = (std::exp(z) - 1.0) / z;
    cplx series = 0.0, term = 1.0;
    for (int n = 1; n < 12; ++n) {
      series += term;
      term *= z / static_cast<double>(n + 1);
    }
    const cplx ref = std::abs(z) < 1e-2 ? series : naive;
    CHECK(std::abs(exprel(z) - ref) <= 1e-13 * std::abs(ref));
  }
}
