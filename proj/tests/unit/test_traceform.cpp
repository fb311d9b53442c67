#include <doctest.h>

#include <cmath>
#include <random>

#include "tracelab/oracle.hpp"
#include "tracelab/traceform.hpp"

using namespace tracelab;

namespace {

double identity_lhs(const ZeroSet& zs, double R) {
  const PowerSums s = power_sums(zs);
  return 2.0 * pi * R * R * s.s1 - (2.0 * pi / 3.0) * s.s3;
}

}  // namespace

TEST_CASE("constant function integrates to zero") {
  const ContourIntegral c = contour_log_integral([](cplx) { return cplx(1.0); }, {3.0});
  CHECK(std::abs(c.total) < 1e-12);
}

TEST_CASE("single Blaschke factor") {
  const ZeroSet zs = make_zero_set(std::vector<cplx>{I});
  const ContourIntegral c = contour_log_integral([&](cplx k) { return blaschke_eval(zs, k); }, {4.0});
  CHECK(c.total.real() == doctest::Approx(32.0 * pi + 2.0 * pi / 3.0).epsilon(1e-10));
}

TEST_CASE("two Blaschke factors") {
  const ZeroSet zs = make_zero_set(std::vector<cplx>{I, cplx(1.0, 1.0)});
  const ContourIntegral c = contour_log_integral([&](cplx k) { return blaschke_eval(zs, k); }, {6.0});
  const double target = 2.0 * pi * 36.0 * 2.0 - (2.0 * pi / 3.0) * 1.0;
  CHECK(identity_lhs(zs, 6.0) == doctest::Approx(target));
  CHECK(c.total.real() == doctest::Approx(target).epsilon(1e-10));
}

TEST_CASE("Blaschke identity on random zero sets") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> count(1, 8);
  std::uniform_real_distribution<double> mod(0.05, 2.0), arg(0.02, pi - 0.02), scale(2.1, 6.0);
  for (int t = 0; t < 10; ++t) {
    std::vector<cplx> ks;
    const int n = count(rng);
    for (int j = 0; j < n; ++j) ks.push_back(std::polar(mod(rng), arg(rng)));
    const ZeroSet zs = make_zero_set(ks);
    const double R = scale(rng) * zs.max_modulus;
    const ContourIntegral c = contour_log_integral([&](cplx k) { return blaschke_eval(zs, k); }, {R});
    const double lhs = identity_lhs(zs, R);
    CHECK(std::abs(c.total.real() - lhs) <= 1e-6 * (1.0 + std::abs(lhs)));
  }
}

TEST_CASE("trace report for the free operator") {
  const TraceReport tr = trace_report(PotentialSpec::zero(), find_spectrum(PotentialSpec::zero()));
  CHECK(tr.lhs == 0.0);
  CHECK(std::abs(tr.rhs) < 1e-12);
}

TEST_CASE("trace identity for the real well") {
  const auto V = PotentialSpec::step({{0.0, 1.0, -4.0}});
  const SpectrumResult sp = find_spectrum(V);
  const TraceReport tr = trace_report(V, sp);
  const double kappa = well_bound_states(4.0, 1.0).at(0);
  const double R = 8.0;
  CHECK(tr.R == R);
  CHECK(tr.zeros == 1);
  CHECK(tr.lhs == doctest::Approx(2.0 * pi * R * R * kappa + (2.0 * pi / 3.0) * std::pow(kappa, 3)).epsilon(1e-9));
  CHECK(tr.discrepancy <= 1e-5 * (1.0 + std::abs(tr.lhs)));
  CHECK(std::abs(tr.arc_part.real() + tr.interval_part - tr.rhs) < 1e-9 * (1.0 + std::abs(tr.rhs)));
}

TEST_CASE("trace identity for the complex well") {
  const auto V = PotentialSpec::step({{0.0, 1.0, -4.0 * std::polar(1.0, pi / 4)}});
  const TraceReport tr = trace_report(V, find_spectrum(V));
  CHECK(tr.zeros == static_cast<int>(fd_spectrum(V).eigenvalues.size()));
  CHECK(tr.discrepancy <= 1e-3 * (1.0 + std::abs(tr.lhs)));
}

TEST_CASE("a / B integrates to zero") {
  const auto V = PotentialSpec::gaussian({-6.0, 2.0}, 1.0, 0.5);
  const SpectrumResult sp = find_spectrum(V);
  const ZeroSet zs = make_zero_set(sp.points);
  const double R = radius(V);
  const ContourIntegral whole = contour_log_integral([&](cplx k) { return jost_a(V, k); }, {R});
  const ContourIntegral ratio =
      contour_log_integral([&](cplx k) { return jost_a(V, k) / blaschke_eval(zs, k); }, {R});
  CHECK(std::abs(ratio.total.real()) <= 1e-5 * std::abs(whole.total.real()));
}
