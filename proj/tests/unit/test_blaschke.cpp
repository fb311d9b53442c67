#include <doctest.h>

#include <cmath>
#include <random>

#include "tracelab/blaschke.hpp"

using namespace tracelab;

TEST_CASE("single factor") {
  const ZeroSet zs = make_zero_set(std::vector<cplx>{I});
  CHECK(std::abs(blaschke_eval(zs, 0.0) - cplx(0.0, -1.0)) < 1e-15);
  CHECK(std::abs(blaschke_eval(zs, I)) < 1e-15);
  CHECK_THROWS(blaschke_eval(zs, -I));
  CHECK_THROWS(make_zero_set(std::vector<cplx>{cplx(1.0, 0.0)}));
}

TEST_CASE("product of factors on the real line") {
  const ZeroSet zs = make_zero_set(std::vector<cplx>{I, cplx(1.0, 1.0)});
  const cplx k = 5.0;
  cplx oracle = 1.0;
  for (cplx z : {I, cplx(1.0, 1.0)}) oracle *= (k - z) / (k - std::conj(z)) * z / std::abs(z);
  CHECK(std::abs(blaschke_eval(zs, k) - oracle) < 1e-15);
  CHECK(std::abs(std::abs(blaschke_eval(zs, k)) - 1.0) < 1e-15);
  CHECK(zs.max_modulus == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("power sums") {
  PowerSums s = power_sums(make_zero_set(std::vector<cplx>{I}));
  CHECK(s.s1 == doctest::Approx(1.0));
  CHECK(std::abs(s.s2) < 1e-15);
  CHECK(s.s3 == doctest::Approx(-1.0));
  s = power_sums(make_zero_set(std::vector<cplx>{cplx(1.0, 1.0)}));
  CHECK(s.s1 == doctest::Approx(1.0));
  CHECK(s.s2 == doctest::Approx(2.0));
  CHECK(s.s3 == doctest::Approx(2.0));
  s = power_sums(make_zero_set(std::vector<cplx>{I, cplx(1.0, 1.0)}));
  CHECK(s.s1 == doctest::Approx(2.0));
  CHECK(s.s2 == doctest::Approx(2.0));
  CHECK(s.s3 == doctest::Approx(1.0));
}

namespace {

ZeroSet random_set(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(1, 8);
  std::uniform_real_distribution<double> mod(0.05, 2.0), arg(0.02, pi - 0.02);
  std::vector<cplx> zs;
  const int n = count(rng);
  for (int j = 0; j < n; ++j) zs.push_back(std::polar(mod(rng), arg(rng)));
  return make_zero_set(zs);
}

}  // namespace

TEST_CASE("unimodular on the real line, contractive above it") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> re(0.0, 5.0);
  std::uniform_real_distribution<double> im(0.0, 5.0);
  for (int t = 0; t < 10; ++t) {
    const ZeroSet zs = random_set(rng);
    for (int i = 0; i < 200; ++i) {
      CHECK(std::abs(std::abs(blaschke_eval(zs, re(rng))) - 1.0) < 1e-12);
      CHECK(std::abs(blaschke_eval(zs, cplx(re(rng), im(rng)))) <= 1.0 + 1e-14);
    }
  }
}

TEST_CASE("logarithm is a branch of log B with the stated expansion") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 20; ++t) {
    const ZeroSet zs = random_set(rng);
    for (double r : {3.0, 8.0, 40.0}) {
      const cplx k = std::polar(r * zs.max_modulus, 0.3 + 0.1 * t);
      const cplx l = blaschke_log(zs, k);
      CHECK(std::abs(std::exp(l) - blaschke_eval(zs, k)) < 1e-12);
      CHECK(std::abs(l - blaschke_log_expansion(zs, k)) <= blaschke_expansion_bound(zs, std::abs(k)));
    }
  }
}
