#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "tracelab/bs_operator.hpp"
#include "tracelab/jost.hpp"

using namespace tracelab;

namespace {

PotentialSpec well2() { return PotentialSpec::step({{0.0, 1.0, -2.0}}); }

cplx well2_a(cplx k) {
  const cplx kap = std::sqrt(k * k + 2.0);
  return std::exp(I * k) * (std::cos(kap) - I * (k / kap) * std::sin(kap));
}

// int_0^1 V(x) sin(kx) e^{ikx} / k dx for V = -2
cplx well2_trace(cplx k) { return -2.0 * ((std::exp(2.0 * I * k) - 1.0) / (2.0 * I * k) - 1.0) / (2.0 * I * k); }

}  // namespace

TEST_CASE("grid construction") {
  const QuadratureGrid g = make_grid(well2(), 400);
  CHECK(g.n == 400);
  CHECK(g.x_max == 1.0);
  double sum = 0.0;
  for (double w : g.weights) sum += w;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
  const auto two = PotentialSpec::step({{0.0, 0.37, -1.0}, {0.37, 1.2, 2.0}});
  const QuadratureGrid h = make_grid(two, 200);
  CHECK(std::abs(h.x_max - 1.2) < 1e-15);
  // the jump falls between panels
  const auto after = std::upper_bound(h.nodes.begin(), h.nodes.end(), 0.37) - h.nodes.begin();
  CHECK(after % h.order == 0);
  CHECK_THROWS(make_grid(std::vector<double>{0.0, 1.0, 0.5}));
}

TEST_CASE("zero potential") {
  const DiscretizedBS M = discretize(PotentialSpec::zero(), Wavenumber(1.0, 1.0), make_grid(PotentialSpec::zero(), 40));
  CHECK(M.entries.cwiseAbs().maxCoeff() == 0.0);
  const SchattenReport r = schatten_report(M);
  CHECK(r.s1 == 0.0);
  CHECK(r.s2 == 0.0);
  CHECK(r.opnorm == 0.0);
  CHECK(perturbation_det(M) == cplx(1.0));
  CHECK(det2(M) == cplx(1.0));
}

TEST_CASE("entries are symmetric") {
  const auto V = PotentialSpec::gaussian({-3.0, 1.0}, 0.8, 0.5);
  const DiscretizedBS M = discretize(V, Wavenumber(0.5, 0.2), make_grid(V, 200));
  CHECK((M.entries - M.entries.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("trace against the closed form") {
  const cplx k(0.0, 2.0);
  CHECK(std::abs(well2_trace(k) + 0.37728945486109177) < 1e-15);
  const DiscretizedBS M = discretize(well2(), Wavenumber(k), make_grid(well2(), 400));
  // U = -1, so the trace of M itself is the integral of |V| sin(kx) e^{ikx} / k
  CHECK(std::abs(M.entries.trace() - 0.37728945486109177) < 1e-8);
}

TEST_CASE("Schatten norms converge and respect the bounds") {
  const Wavenumber k(0.0, 2.0);
  const SchattenReport a = schatten_report(discretize(well2(), k, make_grid(well2(), 400)));
  const SchattenReport b = schatten_report(discretize(well2(), k, make_grid(well2(), 800)));
  CHECK(std::abs(a.s1 - b.s1) < 1e-6 * b.s1);
  CHECK(a.opnorm <= 1.0);
  CHECK(a.s2 <= 1.0);
  CHECK(a.opnorm <= a.s2);
  CHECK(a.s2 <= a.s1);
  CHECK(std::is_sorted(a.singular_values.rbegin(), a.singular_values.rend()));
}

TEST_CASE("Hilbert-Schmidt norm against the double integral") {
  const cplx k(0.7, 0.9);
  boost::math::quadrature::gauss_kronrod<double, 61> gk;
  auto inner = [&](double x) {
    auto f = [&](double y) { return 4.0 * std::norm(kernel(Wavenumber(k), x, y)); };
    return gk.integrate(f, 0.0, x, 0, 1e-13) + gk.integrate(f, x, 1.0, 0, 1e-13);
  };
  const double oracle = gk.integrate(inner, 0.0, 1.0, 0, 1e-12);
  const SchattenReport r = schatten_report(discretize(well2(), Wavenumber(k), make_grid(well2(), 400)));
  const DiscretizedBS base = discretize(well2(), Wavenumber(k), make_grid(well2(), 400));
  CHECK(r.s2 * r.s2 == doctest::Approx(base.entries.squaredNorm()).epsilon(1e-12));
  // the squared kernel has a kink on the diagonal, so the node sum converges as n^-2
  CHECK(r.s2 * r.s2 == doctest::Approx(oracle).epsilon(2e-5));
  const DiscretizedBS finer = discretize(well2(), Wavenumber(k), make_grid(well2(), 1600));
  CHECK(finer.entries.squaredNorm() == doctest::Approx(oracle).epsilon(1e-6));
}

TEST_CASE("operator norm bound on a sweep") {
  const PotentialSpec family[] = {well2(), PotentialSpec::exp_decay({-5.0, 1.0}, 1.0),
                                  PotentialSpec::power_tail({-0.2, 0.1}, 2.0)};
  for (const auto& V : family) {
    const double m1 = moments(V, 0.5).l1;
    const QuadratureGrid g = make_grid(V, 200);
    for (cplx k : {cplx(0.3, 0.0), cplx(2.0, 0.0), cplx(-1.0, 0.5), cplx(0.0, 3.0), cplx(6.0, 6.0)}) {
      const SchattenReport r = schatten_report(discretize(V, Wavenumber(k), g));
      CHECK(r.opnorm <= m1 / std::abs(k) * (1.0 + 1e-8));
      CHECK(r.s2 <= m1 / std::abs(k) * (1.0 + 1e-8));
    }
  }
}

TEST_CASE("determinant equals the Jost function") {
  const cplx k(1.0, 2.0);
  CHECK(std::abs(well2_a(k) - cplx(0.69672218261801935, -0.10040042387080493)) < 1e-15);
  const cplx d = perturbation_det(discretize(well2(), Wavenumber(k), make_grid(well2(), 400)));
  CHECK(std::abs(d - well2_a(k)) <= 1e-4 * std::abs(well2_a(k)));
  CHECK(std::abs(d - jost_function(well2(), Wavenumber(k)).a) <= 1e-4 * std::abs(well2_a(k)));
}

TEST_CASE("determinant asymptotics high on the imaginary axis") {
  // a(iT) = exp(-int V / (2ik)) (1 + O(1/T^2)); at T = 100 the correction is 5e-5
  const cplx k(0.0, 100.0);
  const cplx lead = std::exp(-cplx(-2.0) / (2.0 * I * k));
  const cplx d = perturbation_det(discretize(well2(), Wavenumber(k), make_grid(well2(), 400)));
  CHECK(std::abs(d - lead) <= 1e-3);
  CHECK(std::abs(d - 0.99009884856840784) <= 1e-6);
}

TEST_CASE("rank-one regularized determinant") {
  Eigen::VectorXd v(3);
  v << 0.3, -0.2, 0.5;
  DiscretizedBS M{Wavenumber(1.0, 0.0), (v * v.transpose()).cast<cplx>(), {1.0, 1.0, 1.0}, {}};
  const double t = v.squaredNorm();
  CHECK(std::abs(perturbation_det(M) - (1.0 + t)) < 1e-14);
  CHECK(std::abs(det2(M) - (1.0 + t) * std::exp(-t)) < 1e-14);
  M.phases = {I, -1.0, 1.0};
  const cplx u = I * 0.09 - 0.04 + 0.25;
  CHECK(std::abs(det2(M) - (1.0 + u) * std::exp(-u)) < 1e-14);
}

TEST_CASE("det2 and the Jost function at real k") {
  // log a = tr(UM) + log det2 with tr(UM) = int V sin(kx) e^{ikx} / k
  const cplx k = 3.0;
  const DiscretizedBS M = discretize(well2(), Wavenumber(k), make_grid(well2(), 400));
  const cplx log_a = std::log(well2_a(k));
  CHECK(std::abs(well2_trace(k) - cplx(-0.0022127618527574433, -0.34885641656660699)) < 1e-15);
  CHECK(std::abs(log_det2(M) - cplx(-0.00055165372851392539, 0.048648098012069280)) < 1e-4);
  CHECK(std::abs(std::log(std::abs(well2_a(k))) - (well2_trace(k).real() + std::log(std::abs(det2(M))))) < 1e-4);
  CHECK(std::abs(std::exp(log_a) - std::exp(well2_trace(k) + log_det2(M))) < 1e-4);
}

TEST_CASE("rank-two trace norm") {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> g;
  for (int t = 0; t < 20; ++t) {
    Eigen::VectorXd a(6), b(6);
    for (int i = 0; i < 6; ++i) {
      a[i] = g(rng);
      b[i] = g(rng);
    }
    const Eigen::MatrixXd D = a * a.transpose() - b * b.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(D);
    CHECK(rank_two_trace_norm(a, b) == doctest::Approx(es.eigenvalues().cwiseAbs().sum()).epsilon(1e-10));
  }
}

TEST_CASE("sine functionals") {
  const QuadratureGrid grid = make_grid(well2(), 400);
  const SineRankOne same = sine_rank_one(well2(), 1.5, 1.5, grid);
  CHECK(same.s1_difference == 0.0);
  const SineFunctional l = sine_functional(well2(), 2.0, grid);
  const Eigen::MatrixXd G = l.values * l.values.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
  CHECK(l.norm2() == doctest::Approx(es.eigenvalues().cwiseAbs().sum()).epsilon(1e-12));
  // int_0^1 2 sin^2(2x) dx
  CHECK(l.norm2() == doctest::Approx(1.0 - std::sin(4.0) / 4.0).epsilon(1e-12));
}

TEST_CASE("sine difference obeys the Holder-type bound") {
  // C = 0.44 bounds the ratio over xi, eta in {0.1, ..., 32} for this well (max 0.4375)
  const double p = 0.5, C = 0.44;
  const SineRankOne r = sine_rank_one(well2(), 2.0, 1.0, make_grid(well2(), 400));
  const double mp = moments(well2(), p).weighted;
  const double rhs = std::pow(1.0, p / 2) * (std::pow(2.0, p / 2) + 1.0) * mp;
  CHECK(r.s1_difference <= C * rhs);
  CHECK(r.s1_difference / rhs == doctest::Approx(0.238386).epsilon(1e-5));
}
