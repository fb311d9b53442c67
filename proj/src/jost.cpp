#include "tracelab/jost.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <type_traits>
#include <variant>

#include "tracelab/quadrature.hpp"

namespace tracelab {

const char* to_string(JostMethod m) { return m == JostMethod::ode ? "ode" : "volterra"; }

namespace {

// Normalized Jost solution g = f e^{-ikx} and its derivative h = g'. Then
//   g'' + 2ik g' = V g,   g -> 1 at infinity.
struct NormState {
  cplx g;
  cplx h;
};

// K(x, y) = (e^{2ik(y-x)} - 1) / (2ik); g(x) = 1 + int_x^inf K(x, y) V(y) g(y) dy.
cplx volterra_kernel(cplx k, double d) { return d * exprel(2.0 * I * k * d); }

struct Tail {
  double x_max = 0.0;
  NormState state{1.0, 0.0};
  double error = 0.0;
};

// int_X^inf e^{2ik(y-X)} V(y) dy for the part of V beyond the cut.
cplx oscillatory_tail(const PotentialSpec& V, double X, cplx k) {
  const cplx two_ik = 2.0 * I * k;
  const AdaptiveTolerance tol{1e-18, 1e-11, 20000};
  return std::visit(
      [&](const auto& f) -> cplx {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, ExpDecayFamily>) {
          return f.amplitude * std::exp(-f.rate * X) / (f.rate - two_ik);
        } else if constexpr (std::is_same_v<F, PowerTailFamily>) {
          // Rotate y - X = i conj(k/|k|) s, on which e^{2ik(y-X)} = e^{-2|k|s}.
          const double ak = std::abs(k);
          const cplx dir = I * std::conj(k / ak);
          auto integrand = [&](double s) {
            return std::exp(-2.0 * ak * s) * std::pow(1.0 + X + dir * s, -f.exponent);
          };
          const double end = 40.0 / ak;
          cplx sum = integrate_adaptive<cplx>(integrand, 0.0, std::min(end, 1.0 + X), tol).value;
          if (end > 1.0 + X) sum += integrate_adaptive<cplx>(integrand, 1.0 + X, end, tol).value;
          return f.amplitude * dir * sum;
        } else if constexpr (std::is_same_v<F, GaussianFamily>) {
          auto integrand = [&](double d) { return std::exp(two_ik * d) * V(X + d); };
          return integrate_adaptive<cplx>(integrand, 0.0, 12.0 * f.width, tol).value;
        } else {
          return 0.0;
        }
      },
      V.family());
}

// WKB phase i int_X^inf (k - sqrt(k^2 - V)) of a power tail, summed from the
// series in V / k^2 starting at order n0. Returns the phase and the size of
// the last term kept.
std::pair<cplx, double> wkb_phase(const PowerTailFamily& f, cplx k, double X, int n0) {
  constexpr double coeff[] = {1.0 / 2, 1.0 / 8, 1.0 / 16, 5.0 / 128, 7.0 / 256, 21.0 / 1024};
  const double q = f.exponent;
  cplx phase = 0.0, vn = 1.0, k_pow = 1.0 / k;
  double last = 0.0;
  for (int n = 1; n <= 6; ++n) {
    vn *= f.amplitude;
    k_pow *= k * k;  // k^(2n-1)
    if (n < n0) continue;
    const cplx term = coeff[n - 1] * vn * std::pow(1.0 + X, 1.0 - n * q) / ((n * q - 1.0) * k_pow);
    phase += term;
    last = std::abs(term);
  }
  return {I * phase, last};
}

// Two asymptotic states at the cut X:
//  - the exponentiated first Born term of the tail,
//      g = exp(int_X^inf K(X, y) V dy),  g' = -g int_X^inf e^{2ik(y-X)} V dy,
//    which reduces to g = exp(-int_X^inf V / (2ik)) for large |k|; power
//    tails add the higher WKB phase terms;
//  - for power tails, the WKB state g = (k/kappa)^(1/2) exp(i int_X^inf (k - kappa)),
//    kappa = sqrt(k^2 - V), exact in V / k^2 but first order in V' / k^3.
// The one with the smaller error estimate is used.
Tail make_tail(const PotentialSpec& V, cplx k, const JostOptions& opts) {
  Tail t;
  t.x_max = truncation_length(V, std::abs(k), opts);
  const double X = t.x_max;
  if (V.tail_mass(X) == 0.0) return t;
  const cplx osc = oscillatory_tail(V, X, k);
  cplx born = (osc - V.tail_integral(X)) / (2.0 * I * k);
  t.error = 0.5 * std::norm(born);
  std::optional<Tail> wkb;
  if (const auto* pt = std::get_if<PowerTailFamily>(&V.family())) {
    const cplx v = V(X);
    const double ratio = std::abs(v) / std::norm(k);
    const auto [higher, last_h] = wkb_phase(*pt, k, X, 2);
    born += higher;
    t.error = ratio * ratio + last_h;

    const auto [phase, last] = wkb_phase(*pt, k, X, 1);
    const cplx dv = -pt->exponent * v / (1.0 + X);
    const cplx kappa = k * std::sqrt(1.0 - v / (k * k));
    const cplx dkappa = -dv / (2.0 * kappa);
    const cplx g = std::sqrt(k / kappa) * std::exp(phase);
    wkb = Tail{X, {g, g * (-dkappa / (2.0 * kappa) + I * (kappa - k))},
               last + std::abs(dv) / std::pow(std::abs(k), 3)};
  }
  if (wkb && wkb->error < t.error) t = *wkb;
  else t.state = {std::exp(born), -osc * std::exp(born)};
  if (!std::isfinite(std::abs(t.state.g)) || !std::isfinite(std::abs(t.state.h))) {
    throw NumericalError("jost tail state overflows at |k| = " + std::to_string(std::abs(k)));
  }
  return t;
}

// Interior stopping points: breakpoints of V and requested outputs, plus 0 and x_max.
std::vector<double> stops_for(const PotentialSpec& V, double x_max,
                              std::span<const double> outputs) {
  std::vector<double> pts{0.0, x_max};
  for (double b : V.breakpoints()) {
    if (b > 0.0 && b < x_max) pts.push_back(b);
  }
  for (double o : outputs) {
    if (o > 0.0 && o < x_max) pts.push_back(o);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

struct OdeTrace {
  std::vector<double> x;
  std::vector<NormState> s;
  double local_error_sum = 0.0;
};

// Integrates the normalized equation from x_max down to 0. With record_all
// every accepted node is kept, otherwise only the stopping points.
OdeTrace integrate_backward(const PotentialSpec& V, cplx k, const Tail& tail,
                            std::span<const double> stops, bool record_all,
                            const JostOptions& opts) {
  const cplx two_ik = 2.0 * I * k;
  const double scale = std::max({1.0, std::abs(k), std::sqrt(V.max_abs())});
  OdeTrace trace;
  NormState y = tail.state;
  trace.x.push_back(stops.back());
  trace.s.push_back(y);

  double step = 0.05 / scale;
  long steps = 0;
  for (std::size_t piece = stops.size() - 1; piece > 0; --piece) {
    const double lo = stops[piece - 1], hi = stops[piece];
    const double eta = std::min(1e-14 * (1.0 + hi), 0.25 * (hi - lo));
    // Evaluate V strictly inside the piece so jumps at the ends are one-sided.
    auto pot = [&](double x) { return V(std::clamp(x, lo + eta, hi - eta)); };
    auto rhs = [&](double x, const NormState& s) {
      return NormState{s.h, pot(x) * s.g - two_ik * s.h};
    };
    double x = hi;
    NormState k1 = rhs(x, y);
    while (x > lo) {
      if (++steps > opts.max_steps) {
        throw NumericalError("jost integrator: step budget exhausted at x = " +
                             std::to_string(x));
      }
      double dx = -std::min(step, x - lo);
      const bool last = (x + dx <= lo);
      if (last) dx = lo - x;
      auto add = [&](std::initializer_list<std::pair<double, const NormState*>> terms) {
        NormState out = y;
        for (const auto& [c, s] : terms) {
          out.g += dx * c * s->g;
          out.h += dx * c * s->h;
        }
        return out;
      };
      const NormState k2 = rhs(x + c2 * dx, add({{a21, &k1}}));
      const NormState k3 = rhs(x + c3 * dx, add({{a31, &k1}, {a32, &k2}}));
      const NormState k4 = rhs(x + c4 * dx, add({{a41, &k1}, {a42, &k2}, {a43, &k3}}));
      const NormState k5 =
          rhs(x + c5 * dx, add({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
      const NormState k6 =
          rhs(x + dx, add({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
      const NormState ynew = add({{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
      const double xnew = last ? lo : x + dx;
      const NormState k7 = rhs(xnew, ynew);
      const cplx eg =
          dx * (e1 * k1.g + e3 * k3.g + e4 * k4.g + e5 * k5.g + e6 * k6.g + e7 * k7.g);
      const cplx eh =
          dx * (e1 * k1.h + e3 * k3.h + e4 * k4.h + e5 * k5.h + e6 * k6.h + e7 * k7.h);
      const double mag = std::max({std::abs(y.g), std::abs(ynew.g), std::abs(y.h) / scale,
                                   std::abs(ynew.h) / scale});
      const double denom = opts.atol + opts.rtol * mag;
      const double err = std::max(std::abs(eg), std::abs(eh) / scale) / denom;
      if (!std::isfinite(err)) {
        throw NumericalError("jost integrator: non-finite state at x = " + std::to_string(x));
      }
      if (err <= 1.0) {
        x = xnew;
        y = ynew;
        k1 = k7;
        trace.local_error_sum += std::abs(eg);
        if (record_all || x == lo) {
          trace.x.push_back(x);
          trace.s.push_back(y);
        }
      }
      const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      const double proposal = std::abs(dx) * factor;
      // keep the running step when the piece end forced a short one
      step = (last && err <= 1.0) ? std::max(step, proposal) : proposal;
      if (step < 1e-14 * (1.0 + std::abs(x))) {
        throw NumericalError("jost integrator: step underflow at x = " + std::to_string(x));
      }
    }
  }
  return trace;
}

JostSolution assemble(Wavenumber wk, JostMethod method, double x_max, std::vector<double> xs,
                      std::vector<NormState> states, double err) {
  const cplx k = wk.value();
  JostSolution sol{wk, method, x_max, {}, {}, {}, err};
  sol.grid = std::move(xs);
  sol.f_values.reserve(sol.grid.size());
  sol.fprime_values.reserve(sol.grid.size());
  for (std::size_t i = 0; i < sol.grid.size(); ++i) {
    const cplx phase = std::exp(I * k * sol.grid[i]);
    sol.f_values.push_back(phase * states[i].g);
    sol.fprime_values.push_back(phase * (I * k * states[i].g + states[i].h));
  }
  return sol;
}

JostSolution solve_ode(const PotentialSpec& V, Wavenumber wk, const JostOptions& opts,
                       std::span<const double> outputs) {
  const cplx k = wk.value();
  const Tail tail = make_tail(V, k, opts);
  const auto stops = stops_for(V, tail.x_max, outputs);
  OdeTrace trace = integrate_backward(V, k, tail, stops, outputs.empty(), opts);
  std::reverse(trace.x.begin(), trace.x.end());
  std::reverse(trace.s.begin(), trace.s.end());
  const double err = trace.local_error_sum + tail.error;

  if (outputs.empty()) {
    return assemble(wk, JostMethod::ode, tail.x_max, std::move(trace.x), std::move(trace.s), err);
  }
  std::vector<double> xs;
  std::vector<NormState> ss;
  for (double o : outputs) {
    if (o < 0.0) throw std::invalid_argument("jost output points must be >= 0");
    if (o >= tail.x_max) {
      // beyond the cut the free continuation of the asymptotic state is used
      xs.push_back(o);
      ss.push_back(tail.state);
      continue;
    }
    auto it = std::lower_bound(trace.x.begin(), trace.x.end(), o);
    xs.push_back(o);
    ss.push_back(trace.s[static_cast<std::size_t>(it - trace.x.begin())]);
  }
  return assemble(wk, JostMethod::ode, tail.x_max, std::move(xs), std::move(ss), err);
}

// Barycentric Lagrange basis on the reference nodes t, evaluated at u.
void lagrange_row(const std::vector<double>& t, const std::vector<double>& bary, double u,
                  std::vector<double>& out) {
  const std::size_t n = t.size();
  out.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    if (u == t[j]) {
      out[j] = 1.0;
      return;
    }
  }
  double denom = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    out[j] = bary[j] / (u - t[j]);
    denom += out[j];
  }
  for (auto& v : out) v /= denom;
}

struct Accumulators {
  cplx A{};  // int_x^inf e^{2ik(y-x)} V g dy  (= -g'(x))
  cplx B{};  // int_x^inf V g dy
  cplx C{};  // int_x^inf K(x, y) V g dy      (= g(x) - 1)
};

struct VolterraSolver {
  const PotentialSpec& V;
  cplx k;
  const JostOptions& opts;
  const GaussRule& rule;
  std::vector<double> bary;
  std::vector<double> xs;  // collected in descending order
  std::vector<NormState> ss;

  VolterraSolver(const PotentialSpec& v, cplx kk, const JostOptions& o)
      : V(v), k(kk), opts(o), rule(gauss_legendre(o.panel_order)) {
    const int n = o.panel_order;
    bary.assign(n, 1.0);
    for (int j = 0; j < n; ++j) {
      for (int m = 0; m < n; ++m) {
        if (m != j) bary[j] /= (rule.nodes[j] - rule.nodes[m]);
      }
    }
  }

  // Solves on [a, b] given the accumulators at b; returns those at a.
  Accumulators panel(double a, double b, const Accumulators& up, int depth) {
    const int n = opts.panel_order;
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    const cplx two_ik = 2.0 * I * k;
    std::vector<double> x(n), w(n);
    std::vector<cplx> v(n);
    for (int l = 0; l < n; ++l) {
      x[l] = mid + half * rule.nodes[l];
      w[l] = half * rule.weights[l];
      v[l] = V(x[l]);
    }
    // Partial-panel operators: Phi for C, Psi for A.
    Eigen::MatrixXcd phi(n, n), psi(n, n);
    phi.setZero();
    psi.setZero();
    std::vector<double> basis;
    for (int l = 0; l < n; ++l) {
      const double len = b - x[l];
      for (int s = 0; s < n; ++s) {
        const double y = x[l] + 0.5 * len * (rule.nodes[s] + 1.0);
        const double ws = 0.5 * len * rule.weights[s];
        const double eta = std::min(1e-14 * (1.0 + b), 0.25 * (b - a));
        const cplx vy = V(std::clamp(y, a + eta, b - eta));
        lagrange_row(rule.nodes, bary, (y - mid) / half, basis);
        const cplx kc = ws * volterra_kernel(k, y - x[l]) * vy;
        const cplx ec = ws * std::exp(two_ik * (y - x[l])) * vy;
        for (int m = 0; m < n; ++m) {
          phi(l, m) += kc * basis[m];
          psi(l, m) += ec * basis[m];
        }
      }
    }
    Eigen::VectorXcd rhs(n);
    for (int l = 0; l < n; ++l) {
      rhs[l] = 1.0 + std::exp(two_ik * (b - x[l])) * up.C + volterra_kernel(k, b - x[l]) * up.B;
    }
    const double contraction = phi.cwiseAbs().rowwise().sum().maxCoeff();
    Eigen::VectorXcd g = rhs;
    bool converged = false;
    if (contraction < 0.9) {
      for (int it = 0; it < opts.max_iterations; ++it) {
        Eigen::VectorXcd next = rhs + phi * g;
        const double diff = (next - g).cwiseAbs().maxCoeff();
        g = std::move(next);
        if (diff < opts.iteration_tol * std::max(1.0, g.cwiseAbs().maxCoeff())) {
          converged = true;
          break;
        }
      }
    }
    if (!converged) {
      if (depth > 30 || b - a < 1e-12) {
        throw NumericalError("volterra iteration did not converge on panel [" +
                             std::to_string(a) + ", " + std::to_string(b) + "]");
      }
      const double c = 0.5 * (a + b);
      const Accumulators at_mid = panel(c, b, up, depth + 1);
      return panel(a, c, at_mid, depth + 1);
    }
    Eigen::VectorXcd gp = psi * g;
    Accumulators down;
    cplx local_a{}, local_b{}, local_c{};
    for (int l = n - 1; l >= 0; --l) {
      const cplx vg = w[l] * v[l] * g[l];
      local_b += vg;
      local_a += std::exp(two_ik * (x[l] - a)) * vg;
      local_c += volterra_kernel(k, x[l] - a) * vg;
      xs.push_back(x[l]);
      ss.push_back({g[l], -(gp[l] + std::exp(two_ik * (b - x[l])) * up.A)});
    }
    const cplx damp = std::exp(two_ik * (b - a));
    down.A = local_a + damp * up.A;
    down.B = local_b + up.B;
    down.C = local_c + damp * up.C + volterra_kernel(k, b - a) * up.B;
    xs.push_back(a);
    ss.push_back({1.0 + down.C, -down.A});
    return down;
  }
};

JostSolution solve_volterra(const PotentialSpec& V, Wavenumber wk, const JostOptions& opts) {
  const cplx k = wk.value();
  const Tail tail = make_tail(V, k, opts);
  const auto stops = stops_for(V, tail.x_max, {});
  const double scale = std::max({1.0, std::abs(k), std::sqrt(V.max_abs())});
  const double max_panel = 0.5 / scale;

  VolterraSolver solver(V, k, opts);
  // accumulators at x_max reproduce the asymptotic state (g, g')
  const cplx two_ik = 2.0 * I * k;
  Accumulators acc;
  acc.A = -tail.state.h;
  acc.C = tail.state.g - 1.0;
  acc.B = acc.A - two_ik * acc.C;
  solver.xs.push_back(tail.x_max);
  solver.ss.push_back(tail.state);
  for (std::size_t piece = stops.size() - 1; piece > 0; --piece) {
    const double lo = stops[piece - 1], hi = stops[piece];
    const int count = std::max(1, static_cast<int>(std::ceil((hi - lo) / max_panel)));
    for (int j = count - 1; j >= 0; --j) {
      const double a = lo + (hi - lo) * j / count;
      const double b = (j + 1 == count) ? hi : lo + (hi - lo) * (j + 1) / count;
      acc = solver.panel(a, b, acc, 0);
    }
  }
  std::reverse(solver.xs.begin(), solver.xs.end());
  std::reverse(solver.ss.begin(), solver.ss.end());
  // duplicate panel endpoints collapse to one node
  std::vector<double> xs;
  std::vector<NormState> ss;
  for (std::size_t i = 0; i < solver.xs.size(); ++i) {
    if (!xs.empty() && solver.xs[i] == xs.back()) continue;
    xs.push_back(solver.xs[i]);
    ss.push_back(solver.ss[i]);
  }
  return assemble(wk, JostMethod::volterra, tail.x_max, std::move(xs), std::move(ss),
                  tail.error);
}

}  // namespace

double truncation_length(const PotentialSpec& V, double k_abs, const JostOptions& opts) {
  if (V.is_zero()) return 0.0;
  if (V.compact()) return V.support_end();
  // the work of the backward sweep scales like x_max * |k|
  double x = std::min(V.cutoff(opts.tail_tol), opts.max_length * std::max(1.0, 1.0 / k_abs));
  if (const auto* pt = std::get_if<PowerTailFamily>(&V.family())) {
    // the asymptotic tail state needs |V| well below |k|^2
    const double need =
        std::pow(std::abs(pt->amplitude) / (0.05 * k_abs * k_abs), 1.0 / pt->exponent) - 1.0;
    x = std::max(x, std::min(need, 1e3 * x));
  }
  return x;
}

JostSolution jost_solution(const PotentialSpec& V, Wavenumber k, JostMethod method,
                           const JostOptions& opts, std::span<const double> output_points) {
  if (!std::is_sorted(output_points.begin(), output_points.end())) {
    throw std::invalid_argument("jost output points must be ascending");
  }
  if (method == JostMethod::ode) return solve_ode(V, k, opts, output_points);
  JostSolution sol = solve_volterra(V, k, opts);
  if (output_points.empty()) return sol;
  // Volterra nodes are fixed; report the nearest node values for requested points
  // only when they coincide, otherwise refuse.
  JostSolution picked{k, JostMethod::volterra, sol.x_max, {}, {}, {}, sol.error_estimate};
  for (double o : output_points) {
    auto it = std::lower_bound(sol.grid.begin(), sol.grid.end(), o);
    if (it == sol.grid.end() || *it != o) {
      throw std::invalid_argument("volterra method reports values only on its own nodes");
    }
    const auto i = static_cast<std::size_t>(it - sol.grid.begin());
    picked.grid.push_back(o);
    picked.f_values.push_back(sol.f_values[i]);
    picked.fprime_values.push_back(sol.fprime_values[i]);
  }
  return picked;
}

JostValue jost_value(const PotentialSpec& V, Wavenumber k, const JostOptions& opts) {
  if (V.is_zero()) return {k, 1.0, 0.0, JostMethod::ode};
  const double zero[] = {0.0};
  const JostSolution sol = solve_ode(V, k, opts, zero);
  return {k, sol.f_values.front(), sol.error_estimate, JostMethod::ode};
}

JostValue jost_function(const PotentialSpec& V, Wavenumber k, const JostOptions& opts) {
  if (V.is_zero()) return {k, 1.0, 0.0, JostMethod::ode};
  const JostValue ode = jost_value(V, k, opts);
  const JostSolution vol = solve_volterra(V, k, opts);
  return {k, ode.a, std::abs(ode.a - vol.f_values.front()), JostMethod::ode};
}

cplx jost_a(const PotentialSpec& V, cplx k, const JostOptions& opts) {
  return jost_value(V, Wavenumber(k), opts).a;
}

cplx jost_derivative(const PotentialSpec& V, cplx k, const JostOptions& opts) {
  const double h = 1e-6 * (1.0 + std::abs(k));
  return (jost_a(V, k + h, opts) - jost_a(V, k - h, opts)) / (2.0 * h);
}

}  // namespace tracelab
