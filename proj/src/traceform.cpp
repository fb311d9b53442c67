#include "tracelab/traceform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tracelab/quadrature.hpp"

namespace tracelab {

namespace {

constexpr int kOrder = 8;
constexpr int kMaxUnwrapDepth = 16;

// A quadrature node on the contour. Nodes on a circle carry (radius, theta)
// so phase unwrapping can bisect along the circle itself.
struct Node {
  cplx k;
  cplx weight;  // Gauss weight times dk/dt
  double radius = 0.0;
  double theta = 0.0;
  int piece = 0;  // 0 interval, 1 indentation, 2 arc
};

std::vector<double> panel_nodes(double a, double b, int count, std::vector<double>& weights) {
  const int panels = std::max(1, count / kOrder);
  const CompositeRule rule = composite_gauss(uniform_panels(a, b, panels), kOrder);
  weights = rule.weights;
  return rule.nodes;
}

std::vector<Node> build_nodes(const ContourSpec& c) {
  const double R = c.R, eps = c.indent, g = c.grading;
  std::vector<Node> nodes;
  std::vector<double> w, wt;
  // interval halves, graded toward k = 0 (or toward the indentation)
  const std::vector<double> t = panel_nodes(0.0, 1.0, c.n_interval / 2, wt);
  auto half_k = [&](double s) { return eps + (R - eps) * std::pow(s, g); };
  auto half_j = [&](double s) { return g * (R - eps) * std::pow(s, g - 1.0); };
  for (std::size_t i = t.size(); i-- > 0;) {
    nodes.push_back({cplx(-half_k(t[i]), 0.0), wt[i] * half_j(t[i]), 0.0, 0.0, 0});
  }
  if (eps > 0.0) {
    const std::vector<double> th = panel_nodes(0.0, pi, std::max(32, c.n_interval / 8), w);
    for (std::size_t i = th.size(); i-- > 0;) {
      const cplx e = std::polar(1.0, th[i]);
      // traversed from theta = pi down to 0
      nodes.push_back({eps * e, -w[i] * I * eps * e, eps, th[i], 1});
    }
  }
  for (std::size_t i = 0; i < t.size(); ++i) {
    nodes.push_back({cplx(half_k(t[i]), 0.0), wt[i] * half_j(t[i]), 0.0, 0.0, 0});
  }
  const std::vector<double> th = panel_nodes(0.0, pi, c.n_arc, w);
  for (std::size_t i = 0; i < th.size(); ++i) {
    const cplx e = std::polar(1.0, th[i]);
    nodes.push_back({R * e, w[i] * I * R * e, R, th[i], 2});
  }
  return nodes;
}

class Unwrapper {
 public:
  Unwrapper(const AnalyticFn& f, int& evals) : f_(f), evals_(evals) {}

  // Phase change of f from node a to node b.
  double step(const Node& a, cplx fa, const Node& b, cplx fb) {
    return refine(a, fa, b, fb, 0);
  }

 private:
  double refine(const Node& a, cplx fa, const Node& b, cplx fb, int depth) {
    const double d = std::arg(fb / fa);
    if (std::abs(d) < 0.5 * pi) return d;
    if (depth >= kMaxUnwrapDepth) {
      throw NumericalError("phase unwrapping failed near k = (" + std::to_string(a.k.real()) +
                           ", " + std::to_string(a.k.imag()) + "); zero too close to the contour");
    }
    Node m;
    if (a.radius > 0.0 && a.radius == b.radius) {
      m.radius = a.radius;
      m.theta = 0.5 * (a.theta + b.theta);
      m.k = std::polar(m.radius, m.theta);
    } else {
      m.k = 0.5 * (a.k + b.k);
      // the straight join across k = 0 must not land on the origin
      if (m.k == 0.0) m.k = cplx(0.0, 1e-3 * std::abs(b.k - a.k));
    }
    const cplx fm = f_(m.k);
    ++evals_;
    if (fm == 0.0) throw NumericalError("f vanishes on the contour");
    return refine(a, fa, m, fm, depth + 1) + refine(m, fm, b, fb, depth + 1);
  }

  const AnalyticFn& f_;
  int& evals_;
};

}  // namespace

ContourIntegral contour_log_integral_fixed(const AnalyticFn& f, const ContourSpec& c) {
  if (!(c.R > 0.0)) throw std::invalid_argument("contour radius must be positive");
  if (c.n_interval < 64 || c.n_arc < 64) {
    throw std::invalid_argument("contour node counts must be at least 64");
  }
  if (c.indent < 0.0 || c.indent >= c.R) throw std::invalid_argument("invalid indentation");
  if (c.grading < 1.0) throw std::invalid_argument("grading exponent must be >= 1");

  const std::vector<Node> nodes = build_nodes(c);
  ContourIntegral out;
  out.spec = c;
  out.min_abs = std::numeric_limits<double>::infinity();
  std::vector<cplx> values(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    values[i] = f(nodes[i].k);
    out.min_abs = std::min(out.min_abs, std::abs(values[i]));
  }
  out.evaluations = static_cast<int>(nodes.size());
  if (!(out.min_abs > 1e-12)) {
    throw NumericalError("f is (nearly) zero on the contour: min |f| = " +
                         std::to_string(out.min_abs));
  }
  // innermost interval nodes on each side
  const std::size_t half = static_cast<std::size_t>(std::max(1, c.n_interval / 2 / kOrder) * kOrder);
  std::size_t right_first = half;
  if (c.indent > 0.0) {
    while (right_first < nodes.size() && nodes[right_first].piece != 0) ++right_first;
  }
  out.inner_abs = std::min(std::abs(values[half - 1]), std::abs(values[right_first]));

  Unwrapper unwrap(f, out.evaluations);
  std::vector<cplx> interval_terms, arc_terms;
  double phase = std::arg(values[0]);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (i > 0) phase += unwrap.step(nodes[i - 1], values[i - 1], nodes[i], values[i]);
    const cplx k = nodes[i].k;
    const cplx term = cplx(std::log(std::abs(values[i])), phase) * (c.R * c.R - k * k) *
                      nodes[i].weight;
    (nodes[i].piece == 2 ? arc_terms : interval_terms).push_back(term);
  }
  out.interval_part = pairwise_sum<cplx>(interval_terms);
  out.arc_part = pairwise_sum<cplx>(arc_terms);
  out.total = out.interval_part + out.arc_part;
  return out;
}

ContourIntegral contour_log_integral(const AnalyticFn& f, const ContourSpec& c, double rel_tol,
                                     int max_doublings) {
  ContourSpec spec = c;
  ContourIntegral prev = contour_log_integral_fixed(f, spec);
  const double floor = 1e-12 * (1.0 + c.R * c.R * c.R);
  for (int d = 0; d < max_doublings; ++d) {
    spec.n_interval *= 2;
    spec.n_arc *= 2;
    ContourIntegral cur = contour_log_integral_fixed(f, spec);
    cur.evaluations += prev.evaluations;
    cur.change = std::abs(cur.total - prev.total);
    if (cur.change <= rel_tol * std::abs(cur.total) || cur.change <= floor) return cur;
    prev = cur;
  }
  return prev;
}

TraceReport trace_report(const PotentialSpec& V, const SpectrumResult& spectrum,
                         const TraceOptions& opts) {
  TraceReport rep;
  rep.R = opts.R > 0.0 ? opts.R : radius(V);
  if (V.is_zero() || rep.R == 0.0) {
    rep.notes.push_back("V = 0: a = 1 and there are no zeros");
    return rep;
  }
  const double indent = V.compact() ? 0.0 : 1e-3 * rep.R;
  std::vector<SpectralPoint> kept;
  for (const auto& p : spectrum.points) {
    if (std::abs(p.k) > indent) {
      kept.push_back(p);
    } else {
      rep.notes.push_back("zero inside the k = 0 indentation left out");
    }
  }
  auto near_contour = [&](double R) {
    return std::any_of(kept.begin(), kept.end(), [&](const SpectralPoint& p) {
      return std::abs(std::abs(p.k) - R) < 1e-6 || std::abs(std::abs(p.k) - indent) < 1e-6;
    });
  };
  for (int bump = 0; bump < 20 && near_contour(rep.R); ++bump) rep.R *= 1.01;

  const ZeroSet zs = make_zero_set(kept);
  rep.zeros = static_cast<int>(zs.zeros.size());
  rep.sums = power_sums(zs);
  rep.lhs = 2.0 * pi * rep.R * rep.R * rep.sums.s1 - (2.0 * pi / 3.0) * rep.sums.s3;

  const AnalyticFn a = [&](cplx k) { return jost_a(V, k, opts.jost); };
  ContourSpec c{rep.R, opts.n_interval, opts.n_arc, opts.grading, indent};
  auto run = [&](const ContourSpec& spec) {
    return opts.adaptive ? contour_log_integral(a, spec, opts.rel_tol, opts.max_doublings)
                         : contour_log_integral_fixed(a, spec);
  };
  ContourIntegral ci = run(c);
  if (ci.inner_abs < 1e-6) {
    rep.near_resonance = true;
    rep.notes.push_back("|a| < 1e-6 next to k = 0 (near zero-energy resonance); grading tightened");
    c.grading = std::max(c.grading, 5.0);
    ci = run(c);
  }
  if (opts.adaptive && ci.change > opts.rel_tol * std::abs(ci.total) &&
      ci.change > 1e-12 * (1.0 + rep.R * rep.R * rep.R)) {
    rep.notes.push_back("contour quadrature not converged: last doubling changed the total by " +
                        std::to_string(ci.change));
  }
  rep.contour = ci.spec;
  rep.convergence_change = ci.change;
  rep.rhs = ci.total.real();
  rep.arc_part = ci.arc_part;
  rep.interval_part = ci.interval_part.real();
  rep.discrepancy = std::abs(rep.lhs - rep.rhs);
  return rep;
}

}  // namespace tracelab
