#include "tracelab/bs_operator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tracelab/quadrature.hpp"

namespace tracelab {

QuadratureGrid make_grid(const std::vector<double>& edges, int order) {
  if (edges.size() < 2 || edges.front() != 0.0) {
    throw std::invalid_argument("grid edges must start at 0 and contain a panel");
  }
  if (order < 1) throw std::invalid_argument("panel order must be positive");
  std::vector<Panel> panels;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    if (!(edges[i + 1] > edges[i])) throw std::invalid_argument("grid edges must increase");
    panels.push_back({edges[i], edges[i + 1]});
  }
  const CompositeRule rule = composite_gauss(panels, order);
  QuadratureGrid g;
  g.nodes = rule.nodes;
  g.weights = rule.weights;
  g.n = static_cast<int>(g.nodes.size());
  g.x_max = edges.back();
  g.order = order;
  return g;
}

QuadratureGrid make_grid(const PotentialSpec& V, int n, const GridOptions& opts) {
  const int panels = std::max(1, n / opts.order);
  double X = opts.x_max;
  if (X <= 0.0) {
    X = V.compact() ? V.support_end() : std::min(V.cutoff(opts.tail_tol), opts.max_length);
    if (V.is_zero() || !(X > 0.0)) X = 1.0;
  }
  PanelSpacing spacing = opts.spacing;
  if (spacing == PanelSpacing::automatic) {
    spacing = std::holds_alternative<PowerTailFamily>(V.family()) ? PanelSpacing::geometric
                                                                  : PanelSpacing::adapted;
  }
  std::vector<double> breaks{0.0};
  for (double b : V.breakpoints()) {
    if (b > 0.0 && b < X) breaks.push_back(b);
  }
  breaks.push_back(X);

  std::vector<double> edges;
  if (spacing == PanelSpacing::uniform || spacing == PanelSpacing::adapted) {
    // cumulative density on a fine trapezoid sampling of each smooth piece
    const int pieces = static_cast<int>(breaks.size()) - 1;
    constexpr int kSamples = 400;
    std::vector<std::vector<double>> xs(pieces), cum(pieces);
    double root_mass = 0.0;
    for (int s = 0; s < pieces; ++s) {
      const double lo = breaks[s], hi = breaks[s + 1];
      const double eta = 1e-12 * (hi - lo);
      xs[s].resize(kSamples + 1);
      cum[s].assign(kSamples + 1, 0.0);
      double prev = std::sqrt(V.abs_at(lo + eta));
      for (int i = 0; i <= kSamples; ++i) {
        xs[s][i] = lo + (hi - lo) * i / kSamples;
        if (i == 0) continue;
        const double cur = std::sqrt(V.abs_at(std::min(xs[s][i], hi - eta)));
        cum[s][i] = cum[s][i - 1] + 0.5 * (prev + cur) * (xs[s][i] - xs[s][i - 1]);
        prev = cur;
      }
      root_mass += cum[s].back();
    }
    const bool adapted = spacing == PanelSpacing::adapted && root_mass > 0.0;
    auto density_mass = [&](int s, int i) {
      const double length = xs[s][i] - xs[s][0];
      return adapted ? 0.5 * (length / X + cum[s][i] / root_mass) : length / X;
    };
    // panels shared among the smooth pieces in proportion to their mass
    const int spare = std::max(0, panels - pieces);
    edges.push_back(0.0);
    for (int s = 0; s < pieces; ++s) {
      const double mass = density_mass(s, kSamples);
      const int m = 1 + static_cast<int>(std::lround(spare * mass));
      int i = 0;
      for (int j = 1; j < m; ++j) {
        const double target = mass * j / m;
        while (i < kSamples && density_mass(s, i + 1) < target) ++i;
        const double m0 = density_mass(s, i), m1 = density_mass(s, i + 1);
        const double t = m1 > m0 ? (target - m0) / (m1 - m0) : 0.0;
        edges.push_back(xs[s][i] + t * (xs[s][i + 1] - xs[s][i]));
      }
      edges.push_back(breaks[s + 1]);
    }
    edges.back() = X;
  } else {
    for (int j = 0; j <= panels; ++j) {
      edges.push_back(std::pow(1.0 + X, static_cast<double>(j) / panels) - 1.0);
    }
    edges.back() = X;
    for (std::size_t s = 1; s + 1 < breaks.size(); ++s) edges.push_back(breaks[s]);
    std::sort(edges.begin(), edges.end());
    const double tiny = 1e-12 * X;
    edges.erase(std::unique(edges.begin(), edges.end(),
                            [tiny](double a, double b) { return b - a < tiny; }),
                edges.end());
    edges.back() = X;
  }
  if (opts.max_panel_width > 0.0) {
    std::vector<double> split{0.0};
    for (std::size_t i = 1; i < edges.size(); ++i) {
      const double len = edges[i] - edges[i - 1];
      const int m = std::max(1, static_cast<int>(std::ceil(len / opts.max_panel_width)));
      for (int j = 1; j <= m; ++j) split.push_back(edges[i - 1] + len * j / m);
      split.back() = edges[i];
    }
    edges = std::move(split);
  }
  return make_grid(edges, opts.order);
}

DiscretizedBS discretize(const PotentialSpec& V, Wavenumber k, const QuadratureGrid& grid) {
  const int n = grid.n;
  std::vector<double> s(n);
  std::vector<cplx> phases(n, 1.0);
  for (int i = 0; i < n; ++i) {
    const cplx v = V(grid.nodes[i]);
    const double a = std::abs(v);
    s[i] = std::sqrt(a * grid.weights[i]);
    if (a >= 1e-300) phases[i] = v / a;
  }
  Eigen::MatrixXcd M(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = j; i < n; ++i) {
      const cplx m = (s[i] == 0.0 || s[j] == 0.0)
                         ? cplx(0.0)
                         : s[i] * kernel(k, grid.nodes[i], grid.nodes[j]) * s[j];
      M(i, j) = m;
      M(j, i) = m;
    }
  }
  return {k, std::move(M), std::move(phases), grid};
}

SchattenReport schatten_report(const DiscretizedBS& M) {
  SchattenReport r;
  if (M.entries.size() == 0) return r;
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(M.entries);
  if (svd.info() != Eigen::Success) throw NumericalError("singular value decomposition failed");
  const Eigen::VectorXd& sv = svd.singularValues();
  r.singular_values.assign(sv.data(), sv.data() + sv.size());
  std::sort(r.singular_values.rbegin(), r.singular_values.rend());
  double sq = 0.0;
  for (double x : r.singular_values) {
    r.s1 += x;
    sq += x * x;
  }
  r.s2 = std::sqrt(sq);
  r.opnorm = r.singular_values.front();
  return r;
}

namespace {

Eigen::MatrixXcd phased(const DiscretizedBS& M) {
  const int n = static_cast<int>(M.entries.rows());
  Eigen::MatrixXcd A = M.entries;
  for (int i = 0; i < n; ++i) A.row(i) *= M.phases[i];
  return A;
}

cplx exp_checked(cplx z) {
  if (z.real() > std::log(std::numeric_limits<double>::max())) {
    throw NumericalError("determinant overflows double precision");
  }
  return std::exp(z);
}

}  // namespace

cplx log_perturbation_det(const DiscretizedBS& M) {
  const int n = static_cast<int>(M.entries.rows());
  if (n == 0) return 0.0;
  Eigen::MatrixXcd A = phased(M);
  A += Eigen::MatrixXcd::Identity(n, n);
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
  const Eigen::MatrixXcd& LU = lu.matrixLU();
  cplx s = 0.0;
  for (int i = 0; i < n; ++i) {
    if (LU(i, i) == 0.0) return {-std::numeric_limits<double>::infinity(), 0.0};
    s += std::log(LU(i, i));
  }
  if (lu.permutationP().determinant() < 0) s += I * pi;
  return s;
}

cplx perturbation_det(const DiscretizedBS& M) {
  const cplx l = log_perturbation_det(M);
  if (std::isinf(l.real()) && l.real() < 0.0) return 0.0;
  return exp_checked(l);
}

cplx log_det2(const DiscretizedBS& M) {
  cplx trace = 0.0;
  for (Eigen::Index i = 0; i < M.entries.rows(); ++i) trace += M.phases[i] * M.entries(i, i);
  return log_perturbation_det(M) - trace;
}

cplx det2(const DiscretizedBS& M) {
  const cplx l = log_det2(M);
  if (std::isinf(l.real()) && l.real() < 0.0) return 0.0;
  return exp_checked(l);
}

SineFunctional sine_functional(const PotentialSpec& V, double xi, const QuadratureGrid& grid) {
  SineFunctional l;
  l.xi = xi;
  l.values.resize(grid.n);
  for (int i = 0; i < grid.n; ++i) {
    const double x = grid.nodes[i];
    l.values[i] = std::sqrt(grid.weights[i] * V.abs_at(x)) * std::sin(xi * x);
  }
  return l;
}

double rank_two_trace_norm(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  // The nonzero eigenvalues of a a^T - b b^T have product -(|a|^2|b|^2 - (a.b)^2) <= 0,
  // so the trace norm is their difference.
  const double aa = a.squaredNorm(), bb = b.squaredNorm(), ab = a.dot(b);
  const double disc = (aa + bb) * (aa + bb) - 4.0 * ab * ab;
  return std::sqrt(std::max(0.0, disc));
}

SineRankOne sine_rank_one(const PotentialSpec& V, double xi, double eta,
                          const QuadratureGrid& grid) {
  SineRankOne r;
  r.l_xi = sine_functional(V, xi, grid);
  r.l_eta = sine_functional(V, eta, grid);
  r.s1_difference = xi == eta ? 0.0 : rank_two_trace_norm(r.l_xi.values, r.l_eta.values);
  return r;
}

}  // namespace tracelab
