#pragma once

#include <vector>

#include <Eigen/Dense>

#include "tracelab/common.hpp"
#include "tracelab/freeresolvent.hpp"
#include "tracelab/potential.hpp"

namespace tracelab {

// Composite Gauss-Legendre rule on [0, x_max].
struct QuadratureGrid {
  std::vector<double> nodes;
  std::vector<double> weights;
  int n = 0;
  double x_max = 0.0;
  int order = 0;  // points per panel
};

// Panels between consecutive edges (ascending, edges.front() == 0).
QuadratureGrid make_grid(const std::vector<double>& edges, int order = 10);

enum class PanelSpacing { automatic, uniform, geometric, adapted };

struct GridOptions {
  int order = 10;
  double x_max = 0.0;  // 0: support end, or the tail cutoff for non-compact V
  double tail_tol = 1e-8;
  double max_length = 100.0;
  // geometric: edges (1 + x_max)^(j/m) - 1. adapted: equal shares of the
  // density 1/x_max + |V|^(1/2) / int |V|^(1/2). automatic picks geometric for
  // power tails and adapted otherwise.
  PanelSpacing spacing = PanelSpacing::automatic;
  // Panels wider than this are split evenly (0: no limit). Used to resolve
  // the kernel's oscillation e^{ikx} at real k.
  double max_panel_width = 0.0;
};

// About n nodes (rounded to whole panels) with panel edges on the
// breakpoints of V.
QuadratureGrid make_grid(const PotentialSpec& V, int n = 400, const GridOptions& opts = {});

// M_ij = W(x_i) sqrt(w_i) G(k; x_i, x_j) sqrt(w_j) W(x_j), W = |V|^(1/2),
// and the phases U = V / |V|.
struct DiscretizedBS {
  Wavenumber k;
  Eigen::MatrixXcd entries;
  std::vector<cplx> phases;
  QuadratureGrid grid;
};

DiscretizedBS discretize(const PotentialSpec& V, Wavenumber k, const QuadratureGrid& grid);

struct SchattenReport {
  double s1 = 0.0;
  double s2 = 0.0;
  double opnorm = 0.0;
  std::vector<double> singular_values;  // descending
};

SchattenReport schatten_report(const DiscretizedBS& M);

// log det(I + U M), accumulated from the LU factors.
cplx log_perturbation_det(const DiscretizedBS& M);
// det(I + U M); throws NumericalError if it overflows.
cplx perturbation_det(const DiscretizedBS& M);

// det(I + U M) exp(-tr(U M)), and its logarithm.
cplx log_det2(const DiscretizedBS& M);
cplx det2(const DiscretizedBS& M);

// l_xi(u) = sum_i w_i sin(xi x_i) W(x_i) u(x_i), stored as the vector
// sqrt(w_i) sin(xi x_i) W(x_i) so that G_xi = l*l is its outer product.
struct SineFunctional {
  double xi = 0.0;
  Eigen::VectorXd values;
  double norm2() const { return values.squaredNorm(); }  // ||G_xi||_S1
};

SineFunctional sine_functional(const PotentialSpec& V, double xi, const QuadratureGrid& grid);

struct SineRankOne {
  SineFunctional l_xi;
  SineFunctional l_eta;
  double s1_difference = 0.0;  // ||G_xi - G_eta||_S1
};

// Trace norm of a a^T - b b^T, exact for the rank-two difference.
double rank_two_trace_norm(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

SineRankOne sine_rank_one(const PotentialSpec& V, double xi, double eta,
                          const QuadratureGrid& grid);

}  // namespace tracelab
