#pragma once

#include <vector>

#include "tracelab/common.hpp"
#include "tracelab/potential.hpp"

namespace tracelab {

struct FDSpectrumResult {
  double L = 0.0;
  int n = 0;
  // Filtered eigenvalues, ascending by Re, then Im.
  std::vector<cplx> eigenvalues;
  // sqrt(lambda) on the upper half-plane branch, same order.
  std::vector<cplx> k_values;
};

// Eigenvalues of the complex symmetric tridiagonal matrix with diagonal d and
// off-diagonal e (implicit QL with complex shifts). Throws NumericalError if
// an eigenvalue does not converge in 100 sweeps.
std::vector<cplx> tridiagonal_eigenvalues(std::vector<cplx> d, std::vector<cplx> e);

struct FDOptions {
  double disk_margin = 0.1;     // keep |lambda| <= (1 + margin) (int |V|)^2
  double axis_distance = 1e-3;  // drop lambda within this distance of [0, inf)
  double min_decay = 0.05;      // drop Im sqrt(lambda) below this (box modes)
};

// Three-point finite differences of -d^2/dx^2 + V on [0, L] with Dirichlet
// ends, n cells of width h = L/n. At a jump of V the mean of the one-sided
// values is used.
FDSpectrumResult fd_spectrum(const PotentialSpec& V, double L = 20.0, int n = 4000,
                             const FDOptions& opts = {});

// kappa in (0, sqrt(v0)) with sqrt(v0 - kappa^2) cot(width sqrt(v0 - kappa^2)) = -kappa,
// ascending: the bound states -kappa^2 of the Dirichlet half-line well
// V = -v0 on [0, width].
std::vector<double> well_bound_states(double v0, double width);

}  // namespace tracelab
