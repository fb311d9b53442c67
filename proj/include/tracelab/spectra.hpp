#pragma once

#include <string>
#include <vector>

#include "tracelab/common.hpp"
#include "tracelab/jost.hpp"
#include "tracelab/potential.hpp"

namespace tracelab {

// A zero k of a(k) in the upper half-plane; lambda = k^2 is an eigenvalue of H.
struct SpectralPoint {
  cplx k;
  cplx lambda;
  double residual = 0.0;  // |a(k)| at the reported zero
  int multiplicity = 1;
};

// Axis-aligned rectangle in the upper half-plane.
struct SearchRegion {
  double re_lo = 0.0;
  double re_hi = 0.0;
  double im_lo = 0.0;
  double im_hi = 0.0;

  double width() const { return re_hi - re_lo; }
  double height() const { return im_hi - im_lo; }
  double diameter() const;
  bool contains(cplx k, double slack = 0.0) const;
};

// [-R-m, R+m] x [delta, R+m] with R = radius(V), m = 0.1 R, delta = 1e-6 max(R, 1).
SearchRegion default_region(const PotentialSpec& V);

struct SpectrumOptions {
  JostOptions jost{};                // inner-loop evaluations
  JostOptions polish{1e-12, 1e-15};  // tighter integrator for Newton polishing
  double min_box = 1e-4;             // boxes below this diameter stop splitting
  double residual_target = 1e-10;
  double residual_accept = 1e-8;
  double merge_distance = 1e-7;
  int max_retries = 5;               // box perturbations on boundary zeros
};

struct SpectrumResult {
  std::vector<SpectralPoint> points;  // sorted by (Re k, Im k)
  SearchRegion region;
  int winding = 0;  // winding number of a over the region boundary
  std::vector<std::string> warnings;
};

// (1/2pi) times the argument change of a(k) around the box, counterclockwise.
// A zero on or next to the boundary triggers up to opts.max_retries small
// outward perturbations of the box; NumericalError after that.
int winding_number(const PotentialSpec& V, const SearchRegion& box,
                   const SpectrumOptions& opts = {});

SpectrumResult find_spectrum(const PotentialSpec& V, const SpectrumOptions& opts = {});
SpectrumResult find_spectrum(const PotentialSpec& V, const SearchRegion& region,
                             const SpectrumOptions& opts = {});

}  // namespace tracelab
