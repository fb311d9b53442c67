#include "tracelab/spectra.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <tuple>

namespace tracelab {

double SearchRegion::diameter() const { return std::hypot(width(), height()); }

bool SearchRegion::contains(cplx k, double slack) const {
  return k.real() >= re_lo - slack && k.real() <= re_hi + slack && k.imag() >= im_lo - slack &&
         k.imag() <= im_hi + slack;
}

SearchRegion default_region(const PotentialSpec& V) {
  const double R = radius(V);
  const double m = 0.1 * R;
  double delta = 1e-6 * std::max(R, 1.0);
  // a(k) of slowly decaying tails is not resolved near k = 0; keep the
  // same 1e-3 R distance that bounds direct evaluation on the real axis.
  if (!V.compact()) delta = std::max(delta, 1e-3 * R);
  return {-R - m, R + m, delta, std::max(R + m, 2.0 * delta)};
}

namespace {

struct BoundaryZero {
  cplx where;
};

constexpr double kBoundaryAbs = 1e-7;
constexpr int kMaxDepth = 40;

class Searcher {
 public:
  Searcher(const PotentialSpec& V, const SpectrumOptions& opts) : V_(V), opts_(opts) {
    const double xm = truncation_length(V, 1.0, opts.jost);
    // oscillation scale of a(k) along horizontal edges near the real axis
    length_ = std::min(std::max(xm, 1.0), 20.0);
  }

  cplx a(cplx k) {
    const auto key = std::make_pair(k.real(), k.imag());
    if (auto it = values_.find(key); it != values_.end()) return it->second;
    const cplx v = jost_value(V_, Wavenumber(k), opts_.jost).a;
    values_.emplace(key, v);
    return v;
  }

  // Argument change of a from z0 to z1 along the segment.
  double edge(cplx z0, cplx z1) {
    // Traverse every edge in a canonical direction so shared edges of
    // neighbouring boxes reuse the same samples.
    const bool flip = std::make_pair(z0.real(), z0.imag()) > std::make_pair(z1.real(), z1.imag());
    if (flip) std::swap(z0, z1);
    const auto key = std::make_tuple(z0.real(), z0.imag(), z1.real(), z1.imag());
    double change;
    if (auto it = edges_.find(key); it != edges_.end()) {
      change = it->second;
    } else {
      const double len = std::abs(z1 - z0);
      const int pieces = std::max(8, static_cast<int>(std::ceil(len * length_)));
      change = 0.0;
      cplx zp = z0, ap = checked(z0);
      for (int j = 1; j <= pieces; ++j) {
        const cplx zn = (j == pieces) ? z1 : z0 + (z1 - z0) * (static_cast<double>(j) / pieces);
        const cplx an = checked(zn);
        change += refine(zp, zn, ap, an, 0);
        zp = zn;
        ap = an;
      }
      edges_.emplace(key, change);
    }
    return flip ? -change : change;
  }

  int winding(const SearchRegion& b) {
    const cplx c00(b.re_lo, b.im_lo), c10(b.re_hi, b.im_lo), c11(b.re_hi, b.im_hi),
        c01(b.re_lo, b.im_hi);
    const double total = edge(c00, c10) + edge(c10, c11) + edge(c11, c01) + edge(c01, c00);
    const double turns = total / (2.0 * pi);
    const double rounded = std::round(turns);
    if (std::abs(turns - rounded) > 0.05) throw BoundaryZero{0.5 * (c00 + c11)};
    return static_cast<int>(rounded);
  }

  const PotentialSpec& V() const { return V_; }
  const SpectrumOptions& opts() const { return opts_; }

 private:
  cplx checked(cplx z) {
    const cplx v = a(z);
    if (std::abs(v) < kBoundaryAbs) throw BoundaryZero{z};
    return v;
  }

  double refine(cplx z0, cplx z1, cplx a0, cplx a1, int depth) {
    const double direct = std::arg(a1 / a0);
    const cplx zm = 0.5 * (z0 + z1);
    const cplx am = checked(zm);
    const double d1 = std::arg(am / a0), d2 = std::arg(a1 / am);
    // The modulus test guards against phase aliasing where |a| varies fast.
    const double m1 = std::log(std::abs(am) / std::abs(a0));
    const double m2 = std::log(std::abs(a1) / std::abs(am));
    if (std::abs(d1) < 0.5 * pi && std::abs(d2) < 0.5 * pi && std::abs(m1) < 1.0 &&
        std::abs(m2) < 1.0 && std::abs(d1 + d2 - direct) < 1e-9) {
      return d1 + d2;
    }
    if (depth >= kMaxDepth || std::abs(z1 - z0) < 1e-12 * (1.0 + std::abs(z0))) {
      throw BoundaryZero{zm};
    }
    return refine(z0, zm, a0, am, depth + 1) + refine(zm, z1, am, a1, depth + 1);
  }

  const PotentialSpec& V_;
  const SpectrumOptions& opts_;
  double length_ = 1.0;
  std::map<std::pair<double, double>, cplx> values_;
  std::map<std::tuple<double, double, double, double>, double> edges_;
};

SearchRegion expanded(const SearchRegion& b, int attempt) {
  if (attempt == 0) return b;
  const double grow = 0.0137 * attempt * b.diameter();
  return {b.re_lo - grow, b.re_hi + grow, b.im_lo * (1.0 + 2.0 * attempt), b.im_hi + grow};
}

struct Polished {
  cplx k;
  double residual;
};

// Newton with a difference-quotient derivative, starting at k0.
std::optional<Polished> newton(const PotentialSpec& V, cplx k0, const SearchRegion& box,
                               const SpectrumOptions& opts) {
  cplx k = k0;
  double res = std::abs(jost_a(V, k, opts.polish));
  for (int it = 0; it < 60 && res > opts.residual_target; ++it) {
    const cplx d = jost_derivative(V, k, opts.polish);
    if (d == 0.0) return std::nullopt;
    cplx next = k - jost_a(V, k, opts.polish) / d;
    // damp steps that leave the box or the half-plane
    for (int damp = 0; damp < 8 && (!box.contains(next, 0.25 * box.diameter()) ||
                                    next.imag() <= 0.0);
         ++damp) {
      next = 0.5 * (k + next);
    }
    if (next.imag() <= 0.0) return std::nullopt;
    const double step = std::abs(next - k);
    k = next;
    res = std::abs(jost_a(V, k, opts.polish));
    if (step < 1e-15 * (1.0 + std::abs(k))) break;
  }
  if (res > opts.residual_accept) return std::nullopt;
  return Polished{k, res};
}

// Muller's method from three points around k0.
std::optional<Polished> muller(const PotentialSpec& V, cplx k0, const SearchRegion& box,
                               const SpectrumOptions& opts) {
  const double h = 0.1 * std::max(box.diameter(), 1e-8);
  std::array<cplx, 3> x{k0 - h, k0 + h, k0 + cplx(0.0, h)};
  if (x[0].imag() <= 0.0) x[0] = k0;  // k0 - h keeps Im k
  std::array<cplx, 3> f{};
  for (int j = 0; j < 3; ++j) f[j] = jost_a(V, x[j], opts.polish);
  for (int it = 0; it < 80; ++it) {
    const cplx h1 = x[1] - x[0], h2 = x[2] - x[1];
    const cplx d1 = (f[1] - f[0]) / h1, d2 = (f[2] - f[1]) / h2;
    const cplx a = (d2 - d1) / (h2 + h1);
    const cplx b = a * h2 + d2;
    const cplx disc = std::sqrt(b * b - 4.0 * f[2] * a);
    const cplx den = std::abs(b + disc) > std::abs(b - disc) ? b + disc : b - disc;
    if (den == 0.0) return std::nullopt;
    cplx next = x[2] - 2.0 * f[2] / den;
    if (next.imag() <= 0.0) next = cplx(next.real(), 0.5 * x[2].imag());
    x = {x[1], x[2], next};
    f = {f[1], f[2], jost_a(V, next, opts.polish)};
    if (std::abs(f[2]) <= opts.residual_target) break;
    if (std::abs(x[2] - x[1]) < 1e-15 * (1.0 + std::abs(x[2]))) break;
  }
  const double res = std::abs(f[2]);
  if (res > opts.residual_accept || !box.contains(x[2], 1e-9)) return std::nullopt;
  return Polished{x[2], res};
}

std::optional<Polished> polish_in(const PotentialSpec& V, const SearchRegion& box,
                                  const SpectrumOptions& opts) {
  const cplx centre(0.5 * (box.re_lo + box.re_hi), 0.5 * (box.im_lo + box.im_hi));
  if (auto p = newton(V, centre, box, opts); p && box.contains(p->k, 1e-9)) return p;
  return muller(V, centre, box, opts);
}

constexpr double kSplits[] = {0.5, 0.47, 0.53, 0.44, 0.56, 0.41};

struct Subdivider {
  Searcher& s;
  std::vector<SpectralPoint>& out;
  std::vector<std::string>& warnings;

  void resolve(const SearchRegion& box, int w) {
    if (w == 0) return;
    const SpectrumOptions& opts = s.opts();
    if (w == 1) {
      if (auto p = newton(s.V(), centre(box), box, opts); p && box.contains(p->k, 1e-9)) {
        out.push_back({p->k, p->k * p->k, p->residual, 1});
        return;
      }
    }
    if (box.diameter() < opts.min_box) {
      settle(box, w);
      return;
    }
    for (int attempt = 0; attempt <= opts.max_retries; ++attempt) {
      const double fx = kSplits[attempt % std::size(kSplits)];
      const double fy = kSplits[(attempt + 1) % std::size(kSplits)];
      const double xm = box.re_lo + fx * box.width();
      const double ym = box.im_lo + fy * box.height();
      const std::array<SearchRegion, 4> kids{
          SearchRegion{box.re_lo, xm, box.im_lo, ym}, SearchRegion{xm, box.re_hi, box.im_lo, ym},
          SearchRegion{box.re_lo, xm, ym, box.im_hi}, SearchRegion{xm, box.re_hi, ym, box.im_hi}};
      std::array<int, 4> wk{};
      try {
        for (int j = 0; j < 4; ++j) wk[j] = s.winding(kids[j]);
      } catch (const BoundaryZero&) {
        // A zero on an interior split line: try to catch it directly.
        if (w == 1) {
          if (auto p = polish_in(s.V(), box, opts)) {
            out.push_back({p->k, p->k * p->k, p->residual, 1});
            return;
          }
        }
        continue;
      }
      if (wk[0] + wk[1] + wk[2] + wk[3] != w) continue;
      for (int j = 0; j < 4; ++j) resolve(kids[j], wk[j]);
      return;
    }
    warnings.push_back("box subdivision failed near k = " + format(centre(box)) +
                       "; polishing the box centre instead");
    settle(box, w);
  }

  void settle(const SearchRegion& box, int w) {
    const SpectrumOptions& opts = s.opts();
    if (auto p = polish_in(s.V(), box, opts)) {
      if (w > 1) {
        warnings.push_back("unresolved cluster of " + std::to_string(w) + " zeros near k = " +
                           format(p->k));
      }
      out.push_back({p->k, p->k * p->k, p->residual, w});
      return;
    }
    const cplx c = centre(box);
    const double res = std::abs(jost_a(s.V(), c, opts.polish));
    warnings.push_back("zero near k = " + format(c) + " not polished (residual " +
                       std::to_string(res) + ")");
    out.push_back({c, c * c, res, w});
  }

  static cplx centre(const SearchRegion& b) {
    return {0.5 * (b.re_lo + b.re_hi), 0.5 * (b.im_lo + b.im_hi)};
  }
  static std::string format(cplx k) {
    return "(" + std::to_string(k.real()) + ", " + std::to_string(k.imag()) + ")";
  }
};

std::vector<SpectralPoint> merged(std::vector<SpectralPoint> pts, double dist) {
  auto less = [](const SpectralPoint& a, const SpectralPoint& b) {
    return std::make_pair(a.k.real(), a.k.imag()) < std::make_pair(b.k.real(), b.k.imag());
  };
  std::sort(pts.begin(), pts.end(), less);
  std::vector<SpectralPoint> out;
  for (const auto& p : pts) {
    auto same = std::find_if(out.begin(), out.end(),
                             [&](const SpectralPoint& q) { return std::abs(q.k - p.k) < dist; });
    if (same == out.end()) {
      out.push_back(p);
    } else {
      same->multiplicity += p.multiplicity;
      if (p.residual < same->residual) {
        same->k = p.k;
        same->lambda = p.lambda;
        same->residual = p.residual;
      }
    }
  }
  std::sort(out.begin(), out.end(), less);
  return out;
}

}  // namespace

int winding_number(const PotentialSpec& V, const SearchRegion& box, const SpectrumOptions& opts) {
  if (box.im_lo <= 0.0 || box.width() <= 0.0 || box.height() <= 0.0) {
    throw std::invalid_argument("search box must be a proper rectangle in the upper half-plane");
  }
  if (V.is_zero()) return 0;
  Searcher s(V, opts);
  for (int attempt = 0; attempt <= opts.max_retries; ++attempt) {
    try {
      return s.winding(expanded(box, attempt));
    } catch (const BoundaryZero&) {
    }
  }
  throw NumericalError("winding number: zero on the box boundary after " +
                       std::to_string(opts.max_retries) + " perturbations");
}

SpectrumResult find_spectrum(const PotentialSpec& V, const SpectrumOptions& opts) {
  return find_spectrum(V, default_region(V), opts);
}

SpectrumResult find_spectrum(const PotentialSpec& V, const SearchRegion& region,
                             const SpectrumOptions& opts) {
  SpectrumResult result;
  result.region = region;
  if (V.is_zero()) return result;
  Searcher s(V, opts);
  bool done = false;
  for (int attempt = 0; attempt <= opts.max_retries && !done; ++attempt) {
    try {
      result.region = expanded(region, attempt);
      result.winding = s.winding(result.region);
      done = true;
    } catch (const BoundaryZero&) {
    }
  }
  if (!done) throw NumericalError("find_spectrum: zero on the search region boundary");

  std::vector<SpectralPoint> found;
  Subdivider sub{s, found, result.warnings};
  sub.resolve(result.region, result.winding);
  result.points = merged(std::move(found), opts.merge_distance);
  for (const auto& p : result.points) {
    if (p.residual > opts.residual_accept) {
      result.warnings.push_back("residual " + std::to_string(p.residual) +
                                " above acceptance at k = " + Subdivider::format(p.k));
    }
  }
  return result;
}

}  // namespace tracelab
