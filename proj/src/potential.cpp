#include "tracelab/potential.hpp"

#include <algorithm>
#include <cmath>

#include "tracelab/quadrature.hpp"

namespace tracelab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

void validate(const StepFamily& f) {
  double last_hi = 0.0;
  for (const auto& s : f.segments) {
    if (!(s.lo >= 0.0) || !(s.hi > s.lo) || !std::isfinite(s.hi)) {
      throw std::invalid_argument("step segment needs 0 <= lo < hi < inf");
    }
    if (s.lo < last_hi) throw std::invalid_argument("step segments must be ordered and disjoint");
    if (!finite(s.value)) throw std::invalid_argument("step value must be finite");
    last_hi = s.hi;
  }
}

void validate(const GaussianFamily& f) {
  if (!(f.width > 0.0) || !(f.center >= 0.0) || !finite(f.amplitude)) {
    throw std::invalid_argument("gaussian needs width > 0, center >= 0");
  }
}

void validate(const ExpDecayFamily& f) {
  if (!(f.rate > 0.0) || !finite(f.amplitude)) {
    throw std::invalid_argument("exp_decay needs rate > 0");
  }
}

void validate(const PowerTailFamily& f) {
  if (!(f.exponent > 1.0) || !finite(f.amplitude)) {
    throw std::invalid_argument("power_tail needs exponent > 1 (integrable tail)");
  }
}

void validate(const SampledFamily& f) {
  if (f.grid.size() < 2 || f.grid.size() != f.values.size()) {
    throw std::invalid_argument("sampled potential needs >= 2 nodes and matching values");
  }
  if (!(f.grid.front() >= 0.0)) throw std::invalid_argument("sampled grid must start at x >= 0");
  for (std::size_t i = 1; i < f.grid.size(); ++i) {
    if (!(f.grid[i] > f.grid[i - 1])) {
      throw std::invalid_argument("sampled grid must be strictly increasing");
    }
  }
  for (const auto& v : f.values) {
    if (!finite(v)) throw std::invalid_argument("sampled values must be finite");
  }
}

cplx sampled_eval(const SampledFamily& f, double x) {
  if (x < f.grid.front() || x > f.grid.back()) return 0.0;
  auto it = std::upper_bound(f.grid.begin(), f.grid.end(), x);
  if (it == f.grid.end()) return f.values.back();
  const std::size_t j = static_cast<std::size_t>(it - f.grid.begin());
  const double x0 = f.grid[j - 1], x1 = f.grid[j];
  const double t = (x - x0) / (x1 - x0);
  return (1.0 - t) * f.values[j - 1] + t * f.values[j];
}

// Integral of x^power |V| over one linear piece of a sampled potential.
double sampled_piece(const SampledFamily& f, std::size_t j, double power) {
  const double x0 = f.grid[j], x1 = f.grid[j + 1];
  const cplx v0 = f.values[j], v1 = f.values[j + 1];
  auto integrand = [&](double x) {
    const double t = (x - x0) / (x1 - x0);
    const double mag = std::abs((1.0 - t) * v0 + t * v1);
    return power == 0.0 ? mag : std::pow(x, power) * mag;
  };
  return integrate_adaptive<double>(integrand, x0, x1, {1e-14, 1e-12, 4000}).value;
}

double gaussian_mass_above(const GaussianFamily& f, double x) {
  return std::abs(f.amplitude) * f.width * 0.5 * std::sqrt(pi) *
         std::erfc((x - f.center) / f.width);
}

}  // namespace

PotentialSpec::PotentialSpec() : family_(StepFamily{}) {}

PotentialSpec::PotentialSpec(PotentialFamily family) : family_(std::move(family)) {
  std::visit([](const auto& f) { validate(f); }, family_);
}

PotentialSpec PotentialSpec::step(std::vector<StepSegment> segments) {
  return PotentialSpec(StepFamily{std::move(segments)});
}
PotentialSpec PotentialSpec::gaussian(cplx amplitude, double width, double center) {
  return PotentialSpec(GaussianFamily{amplitude, width, center});
}
PotentialSpec PotentialSpec::exp_decay(cplx amplitude, double rate) {
  return PotentialSpec(ExpDecayFamily{amplitude, rate});
}
PotentialSpec PotentialSpec::power_tail(cplx amplitude, double exponent) {
  return PotentialSpec(PowerTailFamily{amplitude, exponent});
}
PotentialSpec PotentialSpec::sampled(std::vector<double> grid, std::vector<cplx> values) {
  return PotentialSpec(SampledFamily{std::move(grid), std::move(values)});
}

std::string_view PotentialSpec::kind() const {
  return std::visit(overloaded{
                        [](const StepFamily&) { return std::string_view("step"); },
                        [](const GaussianFamily&) { return std::string_view("gaussian"); },
                        [](const ExpDecayFamily&) { return std::string_view("exp_decay"); },
                        [](const PowerTailFamily&) { return std::string_view("power_tail"); },
                        [](const SampledFamily&) { return std::string_view("sampled"); },
                    },
                    family_);
}

cplx PotentialSpec::operator()(double x) const {
  return std::visit(
      overloaded{
          [x](const StepFamily& f) -> cplx {
            for (const auto& s : f.segments) {
              if (x < s.lo) break;
              if (x < s.hi) return s.value;
            }
            return 0.0;
          },
          [x](const GaussianFamily& f) -> cplx {
            const double u = (x - f.center) / f.width;
            return f.amplitude * std::exp(-u * u);
          },
          [x](const ExpDecayFamily& f) -> cplx { return f.amplitude * std::exp(-f.rate * x); },
          [x](const PowerTailFamily& f) -> cplx {
            return f.amplitude * std::pow(1.0 + x, -f.exponent);
          },
          [x](const SampledFamily& f) -> cplx { return sampled_eval(f, x); },
      },
      family_);
}

bool PotentialSpec::is_zero() const {
  return std::visit(
      overloaded{
          [](const StepFamily& f) {
            return std::all_of(f.segments.begin(), f.segments.end(),
                               [](const StepSegment& s) { return s.value == cplx(0.0); });
          },
          [](const SampledFamily& f) {
            return std::all_of(f.values.begin(), f.values.end(),
                               [](cplx v) { return v == cplx(0.0); });
          },
          [](const auto& f) { return f.amplitude == cplx(0.0); },
      },
      family_);
}

bool PotentialSpec::compact() const {
  return std::holds_alternative<StepFamily>(family_) ||
         std::holds_alternative<SampledFamily>(family_) || is_zero();
}

double PotentialSpec::support_end() const {
  return std::visit(overloaded{
                        [](const StepFamily& f) {
                          return f.segments.empty() ? 0.0 : f.segments.back().hi;
                        },
                        [](const SampledFamily& f) { return f.grid.back(); },
                        [this](const auto&) {
                          return is_zero() ? 0.0 : std::numeric_limits<double>::infinity();
                        },
                    },
                    family_);
}

std::vector<double> PotentialSpec::breakpoints() const {
  std::vector<double> pts;
  std::visit(overloaded{
                 [&](const StepFamily& f) {
                   for (const auto& s : f.segments) {
                     pts.push_back(s.lo);
                     pts.push_back(s.hi);
                   }
                 },
                 [&](const SampledFamily& f) { pts = f.grid; },
                 [&](const GaussianFamily& f) { pts.push_back(f.center); },
                 [](const auto&) {},
             },
             family_);
  const double end = support_end();
  std::vector<double> out;
  std::sort(pts.begin(), pts.end());
  for (double x : pts) {
    if (x > 0.0 && x < end && (out.empty() || x > out.back())) out.push_back(x);
  }
  return out;
}

double PotentialSpec::tail_mass(double x) const {
  x = std::max(x, 0.0);
  return std::visit(
      overloaded{
          [x](const StepFamily& f) {
            double m = 0.0;
            for (const auto& s : f.segments) {
              if (s.hi > x) m += std::abs(s.value) * (s.hi - std::max(s.lo, x));
            }
            return m;
          },
          [x](const GaussianFamily& f) { return gaussian_mass_above(f, x); },
          [x](const ExpDecayFamily& f) {
            return std::abs(f.amplitude) * std::exp(-f.rate * x) / f.rate;
          },
          [x](const PowerTailFamily& f) {
            return std::abs(f.amplitude) * std::pow(1.0 + x, 1.0 - f.exponent) /
                   (f.exponent - 1.0);
          },
          [x](const SampledFamily& f) {
            double m = 0.0;
            for (std::size_t j = 0; j + 1 < f.grid.size(); ++j) {
              if (f.grid[j + 1] <= x) continue;
              if (f.grid[j] >= x) {
                m += sampled_piece(f, j, 0.0);
              } else {
                SampledFamily part{{x, f.grid[j + 1]}, {sampled_eval(f, x), f.values[j + 1]}};
                m += sampled_piece(part, 0, 0.0);
              }
            }
            return m;
          },
      },
      family_);
}

double PotentialSpec::cutoff(double tol) const {
  if (is_zero()) return 0.0;
  return std::visit(
      overloaded{
          [](const StepFamily& f) { return f.segments.back().hi; },
          [](const SampledFamily& f) { return f.grid.back(); },
          [tol](const GaussianFamily& f) {
            if (gaussian_mass_above(f, 0.0) <= tol) return 0.0;
            double lo = 0.0, hi = f.center + 40.0 * f.width;
            for (int i = 0; i < 200 && hi - lo > 1e-12 * (1.0 + hi); ++i) {
              const double mid = 0.5 * (lo + hi);
              (gaussian_mass_above(f, mid) > tol ? lo : hi) = mid;
            }
            return hi;
          },
          [tol](const ExpDecayFamily& f) {
            return std::max(0.0, std::log(std::abs(f.amplitude) / (f.rate * tol)) / f.rate);
          },
          [tol](const PowerTailFamily& f) {
            const double q1 = f.exponent - 1.0;
            return std::max(0.0, std::pow(std::abs(f.amplitude) / (q1 * tol), 1.0 / q1) - 1.0);
          },
      },
      family_);
}

double PotentialSpec::max_abs() const {
  return std::visit(
      overloaded{
          [](const StepFamily& f) {
            double m = 0.0;
            for (const auto& s : f.segments) m = std::max(m, std::abs(s.value));
            return m;
          },
          [](const SampledFamily& f) {
            double m = 0.0;
            for (const auto& v : f.values) m = std::max(m, std::abs(v));
            return m;
          },
          [](const auto& f) { return std::abs(f.amplitude); },
      },
      family_);
}

cplx PotentialSpec::tail_integral(double x) const {
  x = std::max(x, 0.0);
  return std::visit(
      overloaded{
          [x](const StepFamily& f) {
            cplx s = 0.0;
            for (const auto& seg : f.segments) {
              if (seg.hi > x) s += seg.value * (seg.hi - std::max(seg.lo, x));
            }
            return s;
          },
          [x](const GaussianFamily& f) {
            return f.amplitude * f.width * 0.5 * std::sqrt(pi) *
                   std::erfc((x - f.center) / f.width);
          },
          [x](const ExpDecayFamily& f) { return f.amplitude * std::exp(-f.rate * x) / f.rate; },
          [x](const PowerTailFamily& f) {
            return f.amplitude * std::pow(1.0 + x, 1.0 - f.exponent) / (f.exponent - 1.0);
          },
          [x](const SampledFamily& f) {
            // exact for piecewise-linear data
            cplx s = 0.0;
            for (std::size_t j = 0; j + 1 < f.grid.size(); ++j) {
              const double x0 = std::max(f.grid[j], x), x1 = f.grid[j + 1];
              if (x1 <= x0) continue;
              s += 0.5 * (sampled_eval(f, x0) + f.values[j + 1]) * (x1 - x0);
            }
            return s;
          },
      },
      family_);
}

PotentialSpec PotentialSpec::scaled(cplx c) const {
  return std::visit(
      overloaded{
          [c](StepFamily f) {
            for (auto& s : f.segments) s.value *= c;
            return PotentialSpec(std::move(f));
          },
          [c](SampledFamily f) {
            for (auto& v : f.values) v *= c;
            return PotentialSpec(std::move(f));
          },
          [c](auto f) {
            f.amplitude *= c;
            return PotentialSpec(std::move(f));
          },
      },
      family_);
}

PotentialSpec PotentialSpec::dilated(double s) const {
  if (!(s > 0.0)) throw std::invalid_argument("dilation factor must be positive");
  const double s2 = s * s;
  return std::visit(overloaded{
                        [&](StepFamily f) {
                          for (auto& seg : f.segments) {
                            seg.lo /= s;
                            seg.hi /= s;
                            seg.value *= s2;
                          }
                          return PotentialSpec(std::move(f));
                        },
                        [&](GaussianFamily f) {
                          f.amplitude *= s2;
                          f.width /= s;
                          f.center /= s;
                          return PotentialSpec(f);
                        },
                        [&](ExpDecayFamily f) {
                          f.amplitude *= s2;
                          f.rate *= s;
                          return PotentialSpec(f);
                        },
                        [&](SampledFamily f) {
                          for (auto& x : f.grid) x /= s;
                          for (auto& v : f.values) v *= s2;
                          return PotentialSpec(std::move(f));
                        },
                        [](const PowerTailFamily&) -> PotentialSpec {
                          throw std::invalid_argument("power_tail is not closed under dilation");
                        },
                    },
                    family_);
}

cplx eval(const PotentialSpec& spec, double x) {
  if (!(x >= 0.0)) throw std::invalid_argument("potential evaluated at negative x");
  return spec(x);
}

Moments moments(const PotentialSpec& spec, double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("moment order p must lie in (0, 1)");
  Moments m;
  m.p = p;
  std::visit(
      overloaded{
          [&](const StepFamily& f) {
            for (const auto& s : f.segments) {
              const double a = std::abs(s.value);
              m.l1 += a * (s.hi - s.lo);
              m.weighted += a * (std::pow(s.hi, 1.0 + p) - std::pow(s.lo, 1.0 + p)) / (1.0 + p);
            }
          },
          [&](const GaussianFamily& f) {
            const double a = std::abs(f.amplitude);
            m.l1 = a * f.width * 0.5 * std::sqrt(pi) * (1.0 + std::erf(f.center / f.width));
            if (f.center == 0.0) {
              m.weighted = a * std::pow(f.width, 1.0 + p) * 0.5 * std::tgamma(0.5 * (1.0 + p));
            } else {
              auto integrand = [&](double x) {
                const double u = (x - f.center) / f.width;
                return std::pow(x, p) * a * std::exp(-u * u);
              };
              const double end = f.center + 40.0 * f.width;
              const AdaptiveTolerance tol{1e-14, 1e-13, 4000};
              m.weighted = integrate_adaptive<double>(integrand, 0.0, f.center, tol).value +
                           integrate_adaptive<double>(integrand, f.center, end, tol).value;
            }
          },
          [&](const ExpDecayFamily& f) {
            const double a = std::abs(f.amplitude);
            m.l1 = a / f.rate;
            m.weighted = a * std::tgamma(1.0 + p) / std::pow(f.rate, 1.0 + p);
          },
          [&](const PowerTailFamily& f) {
            const double q = f.exponent;
            if (!(p < q - 1.0)) {
              throw std::domain_error("power_tail moment diverges: need p < exponent - 1");
            }
            const double a = std::abs(f.amplitude);
            m.l1 = a / (q - 1.0);
            // integral of x^p (1+x)^-q = B(p+1, q-p-1)
            const double b1 = p + 1.0, b2 = q - p - 1.0;
            m.weighted = a * std::exp(std::lgamma(b1) + std::lgamma(b2) - std::lgamma(b1 + b2));
          },
          [&](const SampledFamily& f) {
            for (std::size_t j = 0; j + 1 < f.grid.size(); ++j) {
              m.l1 += sampled_piece(f, j, 0.0);
              m.weighted += sampled_piece(f, j, p);
            }
          },
      },
      spec.family());
  return m;
}

double radius(const PotentialSpec& spec) { return 2.0 * spec.tail_mass(0.0); }

}  // namespace tracelab
