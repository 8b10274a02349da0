#include "seqdetect/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace seqdetect {

void ErrorBudget::validate() const {
  if (!(alpha > 0.0) || !(alpha < 1.0)) {
    throw std::invalid_argument("ErrorBudget: alpha must lie in (0, 1)");
  }
  if (!(beta > 0.0) || !(beta < 1.0)) {
    throw std::invalid_argument("ErrorBudget: beta must lie in (0, 1)");
  }
}

void ErrorBudget::validate_nondegenerate() const {
  validate();
  if (!(alpha + beta < 1.0)) {
    throw std::invalid_argument(
        "ErrorBudget: alpha + beta must be < 1 for a nondegenerate budget");
  }
}

double c_constant(const ErrorBudget& budget) {
  budget.validate_nondegenerate();
  const double d = 1.0 - budget.alpha - budget.beta;
  return std::pow(2.0 * std::log1p(4.0 * d * d), 0.25);
}

double C_constant(const ErrorBudget& budget) {
  budget.validate();
  const double xa = std::log(1.0 / budget.alpha);
  const double xb = std::log(1.0 / budget.beta);
  return std::sqrt(2.0 * xb) + std::sqrt(2.0 * (xa + xb)) +
         std::sqrt(2.0) * std::sqrt(std::sqrt(xa) + std::sqrt(xb));
}

double cumulative_b4(const ProblemSpec& spec, std::size_t D) {
  spec.validate();
  if (D < 1 || D > spec.truncation) {
    throw std::invalid_argument("cumulative_b4: D must lie in [1, truncation]");
  }
  double s = 0.0;
  for (std::size_t j = 1; j <= D; ++j) {
    const double b = spec.b(j);
    s += 1.0 / (b * b * b * b);
  }
  return s;
}

namespace {

// Shared integer scan: objective(D) for D = 1..N with exact prefix sums of
// b^{-4}.  `maximize` picks argmax (lower curve) vs argmin (upper curve);
// ties break to the smallest D in both directions.
template <typename Objective>
RadiusBound scan_bandwidths(const ProblemSpec& spec, Objective objective,
                            bool maximize) {
  const std::size_t n = spec.truncation;
  double s4 = 0.0;
  double best = maximize ? -std::numeric_limits<double>::infinity()
                         : std::numeric_limits<double>::infinity();
  std::size_t best_d = 1;
  for (std::size_t d = 1; d <= n; ++d) {
    const double b = spec.b(d);
    s4 += 1.0 / (b * b * b * b);
    const double value = objective(d, s4);
    const bool better = maximize ? (value > best) : (value < best);
    if (better) {
      best = value;
      best_d = d;
    }
  }
  RadiusBound out;
  out.r_sq = best;
  out.bandwidth = best_d;
  out.truncation_binding = (best_d == n);
  return out;
}

}  // namespace

RadiusBound lower_radius(const ProblemSpec& spec, const ErrorBudget& budget) {
  spec.validate();
  const double c = c_constant(budget);
  const double eps2 = spec.noise * spec.noise;
  return scan_bandwidths(
      spec,
      [&](std::size_t d, double s4) {
        const double a = spec.a(d);
        return std::min(c * eps2 * std::sqrt(s4), 1.0 / (a * a));
      },
      /*maximize=*/true);
}

RadiusBound upper_radius(const ProblemSpec& spec, const ErrorBudget& budget) {
  spec.validate();
  const double C = C_constant(budget);
  const double eps2 = spec.noise * spec.noise;
  return scan_bandwidths(
      spec,
      [&](std::size_t d, double s4) {
        const double a = spec.a(d);
        return C * eps2 * std::sqrt(s4) + 1.0 / (a * a);
      },
      /*maximize=*/false);
}

RatioBandReport consecutive_ratio_check(const ProblemSpec& spec) {
  spec.validate();
  constexpr double kMinRatio = 1e-3;
  RatioBandReport report;
  const std::size_t n = spec.truncation;
  if (n < 2) {
    // A single coordinate imposes no ratio constraint.
    report.satisfied = true;
    report.a_ratio_min = report.a_ratio_max = 1.0;
    report.b_ratio_min = report.b_ratio_max = 1.0;
    return report;
  }
  double amin = std::numeric_limits<double>::infinity();
  double amax = -amin;
  double bmin = amin;
  double bmax = -amin;
  for (std::size_t d = 2; d <= n; ++d) {
    const double ra = spec.a(d - 1) / spec.a(d);
    const double rb = spec.b(d - 1) / spec.b(d);
    amin = std::min(amin, ra);
    amax = std::max(amax, ra);
    bmin = std::min(bmin, rb);
    bmax = std::max(bmax, rb);
  }
  report.a_ratio_min = amin;
  report.a_ratio_max = amax;
  report.b_ratio_min = bmin;
  report.b_ratio_max = bmax;
  // a_j nondecreasing and b_j nonincreasing-or-flat means both ratios sit in
  // (0, 1] when regular; b may grow for smoothing-type weights, so allow
  // b ratios in [kMinRatio, 1/kMinRatio] but keep a ratios in [kMinRatio, 1].
  report.satisfied = amin >= kMinRatio && amax <= 1.0 + 1e-12 &&
                     bmin >= kMinRatio && bmax <= 1.0 / kMinRatio;
  return report;
}

BoundsReport bounds_report(const ProblemSpec& spec, const ErrorBudget& budget) {
  const RadiusBound lo = lower_radius(spec, budget);
  const RadiusBound hi = upper_radius(spec, budget);
  BoundsReport report;
  report.lower_radius_sq = lo.r_sq;
  report.upper_radius_sq = hi.r_sq;
  report.lower_bandwidth = lo.bandwidth;
  report.upper_bandwidth = hi.bandwidth;
  report.c_const = c_constant(budget);
  report.C_const = C_constant(budget);
  report.ratio = lo.r_sq > 0.0
                     ? hi.r_sq / lo.r_sq
                     : std::numeric_limits<double>::infinity();
  report.ratio_band_satisfied = consecutive_ratio_check(spec).satisfied;
  report.truncation_binding = lo.truncation_binding || hi.truncation_binding;
  return report;
}

}  // namespace seqdetect
