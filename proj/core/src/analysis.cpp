#include "seqdetect/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "seqdetect/extremal.hpp"

namespace seqdetect {

const char* to_string(RateQuantity quantity) {
  switch (quantity) {
    case RateQuantity::kLowerRadiusSq:
      return "lower-radius-sq";
    case RateQuantity::kUpperRadiusSq:
      return "upper-radius-sq";
    case RateQuantity::kCriticalRadius:
      return "critical-radius";
  }
  return "unknown";
}

const char* to_string(DetectionRegime regime) {
  switch (regime) {
    case DetectionRegime::kDegenerate:
      return "degenerate";
    case DetectionRegime::kCritical:
      return "critical";
    case DetectionRegime::kConsistent:
      return "consistent";
  }
  return "unknown";
}

double expected_rate_slope(RateQuantity quantity, double s, double t) {
  if (!(s > 0.0) || !(t >= 0.0)) {
    throw std::invalid_argument("expected_rate_slope: need s > 0 and t >= 0");
  }
  const double denom = 4.0 * s + 4.0 * t + 1.0;
  switch (quantity) {
    case RateQuantity::kLowerRadiusSq:
    case RateQuantity::kUpperRadiusSq:
      return 8.0 * s / denom;
    case RateQuantity::kCriticalRadius:
      return 4.0 * s / denom;
  }
  throw std::invalid_argument("expected_rate_slope: unknown quantity");
}

namespace {

double u_from_solution(const ExtremalSolution& sol, double eps) {
  const double eps2 = eps * eps;
  return sol.z0_sq * std::sqrt(sol.j0) / std::sqrt(2.0) / eps2;
}

constexpr std::size_t kStartTruncation = 256;
constexpr std::size_t kMaxTruncation = 1000000;

void check_polynomial_preset(FamilyPreset preset, const char* where) {
  if (preset == FamilyPreset::kSevere) {
    throw std::invalid_argument(std::string(where) +
                                ": polynomial presets only (direct or mild)");
  }
}

void check_eps_grid(std::span<const double> eps_grid, std::size_t min_points,
                    bool require_decades, const char* where) {
  if (eps_grid.size() < min_points) {
    throw std::invalid_argument(std::string(where) + ": grid too small");
  }
  double lo = eps_grid[0];
  double hi = eps_grid[0];
  for (const double eps : eps_grid) {
    if (!(eps > 0.0) || !std::isfinite(eps)) {
      throw std::invalid_argument(std::string(where) +
                                  ": noise levels must be positive and finite");
    }
    lo = std::min(lo, eps);
    hi = std::max(hi, eps);
  }
  if (require_decades && !(hi / lo >= 100.0 * (1.0 - 1e-12))) {
    throw std::invalid_argument(std::string(where) +
                                ": grid must span at least two decades");
  }
}

}  // namespace

double radius_for_u(const ProblemSpec& spec, double u_target) {
  spec.validate();
  if (!(spec.noise > 0.0)) {
    throw std::invalid_argument("radius_for_u: requires a positive noise level");
  }
  if (!(u_target > 0.0) || !std::isfinite(u_target)) {
    throw std::invalid_argument("radius_for_u: target must be finite and > 0");
  }
  const double max_r = std::sqrt(max_class_norm_sq(spec));
  double hi = max_r * (1.0 - 1e-9);
  if (u_of_r(spec, hi) < u_target) {
    throw NumericalError(
        "radius_for_u: target value unreachable inside the class");
  }
  double lo = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi || hi - lo <= 1e-13 * hi) {
      break;
    }
    if (u_of_r(spec, mid) < u_target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo + 0.5 * (hi - lo);
}

namespace {

struct QuantityResult final {
  double value = 0.0;
  bool binding = false;
};

QuantityResult rate_quantity(const ProblemSpec& spec, const ErrorBudget& budget,
                             RateQuantity quantity) {
  switch (quantity) {
    case RateQuantity::kLowerRadiusSq: {
      const RadiusBound bound = lower_radius(spec, budget);
      return {bound.r_sq, bound.truncation_binding};
    }
    case RateQuantity::kUpperRadiusSq: {
      const RadiusBound bound = upper_radius(spec, budget);
      return {bound.r_sq, bound.truncation_binding};
    }
    case RateQuantity::kCriticalRadius: {
      const double r = radius_for_u(spec, 1.0);
      const ExtremalSolution sol = solve_extremal(spec, r);
      return {r, sol.truncation_binding};
    }
  }
  throw std::invalid_argument("rate_quantity: unknown quantity");
}

}  // namespace

RateFit fit_rate(FamilyPreset preset, double s, double t,
                 const ErrorBudget& budget, RateQuantity quantity,
                 std::span<const double> eps_grid) {
  check_polynomial_preset(preset, "fit_rate");
  budget.validate();
  check_eps_grid(eps_grid, 5, /*require_decades=*/true, "fit_rate");

  RateFit fit;
  fit.quantity = quantity;
  std::vector<double> log_eps;
  std::vector<double> log_value;
  for (const double eps : eps_grid) {
    std::size_t n = kStartTruncation;
    QuantityResult result;
    for (;;) {
      const ProblemSpec spec = make_preset_spec(preset, s, t, eps, n);
      result = rate_quantity(spec, budget, quantity);
      if (!result.binding || n >= kMaxTruncation) {
        break;
      }
      n = std::min(n * 4, kMaxTruncation);
    }
    fit.eps_grid.push_back(eps);
    fit.values.push_back(result.value);
    fit.truncations.push_back(n);
    log_eps.push_back(std::log(eps));
    log_value.push_back(std::log(result.value));
  }
  const OlsFit ols = ols_fit(log_eps, log_value);
  fit.slope = ols.slope;
  fit.intercept = ols.intercept;
  fit.max_residual = ols.max_abs_residual;
  return fit;
}

RegimeReport regime_scan(FamilyPreset preset, double s, double t,
                         const RadiusRule& radius_rule,
                         std::span<const double> eps_grid,
                         double slope_tolerance) {
  if (!radius_rule) {
    throw std::invalid_argument("regime_scan: radius rule must be callable");
  }
  if (!(slope_tolerance > 0.0)) {
    throw std::invalid_argument("regime_scan: slope tolerance must be > 0");
  }
  check_eps_grid(eps_grid, 2, /*require_decades=*/false, "regime_scan");

  RegimeReport report;
  std::vector<double> log_eps;
  std::vector<double> log_u;
  for (const double eps : eps_grid) {
    RegimePoint point;
    point.eps = eps;
    point.radius = radius_rule(eps);
    std::size_t n = kStartTruncation;
    try {
      ExtremalSolution sol;
      ProblemSpec spec;
      for (;;) {
        spec = make_preset_spec(preset, s, t, eps, n);
        sol = solve_extremal(spec, point.radius);
        if (!sol.truncation_binding || n >= kMaxTruncation) {
          break;
        }
        n = std::min(n * 4, kMaxTruncation);
      }
      point.u = u_from_solution(sol, eps);
      const std::vector<double> omega = ingster_filters(spec, sol);
      point.omega_max = *std::max_element(omega.begin(), omega.end());
      point.feasible = true;
      log_eps.push_back(std::log(eps));
      log_u.push_back(std::log(point.u));
    } catch (const InfeasibleError&) {
      point.feasible = false;
    }
    report.points.push_back(std::move(point));
  }

  if (log_eps.size() < 2) {
    throw NumericalError(
        "regime_scan: fewer than two feasible grid points, no trend to fit");
  }
  report.slope = ols_fit(log_eps, log_u).slope;
  if (report.slope > slope_tolerance) {
    report.regime = DetectionRegime::kDegenerate;
  } else if (report.slope < -slope_tolerance) {
    report.regime = DetectionRegime::kConsistent;
  } else {
    report.regime = DetectionRegime::kCritical;
  }
  return report;
}

GaussianShapeReport gaussian_shape_check(const ProblemSpec& spec, double r,
                                         double alpha, const McOptions& options,
                                         const CalibrationRequest& calibration) {
  options.validate();

  const IngsterTest test = build_ingster(spec, r, alpha, calibration);
  const ExtremalSolution sol = solve_extremal(spec, r);

  GaussianShapeReport report;
  report.radius = r;
  report.u = test.u;
  report.omega_max =
      *std::max_element(test.omega.begin(), test.omega.end());
  report.efficient_dim = test.efficient_dim;

  const AdversarySet single = {
      make_prior(spec, sol.theta_bar, r, "extremal shell signal")};
  report.lhs = estimate_beta(AnyTest(test), single, options).worst;
  report.rhs = normal_cdf(normal_quantile(1.0 - alpha) - test.u);
  report.gap = report.lhs.probability - report.rhs;
  return report;
}

SpectralShapeReport spectral_shape_check(const ProblemSpec& spec, double r,
                                         const ErrorBudget& budget,
                                         double c_alpha,
                                         const McOptions& options) {
  budget.validate();
  options.validate();

  SpectralShapeReport report;
  report.bandwidth = select_bandwidth(spec, r, c_alpha);

  // Gaussian-threshold calibration: the shape statement is about the normal
  // quantile threshold, not the exact finite-sample one.
  CalibrationRequest request;
  request.kind = CalibrationKind::kGaussian;
  const SpectralTest test =
      calibrate_spectral(spec, report.bandwidth, budget.alpha, request);

  const double a = spec.a(report.bandwidth);
  const double s4 = cumulative_b4(spec, report.bandwidth);
  const double eps2 = spec.noise * spec.noise;
  report.h = std::pow(static_cast<double>(report.bandwidth), -0.125);
  report.shift = (1.0 - report.h) / (a * a) / (eps2 * std::sqrt(s4));
  report.rhs = normal_cdf(normal_quantile(1.0 - budget.alpha) - report.shift);

  const AdversarySet adversaries = default_adversaries(spec, budget, r);
  report.lhs = estimate_beta(AnyTest(test), adversaries, options).worst;
  report.gap = report.lhs.probability - report.rhs;
  report.inequality_holds =
      report.lhs.probability <= report.rhs + report.lhs.half_width;
  return report;
}

PowerfulConstants default_powerful_constants(double s, double t,
                                             const ErrorBudget& budget) {
  if (!(s > 0.0) || !(t >= 0.0)) {
    throw std::invalid_argument(
        "default_powerful_constants: need s > 0 and t >= 0");
  }
  budget.validate();
  PowerfulConstants constants;
  constants.signal_constant = (4.0 * s + 4.0 * t + 1.0) / (4.0 * t + 1.0);

  // Smallest c such that Markov's bound on the matched-filter errors meets
  // the budget: the positive root of beta c^2 - (2 beta z + 2 sqrt(2)) c +
  // (beta z^2 - 1) = 0 at z = z_{1-alpha}.
  const double z = normal_quantile(1.0 - budget.alpha);
  const double beta = budget.beta;
  const double mid = 2.0 * beta * z + 2.0 * std::sqrt(2.0);
  const double disc = mid * mid - 4.0 * beta * (beta * z * z - 1.0);
  constants.c_alpha_beta = (mid + std::sqrt(disc)) / (2.0 * beta);

  // integral_0^1 y^{4t} (1 - y^{2s})^2 dy, in closed form.
  const double integral = 1.0 / (4.0 * t + 1.0) -
                          2.0 / (4.0 * t + 2.0 * s + 1.0) +
                          1.0 / (4.0 * t + 4.0 * s + 1.0);
  constants.c_prime = std::sqrt(2.0) * constants.c_alpha_beta /
                      ((4.0 * t + 1.0) * std::sqrt(integral));
  return constants;
}

PowerfulReport powerful_check(FamilyPreset preset, double s, double t,
                              const ErrorBudget& budget,
                              std::span<const double> eps_grid,
                              const McOptions& options,
                              std::optional<PowerfulConstants> constants) {
  check_polynomial_preset(preset, "powerful_check");
  budget.validate();
  options.validate();
  check_eps_grid(eps_grid, 2, /*require_decades=*/false, "powerful_check");

  PowerfulReport report;
  report.constants =
      constants ? *constants : default_powerful_constants(s, t, budget);

  static constexpr unsigned kMultipliers[] = {1, 2, 4};

  std::vector<double> log_eps;
  std::vector<double> log_rho;
  unsigned min_c = 0;
  unsigned max_c = 0;
  bool all_pass = true;
  for (std::size_t ie = 0; ie < eps_grid.size(); ++ie) {
    const double eps = eps_grid[ie];
    PowerfulPoint point;
    point.eps = eps;

    const double exponent = 1.0 / (2.0 * s + 2.0 * t + 0.5);
    const double balance = std::pow(
        report.constants.signal_constant /
            (report.constants.c_prime * eps * eps),
        exponent);
    point.balancing_r = std::max(2.0, balance);
    const double signal_branch =
        report.constants.signal_constant * std::pow(point.balancing_r, -2.0 * s);
    const double noise_branch = report.constants.c_prime * eps * eps *
                                std::pow(point.balancing_r, 2.0 * t + 0.5);
    point.rho = std::sqrt(std::max(signal_branch, noise_branch));

    std::size_t n = kStartTruncation;
    ProblemSpec spec;
    ExtremalSolution sol;
    for (;;) {
      spec = make_preset_spec(preset, s, t, eps, n);
      sol = solve_extremal(spec, point.rho);
      if (!sol.truncation_binding || n >= kMaxTruncation) {
        break;
      }
      n = std::min(n * 4, kMaxTruncation);
    }

    CalibrationRequest calibration;
    calibration.seed = options.seed;
    calibration.stream = 0;
    const IngsterTest test =
        build_ingster(spec, point.rho, budget.alpha, calibration);
    point.u_rho = test.u;

    for (std::size_t ci = 0; ci < std::size(kMultipliers); ++ci) {
      const unsigned c = kMultipliers[ci];
      Signal scaled = sol.theta_bar;
      for (double& v : scaled) {
        v *= static_cast<double>(c);
      }
      const AdversarySet probe = {make_prior(
          spec, std::move(scaled), c * point.rho,
          "extremal probe at multiplier " + std::to_string(c))};
      McOptions opt = options;
      opt.stream = options.stream + 4 * ie + ci;
      const double beta_hat =
          estimate_beta(AnyTest(test), probe, opt).worst.probability;
      point.beta_hats.push_back(beta_hat);
      if (beta_hat <= budget.beta) {
        point.smallest_c = c;
        break;
      }
    }

    if (point.smallest_c == 0) {
      all_pass = false;
    } else {
      min_c = (min_c == 0) ? point.smallest_c : std::min(min_c, point.smallest_c);
      max_c = std::max(max_c, point.smallest_c);
    }
    log_eps.push_back(std::log(eps));
    log_rho.push_back(std::log(point.rho));
    report.points.push_back(std::move(point));
  }

  report.rho_slope = ols_fit(log_eps, log_rho).slope;
  report.stable = all_pass && max_c <= 2 * min_c;
  return report;
}

WeightRatioDecayReport weight_ratio_decay_check(
    const SequenceFamily& operator_weights,
    std::span<const std::size_t> d_grid) {
  operator_weights.validate();
  if (d_grid.size() < 2) {
    throw std::invalid_argument(
        "weight_ratio_decay_check: need at least two cut-offs");
  }
  for (std::size_t i = 0; i < d_grid.size(); ++i) {
    if (d_grid[i] < 1 || (i > 0 && d_grid[i] <= d_grid[i - 1])) {
      throw std::invalid_argument(
          "weight_ratio_decay_check: cut-offs must be strictly increasing");
    }
  }

  WeightRatioDecayReport report;
  std::vector<double> log_d;
  std::vector<double> log_ratio;
  double s4 = 0.0;
  double max_inv_b2 = 0.0;
  std::size_t j = 1;
  for (const std::size_t d : d_grid) {
    for (; j <= d; ++j) {
      const double b = sequence_value(operator_weights, j);
      const double inv_b2 = 1.0 / (b * b);
      s4 += inv_b2 * inv_b2;
      max_inv_b2 = std::max(max_inv_b2, inv_b2);
    }
    const double ratio = max_inv_b2 / std::sqrt(s4);
    report.d_grid.push_back(d);
    report.ratios.push_back(ratio);
    log_d.push_back(std::log(static_cast<double>(d)));
    log_ratio.push_back(std::log(ratio));
  }
  report.slope = ols_fit(log_d, log_ratio).slope;
  report.satisfied = report.slope <= -0.01;
  report.delta = std::max(0.0, -report.slope);
  return report;
}

}  // namespace seqdetect
