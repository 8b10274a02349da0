#include "seqdetect/tests.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "seqdetect/extremal.hpp"

namespace seqdetect {

const char* to_string(CalibrationKind kind) {
  switch (kind) {
    case CalibrationKind::kMonteCarlo:
      return "monte-carlo";
    case CalibrationKind::kGaussian:
      return "gaussian";
  }
  return "unknown";
}

void CalibrationRequest::validate() const {
  if (kind == CalibrationKind::kMonteCarlo && samples < 10000) {
    throw std::invalid_argument(
        "CalibrationRequest: Monte-Carlo calibration needs >= 10000 samples");
  }
}

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0) || !(alpha < 1.0)) {
    throw std::invalid_argument("test level alpha must lie in (0, 1)");
  }
}

void check_noise(const ProblemSpec& spec) {
  if (!(spec.noise > 0.0)) {
    throw std::invalid_argument("test calibration requires a positive noise level");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Spectral cut-off test
// ---------------------------------------------------------------------------

double spectral_statistic(const ProblemSpec& spec, std::size_t bandwidth,
                          std::span<const double> y) {
  if (bandwidth < 1 || bandwidth > spec.truncation) {
    throw std::invalid_argument("spectral_statistic: bandwidth outside [1, N]");
  }
  if (y.size() < bandwidth) {
    throw std::invalid_argument("spectral_statistic: observation shorter than bandwidth");
  }
  const double eps2 = spec.noise * spec.noise;
  double t = 0.0;
  for (std::size_t j = 1; j <= bandwidth; ++j) {
    const double b = spec.b(j);
    t += (y[j - 1] * y[j - 1] - eps2) / (b * b);
  }
  return t;
}

SpectralTest calibrate_spectral(const ProblemSpec& spec, std::size_t bandwidth,
                                double alpha, const CalibrationRequest& request) {
  spec.validate();
  check_noise(spec);
  check_alpha(alpha);
  request.validate();
  if (bandwidth < 1 || bandwidth > spec.truncation) {
    throw std::invalid_argument("calibrate_spectral: bandwidth outside [1, N]");
  }

  SpectralTest test;
  test.spec = spec;
  test.bandwidth = bandwidth;
  test.calibration.kind = request.kind;
  test.calibration.alpha = alpha;

  const double eps2 = spec.noise * spec.noise;
  if (request.kind == CalibrationKind::kGaussian) {
    double s4 = 0.0;
    for (std::size_t j = 1; j <= bandwidth; ++j) {
      const double b = spec.b(j);
      s4 += 1.0 / (b * b * b * b);
    }
    test.calibration.threshold =
        normal_quantile(1.0 - alpha) * eps2 * std::sqrt(2.0 * s4);
    return test;
  }

  // Monte-Carlo: simulate the eps-free base sum_{j<=D} b_j^{-2}(xi^2 - 1)
  // and rescale its quantile, so thresholds at matching seeds scale exactly
  // with eps^2.
  std::vector<double> inv_b2(bandwidth);
  for (std::size_t j = 1; j <= bandwidth; ++j) {
    const double b = spec.b(j);
    inv_b2[j - 1] = 1.0 / (b * b);
  }
  RngStream rng(request.seed, request.stream);
  std::vector<double> base(request.samples);
  for (double& value : base) {
    double s = 0.0;
    for (std::size_t j = 0; j < bandwidth; ++j) {
      const double xi = rng.normal();
      s += inv_b2[j] * (xi * xi - 1.0);
    }
    value = s;
  }
  test.calibration.threshold =
      eps2 * quantile_type7(std::move(base), 1.0 - alpha);
  test.calibration.samples = request.samples;
  test.calibration.seed = request.seed;
  test.calibration.stream = request.stream;
  return test;
}

TestOutcome run_spectral(const SpectralTest& test, std::span<const double> y) {
  TestOutcome out;
  out.statistic = spectral_statistic(test.spec, test.bandwidth, y);
  out.threshold = test.calibration.threshold;
  out.reject = out.statistic > out.threshold;
  return out;
}

double spectral_deviation_constant(const ProblemSpec& spec,
                                   std::size_t bandwidth, double alpha) {
  spec.validate();
  check_alpha(alpha);
  if (bandwidth < 1 || bandwidth > spec.truncation) {
    throw std::invalid_argument("spectral_deviation_constant: bandwidth outside [1, N]");
  }
  const double x = std::log(1.0 / alpha);
  double s4 = 0.0;
  double max_inv_b2 = 0.0;
  for (std::size_t j = 1; j <= bandwidth; ++j) {
    const double b = spec.b(j);
    const double inv_b2 = 1.0 / (b * b);
    s4 += inv_b2 * inv_b2;
    max_inv_b2 = std::max(max_inv_b2, inv_b2);
  }
  return 2.0 * std::sqrt(x) + 2.0 * x * max_inv_b2 / std::sqrt(s4);
}

std::size_t select_bandwidth(const ProblemSpec& spec, double r, double c_alpha) {
  spec.validate();
  check_noise(spec);
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw std::invalid_argument("select_bandwidth: radius must be finite and > 0");
  }
  if (!(c_alpha > 0.0)) {
    throw std::invalid_argument("select_bandwidth: c_alpha must be > 0");
  }
  const double target = r * r / 2.0;
  const double eps2 = spec.noise * spec.noise;
  double s4 = 0.0;
  std::size_t best = 0;
  for (std::size_t d = 1; d <= spec.truncation; ++d) {
    const double b = spec.b(d);
    s4 += 1.0 / (b * b * b * b);
    const double a = spec.a(d);
    const double lhs = c_alpha * eps2 * std::sqrt(s4) + 1.0 / (a * a);
    if (lhs <= target) {
      best = d;
    }
  }
  if (best == 0) {
    throw InfeasibleError("select_bandwidth: radius too small for bandwidth rule");
  }
  return best;
}

// ---------------------------------------------------------------------------
// Matched-filter test
// ---------------------------------------------------------------------------

IngsterTest build_ingster(const ProblemSpec& spec, double r, double alpha,
                          const CalibrationRequest& request) {
  spec.validate();
  check_noise(spec);
  check_alpha(alpha);
  request.validate();
  if (!(r > 0.0)) {
    throw std::invalid_argument("build_ingster: radius must be > 0");
  }

  const ExtremalSolution sol = solve_extremal(spec, r);

  IngsterTest test;
  test.spec = spec;
  test.radius = r;
  test.omega = ingster_filters(spec, sol);
  test.efficient_dim = sol.efficient_dim;
  test.u = u_of_r(spec, r);
  test.calibration.kind = request.kind;
  test.calibration.alpha = alpha;

  if (request.kind == CalibrationKind::kGaussian) {
    test.calibration.threshold = normal_quantile(1.0 - alpha);
    return test;
  }

  // The base statistic sum_{j<=m} omega_j (xi^2 - 1) is already eps-free.
  RngStream rng(request.seed, request.stream);
  std::vector<double> base(request.samples);
  const std::size_t m = test.efficient_dim;
  for (double& value : base) {
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double xi = rng.normal();
      s += test.omega[j] * (xi * xi - 1.0);
    }
    value = s;
  }
  test.calibration.threshold = quantile_type7(std::move(base), 1.0 - alpha);
  test.calibration.samples = request.samples;
  test.calibration.seed = request.seed;
  test.calibration.stream = request.stream;
  return test;
}

double ingster_statistic(const IngsterTest& test, std::span<const double> y) {
  const std::size_t m = test.efficient_dim;
  if (y.size() < m) {
    throw std::invalid_argument(
        "ingster_statistic: observation shorter than the efficient dimension");
  }
  const double eps2 = test.spec.noise * test.spec.noise;
  double t = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    t += test.omega[j] * (y[j] * y[j] / eps2 - 1.0);
  }
  return t;
}

TestOutcome run_ingster(const IngsterTest& test, std::span<const double> y) {
  TestOutcome out;
  out.statistic = ingster_statistic(test, y);
  out.threshold = test.calibration.threshold;
  out.reject = out.statistic > out.threshold;
  return out;
}

// ---------------------------------------------------------------------------
// Type-erased test handle
// ---------------------------------------------------------------------------

namespace {

TestOutcome run_outcome(const SpectralTest& t, std::span<const double> y) {
  return run_spectral(t, y);
}
TestOutcome run_outcome(const IngsterTest& t, std::span<const double> y) {
  return run_ingster(t, y);
}

}  // namespace

TestOutcome run_test(const AnyTest& test, std::span<const double> y) {
  return std::visit([&](const auto& t) { return run_outcome(t, y); }, test);
}

std::size_t observed_coordinates(const AnyTest& test) {
  if (const auto* spectral = std::get_if<SpectralTest>(&test)) {
    return spectral->bandwidth;
  }
  return std::get<IngsterTest>(test).efficient_dim;
}

const ProblemSpec& test_spec(const AnyTest& test) {
  if (const auto* spectral = std::get_if<SpectralTest>(&test)) {
    return spectral->spec;
  }
  return std::get<IngsterTest>(test).spec;
}

const CalibrationInfo& test_calibration(const AnyTest& test) {
  if (const auto* spectral = std::get_if<SpectralTest>(&test)) {
    return spectral->calibration;
  }
  return std::get<IngsterTest>(test).calibration;
}

}  // namespace seqdetect
