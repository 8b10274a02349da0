// Asymptotic verification: log-log rate fitting, the u-trichotomy over
// noise levels, Gaussian-shape checks for both tests, the powerful-radius
// construction, and the weight-ratio decay condition.
//
// Everything here drives the lower-level modules over epsilon grids and
// reduces the results to fitted exponents, regime labels, or inequality
// verdicts, always reporting the per-point values alongside the verdict.
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "seqdetect/bounds.hpp"
#include "seqdetect/mc.hpp"
#include "seqdetect/model.hpp"
#include "seqdetect/tests.hpp"

namespace seqdetect {

// ---------------------------------------------------------------------------
// Rate fitting
// ---------------------------------------------------------------------------

enum class RateQuantity : std::uint8_t {
  kLowerRadiusSq,   // value of the lower radius bound (squared radius)
  kUpperRadiusSq,   // value of the upper radius bound (squared radius)
  kCriticalRadius,  // radius r solving u(r) = 1
};

const char* to_string(RateQuantity quantity);

struct RateFit final {
  RateQuantity quantity = RateQuantity::kLowerRadiusSq;
  std::vector<double> eps_grid;
  std::vector<double> values;
  std::vector<std::size_t> truncations;  // working N per grid point
  double slope = 0.0;                    // OLS on (log eps, log value)
  double intercept = 0.0;
  double max_residual = 0.0;
};

// Closed-form exponent for polynomial families (direct is t = 0):
//   squared-radius bounds: 8s / (4s + 4t + 1)
//   critical radius:       4s / (4s + 4t + 1)
double expected_rate_slope(RateQuantity quantity, double s, double t);

// Radius at which the extremal signal-to-noise value reaches u_target > 0;
// bisection on (0, class boundary), throws NumericalError if the target is
// unreachable within the class.
double radius_for_u(const ProblemSpec& spec, double u_target);

// Compute the chosen quantity per epsilon and fit the log-log slope.
// Polynomial presets only (direct/mild); needs >= 5 grid points spanning
// >= 2 decades.  The working truncation grows (x4, capped at 1e6) until the
// optimum stops touching it.
RateFit fit_rate(FamilyPreset preset, double s, double t,
                 const ErrorBudget& budget, RateQuantity quantity,
                 std::span<const double> eps_grid);

// ---------------------------------------------------------------------------
// Trichotomy scan
// ---------------------------------------------------------------------------

enum class DetectionRegime : std::uint8_t {
  kDegenerate,  // u -> 0: no test separates at this radius scale
  kCritical,    // u bounded: constant-order error gap
  kConsistent,  // u -> infinity: errors vanish
};

const char* to_string(DetectionRegime regime);

struct RegimePoint final {
  double eps = 0.0;
  double radius = 0.0;
  double u = 0.0;
  double omega_max = 0.0;  // largest matched-filter weight at this point
  bool feasible = false;
};

struct RegimeReport final {
  DetectionRegime regime = DetectionRegime::kCritical;
  double slope = 0.0;  // d log u / d log eps over feasible points
  std::vector<RegimePoint> points;
};

using RadiusRule = std::function<double(double eps)>;

// Tabulate u(r(eps)) and the top filter weight over the grid and classify
// the regime from the fitted log-log trend: |slope| <= tolerance reads as
// bounded u; positive slope means u vanishes with eps; negative slope means
// u diverges.  Infeasible grid points are reported per-point and excluded
// from the fit.
RegimeReport regime_scan(FamilyPreset preset, double s, double t,
                         const RadiusRule& radius_rule,
                         std::span<const double> eps_grid,
                         double slope_tolerance = 0.2);

// ---------------------------------------------------------------------------
// Gaussian shape checks
// ---------------------------------------------------------------------------

struct GaussianShapeReport final {
  double radius = 0.0;
  double u = 0.0;
  double omega_max = 0.0;
  std::size_t efficient_dim = 0;
  PowerEstimate lhs;  // MC type-II error of the matched-filter test at theta_bar
  double rhs = 0.0;   // Phi(z_{1-alpha} - u)
  double gap = 0.0;   // lhs.probability - rhs
};

// Monte-Carlo replication of the limiting type-II error shape
// beta = Phi(z_{1-alpha} - u).  The calibration request controls the
// threshold: the Gaussian kind reproduces the limit statement literally,
// the Monte-Carlo kind uses the exact finite-sample threshold.
GaussianShapeReport gaussian_shape_check(
    const ProblemSpec& spec, double r, double alpha, const McOptions& options,
    const CalibrationRequest& calibration = {CalibrationKind::kGaussian});

struct SpectralShapeReport final {
  std::size_t bandwidth = 0;  // selected cut-off
  double h = 0.0;             // vanishing slack sequence, bandwidth^{-1/8}
  double shift = 0.0;         // (1-h) a_D^{-2} / (eps^2 sqrt(S_D))
  PowerEstimate lhs;          // worst-case MC type-II error over adversaries
  double rhs = 0.0;           // Phi(z_{1-alpha} - shift)
  double gap = 0.0;           // lhs.probability - rhs
  bool inequality_holds = false;  // lhs <= rhs + lhs.half_width
};

// One-sided Gaussian shape for the spectral test at the rule-selected
// bandwidth: the worst-case type-II error over the default adversaries must
// not exceed Phi(z_{1-alpha} - shift) up to Monte-Carlo width.  h is fixed
// to bandwidth^{-1/8}, which vanishes while h * bandwidth^{1/4} diverges.
SpectralShapeReport spectral_shape_check(const ProblemSpec& spec, double r,
                                         const ErrorBudget& budget,
                                         double c_alpha,
                                         const McOptions& options);

// ---------------------------------------------------------------------------
// Powerful-radius construction
// ---------------------------------------------------------------------------

struct PowerfulConstants final {
  double signal_constant = 0.0;  // C0 in rho^2 = C0 R^{-2s} (signal branch)
  double c_alpha_beta = 0.0;     // Markov-route budget constant
  double c_prime = 0.0;          // noise-branch constant
};

// Defaults derived from the crude Markov route at budget (alpha, beta):
//   signal_constant = (4s+4t+1)/(4t+1),
//   c_alpha_beta    = root of the Markov quadratic at z_{1-alpha},
//   c_prime         = sqrt(2) c_alpha_beta / ((4t+1) sqrt(I(s,t))),
// with I(s,t) = integral_0^1 y^{4t} (1-y^{2s})^2 dy.
PowerfulConstants default_powerful_constants(double s, double t,
                                             const ErrorBudget& budget);

struct PowerfulPoint final {
  double eps = 0.0;
  double balancing_r = 0.0;  // real bandwidth R >= 2 equating the branches
  double rho = 0.0;          // candidate radius
  double u_rho = 0.0;
  std::vector<double> beta_hats;  // per tried multiplier, in order
  unsigned smallest_c = 0;        // smallest multiplier in {1,2,4} passing; 0 = none
};

struct PowerfulReport final {
  PowerfulConstants constants;
  std::vector<PowerfulPoint> points;
  double rho_slope = 0.0;  // fitted d log rho / d log eps
  bool stable = false;     // all points pass within one dyadic step
};

// Per epsilon: balance the two branches over real R >= 2, build the
// matched-filter test at rho, and Monte-Carlo the type-II error at the
// extremal signal rescaled to C rho for C in {1, 2, 4} (early exit at the
// first C meeting the budget; the rescaled probe may leave the ellipsoid
// and is reported as such).  Polynomial presets only.
PowerfulReport powerful_check(
    FamilyPreset preset, double s, double t, const ErrorBudget& budget,
    std::span<const double> eps_grid, const McOptions& options,
    std::optional<PowerfulConstants> constants = std::nullopt);

// ---------------------------------------------------------------------------
// Weight-ratio decay condition
// ---------------------------------------------------------------------------

struct WeightRatioDecayReport final {
  bool satisfied = false;
  double delta = 0.0;  // decay order: -slope when satisfied
  double slope = 0.0;  // fitted d log ratio / d log D
  std::vector<std::size_t> d_grid;
  std::vector<double> ratios;  // max_{j<=D} b_j^{-2} / sqrt(S_D)
};

// Checks that the largest normalized chi-squared weight decays polynomially
// in the cut-off: fits the log-log slope of max_{j<=D} b_j^{-2}/sqrt(S_D)
// over the given increasing D grid and requires slope <= -0.01 (i.e. a
// genuine negative decay order; the threshold absorbs fit noise on flat
// profiles).  Exponential weights yield a bounded ratio and fail.
WeightRatioDecayReport weight_ratio_decay_check(
    const SequenceFamily& operator_weights, std::span<const std::size_t> d_grid);

}  // namespace seqdetect
