// Detection tests for the Gaussian sequence model.
//
// Two test families are provided:
//
//  * Spectral cut-off: T_D(Y) = sum_{j<=D} b_j^{-2} (Y_j^2 - eps^2), a
//    chi-squared statistic on the first D coordinates.
//  * Matched filter: T_omega(Y) = sum_j omega_j (Y_j^2/eps^2 - 1) with the
//    extremal filter weights, standardized so Var_0 = 1.
//
// Thresholds come from one of two calibrations: Monte-Carlo simulation of
// the exact null law (the library default) or the limiting Gaussian
// approximation.  Null draws are simulated noise-free-scaled (the base
// variable is eps-independent and the threshold is rescaled analytically),
// so calibrations at matching seeds scale exactly across noise levels.
// Rejection is strict: reject iff statistic > threshold.
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "seqdetect/errors.hpp"
#include "seqdetect/model.hpp"

namespace seqdetect {

inline constexpr std::uint64_t kDefaultSeed = 12345;

enum class CalibrationKind : std::uint8_t {
  kMonteCarlo,  // empirical 1-alpha quantile of simulated null statistics
  kGaussian,    // normal-approximation threshold
};

const char* to_string(CalibrationKind kind);

struct CalibrationRequest final {
  CalibrationKind kind = CalibrationKind::kMonteCarlo;
  std::size_t samples = 200000;  // Monte-Carlo only; must be >= 10000
  std::uint64_t seed = kDefaultSeed;
  std::uint64_t stream = 0;

  void validate() const;
};

// Echo of how a threshold was produced (samples/seed/stream are zeroed for
// the Gaussian calibration, which consumes no randomness).
struct CalibrationInfo final {
  CalibrationKind kind = CalibrationKind::kMonteCarlo;
  double alpha = 0.0;
  double threshold = 0.0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

struct TestOutcome final {
  double statistic = 0.0;
  double threshold = 0.0;
  bool reject = false;  // statistic > threshold, strictly
};

// ---------------------------------------------------------------------------
// Spectral cut-off test
// ---------------------------------------------------------------------------

struct SpectralTest final {
  ProblemSpec spec;
  std::size_t bandwidth = 1;  // D
  CalibrationInfo calibration;
};

// T_D(y) = sum_{j<=D} b_j^{-2} (y_j^2 - eps^2).  y must have length >= D.
double spectral_statistic(const ProblemSpec& spec, std::size_t bandwidth,
                          std::span<const double> y);

// Calibrate the level-alpha spectral test at cut-off D.  Monte-Carlo
// calibration simulates the eps-free base S = sum_{j<=D} b_j^{-2}(xi^2 - 1)
// and sets threshold = eps^2 * quantile_{1-alpha}(S); the Gaussian variant
// uses threshold = z_{1-alpha} * eps^2 * sqrt(2 sum_{j<=D} b_j^{-4}).
SpectralTest calibrate_spectral(const ProblemSpec& spec, std::size_t bandwidth,
                                double alpha,
                                const CalibrationRequest& request = {});

TestOutcome run_spectral(const SpectralTest& test, std::span<const double> y);

// Normalized chi-squared deviation constant
//   C(alpha, D) = 2 sqrt(ln(1/alpha)) + 2 ln(1/alpha) max_{j<=D} b_j^{-2} / sqrt(S_D),
// so that P_0( T_D > C * eps^2 sqrt(S_D) ) <= alpha with S_D = sum b^{-4}.
double spectral_deviation_constant(const ProblemSpec& spec,
                                   std::size_t bandwidth, double alpha);

// Bandwidth rule: the largest D in [1, N] with
//   c_alpha * eps^2 * sqrt(S_D) + a_D^{-2} <= r^2 / 2.
// The feasible set is an integer interval (bias falls, noise grows); throws
// InfeasibleError("radius too small for bandwidth rule") when it is empty.
std::size_t select_bandwidth(const ProblemSpec& spec, double r, double c_alpha);

// ---------------------------------------------------------------------------
// Matched-filter (extremal chi-squared) test
// ---------------------------------------------------------------------------

struct IngsterTest final {
  ProblemSpec spec;
  double radius = 0.0;             // r the filters were matched to
  std::vector<double> omega;       // filter weights, length N, zero past m
  std::size_t efficient_dim = 0;   // m = number of nonzero weights
  double u = 0.0;                  // expected statistic at the extremal signal
  CalibrationInfo calibration;
};

// Build and calibrate the matched-filter test at radius r.  Monte-Carlo
// draws of T = sum_{j<=m} omega_j (xi^2 - 1) are eps-free and need no
// rescaling; the Gaussian variant uses threshold = z_{1-alpha} (the
// statistic is standardized to unit null variance).
IngsterTest build_ingster(const ProblemSpec& spec, double r, double alpha,
                          const CalibrationRequest& request = {});

// T_omega(y) = sum_{j<=m} omega_j (y_j^2/eps^2 - 1).  y must cover the
// efficient dimension.
double ingster_statistic(const IngsterTest& test, std::span<const double> y);

TestOutcome run_ingster(const IngsterTest& test, std::span<const double> y);

// ---------------------------------------------------------------------------
// Type-erased test handle
// ---------------------------------------------------------------------------

using AnyTest = std::variant<SpectralTest, IngsterTest>;

TestOutcome run_test(const AnyTest& test, std::span<const double> y);

// Number of leading observation coordinates the statistic actually reads
// (the cut-off D or the efficient dimension m).  Coordinates past this index
// never influence the outcome.
std::size_t observed_coordinates(const AnyTest& test);

const ProblemSpec& test_spec(const AnyTest& test);
const CalibrationInfo& test_calibration(const AnyTest& test);

}  // namespace seqdetect
