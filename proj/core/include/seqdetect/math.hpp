// Scalar numerics shared across the library.
//
// - standard normal CDF / quantile and the chi-squared(1) quantile;
// - type-7 (linear-interpolation) sample quantiles;
// - ordinary least squares on (x, y) pairs, used for log-log rate fits;
// - RngStream: reproducible, stream-splittable Gaussian/uniform source.
//
// Everything here is deterministic and allocation-light; the heavy lifting
// (Monte Carlo loops, solvers) lives in the domain modules.
#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace seqdetect {

// Standard normal CDF, accurate over the full double range.
double normal_cdf(double x);

// Standard normal quantile for p in (0, 1).  Implemented as a guarded
// Newton inversion of normal_cdf; absolute error below 1e-13 across
// p in [1e-12, 1 - 1e-12].  Throws std::invalid_argument outside (0, 1).
double normal_quantile(double p);

// Quantile of the chi-squared distribution with one degree of freedom,
// via the exact identity chi2_1(p) = normal_quantile((1+p)/2)^2.
double chi_squared1_quantile(double p);

// Type-7 sample quantile (the linear-interpolation default of most
// statistical environments): h = (n-1)p, interpolate between the order
// statistics floor(h) and floor(h)+1.  `sorted` must be ascending.
double quantile_type7_sorted(std::span<const double> sorted, double p);

// Convenience overload: copies, sorts, and interpolates.
double quantile_type7(std::vector<double> samples, double p);

struct OlsFit final {
  double slope = 0.0;
  double intercept = 0.0;
  double max_abs_residual = 0.0;
};

// Least-squares line through (x_i, y_i).  Requires >= 2 distinct x values.
OlsFit ols_fit(std::span<const double> x, std::span<const double> y);

// Reproducible random stream.
//
// Contract (kGeneratorId = "mt19937_64/boxmuller-v1"):
// - the engine is std::mt19937_64 seeded from a SplitMix64 expansion of
//   (seed, stream), so identical (seed, stream) pairs replay identical
//   draws on every standard-conforming platform;
// - distinct stream ids give statistically independent streams, which is
//   how parallel sweeps partition randomness;
// - uniform() lies strictly inside (0, 1); normal() is Box-Muller over
//   those uniforms (two normals per two uniforms, cached spare).
class RngStream final {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0);

  double uniform();
  double normal();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_ = 0;
  std::uint64_t stream_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace seqdetect
