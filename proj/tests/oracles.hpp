// Independent reference implementations used to validate the library.
// Everything here is deliberately written against different algorithms or
// closed forms than the production code: quantiles come from bisection,
// the extremal problem from KKT active-set enumeration, bandwidth selection
// from exact Faulhaber sums, and regression from long-double normal
// equations.  High-precision scalar references are frozen as constants.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "seqdetect/model.hpp"

namespace oracle {

// Frozen high-precision scalar references.
inline constexpr double kC0505 = 1.3037419530494341;      // c(0.05, 0.05)
inline constexpr double kBigC0505 = 8.5405950146826584;    // C(0.05, 0.05)
inline constexpr double kExpIdentity = 4.24;               // 1 + 4(0.9)^2
inline constexpr double kZ95 = 1.6448536269514715;         // Phi^{-1}(0.95)
inline constexpr double kZ975 = 1.9599639845400532;        // Phi^{-1}(0.975)
inline constexpr double kChi2_1_95 = 3.8414588206941218;   // z_{0.975}^2
inline constexpr double kPhi1 = 0.84134474606854293;       // Phi(1)
inline constexpr double kPhiMinus2 = 0.022750131948179219; // Phi(-2)
inline constexpr double kPhi25 = 0.99379033467422384;      // Phi(2.5)
inline constexpr double kCab11 = 60.145792001913293;       // C_{alpha,beta}
inline constexpr double kCPrime11 = 106.74819123031011;    // c'(1,1)

// Standard normal CDF built on erf (not erfc like the library).
double normal_cdf(double x);

// Quantile by plain bisection on normal_cdf; ~1e-14 absolute accuracy.
double normal_quantile_bisect(double p);

// Type-7 quantile of an unsorted sample, written independently.
double quantile_type7(std::vector<double> sample, double p);

// Least squares by long-double normal equations.
struct OlsResult final {
  double slope = 0.0;
  double intercept = 0.0;
};
OlsResult ols(std::span<const double> x, std::span<const double> y);

// Brute-force solution of: minimize sum_j b_j^4 v_j^2 over v >= 0 with
// sum v_j = r^2 and sum a_j^2 v_j <= 1, by KKT active-set enumeration
// (prefix active sets are exhaustive because a_j is nondecreasing).
// Returns the minimal objective F = sum b^4 v^2; u = sqrt(F/2)/eps^2.
struct ExtremalOracle final {
  bool feasible = false;
  double objective = 0.0;         // sum_j b_j^4 v_j^2 at the minimizer
  double u = 0.0;                 // sqrt(objective / 2) / eps^2
  std::vector<double> v;          // v_j = theta_j^2
  double energy_residual = 0.0;   // sum v - r^2
  double ellipsoid_residual = 0.0;  // 1 - sum a^2 v
};
ExtremalOracle brute_force_extremal(const seqdetect::ProblemSpec& spec,
                                    double r);

// Exact power-sum S(D) = sum_{j<=D} j^4 via Faulhaber's formula, and the
// bandwidth rule D = max{D : c_alpha eps^2 sqrt(S(D)) + D^{-2s} <= r^2/2}
// for the preset a_j = j^s, b_j = j^{-1} (t = 1, so sum b^{-4} = sum j^4 has
// a closed form) evaluated without prefix loops; returns 0 when no D
// qualifies.
double faulhaber_sum4(std::size_t d);
std::size_t bandwidth_rule_mild(double s, double eps, double r,
                                double c_alpha, std::size_t n);

}  // namespace oracle
