// Non-asymptotic lower/upper bounds on the minimax separation radius.
//
// For a target error budget (alpha, beta) the detection radius is bracketed
// by two explicit D-indexed curves built from the noise term
// eps^2 sqrt(sum_{j<=D} b_j^{-4}) and the ellipsoid bias term a_D^{-2}:
//
//   lower:  max_D  min( c(alpha,beta) eps^2 sqrt(S_D),  a_D^{-2} )
//   upper:  min_D  ( C(alpha,beta) eps^2 sqrt(S_D) + a_D^{-2} )
//
// with S_D = sum_{j<=D} b_j^{-4} and the two closed-form constants below.
// Optimization over D is an exact integer scan (the curves need not be
// unimodal for arbitrary explicit sequences); ties break to the smallest D.
#pragma once

#include <cstddef>

#include "seqdetect/model.hpp"

namespace seqdetect {

struct ErrorBudget final {
  double alpha = 0.05;  // first-kind error target, in (0, 1)
  double beta = 0.05;   // second-kind error target, in (0, 1)

  void validate() const;            // alpha, beta in (0,1)
  void validate_nondegenerate() const;  // additionally alpha + beta < 1
};

// c(alpha, beta) = (2 ln(1 + 4(1-alpha-beta)^2))^{1/4}; requires
// alpha + beta < 1 (the constant degenerates to 0 at the boundary).
double c_constant(const ErrorBudget& budget);

// C(alpha, beta) = sqrt(2 x_beta) + sqrt(2 (x_alpha + x_beta))
//                  + sqrt(2) * (sqrt(x_alpha) + sqrt(x_beta))^{1/2},
// with x_g = ln(1/g).
double C_constant(const ErrorBudget& budget);

// S_D = sum_{j<=D} b_j^{-4}, exact partial sum.  Throws for D outside [1, N].
double cumulative_b4(const ProblemSpec& spec, std::size_t D);

struct RadiusBound final {
  double r_sq = 0.0;             // optimal value of the D-scan
  std::size_t bandwidth = 1;     // smallest optimizing D
  bool truncation_binding = false;  // optimum touched D = N
};

// Lower separation-radius bound and its optimizing bandwidth D0.
RadiusBound lower_radius(const ProblemSpec& spec, const ErrorBudget& budget);

// Upper separation-radius bound and its optimizing bandwidth Dstar.
RadiusBound upper_radius(const ProblemSpec& spec, const ErrorBudget& budget);

// Consecutive-ratio regularity scan: the bounds above are of the same order
// whenever the ratios a_{D-1}/a_D and b_{D-1}/b_D stay in a fixed positive
// band over D = 2..N (polynomial-like behaviour); exponential and
// power-exponential sequences fail it.  The observed ranges are reported;
// `satisfied` requires every ratio to stay in [min_ratio, 1] with
// min_ratio > 0 bounded away from zero (we use 1e-3, documented rather than
// hidden: the check is qualitative and the ranges are the real output).
struct RatioBandReport final {
  bool satisfied = false;
  double a_ratio_min = 0.0;
  double a_ratio_max = 0.0;
  double b_ratio_min = 0.0;
  double b_ratio_max = 0.0;
};

RatioBandReport consecutive_ratio_check(const ProblemSpec& spec);

// Flat record of everything the `bounds` CLI subcommand reports.
struct BoundsReport final {
  double lower_radius_sq = 0.0;
  double upper_radius_sq = 0.0;
  std::size_t lower_bandwidth = 1;
  std::size_t upper_bandwidth = 1;
  double c_const = 0.0;
  double C_const = 0.0;
  double ratio = 0.0;  // upper / lower (inf if lower == 0)
  bool ratio_band_satisfied = false;
  bool truncation_binding = false;
};

BoundsReport bounds_report(const ProblemSpec& spec, const ErrorBudget& budget);

}  // namespace seqdetect
