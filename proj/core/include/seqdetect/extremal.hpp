// Extremal signals and detection filters for the ellipsoid shell.
//
// Among all signals theta in the ellipsoid with ||theta||^2 >= r^2, the
// hardest one to detect minimizes the signal-to-noise functional
//
//     u^2(theta) = (1 / 2 eps^4) * sum_j b_j^4 theta_j^4.
//
// Lagrangian analysis gives the water-filling form
//
//     theta_j^2 = z0^2 b_j^{-4} (1 - A a_j^2)_+ ,
//
// with A >= 0 chosen so the energy constraint holds with equality and the
// ellipsoid constraint is active (A > 0) or slack (A = 0, small radii).
// This module solves for (A, z0), exposes the optimal value u(r), and
// derives the matched chi-squared filter weights
//
//     omega_j = b_j^2 theta_j^2 / sqrt(2 sum_k b_k^4 theta_k^4),
//
// normalized so that sum_j omega_j^2 = 1/2.
#pragma once

#include <cstddef>
#include <vector>

#include "seqdetect/errors.hpp"
#include "seqdetect/model.hpp"

namespace seqdetect {

struct ExtremalSolution final {
  double r_sq = 0.0;                // squared radius the solve was run at
  double lagrange_multiplier = 0.0; // A in theta_j^2 = z0^2 b_j^-4 (1-A a_j^2)_+
  double z0_sq = 0.0;               // scale z0^2
  std::size_t efficient_dim = 0;    // m = number of active coordinates
  std::vector<double> theta_bar;    // extremal signal, length N, entries >= 0

  // Moments of the active profile w_j = (1 - A a_j^2)_+ :
  double j0 = 0.0;  // sum_j b_j^{-4} w_j^2
  double j1 = 0.0;  // sum_j b_j^{-4} w_j
  double j2 = 0.0;  // sum_j a_j^2 b_j^{-4} w_j

  // Constraint residuals of the returned theta_bar (reported, not hidden):
  double energy_residual = 0.0;     // sum theta^2 - r^2
  double ellipsoid_residual = 0.0;  // 1 - sum a^2 theta^2

  bool ellipsoid_active = false;    // A > 0 branch
  bool truncation_binding = false;  // every stored coordinate is active
};

// Solve the extremal problem at radius r >= 0.
//
//  - r = 0 returns the zero solution.
//  - r^2 >= 1/a_1^2 throws InfeasibleError (the shell is empty except for
//    the boundary spike, where the water-filling parametrization breaks
//    down).
//  - r^2 <= T0 = sum b^-4 / sum a^2 b^-4: ellipsoid slack, A = 0, all N
//    coordinates active.
//  - otherwise A solves J1(A)/J2(A) = r^2 by bisection on [0, 1/a_1^2),
//    driven to the last representable midpoint (<= 200 halvings).
//
// The returned theta_bar is normalized so the energy constraint is exact up
// to summation rounding; both residuals are reported.
ExtremalSolution solve_extremal(const ProblemSpec& spec, double r);

// Optimal signal-to-noise value u(r) = z0^2 sqrt(J0) / (sqrt(2) eps^2).
// The extremal profile does not depend on eps, so u scales exactly like
// eps^{-2} at fixed r.  Requires spec.noise > 0.
double u_of_r(const ProblemSpec& spec, double r);

// Matched filter weights omega_j = b_j^{-2} w_j / sqrt(2 J0) derived from a
// solved instance; zero for inactive coordinates, sum of squares = 1/2.
// Throws std::invalid_argument for the zero solution.
std::vector<double> ingster_filters(const ProblemSpec& spec,
                                    const ExtremalSolution& solution);

}  // namespace seqdetect
