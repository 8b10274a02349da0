#include "seqdetect/extremal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace seqdetect {

namespace {

struct ProfileMoments final {
  double j0 = 0.0;
  double j1 = 0.0;
  double j2 = 0.0;
  std::size_t active = 0;
};

ProfileMoments profile_moments(const ProblemSpec& spec, double A) {
  ProfileMoments mom;
  for (std::size_t j = 1; j <= spec.truncation; ++j) {
    const double a = spec.a(j);
    const double w = 1.0 - A * a * a;
    if (w <= 0.0) {
      // a_j is non-decreasing, so every later coordinate is inactive too.
      break;
    }
    const double b = spec.b(j);
    const double b4 = b * b * b * b;
    mom.j0 += w * w / b4;
    mom.j1 += w / b4;
    mom.j2 += a * a * w / b4;
    ++mom.active;
  }
  return mom;
}

}  // namespace

ExtremalSolution solve_extremal(const ProblemSpec& spec, double r) {
  spec.validate();
  if (!(r >= 0.0) || !std::isfinite(r)) {
    throw std::invalid_argument("solve_extremal: radius must be finite and >= 0");
  }
  const std::size_t n = spec.truncation;
  ExtremalSolution sol;
  sol.r_sq = r * r;
  sol.theta_bar.assign(n, 0.0);

  if (r == 0.0) {
    const ProfileMoments mom = profile_moments(spec, 0.0);
    sol.j0 = mom.j0;
    sol.j1 = mom.j1;
    sol.j2 = mom.j2;
    sol.ellipsoid_residual = 1.0;
    return sol;
  }

  const double max_norm_sq = max_class_norm_sq(spec);
  if (sol.r_sq >= max_norm_sq) {
    throw InfeasibleError(
        "solve_extremal: empty alternative, radius^2 >= 1/a_1^2 leaves no "
        "interior point in the ellipsoid shell");
  }

  const ProfileMoments flat = profile_moments(spec, 0.0);
  const double t0 = flat.j1 / flat.j2;  // smallest radius^2 with active ellipsoid

  double A = 0.0;
  ProfileMoments mom = flat;
  if (sol.r_sq <= t0) {
    // Ellipsoid slack: energy spreads over all coordinates as b^{-4}.
    sol.ellipsoid_active = false;
  } else {
    // J1/J2 is continuous and increasing from t0 toward 1/a_1^2 on
    // [0, 1/a_1^2); bisect to the last representable midpoint.
    double lo = 0.0;
    double hi = 1.0 / (spec.a(1) * spec.a(1));
    for (int it = 0; it < 200; ++it) {
      const double mid = lo + 0.5 * (hi - lo);
      if (mid <= lo || mid >= hi) {
        break;
      }
      const ProfileMoments m = profile_moments(spec, mid);
      const double g = m.active > 0 ? m.j1 / m.j2 : max_norm_sq;
      if (g < sol.r_sq) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    // Take the upper endpoint: g(hi) >= r^2 keeps the renormalized signal on
    // the feasible side of the ellipsoid up to summation rounding.
    A = hi;
    mom = profile_moments(spec, A);
    sol.ellipsoid_active = true;
  }

  if (mom.active == 0 || !(mom.j1 > 0.0)) {
    throw NumericalError("solve_extremal: active set collapsed during solve");
  }

  sol.lagrange_multiplier = A;
  sol.z0_sq = sol.r_sq / mom.j1;  // energy-exact normalization
  sol.efficient_dim = mom.active;
  sol.j0 = mom.j0;
  sol.j1 = mom.j1;
  sol.j2 = mom.j2;
  sol.truncation_binding = (mom.active == n);

  const double z0 = std::sqrt(sol.z0_sq);
  double energy = 0.0;
  double ellipsoid = 0.0;
  for (std::size_t j = 1; j <= mom.active; ++j) {
    const double a = spec.a(j);
    const double b = spec.b(j);
    const double w = 1.0 - A * a * a;
    const double theta = z0 * std::sqrt(w) / (b * b);
    sol.theta_bar[j - 1] = theta;
    energy += theta * theta;
    ellipsoid += a * a * theta * theta;
  }
  sol.energy_residual = energy - sol.r_sq;
  sol.ellipsoid_residual = 1.0 - ellipsoid;
  return sol;
}

double u_of_r(const ProblemSpec& spec, double r) {
  spec.validate();
  if (!(spec.noise > 0.0)) {
    throw std::invalid_argument("u_of_r: requires a positive noise level");
  }
  const ExtremalSolution sol = solve_extremal(spec, r);
  if (r == 0.0) {
    return 0.0;
  }
  const double u_base = sol.z0_sq * std::sqrt(sol.j0) / std::sqrt(2.0);
  const double eps2 = spec.noise * spec.noise;
  return u_base / eps2;
}

std::vector<double> ingster_filters(const ProblemSpec& spec,
                                    const ExtremalSolution& solution) {
  spec.validate();
  if (solution.efficient_dim == 0 || !(solution.j0 > 0.0)) {
    throw std::invalid_argument(
        "ingster_filters: filters are undefined for the zero solution");
  }
  const std::size_t n = spec.truncation;
  if (solution.theta_bar.size() != n) {
    throw std::invalid_argument(
        "ingster_filters: solution does not match the spec truncation");
  }
  std::vector<double> omega(n, 0.0);
  const double scale = 1.0 / std::sqrt(2.0 * solution.j0);
  const double A = solution.lagrange_multiplier;
  for (std::size_t j = 1; j <= solution.efficient_dim; ++j) {
    const double a = spec.a(j);
    const double b = spec.b(j);
    const double w = 1.0 - A * a * a;
    if (w <= 0.0) {
      break;
    }
    omega[j - 1] = scale * w / (b * b);
  }
  return omega;
}

}  // namespace seqdetect
