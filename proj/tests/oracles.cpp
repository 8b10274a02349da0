#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace oracle {

double normal_cdf(double x) {
  return 0.5 * (1.0 + std::erf(x / std::sqrt(2.0)));
}

double normal_quantile_bisect(double p) {
  if (!(p > 0.0) || !(p < 1.0)) {
    throw std::invalid_argument("oracle quantile: p outside (0, 1)");
  }
  double lo = -40.0;
  double hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (normal_cdf(mid) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double quantile_type7(std::vector<double> sample, double p) {
  if (sample.empty()) {
    throw std::invalid_argument("oracle quantile: empty sample");
  }
  std::sort(sample.begin(), sample.end());
  const double h = (static_cast<double>(sample.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sample.size() - 1);
  const double w = h - std::floor(h);
  return (1.0 - w) * sample[lo] + w * sample[hi];
}

OlsResult ols(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("oracle ols: need >= 2 paired points");
  }
  long double sx = 0.0L, sy = 0.0L, sxx = 0.0L, sxy = 0.0L;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += static_cast<long double>(x[i]) * x[i];
    sxy += static_cast<long double>(x[i]) * y[i];
  }
  const auto n = static_cast<long double>(x.size());
  const long double det = n * sxx - sx * sx;
  OlsResult fit;
  fit.slope = static_cast<double>((n * sxy - sx * sy) / det);
  fit.intercept = static_cast<double>((sy * sxx - sx * sxy) / det);
  return fit;
}

ExtremalOracle brute_force_extremal(const seqdetect::ProblemSpec& spec,
                                    double r) {
  const std::size_t n = spec.truncation;
  const double r_sq = r * r;
  ExtremalOracle best;
  if (!(r_sq < 1.0 / (spec.a(1) * spec.a(1)))) {
    return best;  // feasible stays false
  }
  if (r_sq == 0.0) {
    best.feasible = true;
    best.v.assign(n, 0.0);
    best.ellipsoid_residual = 1.0;
    return best;
  }

  std::vector<double> a2(n), b4(n);
  for (std::size_t j = 1; j <= n; ++j) {
    a2[j - 1] = spec.a(j) * spec.a(j);
    b4[j - 1] = std::pow(spec.b(j), 4.0);
  }
  constexpr double kSlack = 1e-9;

  const auto consider = [&](double lambda, double mu, std::size_t m) {
    // KKT feasibility for the candidate prefix {1..m}.
    if (mu < -kSlack) {
      return;
    }
    mu = std::max(mu, 0.0);
    std::vector<double> v(n, 0.0);
    double energy = 0.0;
    double weighted = 0.0;
    double objective = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double num = lambda - mu * a2[j];
      if (num < -kSlack * std::abs(lambda)) {
        return;  // would need v_j < 0
      }
      v[j] = std::max(num, 0.0) / (2.0 * b4[j]);
      energy += v[j];
      weighted += a2[j] * v[j];
      objective += b4[j] * v[j] * v[j];
    }
    if (m < n && lambda - mu * a2[m] > kSlack * std::abs(lambda)) {
      return;  // inactive coordinate wants to be positive
    }
    if (std::abs(energy - r_sq) > 1e-6 * r_sq) {
      return;  // energy constraint violated beyond solve noise
    }
    if (weighted > 1.0 + 1e-6) {
      return;  // ellipsoid violated
    }
    if (!best.feasible || objective < best.objective) {
      best.feasible = true;
      best.objective = objective;
      best.v = v;
      best.energy_residual = energy - r_sq;
      best.ellipsoid_residual = 1.0 - weighted;
    }
  };

  // Branch mu = 0: ellipsoid slack, every coordinate active.
  {
    double sum_inv_b4 = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      sum_inv_b4 += 1.0 / b4[j];
    }
    consider(2.0 * r_sq / sum_inv_b4, 0.0, n);
  }

  // Branch mu > 0: ellipsoid active on a prefix {1..m}; solve the 2x2
  // system  lambda p0 - mu p1 = 2 r^2,  lambda p1 - mu p2 = 2  with
  // p_k = sum_{j<=m} a^{2k} / b^4.
  long double p0 = 0.0L, p1 = 0.0L, p2 = 0.0L;
  for (std::size_t m = 1; m <= n; ++m) {
    const long double inv_b4 = 1.0L / b4[m - 1];
    const long double a2m = a2[m - 1];
    p0 += inv_b4;
    p1 += a2m * inv_b4;
    p2 += a2m * a2m * inv_b4;
    const long double det = p0 * p2 - p1 * p1;
    if (det <= 0.0L) {
      continue;  // single distinct a value; mu=0 branch covers it
    }
    const long double lambda = 2.0L * (r_sq * p2 - p1) / det;
    const long double mu = 2.0L * (r_sq * p1 - p0) / det;
    consider(static_cast<double>(lambda), static_cast<double>(mu), m);
  }

  if (best.feasible && spec.noise > 0.0) {
    const double e2 = spec.noise * spec.noise;
    best.u = std::sqrt(best.objective / 2.0) / e2;
  }
  return best;
}

double faulhaber_sum4(std::size_t d) {
  const auto x = static_cast<double>(d);
  return x * x * x * x * x / 5.0 + x * x * x * x / 2.0 + x * x * x / 3.0 -
         x / 30.0;
}

std::size_t bandwidth_rule_mild(double s, double eps, double r,
                                double c_alpha, std::size_t n) {
  std::size_t best = 0;
  for (std::size_t d = 1; d <= n; ++d) {
    const double noise =
        c_alpha * eps * eps * std::sqrt(faulhaber_sum4(d));
    const double bias = std::pow(static_cast<double>(d), -2.0 * s);
    if (noise + bias <= r * r / 2.0) {
      best = d;
    }
  }
  return best;
}

}  // namespace oracle
