#include "seqdetect/math.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace seqdetect {
namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// SplitMix64: tiny, well-mixed generator used only to expand (seed, stream)
// into seeding material for the main engine.
std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(kTwoPi);
}

}  // namespace

double normal_cdf(double x) {
  // erfc keeps full relative accuracy in the left tail, where the naive
  // 0.5*(1+erf(.)) form cancels.
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("normal_quantile: p must lie in (0, 1)");
  }
  // Work on the lower half and mirror, so the Newton iteration always runs
  // in a tail where the CDF is well conditioned from below.
  const bool upper = p > 0.5;
  const double q = upper ? 1.0 - p : p;

  // Tail-quality starting point: for small q, Phi(-x) ~ phi(x)/x gives
  // x0 = sqrt(-2 log q) up to lower-order terms; near the center start at 0.
  double x = (q < 0.4) ? -std::sqrt(-2.0 * std::log(q)) : 0.0;

  // Newton on f(x) = Phi(x) - q.  The derivative is the density; in the far
  // tail the step is damped through the log to avoid overshoot.
  for (int iter = 0; iter < 60; ++iter) {
    const double cdf = normal_cdf(x);
    const double pdf = normal_pdf(x);
    if (pdf <= 0.0) break;
    double step = (cdf - q) / pdf;
    // Damp absurd steps (only reachable for extreme q).
    const double cap = 2.0 + std::abs(x);
    step = std::clamp(step, -cap, cap);
    x -= step;
    if (std::abs(step) < 1e-15 * (1.0 + std::abs(x))) break;
  }
  return upper ? -x : x;
}

double chi_squared1_quantile(double p) {
  const double z = normal_quantile(0.5 * (1.0 + p));
  return z * z;
}

double quantile_type7_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) {
    throw std::invalid_argument("quantile_type7: empty sample");
  }
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("quantile_type7: p must lie in [0, 1]");
  }
  const std::size_t n = sorted.size();
  const double h = static_cast<double>(n - 1) * p;
  const std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= n) return sorted[n - 1];
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double quantile_type7(std::vector<double> samples, double p) {
  std::sort(samples.begin(), samples.end());
  return quantile_type7_sorted(samples, p);
}

OlsFit ols_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("ols_fit: need >= 2 paired observations");
  }
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);

  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    sxx += dx * dx;
    sxy += dx * (y[i] - my);
  }
  if (sxx <= 0.0) {
    throw std::invalid_argument("ols_fit: x values are all identical");
  }

  OlsFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  for (std::size_t i = 0; i < n; ++i) {
    const double res = y[i] - (fit.intercept + fit.slope * x[i]);
    fit.max_abs_residual = std::max(fit.max_abs_residual, std::abs(res));
  }
  return fit;
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream) {
  // Mix the stream id into the SplitMix64 state with a large odd constant so
  // that nearby (seed, stream) pairs land far apart in state space.
  std::uint64_t state = seed ^ (0x632BE59BD9B4E019ull * (stream + 1));
  std::uint32_t material[8];
  for (int i = 0; i < 4; ++i) {
    const std::uint64_t word = splitmix64(state);
    material[2 * i] = static_cast<std::uint32_t>(word);
    material[2 * i + 1] = static_cast<std::uint32_t>(word >> 32);
  }
  std::seed_seq seq(material, material + 8);
  engine_.seed(seq);
}

double RngStream::uniform() {
  // 53-bit mantissa draw centered away from both endpoints: in (0, 1).
  const std::uint64_t bits = engine_() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = kTwoPi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

}  // namespace seqdetect
