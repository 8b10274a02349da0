#include "seqdetect/mc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "seqdetect/extremal.hpp"

namespace seqdetect {

void McOptions::validate() const {
  if (samples < 100) {
    throw std::invalid_argument("McOptions: need at least 100 replicates");
  }
}

namespace {

constexpr double kMembershipSlack = 1e-12;

double binomial_half_width(double p, std::size_t n) {
  return 3.0 * std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(n));
}

// Shared replicate loop: rejection (or acceptance) rate of `test` when the
// truth is `theta`, reading only the coordinates the statistic observes.
PowerEstimate run_replicates(const AnyTest& test, const Signal& theta,
                             bool count_accept, const McOptions& options,
                             std::uint64_t stream) {
  const ProblemSpec& spec = test_spec(test);
  const std::size_t k = observed_coordinates(test);

  PowerEstimate out;
  out.samples = options.samples;
  out.seed = options.seed;
  out.stream = stream;

  const double threshold = test_calibration(test).threshold;
  if (std::isinf(threshold)) {
    const bool always_reject = threshold < 0.0;
    out.probability = (always_reject != count_accept) ? 1.0 : 0.0;
    return out;
  }

  std::vector<double> mean(k, 0.0);
  for (std::size_t j = 0; j < k && j < theta.size(); ++j) {
    mean[j] = spec.b(j + 1) * theta[j];
  }

  RngStream rng(options.seed, stream);
  std::vector<double> y(k);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < options.samples; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      y[j] = mean[j] + spec.noise * rng.normal();
    }
    const TestOutcome outcome = run_test(test, y);
    hits += (outcome.reject != count_accept) ? 1 : 0;
  }
  out.probability =
      static_cast<double>(hits) / static_cast<double>(options.samples);
  out.half_width = binomial_half_width(out.probability, options.samples);
  return out;
}

}  // namespace

PriorSpec make_prior(const ProblemSpec& spec, Signal theta,
                     double declared_radius, std::string description) {
  spec.validate();
  if (!(declared_radius >= 0.0) || !std::isfinite(declared_radius)) {
    throw std::invalid_argument("make_prior: radius must be finite and >= 0");
  }
  if (theta.size() > spec.truncation) {
    throw std::invalid_argument("make_prior: signal longer than the truncation");
  }
  double energy = 0.0;
  double ellipsoid = 0.0;
  for (std::size_t j = 0; j < theta.size(); ++j) {
    const double a = spec.a(j + 1);
    energy += theta[j] * theta[j];
    ellipsoid += a * a * theta[j] * theta[j];
  }
  PriorSpec prior;
  prior.theta = std::move(theta);
  prior.declared_radius = declared_radius;
  prior.description = std::move(description);
  prior.in_class =
      ellipsoid <= 1.0 + kMembershipSlack &&
      energy >= declared_radius * declared_radius * (1.0 - kMembershipSlack);
  return prior;
}

namespace {

// theta_j = r b_j^{-2} / sqrt(S_D) for j <= D: flat in the whitened scale,
// with ||theta|| = r by construction.
Signal flat_profile(const ProblemSpec& spec, std::size_t bandwidth, double r) {
  double s4 = 0.0;
  for (std::size_t j = 1; j <= bandwidth; ++j) {
    const double b = spec.b(j);
    s4 += 1.0 / (b * b * b * b);
  }
  const double scale = r / std::sqrt(s4);
  Signal theta(bandwidth, 0.0);
  for (std::size_t j = 1; j <= bandwidth; ++j) {
    const double b = spec.b(j);
    theta[j - 1] = scale / (b * b);
  }
  return theta;
}

}  // namespace

AdversarySet default_adversaries(const ProblemSpec& spec,
                                 const ErrorBudget& budget, double r) {
  spec.validate();
  budget.validate();
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw std::invalid_argument("default_adversaries: radius must be finite and > 0");
  }
  const ExtremalSolution sol = solve_extremal(spec, r);

  AdversarySet adversaries;
  adversaries.push_back(
      make_prior(spec, sol.theta_bar, r, "extremal shell signal"));

  const std::size_t d_lower = lower_radius(spec, budget).bandwidth;
  adversaries.push_back(make_prior(
      spec, flat_profile(spec, d_lower, r), r,
      "flat profile at lower-bound bandwidth " + std::to_string(d_lower)));

  const std::size_t d_upper = upper_radius(spec, budget).bandwidth;
  if (d_upper != d_lower) {
    adversaries.push_back(make_prior(
        spec, flat_profile(spec, d_upper, r), r,
        "flat profile at upper-bound bandwidth " + std::to_string(d_upper)));
  }

  const std::size_t m = sol.efficient_dim;
  if (m >= 1 && spec.a(m) * r <= 1.0) {
    Signal spike(m, 0.0);
    spike[m - 1] = r;
    adversaries.push_back(make_prior(
        spec, std::move(spike), r,
        "boundary spike at coordinate " + std::to_string(m)));
  }
  return adversaries;
}

PowerEstimate estimate_size(const AnyTest& test, const McOptions& options) {
  options.validate();
  return run_replicates(test, Signal{}, /*count_accept=*/false, options,
                        options.stream);
}

BetaEstimate estimate_beta(const AnyTest& test, const AdversarySet& adversaries,
                           const McOptions& options) {
  options.validate();
  if (adversaries.empty()) {
    throw std::invalid_argument("estimate_beta: empty adversary set");
  }
  BetaEstimate out;
  out.per_candidate.reserve(adversaries.size());
  for (std::size_t i = 0; i < adversaries.size(); ++i) {
    out.per_candidate.push_back(run_replicates(test, adversaries[i].theta,
                                               /*count_accept=*/true, options,
                                               options.stream + i));
    if (out.per_candidate[i].probability >
        out.per_candidate[out.worst_index].probability) {
      out.worst_index = i;
    }
  }
  out.worst = out.per_candidate[out.worst_index];
  return out;
}

PriorSpec build_flat_prior(const ProblemSpec& spec, std::size_t bandwidth,
                           const ErrorBudget& budget) {
  spec.validate();
  if (!(spec.noise > 0.0)) {
    throw std::invalid_argument("build_flat_prior: requires a positive noise level");
  }
  if (bandwidth < 1 || bandwidth > spec.truncation) {
    throw std::invalid_argument("build_flat_prior: bandwidth outside [1, N]");
  }
  const double c = c_constant(budget);
  double s4 = 0.0;
  for (std::size_t j = 1; j <= bandwidth; ++j) {
    const double b = spec.b(j);
    s4 += 1.0 / (b * b * b * b);
  }
  const double r = c * spec.noise * std::pow(s4, 0.25);
  return make_prior(spec, flat_profile(spec, bandwidth, r), r,
                    "flat prior at bandwidth " + std::to_string(bandwidth));
}

SecondMoment likelihood_second_moment(const ProblemSpec& spec,
                                      const Signal& theta) {
  spec.validate();
  if (!(spec.noise > 0.0)) {
    throw std::invalid_argument(
        "likelihood_second_moment: requires a positive noise level");
  }
  if (theta.size() > spec.truncation) {
    throw std::invalid_argument(
        "likelihood_second_moment: signal longer than the truncation");
  }
  const double eps2 = spec.noise * spec.noise;
  SecondMoment moment;
  for (std::size_t j = 0; j < theta.size(); ++j) {
    const double b = spec.b(j + 1);
    const double x = b * b * theta[j] * theta[j] / eps2;
    // log cosh(x) evaluated without overflow for large x.
    moment.log_product += x + std::log1p(std::exp(-2.0 * x)) - std::log(2.0);
    moment.log_bound += 0.5 * x * x;
  }
  return moment;
}

double lower_bound_beta(const ProblemSpec& spec, const PriorSpec& prior,
                        double alpha, bool use_exact_product) {
  if (!(alpha > 0.0) || !(alpha < 1.0)) {
    throw std::invalid_argument("lower_bound_beta: alpha must lie in (0, 1)");
  }
  const SecondMoment moment = likelihood_second_moment(spec, prior.theta);
  const double log_m = use_exact_product ? moment.log_product : moment.log_bound;
  const double bound = 1.0 - alpha - 0.5 * std::sqrt(std::expm1(log_m));
  return std::clamp(bound, 0.0, 1.0);
}

EmpiricalRadius empirical_radius(const ProblemSpec& spec,
                                 const ErrorBudget& budget,
                                 const TestBuilder& builder,
                                 const McOptions& options,
                                 double relative_tolerance) {
  spec.validate();
  budget.validate();
  options.validate();
  if (!builder) {
    throw std::invalid_argument("empirical_radius: builder must be callable");
  }
  if (!(relative_tolerance > 0.0) || !(relative_tolerance < 1.0)) {
    throw std::invalid_argument(
        "empirical_radius: relative tolerance must lie in (0, 1)");
  }

  EmpiricalRadius result;
  std::size_t probe_count = 0;
  const auto probe = [&](double r) {
    const AnyTest test = builder(r);
    // The separation radius is defined against the class alternative, so an
    // adversary that has drifted outside the ellipsoid at this radius does
    // not count; the extremal shell signal is always a class member, so the
    // candidate set stays nonempty.
    AdversarySet adversaries;
    for (PriorSpec& candidate : default_adversaries(spec, budget, r)) {
      if (candidate.in_class) {
        adversaries.push_back(std::move(candidate));
      }
    }
    McOptions opt = options;
    opt.stream = options.stream + 16 * probe_count;
    ++probe_count;
    const BetaEstimate beta = estimate_beta(test, adversaries, opt);
    result.probes.push_back(
        {r, beta.worst.probability, beta.worst.half_width});
    return beta.worst.probability;
  };

  const double max_r = std::sqrt(max_class_norm_sq(spec));
  double lo = std::sqrt(lower_radius(spec, budget).r_sq);
  double hi = std::min(std::sqrt(upper_radius(spec, budget).r_sq),
                       0.999 * max_r);
  if (!(lo > 0.0)) {
    lo = hi / 16.0;
  }
  if (lo >= hi) {
    lo = hi / 4.0;
  }

  // Bracket: beta_hat(lo) must exceed the target, beta_hat(hi) must not.
  const double target = budget.beta;
  bool lo_ok = probe(lo) > target;
  for (int i = 0; !lo_ok && i < 12 && lo > 1e-12; ++i) {
    hi = lo;
    lo *= 0.5;
    lo_ok = probe(lo) > target;
  }
  bool hi_ok = probe(hi) <= target;
  for (int i = 0; !hi_ok && i < 12; ++i) {
    const double next = std::min(2.0 * hi, 0.5 * (hi + 0.999 * max_r));
    if (!(next > hi)) {
      break;
    }
    lo = hi;
    hi = next;
    hi_ok = probe(hi) <= target;
  }
  result.bracket_found = lo_ok && hi_ok;
  if (!result.bracket_found) {
    result.lower = lo;
    result.upper = hi;
    result.radius = lo_ok ? hi : lo;  // report the boundary that capped us
    return result;
  }

  while (hi - lo > relative_tolerance * 0.5 * (hi + lo)) {
    const double mid = 0.5 * (lo + hi);
    if (probe(mid) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  result.lower = lo;
  result.upper = hi;
  result.radius = 0.5 * (lo + hi);
  return result;
}

}  // namespace seqdetect
