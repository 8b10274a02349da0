#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "oracles.hpp"
#include "seqdetect/errors.hpp"
#include "seqdetect/extremal.hpp"
#include "seqdetect/mc.hpp"

namespace sd = seqdetect;

namespace {

sd::ProblemSpec mild(double eps = 0.01, std::size_t n = 64) {
  return sd::make_preset_spec(sd::FamilyPreset::kMild, 1.0, 1.0, eps, n);
}

sd::AnyTest gaussian_ingster(const sd::ProblemSpec& spec, double r) {
  sd::CalibrationRequest request;
  request.kind = sd::CalibrationKind::kGaussian;
  return sd::AnyTest(sd::build_ingster(spec, r, 0.05, request));
}

}  // namespace

TEST_SUITE("mc") {

TEST_CASE("size estimates track the nominal level with binomial width") {
  const sd::ProblemSpec spec = mild();
  const sd::AnyTest test = gaussian_ingster(spec, 0.35);
  sd::McOptions options;
  options.samples = 20000;
  const sd::PowerEstimate size = sd::estimate_size(test, options);
  CHECK(size.samples == 20000);
  CHECK(size.half_width ==
        doctest::Approx(3.0 * std::sqrt(size.probability *
                                        (1.0 - size.probability) / 20000.0))
            .epsilon(1e-12));
  // Gaussian threshold on a skewed small-m statistic: near alpha, with
  // finite-m distortion allowed.
  CHECK(size.probability > 0.01);
  CHECK(size.probability < 0.10);
}

TEST_CASE("size estimation is reproducible per seed and stream") {
  const sd::ProblemSpec spec = mild();
  const sd::AnyTest test = gaussian_ingster(spec, 0.35);
  sd::McOptions options;
  options.samples = 5000;
  const sd::PowerEstimate first = sd::estimate_size(test, options);
  const sd::PowerEstimate second = sd::estimate_size(test, options);
  CHECK(first.probability == second.probability);
  options.stream += 7;
  const sd::PowerEstimate moved = sd::estimate_size(test, options);
  CHECK(moved.probability != first.probability);
}

TEST_CASE("priors carry an honest membership flag") {
  const sd::ProblemSpec spec = mild();
  const sd::PriorSpec in_class =
      sd::make_prior(spec, {0.3}, 0.3, "spike at the first coordinate");
  CHECK(in_class.in_class);
  // Energy 0.36 at coordinate 2 has a-weighted mass 4*0.36 > 1.
  const sd::PriorSpec outside =
      sd::make_prior(spec, {0.0, 0.6}, 0.6, "spike outside the ellipsoid");
  CHECK_FALSE(outside.in_class);
  // Declared radius above the actual energy also fails membership.
  const sd::PriorSpec under_declared =
      sd::make_prior(spec, {0.1}, 0.5, "declared radius too large");
  CHECK_FALSE(under_declared.in_class);
  CHECK_THROWS_AS(sd::make_prior(spec, {0.1}, -1.0, "negative radius"),
                  std::invalid_argument);
}

TEST_CASE("default adversaries include the hardest shapes at the radius") {
  const sd::ProblemSpec spec = mild();
  const sd::ErrorBudget budget;
  const sd::AdversarySet set = sd::default_adversaries(spec, budget, 0.2);
  REQUIRE(set.size() >= 2);
  CHECK(set[0].description == "extremal shell signal");
  CHECK(set[0].in_class);
  for (const sd::PriorSpec& prior : set) {
    CHECK_FALSE(prior.description.empty());
    CHECK(prior.declared_radius == doctest::Approx(0.2));
  }
}

TEST_CASE("flat prior ties its radius to the lower-bound constant") {
  const sd::ProblemSpec spec = mild(0.01, 16);
  const sd::ErrorBudget budget;
  const sd::PriorSpec prior = sd::build_flat_prior(spec, 16, budget);
  const double s16 = sd::cumulative_b4(spec, 16);
  const double c = sd::c_constant(budget);
  CHECK(sd::signal_norm_sq(prior.theta) ==
        doctest::Approx(c * c * 1e-4 * std::sqrt(s16)).epsilon(1e-12));
  // theta_j^2 proportional to b_j^{-4} spreads the energy evenly in the
  // weighted statistic.
  const double first = prior.theta[0] * prior.theta[0];
  const double last = prior.theta[15] * prior.theta[15];
  CHECK(last / first == doctest::Approx(std::pow(16.0, 4.0)).epsilon(1e-9));
}

TEST_CASE("likelihood second moment has the single-coordinate closed form") {
  const sd::ProblemSpec spec = mild(0.1, 8);
  const std::vector<double> theta = {0.2};
  // x = b_1^2 theta_1^2 / eps^2 = 0.04 / 0.01 = 4.
  const sd::SecondMoment sm = sd::likelihood_second_moment(spec, theta);
  const double x = 4.0;
  const double logcosh = x + std::log1p(std::exp(-2.0 * x)) - std::log(2.0);
  CHECK(sm.log_product == doctest::Approx(logcosh).epsilon(1e-12));
  CHECK(sm.log_bound == doctest::Approx(0.5 * x * x).epsilon(1e-12));
  CHECK(sm.log_product <= sm.log_bound);
}

TEST_CASE("lower-bound beta recovers the exact budget identity") {
  // mild s=t=1, eps=1e-2, alpha=beta=0.05: the flat prior at the
  // lower-bound radius turns exp(log bound) into 1 + 4(1-alpha-beta)^2,
  // collapsing the bound to exactly beta.
  const sd::ProblemSpec spec = mild(0.01, 256);
  const sd::ErrorBudget budget;
  const std::size_t d0 = sd::lower_radius(spec, budget).bandwidth;
  const sd::PriorSpec prior = sd::build_flat_prior(spec, d0, budget);
  const double beta = sd::lower_bound_beta(spec, prior, budget.alpha);
  CHECK(beta == doctest::Approx(budget.beta).epsilon(1e-12));
  const sd::SecondMoment sm = sd::likelihood_second_moment(spec, prior.theta);
  CHECK(std::exp(sm.log_bound) ==
        doctest::Approx(oracle::kExpIdentity).epsilon(1e-12));
}

TEST_CASE("lower-bound beta clamps under overwhelming priors") {
  const sd::ProblemSpec spec = mild(0.001, 16);
  const sd::PriorSpec loud =
      sd::make_prior(spec, {0.9}, 0.9, "very strong spike");
  CHECK(sd::lower_bound_beta(spec, loud, 0.05) == 0.0);
}

TEST_CASE("beta estimates pick the hardest candidate and separate streams") {
  const sd::ProblemSpec spec = mild();
  const sd::AnyTest test = gaussian_ingster(spec, 0.35);
  sd::AdversarySet set;
  set.push_back(sd::make_prior(spec, {}, 0.0, "null signal"));
  const sd::ExtremalSolution sol = sd::solve_extremal(spec, 0.35);
  set.push_back(sd::make_prior(spec, sol.theta_bar, 0.35,
                               "extremal shell signal"));
  sd::McOptions options;
  options.samples = 5000;
  const sd::BetaEstimate beta = sd::estimate_beta(test, set, options);
  REQUIRE(beta.per_candidate.size() == 2);
  // Accepting the null is the complement of the size.
  CHECK(beta.per_candidate[0].probability > 0.85);
  // The shell signal at u ~ 84 is essentially always detected.
  CHECK(beta.per_candidate[1].probability < 0.01);
  CHECK(beta.worst_index == 0);
  CHECK(beta.worst.probability == beta.per_candidate[0].probability);
  CHECK(beta.per_candidate[0].stream + 1 == beta.per_candidate[1].stream);
}

TEST_CASE("empirical radius brackets and lands inside the theory sandwich") {
  const sd::ProblemSpec spec = mild(0.01, 256);
  const sd::ErrorBudget budget;
  sd::TestBuilder builder = [&](double r) {
    sd::CalibrationRequest request;
    request.samples = 20000;
    return sd::AnyTest(sd::build_ingster(spec, r, budget.alpha, request));
  };
  sd::McOptions options;
  options.samples = 10000;
  const sd::EmpiricalRadius result =
      sd::empirical_radius(spec, budget, builder, options, 0.02);
  CHECK(result.bracket_found);
  CHECK(result.probes.size() >= 3);
  CHECK(result.lower <= result.radius);
  CHECK(result.radius <= result.upper);
  const double lo = std::sqrt(sd::lower_radius(spec, budget).r_sq);
  const double hi = std::sqrt(sd::upper_radius(spec, budget).r_sq);
  CHECK(result.radius >= 0.95 * lo);
  CHECK(result.radius <= 1.05 * hi);
}

TEST_CASE("mc options validate sample counts") {
  sd::McOptions options;
  options.samples = 10;
  CHECK_THROWS_AS(options.validate(), std::invalid_argument);
}

}  // TEST_SUITE
