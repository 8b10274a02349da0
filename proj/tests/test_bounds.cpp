#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "oracles.hpp"
#include "seqdetect/bounds.hpp"

namespace sd = seqdetect;

namespace {

sd::ProblemSpec mild(double eps = 0.01, std::size_t n = 256) {
  return sd::make_preset_spec(sd::FamilyPreset::kMild, 1.0, 1.0, eps, n);
}

}  // namespace

TEST_SUITE("bounds") {

TEST_CASE("error-budget constants match the high-precision references") {
  const sd::ErrorBudget budget;  // 0.05 / 0.05
  CHECK(sd::c_constant(budget) ==
        doctest::Approx(oracle::kC0505).epsilon(1e-12));
  CHECK(sd::C_constant(budget) ==
        doctest::Approx(oracle::kBigC0505).epsilon(1e-12));
}

TEST_CASE("lower constant vanishes as the budget saturates") {
  sd::ErrorBudget loose;
  loose.alpha = 0.5;
  loose.beta = 0.5 - 1e-6;  // 1 - alpha - beta -> 0+
  // c = (2 ln(1 + 4 delta^2))^{1/4} ~ (8)^{1/4} sqrt(delta) at delta = 1e-6.
  CHECK(sd::c_constant(loose) ==
        doctest::Approx(std::pow(8e-12, 0.25)).epsilon(1e-6));
  loose.beta = 0.5;  // exact saturation is rejected, not extrapolated
  CHECK_THROWS_AS(sd::c_constant(loose), std::invalid_argument);
  sd::ErrorBudget tight;
  tight.alpha = 0.01;
  tight.beta = 0.01;
  CHECK(sd::c_constant(tight) > sd::c_constant(sd::ErrorBudget{}));
}

TEST_CASE("budget validation rejects out-of-range errors") {
  sd::ErrorBudget bad;
  bad.alpha = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.alpha = 0.05;
  bad.beta = 1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  sd::ErrorBudget saturated;
  saturated.alpha = 0.6;
  saturated.beta = 0.5;
  CHECK_NOTHROW(saturated.validate());
  CHECK_THROWS_AS(saturated.validate_nondegenerate(), std::invalid_argument);
}

TEST_CASE("cumulative operator sums follow hand-computed prefixes") {
  const sd::ProblemSpec spec = mild(0.01, 8);
  // b_j = 1/j so b^{-4} = j^4.
  CHECK(sd::cumulative_b4(spec, 1) == doctest::Approx(1.0));
  CHECK(sd::cumulative_b4(spec, 2) == doctest::Approx(17.0));
  CHECK(sd::cumulative_b4(spec, 3) == doctest::Approx(98.0));
  CHECK(sd::cumulative_b4(spec, 8) ==
        doctest::Approx(oracle::faulhaber_sum4(8)).epsilon(1e-14));
  CHECK_THROWS_AS(sd::cumulative_b4(spec, 0), std::invalid_argument);
  CHECK_THROWS_AS(sd::cumulative_b4(spec, 9), std::invalid_argument);
}

TEST_CASE("lower bound solves the maximin bandwidth trade-off") {
  // mild s=t=1, eps=1e-2: hand scan of max_D min(c eps^2 sqrt(S_D), D^{-2})
  // peaks at D = 9 where the smoothness term 1/81 binds.
  const sd::RadiusBound lower = sd::lower_radius(mild(), sd::ErrorBudget{});
  CHECK(lower.bandwidth == 9);
  CHECK(lower.r_sq == doctest::Approx(1.0 / 81.0).epsilon(1e-12));
  CHECK_FALSE(lower.truncation_binding);
}

TEST_CASE("upper bound minimizes noise plus bias") {
  // mild s=t=1, eps=1e-2: min_D [C eps^2 sqrt(S_D) + D^{-2}] lands at D = 5.
  const sd::ErrorBudget budget;
  const sd::RadiusBound upper = sd::upper_radius(mild(), budget);
  CHECK(upper.bandwidth == 5);
  const double expected = sd::C_constant(budget) * 1e-4 *
                              std::sqrt(oracle::faulhaber_sum4(5)) +
                          1.0 / 25.0;
  CHECK(upper.r_sq == doctest::Approx(expected).epsilon(1e-12));
  CHECK_FALSE(upper.truncation_binding);
}

TEST_CASE("bounds shrink and bandwidths grow as noise vanishes") {
  const sd::ErrorBudget budget;
  const sd::RadiusBound lo1 = sd::lower_radius(mild(0.01), budget);
  const sd::RadiusBound lo2 = sd::lower_radius(mild(0.001), budget);
  CHECK(lo2.r_sq < lo1.r_sq);
  CHECK(lo2.bandwidth > lo1.bandwidth);
  const sd::RadiusBound up1 = sd::upper_radius(mild(0.01), budget);
  const sd::RadiusBound up2 = sd::upper_radius(mild(0.001), budget);
  CHECK(up2.r_sq < up1.r_sq);
  CHECK(up2.bandwidth > up1.bandwidth);
}

TEST_CASE("boundary bandwidths raise the truncation flag") {
  // With only 3 coordinates at small noise the optimum wants D = N.
  const sd::ProblemSpec tiny = mild(1e-4, 3);
  const sd::RadiusBound lower = sd::lower_radius(tiny, sd::ErrorBudget{});
  CHECK(lower.bandwidth == 3);
  CHECK(lower.truncation_binding);
}

TEST_CASE("consecutive ratio band accepts presets and flags spiky weights") {
  const sd::RatioBandReport ok =
      sd::consecutive_ratio_check(mild(0.01, 32));
  CHECK(ok.satisfied);
  CHECK(ok.a_ratio_max <= 1.0 + 1e-12);

  sd::ProblemSpec spiky = mild(0.01, 4);
  spiky.smoothness =
      sd::SequenceFamily::explicit_values({1.0, 1.0, 1.0, 1e5});
  const sd::RatioBandReport bad = sd::consecutive_ratio_check(spiky);
  CHECK_FALSE(bad.satisfied);
}

TEST_CASE("bounds report is coherent on the mild preset") {
  const sd::BoundsReport report = sd::bounds_report(mild(), sd::ErrorBudget{});
  CHECK(report.lower_radius_sq < report.upper_radius_sq);
  CHECK(report.ratio == doctest::Approx(report.upper_radius_sq /
                                        report.lower_radius_sq));
  CHECK(report.ratio > 1.0);
  CHECK(report.ratio_band_satisfied);
  CHECK_FALSE(report.truncation_binding);
  CHECK(report.c_const == doctest::Approx(oracle::kC0505).epsilon(1e-12));
  CHECK(report.C_const == doctest::Approx(oracle::kBigC0505).epsilon(1e-12));
}

}  // TEST_SUITE
