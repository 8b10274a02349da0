#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "oracles.hpp"
#include "seqdetect/math.hpp"

namespace sd = seqdetect;

TEST_SUITE("math") {

TEST_CASE("normal cdf matches frozen references") {
  CHECK(sd::normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(sd::normal_cdf(1.0) == doctest::Approx(oracle::kPhi1).epsilon(1e-13));
  CHECK(sd::normal_cdf(-2.0) ==
        doctest::Approx(oracle::kPhiMinus2).epsilon(1e-13));
  CHECK(sd::normal_cdf(2.5) == doctest::Approx(oracle::kPhi25).epsilon(1e-13));
}

TEST_CASE("normal cdf is symmetric and monotone") {
  for (double x : {0.1, 0.7, 1.3, 2.9, 4.0}) {
    CHECK(sd::normal_cdf(x) + sd::normal_cdf(-x) ==
          doctest::Approx(1.0).epsilon(1e-14));
    CHECK(sd::normal_cdf(x) > sd::normal_cdf(x - 0.05));
  }
}

TEST_CASE("normal quantile matches frozen references") {
  CHECK(sd::normal_quantile(0.95) ==
        doctest::Approx(oracle::kZ95).epsilon(1e-12));
  CHECK(sd::normal_quantile(0.975) ==
        doctest::Approx(oracle::kZ975).epsilon(1e-12));
  CHECK(sd::normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("normal quantile agrees with bisection oracle across the range") {
  for (double p : {1e-6, 1e-3, 0.025, 0.2, 0.5, 0.8, 0.975, 0.999, 1 - 1e-6}) {
    CHECK(sd::normal_quantile(p) ==
          doctest::Approx(oracle::normal_quantile_bisect(p)).epsilon(1e-10));
  }
}

TEST_CASE("normal quantile round-trips through the cdf") {
  for (double p : {0.01, 0.05, 0.3, 0.5, 0.9, 0.99}) {
    CHECK(sd::normal_cdf(sd::normal_quantile(p)) ==
          doctest::Approx(p).epsilon(1e-12));
  }
}

TEST_CASE("normal quantile rejects probabilities outside (0,1)") {
  CHECK_THROWS_AS(sd::normal_quantile(0.0), std::invalid_argument);
  CHECK_THROWS_AS(sd::normal_quantile(1.0), std::invalid_argument);
  CHECK_THROWS_AS(sd::normal_quantile(-0.2), std::invalid_argument);
}

TEST_CASE("chi squared quantile is the squared two-sided normal quantile") {
  CHECK(sd::chi_squared1_quantile(0.95) ==
        doctest::Approx(oracle::kChi2_1_95).epsilon(1e-10));
  for (double p : {0.5, 0.9, 0.99}) {
    const double z = sd::normal_quantile(0.5 * (1.0 + p));
    CHECK(sd::chi_squared1_quantile(p) ==
          doctest::Approx(z * z).epsilon(1e-10));
  }
}

TEST_CASE("type-7 quantile interpolates between order statistics") {
  std::vector<double> v = {1.0, 2.0, 3.0, 4.0};
  CHECK(sd::quantile_type7(v, 0.0) == doctest::Approx(1.0));
  CHECK(sd::quantile_type7(v, 1.0) == doctest::Approx(4.0));
  CHECK(sd::quantile_type7(v, 0.5) == doctest::Approx(2.5));
  CHECK(sd::quantile_type7(v, 0.25) == doctest::Approx(1.75));
}

TEST_CASE("type-7 quantile matches the oracle on irregular samples") {
  std::vector<double> v = {0.3, -1.2, 5.0, 2.2, 2.2, -0.7, 9.1, 0.0};
  for (double p : {0.05, 0.31, 0.5, 0.77, 0.95}) {
    CHECK(sd::quantile_type7(v, p) ==
          doctest::Approx(oracle::quantile_type7(v, p)).epsilon(1e-14));
  }
}

TEST_CASE("ols recovers an exact line") {
  std::vector<double> x = {1.0, 2.0, 3.0, 4.0, 5.0};
  std::vector<double> y;
  for (double xi : x) {
    y.push_back(-2.5 * xi + 0.75);
  }
  const sd::OlsFit fit = sd::ols_fit(x, y);
  CHECK(fit.slope == doctest::Approx(-2.5).epsilon(1e-13));
  CHECK(fit.intercept == doctest::Approx(0.75).epsilon(1e-13));
  CHECK(fit.max_abs_residual <= 1e-12);
}

TEST_CASE("ols agrees with the normal-equation oracle on noisy data") {
  std::vector<double> x = {0.0, 1.0, 2.0, 3.0, 4.0, 5.0};
  std::vector<double> y = {0.1, 0.9, 2.3, 2.8, 4.2, 4.9};
  const sd::OlsFit fit = sd::ols_fit(x, y);
  const oracle::OlsResult ref = oracle::ols(x, y);
  CHECK(fit.slope == doctest::Approx(ref.slope).epsilon(1e-12));
  CHECK(fit.intercept == doctest::Approx(ref.intercept).epsilon(1e-12));
  CHECK(fit.max_abs_residual > 0.0);
}

TEST_CASE("rng streams are deterministic and independent") {
  sd::RngStream a(42, 0);
  sd::RngStream b(42, 0);
  sd::RngStream c(42, 1);
  bool streams_differ = false;
  for (int i = 0; i < 64; ++i) {
    const double va = a.uniform();
    CHECK(va == b.uniform());
    CHECK(va > 0.0);
    CHECK(va < 1.0);
    if (va != c.uniform()) {
      streams_differ = true;
    }
  }
  CHECK(streams_differ);
  CHECK(a.seed() == 42);
  CHECK(c.stream() == 1);
}

TEST_CASE("rng normals have standard moments") {
  sd::RngStream rng(7, 3);
  const int n = 200000;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sum_sq += z * z;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(var == doctest::Approx(1.0).epsilon(0.02));
}

}  // TEST_SUITE
