#include <doctest.h>

#include <cmath>

#include "crossci/normal.hpp"
#include "crossci/rng.hpp"

using namespace crossci;

// Reference values computed with 40-digit arithmetic (mpmath).
TEST_CASE("normal cdf matches high-precision references") {
  CHECK(norm_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(norm_cdf(0.5) == doctest::Approx(0.69146246127401310).epsilon(1e-15));
  CHECK(norm_cdf(1.0) == doctest::Approx(0.84134474606854295).epsilon(1e-15));
  CHECK(norm_cdf(2.0) == doctest::Approx(0.97724986805182079).epsilon(1e-15));
  CHECK(norm_cdf(6.0) == doctest::Approx(0.99999999901341235).epsilon(1e-15));
  CHECK(norm_cdf(-1.0) == doctest::Approx(1.0 - 0.84134474606854295).epsilon(1e-14));
}

TEST_CASE("normal quantile matches references and inverts the cdf") {
  CHECK(norm_quantile(0.975) ==
        doctest::Approx(1.9599639845400543).epsilon(1e-15));
  CHECK(norm_quantile(0.995) ==
        doctest::Approx(2.5758293035489008).epsilon(1e-15));
  CHECK(norm_quantile(0.0001) ==
        doctest::Approx(-3.7190164854556806).epsilon(1e-14));
  CHECK(norm_quantile(0.3) ==
        doctest::Approx(-0.52440051270804078).epsilon(1e-14));
  CHECK(norm_quantile(0.5) == doctest::Approx(0.0));

  for (int i = 1; i < 200; ++i) {
    const double p = i / 200.0;
    CHECK(norm_cdf(norm_quantile(p)) == doctest::Approx(p).epsilon(1e-13));
  }
  // deep tails round-trip in x
  for (double x : {-8.0, -5.5, -2.0, 2.0, 5.5, 8.0})
    CHECK(norm_quantile(norm_cdf(x)) == doctest::Approx(x).epsilon(1e-12));

  CHECK_THROWS_AS(norm_quantile(0.0), std::domain_error);
  CHECK_THROWS_AS(norm_quantile(1.0), std::domain_error);
}

TEST_CASE("critical value pins the 5 percent level") {
  const double c = critical_value(0.05);
  CHECK(std::fabs(c - 1.9599639845400543) <= 1e-15);
  CHECK(norm_cdf(c) - norm_cdf(-c) == doctest::Approx(0.95).epsilon(1e-14));
}

TEST_CASE("pdf integrates the cdf slope") {
  for (double x : {-3.0, -1.0, 0.0, 0.7, 2.5}) {
    const double h = 1e-6;
    const double slope = (norm_cdf(x + h) - norm_cdf(x - h)) / (2 * h);
    CHECK(slope == doctest::Approx(norm_pdf(x)).epsilon(1e-8));
  }
}
