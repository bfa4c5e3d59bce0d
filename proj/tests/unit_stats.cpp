#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "support/oracles.hpp"
#include "tidyplan/stats.hpp"

using namespace tidyplan;

TEST_CASE("sample statistics on a hand-computed vector") {
  const std::vector<double> values = {2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0};
  const SampleStats stats = sample_stats(values);
  CHECK(stats.n == 8);
  CHECK(stats.mean == doctest::Approx(5.0).epsilon(1e-14));
  // Sum of squared deviations is 32; sample variance 32/7.
  CHECK(stats.sd == doctest::Approx(std::sqrt(32.0 / 7.0)).epsilon(1e-14));
}

TEST_CASE("degenerate sample sizes") {
  CHECK(sample_stats(std::vector<double>{}).n == 0);
  const SampleStats one = sample_stats(std::vector<double>{3.5});
  CHECK(one.n == 1);
  CHECK(one.mean == 3.5);
  CHECK(one.sd == 0.0);
}

TEST_CASE("regularized incomplete beta closed forms") {
  // I_x(1,1) = x.
  CHECK(regularized_incomplete_beta(1.0, 1.0, 0.37) == doctest::Approx(0.37).epsilon(1e-13));
  // I_x(1,b) = 1 - (1-x)^b.
  CHECK(regularized_incomplete_beta(1.0, 7.0, 0.2) ==
        doctest::Approx(1.0 - std::pow(0.8, 7.0)).epsilon(1e-13));
  // I_x(a,1) = x^a.
  CHECK(regularized_incomplete_beta(3.0, 1.0, 0.6) ==
        doctest::Approx(std::pow(0.6, 3.0)).epsilon(1e-13));
  // I_x(2,3) expands to a quartic polynomial.
  CHECK(regularized_incomplete_beta(2.0, 3.0, 0.4) == doctest::Approx(0.5248).epsilon(1e-13));
  // I_x(1/2,1/2) = (2/pi) asin(sqrt x) (arcsine law).
  CHECK(regularized_incomplete_beta(0.5, 0.5, 0.3) ==
        doctest::Approx(2.0 / std::numbers::pi * std::asin(std::sqrt(0.3))).epsilon(1e-12));
  // Symmetry point.
  CHECK(regularized_incomplete_beta(4.5, 4.5, 0.5) == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("regularized incomplete beta fixed references") {
  // High-precision values computed once with an arbitrary-precision
  // evaluator, frozen here.
  CHECK(regularized_incomplete_beta(5.0, 0.5, 0.9) ==
        doctest::Approx(0.3166429150200123125).epsilon(1e-12));
  CHECK(regularized_incomplete_beta(9.0, 0.25, 0.99) ==
        doctest::Approx(0.41141921545006013969).epsilon(1e-12));
}

TEST_CASE("regularized incomplete beta edges and domain") {
  CHECK(regularized_incomplete_beta(2.0, 2.0, 0.0) == 0.0);
  CHECK(regularized_incomplete_beta(2.0, 2.0, 1.0) == 1.0);
  CHECK_THROWS_AS(regularized_incomplete_beta(0.0, 1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(regularized_incomplete_beta(1.0, -2.0, 0.5), std::invalid_argument);
}

TEST_CASE("complement identity of the incomplete beta") {
  tidyplan::Rng rng(48);
  for (int trial = 0; trial < 50; ++trial) {
    const double a = rng.uniform(0.2, 8.0);
    const double b = rng.uniform(0.2, 8.0);
    const double x = rng.uniform(0.01, 0.99);
    CHECK(regularized_incomplete_beta(a, b, x) +
              regularized_incomplete_beta(b, a, 1.0 - x) ==
          doctest::Approx(1.0).epsilon(1e-11));
  }
}

TEST_CASE("two-sided t probability closed forms") {
  // One degree of freedom is the Cauchy distribution.
  CHECK(student_t_two_sided_p(1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(student_t_two_sided_p(0.0, 7.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(student_t_two_sided_p(std::numeric_limits<double>::infinity(), 5.0) == 0.0);
}

TEST_CASE("two-sided t probability fixed references") {
  CHECK(student_t_two_sided_p(2.0, 5.0) ==
        doctest::Approx(0.10193947882985835625).epsilon(1e-12));
  CHECK(student_t_two_sided_p(3.5, 17.4) ==
        doctest::Approx(0.0026656444474513392283).epsilon(1e-10));
  CHECK(student_t_two_sided_p(0.5, 30.0) ==
        doctest::Approx(0.62072300488512728596).epsilon(1e-12));
  CHECK(student_t_two_sided_p(6.0, 2.0) ==
        doctest::Approx(0.026671473215424771013).epsilon(1e-12));
  // Just above the conventional threshold.
  CHECK(student_t_two_sided_p(2.228, 10.0) ==
        doctest::Approx(0.050011771817111365362).epsilon(1e-12));
}

TEST_CASE("two-sided t probability matches density integration") {
  for (const double df : {1.0, 2.5, 8.0, 40.0}) {
    for (const double t : {0.3, 1.7, -2.4, 4.0}) {
      CHECK(student_t_two_sided_p(t, df) ==
            doctest::Approx(oracle::student_t_two_sided_p(t, df)).epsilon(2e-7));
    }
  }
}

TEST_CASE("unequal-variance t-test against frozen references") {
  const std::vector<double> xs = {12.1, 14.3, 13.8, 12.9, 13.5, 14.0};
  const std::vector<double> ys = {11.2, 11.9, 12.3, 11.5};
  const WelchResult r = welch_t_test(xs, ys);
  CHECK(r.t == doctest::Approx(4.187861681134189).epsilon(1e-12));
  CHECK(r.df == doctest::Approx(7.967948405321364).epsilon(1e-12));
  CHECK(r.p_value == doctest::Approx(0.0030738799113164246).epsilon(1e-10));

  const std::vector<double> xs2 = {-3.2, -1.1, 0.4, 2.2, 0.9, -0.5, 1.3, 0.1};
  const std::vector<double> ys2 = {0.6, -0.2, 1.8, 0.9, -1.4};
  const WelchResult r2 = welch_t_test(xs2, ys2);
  CHECK(r2.t == doctest::Approx(-0.4111087191105031).epsilon(1e-12));
  CHECK(r2.df == doctest::Approx(10.579904919561752).epsilon(1e-12));
  CHECK(r2.p_value == doctest::Approx(0.6891967267205685).epsilon(1e-10));
}

TEST_CASE("comparing a sample against itself is maximally insignificant") {
  const std::vector<double> xs = {1.0, 2.0, 3.0, 4.0};
  const WelchResult r = welch_t_test(xs, xs);
  CHECK(r.t == doctest::Approx(0.0));
  CHECK(r.p_value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("degenerate constant samples") {
  const std::vector<double> same = {2.0, 2.0, 2.0};
  CHECK(welch_t_test(same, same).p_value == 1.0);
  const std::vector<double> higher = {3.0, 3.0};
  const WelchResult r = welch_t_test(higher, same);
  CHECK(r.p_value == 0.0);
  CHECK(std::isinf(r.t));
}

TEST_CASE("each side needs at least two values") {
  const std::vector<double> one = {1.0};
  const std::vector<double> two = {1.0, 2.0};
  CHECK_THROWS_AS(welch_t_test(one, two), std::invalid_argument);
  CHECK_THROWS_AS(welch_t_test(two, one), std::invalid_argument);
}
