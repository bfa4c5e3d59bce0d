#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "support/oracles.hpp"
#include "tidyplan/rng.hpp"
#include "tidyplan/types.hpp"

using namespace tidyplan;

TEST_CASE("identical seeds replay identical streams") {
  Rng a(123);
  Rng b(123);
  for (int i = 0; i < 1000; ++i) {
    CHECK(a.uniform() == b.uniform());
    CHECK(a.normal() == b.normal());
    CHECK(a.gamma(0.7) == b.gamma(0.7));
    CHECK(a.uniform_int(17) == b.uniform_int(17));
  }
  CHECK(a.dirichlet(0.5, 6) == b.dirichlet(0.5, 6));
}

TEST_CASE("forked streams decouple from the parent") {
  Rng a(123);
  Rng child = a.fork();
  const double first_child = child.uniform();
  const double first_parent = a.uniform();
  CHECK(first_child != first_parent);
}

TEST_CASE("uniform draws stay in range with the right mean") {
  Rng rng(1);
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(rng.uniform(2.0, 5.0) >= 2.0);
}

TEST_CASE("uniform integers cover every residue evenly") {
  Rng rng(2);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(rng.uniform_int(7))];
  for (const int c : counts) {
    CHECK(std::abs(c - n / 7) < 400);  // ~4 sigma of Binomial(n, 1/7)
  }
}

TEST_CASE("normal draws match their first two moments") {
  Rng rng(3);
  const int n = 200000;
  double sum = 0.0;
  double sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  CHECK(std::fabs(mean) < 0.01);
  CHECK(sq / n - mean * mean == doctest::Approx(1.0).epsilon(0.02));
  CHECK(rng.normal(10.0, 0.0) == 10.0);
}

TEST_CASE("gamma draws match mean and variance on both algorithm branches") {
  Rng rng(4);
  for (const double shape : {0.3, 4.2}) {
    const int n = 200000;
    double sum = 0.0;
    double sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = rng.gamma(shape);
      CHECK(x > 0.0);
      sum += x;
      sq += x * x;
    }
    const double mean = sum / n;
    CHECK(mean == doctest::Approx(shape).epsilon(0.02));
    CHECK(sq / n - mean * mean == doctest::Approx(shape).epsilon(0.05));
  }
  CHECK(rng.gamma(2.0, 3.0) > 0.0);
}

TEST_CASE("beta draws match the analytic mean") {
  Rng rng(5);
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += rng.beta(2.0, 5.0);
  CHECK(sum / n == doctest::Approx(2.0 / 7.0).epsilon(0.02));
}

TEST_CASE("dirichlet draws live on the simplex with the analytic mean") {
  Rng rng(6);
  const std::vector<double> conc = {1.0, 2.0, 3.0};
  std::vector<double> mean(3, 0.0);
  const int n = 50000;
  for (int i = 0; i < n; ++i) {
    const std::vector<double> x = rng.dirichlet(conc);
    double total = 0.0;
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(x[j] >= 0.0);
      total += x[j];
      mean[j] += x[j];
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(mean[j] / n == doctest::Approx(conc[j] / 6.0).epsilon(0.02));
  }
}

TEST_CASE("categorical frequencies follow the probabilities") {
  Rng rng(7);
  const std::vector<double> probs = {0.5, 0.3, 0.2};
  std::vector<int> counts(3, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(rng.categorical(probs))];
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(static_cast<double>(counts[j]) / n == doctest::Approx(probs[j]).epsilon(0.03));
  }
}

TEST_CASE("log-weight categorical matches the normalized exponentials") {
  Rng rng(8);
  const std::vector<double> logw = {-700.0, -700.0 + std::log(3.0), -705.0};
  // exp-normalized: proportional to 1 : 3 : e^-5.
  std::vector<int> counts(3, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(rng.categorical_from_log(logw))];
  const double z = 1.0 + 3.0 + std::exp(-5.0);
  CHECK(static_cast<double>(counts[0]) / n == doctest::Approx(1.0 / z).epsilon(0.05));
  CHECK(static_cast<double>(counts[1]) / n == doctest::Approx(3.0 / z).epsilon(0.05));
  const std::vector<double> all_inf(4, -std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(rng.categorical_from_log(all_inf), UnnormalizableAssignmentError);
}

TEST_CASE("multivariate normal draws match mean and covariance") {
  Rng rng(9);
  const Vec3 mean(1.0, -2.0, 0.5);
  Mat3 cov;
  cov << 0.8, 0.2, 0.0, 0.2, 0.5, 0.1, 0.0, 0.1, 0.3;
  const int n = 100000;
  Vec3 sum = Vec3::Zero();
  Mat3 outer = Mat3::Zero();
  for (int i = 0; i < n; ++i) {
    const Vec3 x = rng.multivariate_normal(mean, cov);
    sum += x;
    outer += (x - mean) * (x - mean).transpose();
  }
  const Vec3 m = sum / n;
  const Mat3 c = outer / n;
  for (int d = 0; d < 3; ++d) CHECK(m[d] == doctest::Approx(mean[d]).epsilon(0.05));
  for (int r = 0; r < 3; ++r) {
    for (int col = 0; col < 3; ++col) {
      CHECK(std::fabs(c(r, col) - cov(r, col)) < 0.02);
    }
  }
  // Exactly singular inputs pass through the jitter fallback (they are
  // legitimate near-degenerate posteriors); indefinite ones must throw.
  CHECK_THROWS_AS(rng.multivariate_normal(mean, -Mat3::Identity()), SingularCovarianceError);
}

TEST_CASE("inverse-wishart draws match the analytic mean") {
  Rng rng(10);
  const Mat3 psi = Mat3::Identity() * 2.0;
  const double nu = 10.0;
  Mat3 sum = Mat3::Zero();
  const int n = 40000;
  for (int i = 0; i < n; ++i) sum += rng.inverse_wishart(psi, nu);
  const Mat3 mean = sum / n;
  const Mat3 expected = psi / (nu - 4.0);  // psi / (nu - p - 1) with p = 3
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      CHECK(std::fabs(mean(r, c) - expected(r, c)) < 0.03);
    }
  }
}

TEST_CASE("box and ball draws respect their supports") {
  Rng rng(11);
  const Vec3 lo(-1.0, 2.0, 0.0);
  const Vec3 hi(1.0, 3.0, 0.0);
  Vec3 sum = Vec3::Zero();
  const int n = 50000;
  for (int i = 0; i < n; ++i) {
    const Vec3 x = rng.uniform_in_box(lo, hi);
    for (int d = 0; d < 3; ++d) {
      CHECK(x[d] >= lo[d]);
      CHECK(x[d] <= hi[d]);
    }
    sum += x;
  }
  const Vec3 center = sum / n;
  CHECK(std::fabs(center[0]) < 0.02);
  CHECK(center[1] == doctest::Approx(2.5).epsilon(0.01));

  double norm_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vec3 x = rng.uniform_in_ball(2.0);
    CHECK(x.norm() <= 2.0);
    norm_sum += x.norm();
  }
  // E[|x|] for a uniform ball of radius r is 3r/4.
  CHECK(norm_sum / n == doctest::Approx(1.5).epsilon(0.02));
}

TEST_CASE("sampling without replacement yields distinct in-range indices") {
  Rng rng(12);
  std::vector<int> first_slot_counts(10, 0);
  for (int trial = 0; trial < 20000; ++trial) {
    const std::vector<int> picks = rng.sample_without_replacement(10, 4);
    CHECK(picks.size() == 4);
    std::set<int> distinct(picks.begin(), picks.end());
    CHECK(distinct.size() == 4);
    for (const int p : picks) {
      CHECK(p >= 0);
      CHECK(p < 10);
    }
    ++first_slot_counts[static_cast<std::size_t>(picks[0])];
  }
  // Every index appears in the first slot roughly uniformly.
  for (const int c : first_slot_counts) {
    CHECK(std::abs(c - 2000) < 300);
  }
}
