#pragma once

#include <span>

namespace tidyplan {

struct SampleStats {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation (n - 1 denominator)
  int n = 0;
};

SampleStats sample_stats(std::span<const double> values);

/// Regularized incomplete beta I_x(a, b), evaluated by the Lentz
/// continued fraction with the symmetry split at the convergence
/// boundary.
double regularized_incomplete_beta(double a, double b, double x);

/// Two-sided tail probability of Student's t with df degrees of
/// freedom: I_{df/(df+t^2)}(df/2, 1/2).
double student_t_two_sided_p(double t, double df);

struct WelchResult {
  double t = 0.0;
  double df = 0.0;
  double p_value = 1.0;  // two-sided
};

/// Unequal-variance t-test with Welch-Satterthwaite degrees of
/// freedom. Requires two values per side; equal samples with zero
/// variance give t = 0, p = 1.
WelchResult welch_t_test(std::span<const double> xs, std::span<const double> ys);

}  // namespace tidyplan
