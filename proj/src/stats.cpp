#include "tidyplan/stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace tidyplan {
namespace {

/// Continued fraction for the incomplete beta, modified Lentz method.
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 300;
  constexpr double kEps = 3e-14;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

SampleStats sample_stats(std::span<const double> values) {
  SampleStats stats;
  stats.n = static_cast<int>(values.size());
  if (stats.n == 0) return stats;
  double sum = 0.0;
  for (double v : values) sum += v;
  stats.mean = sum / stats.n;
  if (stats.n < 2) return stats;
  double ss = 0.0;
  for (double v : values) {
    const double d = v - stats.mean;
    ss += d * d;
  }
  stats.sd = std::sqrt(ss / (stats.n - 1));
  return stats;
}

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw std::invalid_argument("beta parameters must be positive");
  }
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double df) {
  if (!(df > 0.0)) throw std::invalid_argument("degrees of freedom must be positive");
  if (std::isinf(t)) return 0.0;
  const double x = df / (df + t * t);
  return regularized_incomplete_beta(0.5 * df, 0.5, x);
}

WelchResult welch_t_test(std::span<const double> xs, std::span<const double> ys) {
  const SampleStats sx = sample_stats(xs);
  const SampleStats sy = sample_stats(ys);
  if (sx.n < 2 || sy.n < 2) {
    throw std::invalid_argument("each sample needs at least two values");
  }
  const double vx = sx.sd * sx.sd / sx.n;
  const double vy = sy.sd * sy.sd / sy.n;
  WelchResult result;
  if (vx + vy == 0.0) {
    // Degenerate: identical constants compare equal, different ones
    // differ with certainty.
    if (sx.mean == sy.mean) return {0.0, static_cast<double>(sx.n + sy.n - 2), 1.0};
    const double sign = sx.mean > sy.mean ? 1.0 : -1.0;
    return {sign * std::numeric_limits<double>::infinity(),
            static_cast<double>(sx.n + sy.n - 2), 0.0};
  }
  result.t = (sx.mean - sy.mean) / std::sqrt(vx + vy);
  result.df = (vx + vy) * (vx + vy) /
              (vx * vx / (sx.n - 1) + vy * vy / (sy.n - 1));
  result.p_value = student_t_two_sided_p(result.t, result.df);
  return result;
}

}  // namespace tidyplan
