#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "tidyplan/types.hpp"

namespace tidyplan {

/// Seeded random stream with self-contained samplers. All distribution
/// algorithms live here rather than in <random> so that a given seed
/// produces the same draws on every standard library.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Child stream with an independent state derived from this one.
  Rng fork() { return Rng(engine_()); }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform();

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer on [0, n).
  int uniform_int(int n);

  /// Standard normal via the Marsaglia polar method.
  double normal();

  double normal(double mean, double sd) { return mean + sd * normal(); }

  /// Gamma(shape, 1) via Marsaglia-Tsang; shapes below 1 use the
  /// boost U^(1/a) transform.
  double gamma(double shape);

  double gamma(double shape, double scale) { return scale * gamma(shape); }

  double beta(double a, double b);

  double chi_squared(double dof) { return gamma(dof * 0.5, 2.0); }

  /// Dirichlet draw from per-category concentrations.
  std::vector<double> dirichlet(const std::vector<double>& concentration);

  /// Symmetric Dirichlet draw.
  std::vector<double> dirichlet(double concentration, int categories);

  /// Index draw from normalized probabilities.
  int categorical(const std::vector<double>& probs);

  /// Index draw from unnormalized log weights via max-shifted
  /// exponentiation. Throws UnnormalizableAssignmentError when every
  /// weight is -inf.
  int categorical_from_log(const std::vector<double>& log_weights);

  /// x ~ N(mean, cov). Near-singular PSD covariances get a 1e-12
  /// diagonal jitter; indefinite ones throw SingularCovarianceError.
  Vec3 multivariate_normal(const Vec3& mean, const Mat3& cov);

  /// Sigma ~ IW(psi, nu) by the Bartlett decomposition, with a 1e-12
  /// diagonal jitter retry on near-singular psi. Requires nu > 2.
  Mat3 inverse_wishart(const Mat3& psi, double nu);

  /// Uniform point in the axis-aligned box [lo, hi].
  Vec3 uniform_in_box(const Vec3& lo, const Vec3& hi);

  /// Uniform point in the ball of given radius around the origin.
  Vec3 uniform_in_ball(double radius);

  /// Sample k distinct indices from [0, n) in random order.
  std::vector<int> sample_without_replacement(int n, int k);

private:
  std::mt19937_64 engine_;
  bool have_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace tidyplan
