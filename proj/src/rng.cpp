#include "tidyplan/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace tidyplan {

double Rng::uniform() {
  // 53-bit mantissa; never returns 1.0.
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

int Rng::uniform_int(int n) {
  if (n <= 0) throw std::invalid_argument("uniform_int needs n > 0");
  const auto bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t v;
  do {
    v = engine_();
  } while (v >= limit);
  return static_cast<int>(v % bound);
}

double Rng::normal() {
  if (have_spare_normal_) {
    have_spare_normal_ = false;
    return spare_normal_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = v * factor;
  have_spare_normal_ = true;
  return u * factor;
}

double Rng::gamma(double shape) {
  if (!(shape > 0.0)) throw std::invalid_argument("gamma shape must be positive");
  if (shape < 1.0) {
    const double u = uniform();
    return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double Rng::beta(double a, double b) {
  const double x = gamma(a);
  const double y = gamma(b);
  return x / (x + y);
}

std::vector<double> Rng::dirichlet(const std::vector<double>& concentration) {
  std::vector<double> out(concentration.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < concentration.size(); ++i) {
    out[i] = gamma(concentration[i]);
    sum += out[i];
  }
  if (sum <= 0.0) {
    // All draws underflowed; fall back to uniform weights.
    std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(out.size()));
    return out;
  }
  for (double& v : out) v /= sum;
  return out;
}

std::vector<double> Rng::dirichlet(double concentration, int categories) {
  return dirichlet(std::vector<double>(static_cast<std::size_t>(categories), concentration));
}

int Rng::categorical(const std::vector<double>& probs) {
  const double u = uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size()) - 1;
}

int Rng::categorical_from_log(const std::vector<double>& log_weights) {
  const double shift = *std::max_element(log_weights.begin(), log_weights.end());
  if (!std::isfinite(shift)) {
    throw UnnormalizableAssignmentError("every candidate has zero probability");
  }
  std::vector<double> probs(log_weights.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < log_weights.size(); ++i) {
    probs[i] = std::exp(log_weights[i] - shift);
    sum += probs[i];
  }
  for (double& p : probs) p /= sum;
  return categorical(probs);
}

Vec3 Rng::multivariate_normal(const Vec3& mean, const Mat3& cov) {
  Eigen::LLT<Mat3> llt(cov);
  if (llt.info() != Eigen::Success) {
    Mat3 jittered = cov + Mat3::Identity() * 1e-12;
    llt.compute(jittered);
    if (llt.info() != Eigen::Success) {
      throw SingularCovarianceError("covariance for normal draw is not SPD");
    }
  }
  Vec3 z(normal(), normal(), normal());
  return mean + llt.matrixL() * z;
}

Mat3 Rng::inverse_wishart(const Mat3& psi, double nu) {
  if (!(nu > 2.0)) throw std::invalid_argument("inverse_wishart needs nu > dim - 1");
  Eigen::LLT<Mat3> llt(psi);
  if (llt.info() != Eigen::Success) {
    Mat3 jittered = psi + Mat3::Identity() * 1e-12;
    llt.compute(jittered);
    if (llt.info() != Eigen::Success) {
      throw SingularCovarianceError("inverse-Wishart scale matrix is not SPD");
    }
  }
  // W ~ Wishart(psi^{-1}, nu) via Bartlett: with psi = L L^T, the factor of
  // psi^{-1} is L^{-T}. Then sigma = W^{-1} = L A^{-T} A^{-1} L^T.
  Mat3 a = Mat3::Zero();
  for (int i = 0; i < 3; ++i) {
    a(i, i) = std::sqrt(chi_squared(nu - static_cast<double>(i)));
    for (int j = 0; j < i; ++j) a(i, j) = normal();
  }
  Mat3 lower = llt.matrixL();
  Mat3 a_inv = a.triangularView<Eigen::Lower>().solve(Mat3::Identity());
  Mat3 root = lower * a_inv.transpose();  // sigma = root * root^T
  Mat3 sigma = root * root.transpose();
  return 0.5 * (sigma + sigma.transpose());
}

Vec3 Rng::uniform_in_box(const Vec3& lo, const Vec3& hi) {
  return Vec3(uniform(lo.x(), hi.x()), uniform(lo.y(), hi.y()), uniform(lo.z(), hi.z()));
}

Vec3 Rng::uniform_in_ball(double radius) {
  for (;;) {
    Vec3 p(uniform(-1.0, 1.0), uniform(-1.0, 1.0), uniform(-1.0, 1.0));
    if (p.squaredNorm() <= 1.0) return radius * p;
  }
}

std::vector<int> Rng::sample_without_replacement(int n, int k) {
  if (k > n) throw std::invalid_argument("cannot sample more items than available");
  std::vector<int> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < k; ++i) {
    const int j = i + uniform_int(n - i);
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
  }
  pool.resize(static_cast<std::size_t>(k));
  return pool;
}

}  // namespace tidyplan
