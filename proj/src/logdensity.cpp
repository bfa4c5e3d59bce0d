#include "tidyplan/logdensity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace tidyplan {
namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

Eigen::LLT<Mat3> checked_llt(const Mat3& sigma) {
  Eigen::LLT<Mat3> llt(sigma);
  const Mat3 lower = llt.matrixL();
  if (llt.info() != Eigen::Success || !(lower(0, 0) > 0.0) || !(lower(1, 1) > 0.0) ||
      !(lower(2, 2) > 0.0) || !lower.allFinite()) {
    throw SingularCovarianceError("covariance is not symmetric positive definite");
  }
  return llt;
}

double log_det_from_llt(const Eigen::LLT<Mat3>& llt) {
  const Mat3 lower = llt.matrixL();
  return 2.0 * (std::log(lower(0, 0)) + std::log(lower(1, 1)) + std::log(lower(2, 2)));
}

}  // namespace

double gaussian_logpdf(const Vec3& x, const Vec3& mu, const Mat3& sigma) {
  const Eigen::LLT<Mat3> llt = checked_llt(sigma);
  const Vec3 diff = x - mu;
  const Vec3 solved = llt.solve(diff);
  return -0.5 * (3.0 * kLog2Pi + log_det_from_llt(llt) + diff.dot(solved));
}

GaussianEval::GaussianEval(const Vec3& mu, const Mat3& sigma)
    : mu_(mu), llt_(checked_llt(sigma)) {
  log_norm_ = -0.5 * (3.0 * kLog2Pi + log_det_from_llt(llt_));
}

double GaussianEval::logpdf(const Vec3& x) const {
  const Vec3 diff = x - mu_;
  return log_norm_ - 0.5 * diff.dot(llt_.solve(diff));
}

double categorical_logpmf(std::span<const double> counts, std::span<const double> p) {
  if (counts.size() != p.size()) {
    throw std::invalid_argument("counts and probabilities differ in length");
  }
  double total = 0.0;
  for (std::size_t v = 0; v < counts.size(); ++v) {
    if (counts[v] < 0.0) throw std::invalid_argument("counts must be non-negative");
    if (counts[v] == 0.0) continue;
    if (p[v] <= 0.0) return kNegInf;
    total += counts[v] * std::log(p[v]);
  }
  return total;
}

double wordbag_logpmf(const std::vector<int>& words, std::span<const double> p) {
  double total = 0.0;
  for (int w : words) {
    if (w < 0 || static_cast<std::size_t>(w) >= p.size()) {
      throw std::invalid_argument("word index out of range");
    }
    if (p[static_cast<std::size_t>(w)] <= 0.0) return kNegInf;
    total += std::log(p[static_cast<std::size_t>(w)]);
  }
  return total;
}

double log_sum_exp(std::span<const double> values) {
  if (values.empty()) return kNegInf;
  const double shift = *std::max_element(values.begin(), values.end());
  if (!std::isfinite(shift)) return shift;  // all -inf (or a stray +inf)
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - shift);
  return shift + std::log(sum);
}

double object_logfactor(const Vec3& position, int object_class,
                        const std::vector<int>& words, int k,
                        const ConceptModel& model) {
  if (k < 0 || k >= model.K) throw std::invalid_argument("concept index out of range");
  const auto ku = static_cast<std::size_t>(k);
  const auto cu = static_cast<std::size_t>(object_class);
  if (object_class < 0 || cu >= model.phi[ku].size()) {
    throw std::invalid_argument("object class out of range");
  }
  double value = gaussian_logpdf(position, model.mu[ku], model.sigma[ku]);
  const double phi_c = model.phi[ku][cu];
  value += phi_c > 0.0 ? std::log(phi_c) : kNegInf;
  if (!words.empty()) value += wordbag_logpmf(words, model.eta[ku]);
  const double pi_k = model.pi[ku];
  value += pi_k > 0.0 ? std::log(pi_k) : kNegInf;
  return value;
}

double dirichlet_logpdf(std::span<const double> x, double concentration) {
  const auto v = static_cast<double>(x.size());
  double value = std::lgamma(v * concentration) - v * std::lgamma(concentration);
  for (double xi : x) {
    if (xi <= 0.0) return kNegInf;
    value += (concentration - 1.0) * std::log(xi);
  }
  return value;
}

double log_multivariate_gamma3(double a) {
  constexpr double kLogPi = 1.1447298858494001741434273513531;
  return 1.5 * kLogPi + std::lgamma(a) + std::lgamma(a - 0.5) + std::lgamma(a - 1.0);
}

double inverse_wishart_logpdf(const Mat3& sigma, const Mat3& psi, double nu) {
  const Eigen::LLT<Mat3> llt_sigma = checked_llt(sigma);
  const Eigen::LLT<Mat3> llt_psi = checked_llt(psi);
  const double logdet_sigma = log_det_from_llt(llt_sigma);
  const double logdet_psi = log_det_from_llt(llt_psi);
  const double trace_term = llt_sigma.solve(psi).trace();
  return 0.5 * nu * logdet_psi - 0.5 * nu * 3.0 * std::numbers::ln2 -
         log_multivariate_gamma3(0.5 * nu) -
         0.5 * (nu + 4.0) * logdet_sigma - 0.5 * trace_term;
}

}  // namespace tidyplan
