#pragma once

#include <span>
#include <vector>

#include "tidyplan/types.hpp"

namespace tidyplan {

/// ln N(x; mu, sigma) for a 3D Gaussian. Throws SingularCovarianceError
/// when sigma is not SPD.
double gaussian_logpdf(const Vec3& x, const Vec3& mu, const Mat3& sigma);

/// Cached Cholesky factorization for repeated Gaussian evaluations
/// against one component.
class GaussianEval {
public:
  GaussianEval(const Vec3& mu, const Mat3& sigma);
  [[nodiscard]] double logpdf(const Vec3& x) const;

private:
  Vec3 mu_;
  Eigen::LLT<Mat3> llt_;
  double log_norm_;  // -(3/2) ln 2pi - (1/2) ln det sigma
};

/// Sum_v counts[v] * ln p[v], the multinomial log-pmf with the
/// count-coefficient dropped (constant in the concept index). All-zero
/// counts give 0; a positive count on a zero-probability category gives
/// -inf.
double categorical_logpmf(std::span<const double> counts, std::span<const double> p);

/// Word-bag variant: ln prod_w p[w] over a multiset of indices.
/// Empty bag gives 0.
double wordbag_logpmf(const std::vector<int>& words, std::span<const double> p);

/// Max-shifted ln sum_i exp(v[i]); -inf for an empty or all -inf input.
double log_sum_exp(std::span<const double> values);

/// Per-concept log factor of one observation:
///   ln N(x | mu_k, sigma_k) + ln p(o | phi_k) + ln p(w | eta_k) + ln pi_k
/// with the word term omitted for an empty bag.
double object_logfactor(const Vec3& position, int object_class,
                        const std::vector<int>& words, int k,
                        const ConceptModel& model);

/// ln Dir(x | a) with a symmetric concentration a over x.size() categories.
double dirichlet_logpdf(std::span<const double> x, double concentration);

/// ln IW(sigma | psi, nu) for 3x3 scale matrices.
double inverse_wishart_logpdf(const Mat3& sigma, const Mat3& psi, double nu);

/// ln Gamma_3(a), the trivariate multivariate gamma function.
double log_multivariate_gamma3(double a);

}  // namespace tidyplan
