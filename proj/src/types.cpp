#include "tidyplan/types.hpp"

#include <cmath>
#include <numeric>

namespace tidyplan {
namespace {

void check_simplex(const std::vector<double>& p, const char* name) {
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) {
      throw std::invalid_argument(std::string(name) + " has a negative or NaN entry");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > kSimplexTolerance) {
    throw std::invalid_argument(std::string(name) + " does not sum to 1");
  }
}

void check_spd(const Mat3& m, const char* name) {
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + m.cwiseAbs().maxCoeff())) {
    throw SingularCovarianceError(std::string(name) + " is not symmetric");
  }
  Eigen::LLT<Mat3> llt(m);
  if (llt.info() != Eigen::Success || llt.matrixL()(0, 0) <= 0.0 ||
      llt.matrixL()(1, 1) <= 0.0 || llt.matrixL()(2, 2) <= 0.0) {
    throw SingularCovarianceError(std::string(name) + " is not positive definite");
  }
}

}  // namespace

void validate(const ConceptModel& model) {
  if (model.K <= 0) throw std::invalid_argument("model K must be positive");
  if (model.L <= 0) throw std::invalid_argument("model L must be positive");
  if (model.M < 0) throw std::invalid_argument("model M must be non-negative");
  const auto k = static_cast<std::size_t>(model.K);
  if (model.mu.size() != k || model.sigma.size() != k || model.phi.size() != k ||
      model.eta.size() != k || model.pi.size() != k) {
    throw std::invalid_argument("model parameter lists must all have K entries");
  }
  for (int i = 0; i < model.K; ++i) {
    if (!model.mu[i].allFinite()) throw std::invalid_argument("mu has a non-finite entry");
    check_spd(model.sigma[i], "sigma");
    if (model.phi[i].size() != static_cast<std::size_t>(model.L)) {
      throw std::invalid_argument("phi row has wrong length");
    }
    if (model.eta[i].size() != static_cast<std::size_t>(model.M)) {
      throw std::invalid_argument("eta row has wrong length");
    }
    check_simplex(model.phi[i], "phi");
    if (model.M > 0) check_simplex(model.eta[i], "eta");
  }
  check_simplex(model.pi, "pi");
}

void validate(const Hyperparams& h) {
  if (!(h.alpha > 0.0 && h.beta > 0.0 && h.gamma > 0.0)) {
    throw std::invalid_argument("Dirichlet concentrations must be positive");
  }
  if (!h.mu0.allFinite()) throw std::invalid_argument("mu0 must be finite");
  if (!(h.kappa0 > 0.0)) throw std::invalid_argument("kappa0 must be positive");
  check_spd(h.psi0, "psi0");
  if (!(h.nu0 > 4.0)) throw std::invalid_argument("nu0 must exceed dim + 1 = 4");
  if (h.K < 1) throw std::invalid_argument("K must be at least 1");
}

void validate(const LabeledDataset& data) {
  if (data.num_classes <= 0) throw std::invalid_argument("dataset needs num_classes > 0");
  if (data.num_words < 0) throw std::invalid_argument("dataset num_words must be >= 0");
  for (const Observation& obs : data.observations) {
    if (!obs.position.allFinite()) throw std::invalid_argument("observation position not finite");
    if (obs.object_class < 0 || obs.object_class >= data.num_classes) {
      throw std::invalid_argument("observation class out of range");
    }
    for (int w : obs.words) {
      if (w < 0 || w >= data.num_words) throw std::invalid_argument("word index out of range");
    }
  }
  if (data.truth_assignments &&
      data.truth_assignments->size() != data.observations.size()) {
    throw std::invalid_argument("truth labels must match observation count");
  }
}

}  // namespace tidyplan
