#include "tidyplan/generative.hpp"

namespace tidyplan {

std::vector<double> stick_breaking_weights(double gamma, int truncation, Rng& rng) {
  if (truncation < 1) throw std::invalid_argument("truncation must be at least 1");
  std::vector<double> pi(static_cast<std::size_t>(truncation), 0.0);
  double remaining = 1.0;
  for (int k = 0; k + 1 < truncation; ++k) {
    const double v = rng.beta(1.0, gamma);
    pi[static_cast<std::size_t>(k)] = v * remaining;
    remaining *= (1.0 - v);
  }
  pi[static_cast<std::size_t>(truncation - 1)] = remaining;
  return pi;
}

ConceptModel sample_concept_model(const Hyperparams& h, int num_classes,
                                  int num_words, Rng& rng) {
  validate(h);
  if (num_classes < 1) throw std::invalid_argument("need at least one object class");
  if (num_words < 0) throw std::invalid_argument("word vocabulary size must be >= 0");
  ConceptModel model;
  model.K = h.K;
  model.L = num_classes;
  model.M = num_words;
  model.pi = stick_breaking_weights(h.gamma, h.K, rng);
  model.mu.reserve(static_cast<std::size_t>(h.K));
  model.sigma.reserve(static_cast<std::size_t>(h.K));
  for (int k = 0; k < h.K; ++k) {
    Mat3 sigma = rng.inverse_wishart(h.psi0, h.nu0);
    model.sigma.push_back(sigma);
    model.mu.push_back(rng.multivariate_normal(h.mu0, sigma / h.kappa0));
    model.phi.push_back(rng.dirichlet(h.alpha, num_classes));
    if (num_words > 0) {
      model.eta.push_back(rng.dirichlet(h.beta, num_words));
    } else {
      model.eta.emplace_back();
    }
  }
  return model;
}

LabeledDataset sample_dataset(const ConceptModel& model, int count, Rng& rng,
                              int words_per_record) {
  if (count < 0) throw std::invalid_argument("count must be non-negative");
  LabeledDataset data;
  data.num_classes = model.L;
  data.num_words = model.M;
  data.observations.reserve(static_cast<std::size_t>(count));
  std::vector<int> truth;
  truth.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const int k = rng.categorical(model.pi);
    const auto ku = static_cast<std::size_t>(k);
    Observation obs;
    obs.position = rng.multivariate_normal(model.mu[ku], model.sigma[ku]);
    obs.object_class = rng.categorical(model.phi[ku]);
    if (model.M > 0) {
      for (int w = 0; w < words_per_record; ++w) {
        obs.words.push_back(rng.categorical(model.eta[ku]));
      }
    }
    data.observations.push_back(std::move(obs));
    truth.push_back(k);
  }
  data.truth_assignments = std::move(truth);
  return data;
}

GenerativeSample sample_generative(const Hyperparams& h, int count,
                                   int num_classes, int num_words,
                                   std::uint64_t seed, int words_per_record) {
  if (count < 1) throw std::invalid_argument("count must be at least 1");
  Rng rng(seed);
  GenerativeSample out;
  out.model = sample_concept_model(h, num_classes, num_words, rng);
  out.dataset = sample_dataset(out.model, count, rng, words_per_record);
  return out;
}

}  // namespace tidyplan
