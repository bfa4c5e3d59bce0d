#pragma once

#include <cstdint>
#include <vector>

#include "tidyplan/rng.hpp"
#include "tidyplan/types.hpp"

namespace tidyplan {

/// Truncated stick-breaking weights: v_k ~ Beta(1, gamma) for k < K-1,
/// pi_k = v_k * prod_{j<k} (1 - v_j), with the last weight taking the
/// remainder.
std::vector<double> stick_breaking_weights(double gamma, int truncation, Rng& rng);

/// Draws a full parameter set from the prior: mixing weights from the
/// truncated stick-breaking construction, then per-concept covariance,
/// mean, object distribution and word distribution.
ConceptModel sample_concept_model(const Hyperparams& h, int num_classes,
                                  int num_words, Rng& rng);

/// Forward-samples `count` records from a fixed model, keeping the true
/// concept assignments. Each record draws one place word when the model
/// has a word vocabulary and `words_per_record` > 0.
LabeledDataset sample_dataset(const ConceptModel& model, int count, Rng& rng,
                              int words_per_record = 1);

/// Full generative run: model from the prior, then records from the model.
struct GenerativeSample {
  ConceptModel model;
  LabeledDataset dataset;
};

GenerativeSample sample_generative(const Hyperparams& h, int count,
                                   int num_classes, int num_words,
                                   std::uint64_t seed, int words_per_record = 1);

}  // namespace tidyplan
