#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "tidyplan/rng.hpp"
#include "tidyplan/types.hpp"

namespace tidyplan {

/// Conjugate Normal-inverse-Wishart posterior hyperparameters for one
/// concept's Gaussian, updated from its assigned points.
struct PosteriorNIW {
  Vec3 mu_n = Vec3::Zero();
  double kappa_n = 0.0;
  double nu_n = 0.0;
  Mat3 psi_n = Mat3::Zero();
};

/// One sampler state: concept assignments, the parameter draw they
/// condition on, and the joint log-probability of the pair.
struct GibbsState {
  std::vector<int> assignments;
  ConceptModel model;
  int iteration = 0;
  double joint_logprob = -std::numeric_limits<double>::infinity();
};

/// Which sweep's draw becomes the returned model.
enum class ModelSelection {
  MapOverTrace,  // sweep with the highest joint log-probability
  FinalSweep,
};

struct GibbsOptions {
  int iterations = 100;
  ModelSelection selection = ModelSelection::MapOverTrace;
  /// Called after every sweep with the freshly updated state.
  std::function<void(const GibbsState&)> observer;
};

struct GibbsResult {
  GibbsState state;           // selected per GibbsOptions::selection
  std::vector<double> trace;  // joint log-probability per sweep
};

/// Draws C_i from the normalized per-concept product of Gaussian,
/// class, word and mixing factors (max-shifted exponentiation).
/// Throws UnnormalizableAssignmentError when every factor is -inf.
int sample_assignment(std::size_t i, const GibbsState& state,
                      const LabeledDataset& data, Rng& rng);

/// Standard conjugate update: kappa' = kappa0 + n, nu' = nu0 + n,
/// mu' = (kappa0 mu0 + n xbar) / kappa',
/// psi' = psi0 + S + (kappa0 n / kappa')(xbar - mu0)(xbar - mu0)^T
/// with S the scatter about xbar. Empty input returns the prior.
PosteriorNIW niw_posterior(const std::vector<Vec3>& points, const Hyperparams& h);

/// Per-concept Gaussian block: Sigma_k ~ IW(psi'_k, nu'_k) then
/// mu_k ~ N(mu'_k, Sigma_k / kappa'_k). Concepts with no points draw
/// from the prior. Writes mu/sigma for every k into `model`.
void sample_gaussian_params(const std::vector<std::vector<Vec3>>& points_per_concept,
                            const Hyperparams& h, Rng& rng, ConceptModel& model);

/// Dirichlet block for one distribution: a draw with concentration
/// prior + counts, the symmetric prior broadcast over all categories.
std::vector<double> sample_dirichlet_params(const std::vector<double>& counts,
                                            double concentration, Rng& rng);

/// Joint log-probability of (assignments, model) under the full
/// generative model: complete-data likelihood plus parameter priors.
double joint_log_prob(const GibbsState& state, const LabeledDataset& data,
                      const Hyperparams& h);

/// Conjugate posterior means of every parameter given fixed assignments:
/// mu_k = mu'_k, Sigma_k = psi'_k/(nu'_k - 4), phi/eta/pi = normalized
/// prior-plus-count vectors. This smoothed readout is what planning
/// consumes; single Dirichlet draws are far too heavy-tailed for the
/// definedness threshold to separate trained from never-trained classes.
ConceptModel posterior_mean_model(const LabeledDataset& data,
                                  const std::vector<int>& assignments,
                                  const Hyperparams& h);

/// Runs `iterations` full sweeps (assignments, then Gaussian and
/// Dirichlet parameter blocks) from a random initialization.
/// Deterministic given the seed. The returned state carries the
/// posterior-mean readout of the selected sweep's assignments, with
/// joint_logprob recomputed for that readout; the trace and the
/// in-sweep conditionals use sampled draws throughout.
GibbsResult gibbs_fit(const LabeledDataset& data, const Hyperparams& h,
                      const GibbsOptions& opts, std::uint64_t seed);

}  // namespace tidyplan
