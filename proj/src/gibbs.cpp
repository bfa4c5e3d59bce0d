#include "tidyplan/gibbs.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "tidyplan/logdensity.hpp"

namespace tidyplan {
namespace {

std::vector<std::vector<Vec3>> group_points(const LabeledDataset& data,
                                            const std::vector<int>& assignments,
                                            int K) {
  std::vector<std::vector<Vec3>> grouped(static_cast<std::size_t>(K));
  for (std::size_t i = 0; i < data.size(); ++i) {
    grouped[static_cast<std::size_t>(assignments[i])].push_back(
        data.observations[i].position);
  }
  return grouped;
}

/// Assignment-conditioned sufficient statistics for the categorical blocks.
struct CountTables {
  std::vector<double> concepts;
  std::vector<std::vector<double>> classes;
  std::vector<std::vector<double>> words;
};

CountTables tally(const LabeledDataset& data, const std::vector<int>& assignments,
                  int K, int L, int M) {
  CountTables t;
  const auto Ku = static_cast<std::size_t>(K);
  t.concepts.assign(Ku, 0.0);
  t.classes.assign(Ku, std::vector<double>(static_cast<std::size_t>(L), 0.0));
  t.words.assign(Ku, std::vector<double>(static_cast<std::size_t>(M), 0.0));
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto k = static_cast<std::size_t>(assignments[i]);
    const Observation& obs = data.observations[i];
    t.concepts[k] += 1.0;
    t.classes[k][static_cast<std::size_t>(obs.object_class)] += 1.0;
    for (int w : obs.words) t.words[k][static_cast<std::size_t>(w)] += 1.0;
  }
  return t;
}

std::vector<double> dirichlet_mean(const std::vector<double>& counts,
                                   double concentration) {
  std::vector<double> mean(counts.size());
  double total = 0.0;
  for (double c : counts) total += c;
  total += concentration * static_cast<double>(counts.size());
  for (std::size_t v = 0; v < counts.size(); ++v) {
    mean[v] = (concentration + counts[v]) / total;
  }
  return mean;
}

/// Dirichlet block for phi, eta and pi given the current assignments.
void sample_categorical_params(const LabeledDataset& data,
                               const std::vector<int>& assignments,
                               const Hyperparams& h, Rng& rng,
                               ConceptModel& model) {
  const auto K = static_cast<std::size_t>(model.K);
  const CountTables t = tally(data, assignments, model.K, model.L, model.M);
  model.phi.resize(K);
  model.eta.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    model.phi[k] = sample_dirichlet_params(t.classes[k], h.alpha, rng);
    if (model.M > 0) {
      model.eta[k] = sample_dirichlet_params(t.words[k], h.beta, rng);
    } else {
      model.eta[k].clear();
    }
  }
  // Weak-limit mixture weights: the finite stand-in for GEM(gamma) is a
  // symmetric Dir(gamma/K), so empty concepts keep O(gamma/(K*I)) mass.
  model.pi = sample_dirichlet_params(t.concepts,
                                     h.gamma / static_cast<double>(model.K), rng);
}

/// k-means++ style spread of initial seed positions over the data.
/// Seeding stops early once the residual squared distance to the
/// nearest seed drops below 1% of its initial total: past that point
/// only within-cluster scatter remains, and a further seed would split
/// a tight cluster between twin concepts whose merge by single-point
/// reassignment is prohibitively slow. Surplus concepts start empty
/// instead. The chain's stationary distribution does not depend on the
/// init.
std::vector<Vec3> seed_positions(const LabeledDataset& data, int K, Rng& rng) {
  constexpr double kResidualFraction = 0.01;
  const std::size_t n = data.size();
  std::vector<Vec3> seeds;
  seeds.reserve(static_cast<std::size_t>(K));
  std::vector<double> dist2(n, std::numeric_limits<double>::infinity());
  double initial_total = 0.0;
  for (int k = 0; k < K; ++k) {
    std::size_t pick = 0;
    if (seeds.empty()) {
      pick = static_cast<std::size_t>(rng.uniform_int(static_cast<int>(n)));
    } else {
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d2 =
            (data.observations[i].position - seeds.back()).squaredNorm();
        dist2[i] = std::min(dist2[i], d2);
        total += dist2[i];
      }
      if (seeds.size() == 1) initial_total = total;
      if (total <= kResidualFraction * initial_total) break;
      double u = rng.uniform() * total;
      for (std::size_t i = 0; i < n; ++i) {
        u -= dist2[i];
        if (u <= 0.0 || i + 1 == n) {
          pick = i;
          break;
        }
      }
    }
    seeds.push_back(data.observations[pick].position);
  }
  return seeds;
}

int nearest_seed(const Vec3& x, const std::vector<Vec3>& seeds) {
  int best = 0;
  double best_d2 = (x - seeds[0]).squaredNorm();
  for (std::size_t k = 1; k < seeds.size(); ++k) {
    const double d2 = (x - seeds[k]).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best = static_cast<int>(k);
    }
  }
  return best;
}

}  // namespace

int sample_assignment(std::size_t i, const GibbsState& state,
                      const LabeledDataset& data, Rng& rng) {
  const Observation& obs = data.observations[i];
  std::vector<double> log_weights(static_cast<std::size_t>(state.model.K));
  for (int k = 0; k < state.model.K; ++k) {
    log_weights[static_cast<std::size_t>(k)] =
        object_logfactor(obs.position, obs.object_class, obs.words, k, state.model);
  }
  return rng.categorical_from_log(log_weights);
}

PosteriorNIW niw_posterior(const std::vector<Vec3>& points, const Hyperparams& h) {
  PosteriorNIW post;
  const auto n = static_cast<double>(points.size());
  post.kappa_n = h.kappa0 + n;
  post.nu_n = h.nu0 + n;
  if (points.empty()) {
    post.mu_n = h.mu0;
    post.psi_n = h.psi0;
    return post;
  }
  Vec3 xbar = Vec3::Zero();
  for (const Vec3& x : points) xbar += x;
  xbar /= n;
  Mat3 scatter = Mat3::Zero();
  for (const Vec3& x : points) {
    const Vec3 d = x - xbar;
    scatter += d * d.transpose();
  }
  post.mu_n = (h.kappa0 * h.mu0 + n * xbar) / post.kappa_n;
  const Vec3 shift = xbar - h.mu0;
  post.psi_n = h.psi0 + scatter +
               (h.kappa0 * n / post.kappa_n) * (shift * shift.transpose());
  return post;
}

void sample_gaussian_params(const std::vector<std::vector<Vec3>>& points_per_concept,
                            const Hyperparams& h, Rng& rng, ConceptModel& model) {
  const auto K = points_per_concept.size();
  model.mu.resize(K);
  model.sigma.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    const PosteriorNIW post = niw_posterior(points_per_concept[k], h);
    model.sigma[k] = rng.inverse_wishart(post.psi_n, post.nu_n);
    model.mu[k] = rng.multivariate_normal(post.mu_n, model.sigma[k] / post.kappa_n);
  }
}

std::vector<double> sample_dirichlet_params(const std::vector<double>& counts,
                                            double concentration, Rng& rng) {
  std::vector<double> conc(counts.size());
  for (std::size_t v = 0; v < counts.size(); ++v) conc[v] = concentration + counts[v];
  return rng.dirichlet(conc);
}

double joint_log_prob(const GibbsState& state, const LabeledDataset& data,
                      const Hyperparams& h) {
  const ConceptModel& m = state.model;
  double lp = 0.0;
  // Parameter priors.
  lp += dirichlet_logpdf(m.pi, h.gamma / static_cast<double>(m.K));
  for (int k = 0; k < m.K; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    lp += inverse_wishart_logpdf(m.sigma[ku], h.psi0, h.nu0);
    lp += gaussian_logpdf(m.mu[ku], h.mu0, m.sigma[ku] / h.kappa0);
    lp += dirichlet_logpdf(m.phi[ku], h.alpha);
    if (m.M > 0) lp += dirichlet_logpdf(m.eta[ku], h.beta);
  }
  // Complete-data likelihood.
  std::vector<GaussianEval> eval;
  eval.reserve(static_cast<std::size_t>(m.K));
  for (int k = 0; k < m.K; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    eval.emplace_back(m.mu[ku], m.sigma[ku]);
  }
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Observation& obs = data.observations[i];
    const auto k = static_cast<std::size_t>(state.assignments[i]);
    lp += eval[k].logpdf(obs.position);
    lp += std::log(m.phi[k][static_cast<std::size_t>(obs.object_class)]);
    lp += wordbag_logpmf(obs.words, m.eta[k]);
    lp += std::log(m.pi[k]);
  }
  return lp;
}

ConceptModel posterior_mean_model(const LabeledDataset& data,
                                  const std::vector<int>& assignments,
                                  const Hyperparams& h) {
  ConceptModel model;
  model.K = h.K;
  model.L = data.num_classes;
  model.M = data.num_words;
  const auto K = static_cast<std::size_t>(h.K);
  const CountTables t = tally(data, assignments, h.K, model.L, model.M);
  const std::vector<std::vector<Vec3>> grouped =
      group_points(data, assignments, h.K);
  model.mu.resize(K);
  model.sigma.resize(K);
  model.phi.resize(K);
  model.eta.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    const PosteriorNIW post = niw_posterior(grouped[k], h);
    model.mu[k] = post.mu_n;
    model.sigma[k] = post.psi_n / (post.nu_n - 4.0);  // IW mean, nu > 4
    model.phi[k] = dirichlet_mean(t.classes[k], h.alpha);
    if (model.M > 0) model.eta[k] = dirichlet_mean(t.words[k], h.beta);
  }
  model.pi = dirichlet_mean(t.concepts, h.gamma / static_cast<double>(h.K));
  validate(model);
  return model;
}

GibbsResult gibbs_fit(const LabeledDataset& data, const Hyperparams& h,
                      const GibbsOptions& opts, std::uint64_t seed) {
  validate(h);
  validate(data);
  if (opts.iterations < 1) throw std::invalid_argument("iterations must be >= 1");
  if (data.observations.empty()) throw std::invalid_argument("dataset is empty");

  Rng rng(seed);
  GibbsState state;
  state.model.K = h.K;
  state.model.L = data.num_classes;
  state.model.M = data.num_words;
  // Initial assignments: nearest k-means++ seed, so well-separated spatial
  // clusters each start with their own concept instead of a shared one.
  const std::vector<Vec3> seeds = seed_positions(data, h.K, rng);
  state.assignments.resize(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    state.assignments[i] = nearest_seed(data.observations[i].position, seeds);
  }
  sample_gaussian_params(group_points(data, state.assignments, h.K), h, rng,
                         state.model);
  sample_categorical_params(data, state.assignments, h, rng, state.model);

  GibbsResult result;
  result.trace.reserve(static_cast<std::size_t>(opts.iterations));
  GibbsState best;
  for (int t = 1; t <= opts.iterations; ++t) {
    // Assignment block reads the fixed parameter draw of the previous sweep.
    for (std::size_t i = 0; i < data.size(); ++i) {
      state.assignments[i] = sample_assignment(i, state, data, rng);
    }
    sample_gaussian_params(group_points(data, state.assignments, h.K), h, rng,
                           state.model);
    sample_categorical_params(data, state.assignments, h, rng, state.model);
    state.iteration = t;
    state.joint_logprob = joint_log_prob(state, data, h);
    result.trace.push_back(state.joint_logprob);
    if (opts.observer) opts.observer(state);
    if (best.assignments.empty() || state.joint_logprob > best.joint_logprob) {
      best = state;
    }
  }
  result.state =
      opts.selection == ModelSelection::MapOverTrace ? std::move(best) : std::move(state);
  // Planning consumes the smoothed (posterior-mean) readout of the selected
  // assignments, not that sweep's parameter draw; see posterior_mean_model.
  result.state.model = posterior_mean_model(data, result.state.assignments, h);
  result.state.joint_logprob = joint_log_prob(result.state, data, h);
  return result;
}

}  // namespace tidyplan
