#include "tidyplan/planner.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

#include "tidyplan/logdensity.hpp"

namespace tidyplan {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// ln sum_k N(x|mu_k,Sigma_k) phi_k[class] pi_k, the per-object
/// mixture term shared by the ratio and the marginal likelihood.
double mixture_loglik(const Vec3& x, int object_class, const ConceptModel& model) {
  const auto cu = static_cast<std::size_t>(object_class);
  if (object_class < 0 || object_class >= model.L) {
    throw std::invalid_argument("object class out of range");
  }
  std::vector<double> terms(static_cast<std::size_t>(model.K));
  for (int k = 0; k < model.K; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    double term = gaussian_logpdf(x, model.mu[ku], model.sigma[ku]);
    const double mass = model.phi[ku][cu] * model.pi[ku];
    term += mass > 0.0 ? std::log(mass) : kNegInf;
    terms[ku] = term;
  }
  return log_sum_exp(terms);
}

}  // namespace

int ScriptedOracle::place_word(const DetectedObject& obj) {
  const auto it = class_to_word_.find(obj.object_class);
  if (it == class_to_word_.end()) {
    throw UnresolvedUnknownError("no scripted answer for object class " +
                                 std::to_string(obj.object_class));
  }
  return it->second;
}

InteractiveOracle::InteractiveOracle(std::istream& in, std::ostream& out,
                                     std::vector<std::string> word_names,
                                     std::vector<std::string> class_names)
    : in_(in), out_(out), word_names_(std::move(word_names)),
      class_names_(std::move(class_names)) {}

int InteractiveOracle::place_word(const DetectedObject& obj) {
  const auto cu = static_cast<std::size_t>(obj.object_class);
  const std::string label = cu < class_names_.size()
                                ? class_names_[cu]
                                : "class " + std::to_string(obj.object_class);
  out_ << "Where should I put the " << label << " (object " << obj.id << ")?\n";
  out_ << "Known places:";
  for (const std::string& w : word_names_) out_ << ' ' << w;
  out_ << "\n> " << std::flush;
  std::string answer;
  if (!(in_ >> answer)) {
    throw UnresolvedUnknownError("no answer received for object " +
                                 std::to_string(obj.id));
  }
  for (std::size_t m = 0; m < word_names_.size(); ++m) {
    if (word_names_[m] == answer) return static_cast<int>(m);
  }
  try {
    const int index = std::stoi(answer);
    if (index >= 0 && static_cast<std::size_t>(index) < word_names_.size()) {
      return index;
    }
  } catch (const std::exception&) {
  }
  throw UnresolvedUnknownError("answer '" + answer + "' is not a known place word");
}

ConceptChoice select_concept(int object_class, const ConceptModel& model) {
  if (object_class < 0 || object_class >= model.L) {
    throw std::invalid_argument("object class out of range");
  }
  const auto cu = static_cast<std::size_t>(object_class);
  ConceptChoice choice;
  for (int k = 0; k < model.K; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const double score = model.phi[ku][cu] * model.pi[ku];
    if (score > choice.definedness || choice.concept_index < 0) {
      choice.concept_index = k;
      choice.definedness = score;
    }
  }
  return choice;
}

Vec3 target_position(int concept_index, const ConceptModel& model) {
  if (concept_index < 0 || concept_index >= model.K) {
    throw std::invalid_argument("concept index out of range");
  }
  return model.mu[static_cast<std::size_t>(concept_index)];
}

double log_likelihood_ratio(const Vec3& x_d, const Vec3& x_target,
                            int object_class, const ConceptModel& model) {
  const double numerator = mixture_loglik(x_target, object_class, model);
  const double denominator = mixture_loglik(x_d, object_class, model);
  if (numerator == kNegInf && denominator == kNegInf) {
    throw UndefinedRatioError("zero mixture mass at both positions");
  }
  return numerator - denominator;
}

double marginal_object_loglik(const std::vector<DetectedObject>& detections,
                              const ConceptModel& model) {
  double total = 0.0;
  for (const DetectedObject& obj : detections) {
    total += mixture_loglik(obj.position, obj.object_class, model);
  }
  return total;
}

int resolve_unknown(int word, const ConceptModel& model) {
  if (word < 0 || word >= model.M) {
    throw std::invalid_argument("word index out of range");
  }
  const auto wu = static_cast<std::size_t>(word);
  int best = -1;
  double best_score = 0.0;
  for (int k = 0; k < model.K; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const double score = model.eta[ku][wu] * model.pi[ku];
    if (score > best_score) {
      best = k;
      best_score = score;
    }
  }
  if (best < 0) {
    throw UnresolvableWordError("word " + std::to_string(word) +
                                " has zero mass under every concept");
  }
  return best;
}

int resolve_unknown(const std::vector<int>& words, const ConceptModel& model) {
  if (words.empty()) throw std::invalid_argument("empty word bag");
  int best = -1;
  double best_score = kNegInf;
  for (int k = 0; k < model.K; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    double score = wordbag_logpmf(words, model.eta[ku]);
    const double pi_k = model.pi[ku];
    score += pi_k > 0.0 ? std::log(pi_k) : kNegInf;
    if (score > best_score) {
      best = k;
      best_score = score;
    }
  }
  if (best < 0 || best_score == kNegInf) {
    throw UnresolvableWordError("word bag has zero mass under every concept");
  }
  return best;
}

PlanStep plan_next(const std::vector<DetectedObject>& detections,
                   const ConceptModel& model, const PlannerConfig& config,
                   Oracle* oracle) {
  if (detections.empty()) throw std::invalid_argument("no detections to plan over");

  struct Candidate {
    std::size_t index;
    ConceptChoice choice;
    Vec3 target;
    double log_ratio;
  };
  std::optional<Candidate> best;
  std::optional<Candidate> best_unknown;  // fallback under defer_unknowns
  auto better = [](const Candidate& a, const Candidate& b,
                   const std::vector<DetectedObject>& objs) {
    if (a.log_ratio != b.log_ratio) return a.log_ratio > b.log_ratio;
    return objs[a.index].id < objs[b.index].id;
  };
  for (std::size_t d = 0; d < detections.size(); ++d) {
    const DetectedObject& obj = detections[d];
    Candidate cand;
    cand.index = d;
    cand.choice = select_concept(obj.object_class, model);
    cand.target = target_position(cand.choice.concept_index, model);
    cand.log_ratio =
        log_likelihood_ratio(obj.position, cand.target, obj.object_class, model);
    const bool unknown = cand.choice.definedness < config.lambda;
    if (config.defer_unknowns && unknown) {
      if (!best_unknown || better(cand, *best_unknown, detections)) {
        best_unknown = cand;
      }
    } else if (!best || better(cand, *best, detections)) {
      best = cand;
    }
  }
  if (!best) best = best_unknown;  // only unknowns remain

  const DetectedObject& obj = detections[best->index];
  PlanStep step;
  step.object_id = obj.id;
  step.concept_index = best->choice.concept_index;
  step.target = best->target;
  step.definedness = best->choice.definedness;
  step.decision_log_ratio = best->log_ratio;
  step.log_ratio = best->log_ratio;
  step.unknown_flag = best->choice.definedness < config.lambda;
  if (step.unknown_flag) {
    if (oracle == nullptr) {
      throw UnresolvedUnknownError("object " + std::to_string(obj.id) +
                                   " needs a place word but no oracle is available");
    }
    const int word = oracle->place_word(obj);
    step.resolved_word = word;
    step.concept_index = resolve_unknown(word, model);
    step.target = target_position(step.concept_index, model);
    step.log_ratio =
        log_likelihood_ratio(obj.position, step.target, obj.object_class, model);
  }
  return step;
}

std::vector<PlanStep> plan_sequence(const std::vector<DetectedObject>& detections,
                                    const ConceptModel& model,
                                    const PlannerConfig& config, Oracle* oracle,
                                    const RefreshHook& refresh) {
  if (config.N < 0 || static_cast<std::size_t>(config.N) > detections.size()) {
    throw std::invalid_argument("N must lie in [0, D]");
  }
  std::vector<DetectedObject> remaining = detections;
  std::vector<PlanStep> steps;
  steps.reserve(static_cast<std::size_t>(config.N));
  for (int n = 0; n < config.N; ++n) {
    PlanStep step = plan_next(remaining, model, config, oracle);
    std::erase_if(remaining,
                  [&](const DetectedObject& o) { return o.id == step.object_id; });
    steps.push_back(std::move(step));
    if (refresh) remaining = refresh(remaining);
  }
  return steps;
}

BatchPlan batch_plan(const std::vector<DetectedObject>& detections,
                     const ConceptModel& model, int N) {
  const int D = static_cast<int>(detections.size());
  if (D > 8) throw std::invalid_argument("batch_plan is limited to D <= 8");
  if (N < 0 || N > D) throw std::invalid_argument("N must lie in [0, D]");

  // Per-object ratio and target under the concept-mean rule; the joint
  // objective factorizes into these independent contributions.
  std::vector<std::size_t> order(detections.size());
  for (std::size_t d = 0; d < order.size(); ++d) order[d] = d;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return detections[a].id < detections[b].id;
  });
  std::vector<double> ratio(detections.size());
  std::vector<Vec3> target(detections.size());
  for (std::size_t d = 0; d < detections.size(); ++d) {
    const DetectedObject& obj = detections[d];
    const ConceptChoice choice = select_concept(obj.object_class, model);
    target[d] = target_position(choice.concept_index, model);
    ratio[d] =
        log_likelihood_ratio(obj.position, target[d], obj.object_class, model);
  }

  // Exhaustive subsets in lexicographic order over ids; strict
  // improvement keeps the lexicographically smallest maximizer.
  BatchPlan best;
  best.total_log_ratio = kNegInf;
  bool found = false;
  std::vector<int> pick(static_cast<std::size_t>(N));
  auto consider = [&]() {
    double total = 0.0;
    for (int p : pick) total += ratio[order[static_cast<std::size_t>(p)]];
    if (!found || total > best.total_log_ratio) {
      found = true;
      best.total_log_ratio = total;
      best.object_ids.clear();
      best.targets.clear();
      for (int p : pick) {
        const std::size_t d = order[static_cast<std::size_t>(p)];
        best.object_ids.push_back(detections[d].id);
        best.targets.push_back(target[d]);
      }
    }
  };
  // Standard combination walk over positions 0..D-1 of the sorted order.
  std::function<void(int, int)> walk = [&](int start, int slot) {
    if (slot == N) {
      consider();
      return;
    }
    for (int d = start; d <= D - (N - slot); ++d) {
      pick[static_cast<std::size_t>(slot)] = d;
      walk(d + 1, slot + 1);
    }
  };
  if (N == 0) {
    best.total_log_ratio = 0.0;
  } else {
    walk(0, 0);
  }
  return best;
}

}  // namespace tidyplan
