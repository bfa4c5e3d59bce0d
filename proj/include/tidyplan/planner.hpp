#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <vector>

#include "tidyplan/types.hpp"

namespace tidyplan {

/// One detected object at planning time: position, class index and a
/// stable identifier. Detections carry no words.
struct DetectedObject {
  int id = 0;
  Vec3 position = Vec3::Zero();
  int object_class = 0;
};

/// One planned tidy action. `decision_log_ratio` is the ratio that won
/// object selection; `log_ratio` is recomputed against the post-query
/// target when the object was flagged unknown (equal otherwise).
struct PlanStep {
  int object_id = -1;
  int concept_index = -1;  // C_d* ("concept" is a keyword)
  Vec3 target = Vec3::Zero();
  double definedness = 0.0;  // P_d at decision time
  double log_ratio = 0.0;
  double decision_log_ratio = 0.0;
  bool unknown_flag = false;
  std::optional<int> resolved_word;
};

enum class TieBreak {
  LowestId,  // the only rule: lowest concept index / lowest object id
};

struct PlannerConfig {
  double lambda = 0.003;  // unknown-object threshold (strict: unknown iff P_d < lambda)
  int N = 0;              // objects to tidy; plan_sequence emits exactly N steps
  TieBreak tie_break = TieBreak::LowestId;
  /// When true, objects below lambda are planned only after every
  /// known object has been handled (prose variant); default follows
  /// the per-iteration interleaving of the planning algorithm.
  bool defer_unknowns = false;
};

/// Answers "where does this object belong?" with a place-word index.
class Oracle {
public:
  virtual ~Oracle() = default;
  virtual int place_word(const DetectedObject& obj) = 0;
};

/// Fixed class-to-word map. Throws UnresolvedUnknownError for an
/// unmapped class.
class ScriptedOracle : public Oracle {
public:
  explicit ScriptedOracle(std::map<int, int> class_to_word)
      : class_to_word_(std::move(class_to_word)) {}
  int place_word(const DetectedObject& obj) override;

private:
  std::map<int, int> class_to_word_;
};

/// Terminal prompt: prints the object, reads a word name (or index)
/// and resolves it against the vocabulary.
class InteractiveOracle : public Oracle {
public:
  InteractiveOracle(std::istream& in, std::ostream& out,
                    std::vector<std::string> word_names,
                    std::vector<std::string> class_names);
  int place_word(const DetectedObject& obj) override;

private:
  std::istream& in_;
  std::ostream& out_;
  std::vector<std::string> word_names_;
  std::vector<std::string> class_names_;
};

struct ConceptChoice {
  int concept_index = -1;
  double definedness = 0.0;
};

/// C_d* = argmax_k phi_k[class] pi_k with the maximum as P_d.
/// Ties go to the lowest concept index.
ConceptChoice select_concept(int object_class, const ConceptModel& model);

/// The tidied position x_d* = mu of the selected concept.
Vec3 target_position(int concept_index, const ConceptModel& model);

/// ln of the mixture likelihood ratio between x_target and x_d:
///   ln sum_k N(x_target|mu_k,Sigma_k) phi_k[class] pi_k
/// - ln sum_k N(x_d    |mu_k,Sigma_k) phi_k[class] pi_k
/// Throws UndefinedRatioError when both sums are zero.
double log_likelihood_ratio(const Vec3& x_d, const Vec3& x_target,
                            int object_class, const ConceptModel& model);

/// Sum over detections of the per-object log mixture likelihood.
/// Empty list gives 0; an object with zero mixture mass gives -inf.
double marginal_object_loglik(const std::vector<DetectedObject>& detections,
                              const ConceptModel& model);

/// argmax_k eta_k[word] pi_k. Throws UnresolvableWordError when the
/// word has zero mass under every concept.
int resolve_unknown(int word, const ConceptModel& model);

/// Multi-word variant: argmax_k [sum_w ln eta_k[w]] + ln pi_k.
int resolve_unknown(const std::vector<int>& words, const ConceptModel& model);

/// One planning iteration: per object d computes (C_d*, x' = mu_{C_d*},
/// ln R_d), picks the maximizing d* (ties to lowest id), and when
/// P_{d*} < lambda queries the oracle and re-derives concept/target
/// from the answered word. Throws UnresolvedUnknownError when a query
/// is needed but no oracle is supplied.
PlanStep plan_next(const std::vector<DetectedObject>& detections,
                   const ConceptModel& model, const PlannerConfig& config,
                   Oracle* oracle);

/// Caller-supplied re-detection between steps: maps the remaining set
/// to a fresh detection list.
using RefreshHook =
    std::function<std::vector<DetectedObject>(const std::vector<DetectedObject>&)>;

/// config.N iterations of plan_next, removing the chosen object from
/// the working set between iterations.
std::vector<PlanStep> plan_sequence(const std::vector<DetectedObject>& detections,
                                    const ConceptModel& model,
                                    const PlannerConfig& config, Oracle* oracle,
                                    const RefreshHook& refresh = nullptr);

struct BatchPlan {
  std::vector<int> object_ids;  // ascending
  std::vector<Vec3> targets;    // parallel to object_ids
  double total_log_ratio = 0.0;
};

/// Exhaustive maximization of the summed per-object log ratios over
/// all size-N subsets, targets fixed at each object's concept mean.
/// Exists as the equivalence oracle for plan_sequence; requires the
/// testing scale D <= 8.
BatchPlan batch_plan(const std::vector<DetectedObject>& detections,
                     const ConceptModel& model, int N);

}  // namespace tidyplan
