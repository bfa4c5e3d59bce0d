#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "tidyplan/sim.hpp"
#include "tidyplan/stats.hpp"

namespace tidyplan {

struct EvaluateOptions {
  std::vector<PlannerKind> planners = {PlannerKind::Proposed, PlannerKind::Baseline1,
                                       PlannerKind::Baseline2};
  int trials = 10;
  std::uint64_t seed_base = 0;
  NoiseProfile noise;
  double lambda = 0.003;
  int steps = 0;  // step budget per episode; 0 means the scatter count
  bool defer_unknowns = false;
  bool baseline2_same_class = false;
  Vec3 robot_start = Vec3::Zero();
};

struct PlannerEvaluation {
  PlannerKind planner = PlannerKind::Proposed;
  std::vector<int> scores;     // per trial
  int score_max = 0;
  double score_mean = 0.0;
  std::vector<SampleStats> step_stats;            // over trials, per step
  std::vector<std::vector<double>> step_logliks;  // [trial][step], padded
  std::vector<double> trial_means;                // across-step mean per trial
};

struct PairwiseTest {
  PlannerKind a = PlannerKind::Proposed;
  PlannerKind b = PlannerKind::Baseline1;
  WelchResult across_trial_means;
  std::vector<WelchResult> per_step;
};

struct EvaluateReport {
  std::vector<PlannerEvaluation> planners;
  std::vector<PairwiseTest> tests;  // proposed vs each other planner
  std::uint64_t config_hash = 0;
  int steps = 0;
  int trials = 0;
};

/// Runs `trials` episodes per planner with per-trial seeds
/// seed_base + trial so every planner faces the same scattered scenes,
/// then aggregates scores, per-step log-likelihood statistics and
/// pairwise significance tests against the proposed planner.
/// Episodes that halt early are padded with their last recorded
/// log-likelihood (the scene no longer changes).
EvaluateReport evaluate(const Scenario& scenario, const ConceptModel& model,
                        const TidyDatabase& db, Oracle* oracle,
                        const EvaluateOptions& options);

std::string planner_name(PlannerKind kind);

std::uint64_t fnv1a_hash(const std::string& text);

nlohmann::json report_to_json(const EvaluateReport& report);

/// Human-readable score and significance summary.
std::string report_summary(const EvaluateReport& report);

/// CSV `planner,step,mean,sd` (sd empty for a single trial).
std::string report_steps_csv(const EvaluateReport& report);

/// CSV `planner,trial,score,max`; the trial index is also the seed
/// offset from seed_base.
std::string report_scores_csv(const EvaluateReport& report);

}  // namespace tidyplan
