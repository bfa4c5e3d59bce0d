#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tidyplan/baselines.hpp"
#include "tidyplan/planner.hpp"
#include "tidyplan/rng.hpp"
#include "tidyplan/types.hpp"

namespace tidyplan {

enum class Stage { Stage1, Stage2_1, Stage2_2 };

/// A named destination region: center, acceptance radius and the
/// index of the word naming it (-1 when the stage has no word list).
struct Place {
  std::string name;
  Vec3 center = Vec3::Zero();
  double radius = 0.3;
  int word = -1;
};

/// One object class of the episode pool with its true tidied place.
/// Unknown classes never appear in training data but keep a place so
/// the oracle and the scorer know where they belong.
struct PoolObject {
  std::string class_name;
  int place = 0;  // index into Scenario::places
  bool is_unknown = false;
};

struct ScatterSpec {
  int count = 10;       // objects per episode
  Vec3 lo = Vec3::Zero();  // floor region corners
  Vec3 hi = Vec3::Zero();
};

struct Scenario {
  Stage stage = Stage::Stage1;
  std::string name;
  std::vector<Place> places;
  std::vector<PoolObject> pool;  // pool index == object class index
  ScatterSpec scatter_spec;
  std::vector<std::string> word_names;
  double word_fraction = 0.05;  // fraction of training records carrying a word
  int training_count = 225;
  Hyperparams hyperparams;
  /// False when the scenario leaves mu0 unset; training then uses the
  /// dataset position mean.
  bool mu0_specified = false;

  [[nodiscard]] int num_classes() const { return static_cast<int>(pool.size()); }
  [[nodiscard]] int num_words() const { return static_cast<int>(word_names.size()); }
};

/// Throws std::invalid_argument on inconsistent geometry or indices.
void validate(const Scenario& scenario);

/// Execution-noise stand-in for the perception/manipulation stack.
struct NoiseProfile {
  double detection_accuracy = 1.0;
  double grasp_success = 1.0;
  double release_success = 1.0;
  double position_jitter_sd = 0.0;  // meters, isotropic
};

/// Per-stage failure rates measured on the robot stack; detection,
/// grasp and release in stage order.
NoiseProfile stage_noise_profile(Stage stage);

struct ScoreLine {
  std::string rule;
  int points_each = 0;
  int count = 0;

  [[nodiscard]] int subtotal() const { return points_each * count; }
};

struct ScoreSheet {
  std::vector<ScoreLine> lines;
  int total = 0;
  int max_possible = 0;
};

struct EpisodeEvent {
  int step = 0;
  std::string event;  // detect | plan | query | grasp | grasp_failed | release | release_failed | halt
  int object_id = -1;
  std::optional<double> loglik;  // present on the event completing a step
};

struct EpisodeLog {
  std::vector<EpisodeEvent> events;
  std::vector<double> step_logliks;  // one per completed step
  double initial_loglik = 0.0;       // scene log-likelihood before any step
  std::string loglik_basis = "true-positions";
};

/// Observations of the tidied environment: per record a known class
/// at its place center plus optional jitter; labels corrupted with
/// probability 1 - detection_accuracy; a round(word_fraction * count)
/// subset of records carries its place's name word, spread evenly
/// over places.
LabeledDataset generate_training_data(const Scenario& scenario, int count,
                                      const NoiseProfile& noise,
                                      std::uint64_t seed);

/// Episode start state: n objects uniformly placed in the scatter
/// region. Every unknown pool class is included first; the remainder
/// is a no-replacement draw of known classes.
std::vector<DetectedObject> scatter(const Scenario& scenario, int n_objects,
                                    std::uint64_t seed);

/// Perception pass: classes flipped to a uniformly random other class
/// with probability 1 - detection_accuracy, positions jittered.
std::vector<DetectedObject> observe(const std::vector<DetectedObject>& truth,
                                    int num_classes, const NoiseProfile& noise,
                                    Rng& rng);

enum class StepOutcome { Moved, GraspFailed, ReleaseFailed };

/// Bernoulli grasp then Bernoulli release against the true object
/// state. Grasp failure leaves the object in place; release failure
/// drops it uniformly within 0.5 m of the target; success places it
/// exactly at the target. Throws StalePlanError for an absent object.
StepOutcome execute_step(std::vector<DetectedObject>& objects, const PlanStep& step,
                         const NoiseProfile& noise, Rng& rng);

/// Competition scoring over final true positions. Stage 1: 3 points
/// per object inside any box region plus 2 inside its correct box.
/// Stage 2: 5 points per object inside its correct place's radius
/// plus 3 per correctly placed unknown object.
ScoreSheet score(const Scenario& scenario,
                 const std::vector<DetectedObject>& final_objects);

enum class PlannerKind { Proposed, Baseline1, Baseline2 };

struct EpisodeConfig {
  PlannerKind planner = PlannerKind::Proposed;
  PlannerConfig planner_config;  // lambda and the step budget N
  NoiseProfile noise;
  Vec3 robot_start = Vec3::Zero();
  const TidyDatabase* db = nullptr;  // required by the baselines
  bool baseline2_same_class = false;
};

struct EpisodeResult {
  ScoreSheet score;
  EpisodeLog log;
  std::vector<DetectedObject> final_objects;
};

/// Full episode: scatter, then N cycles of re-observation, planning
/// and execution, recording the scene log-likelihood over true
/// positions after each cycle. Objects leave the candidate set once
/// grasped; the episode halts early when no candidate can be planned.
EpisodeResult run_episode(const Scenario& scenario, const ConceptModel& model,
                          const EpisodeConfig& config, Oracle* oracle,
                          std::uint64_t seed);

/// The scripted stand-in for a human: answers with the word naming
/// the object's true place.
ScriptedOracle truth_oracle(const Scenario& scenario);

}  // namespace tidyplan
