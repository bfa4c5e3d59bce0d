#include "tidyplan/sim.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <unordered_map>

namespace tidyplan {

void validate(const Scenario& scenario) {
  if (scenario.places.empty()) throw std::invalid_argument("scenario has no places");
  if (scenario.pool.empty()) throw std::invalid_argument("scenario has no object pool");
  const int P = static_cast<int>(scenario.places.size());
  const int M = scenario.num_words();
  for (const Place& place : scenario.places) {
    if (!(place.radius > 0.0)) {
      throw std::invalid_argument("place '" + place.name + "' needs a positive radius");
    }
    if (place.word < -1 || place.word >= M) {
      throw std::invalid_argument("place '" + place.name + "' has an invalid word index");
    }
  }
  for (const PoolObject& obj : scenario.pool) {
    if (obj.place < 0 || obj.place >= P) {
      throw std::invalid_argument("pool class '" + obj.class_name +
                                  "' maps to an invalid place");
    }
  }
  for (int axis = 0; axis < 3; ++axis) {
    if (scenario.scatter_spec.lo[axis] > scenario.scatter_spec.hi[axis]) {
      throw std::invalid_argument("scatter region corners are inverted");
    }
  }
  if (scenario.scatter_spec.count < 0 ||
      scenario.scatter_spec.count > scenario.num_classes()) {
    throw std::invalid_argument("scatter count must lie in [0, pool size]");
  }
  if (scenario.word_fraction < 0.0 || scenario.word_fraction > 1.0) {
    throw std::invalid_argument("word fraction must lie in [0, 1]");
  }
  if (scenario.training_count < 1) {
    throw std::invalid_argument("training count must be positive");
  }
}

NoiseProfile stage_noise_profile(Stage stage) {
  switch (stage) {
    case Stage::Stage1:
      return {1.00, 0.64, 0.84, 0.0};
    case Stage::Stage2_1:
      return {0.96, 0.69, 0.79, 0.0};
    case Stage::Stage2_2:
      return {0.95, 0.76, 0.68, 0.0};
  }
  throw std::invalid_argument("unknown stage");
}

namespace {

std::vector<int> known_classes(const Scenario& scenario) {
  std::vector<int> known;
  for (int c = 0; c < scenario.num_classes(); ++c) {
    if (!scenario.pool[static_cast<std::size_t>(c)].is_unknown) known.push_back(c);
  }
  return known;
}

LabeledDataset generate_training_data_impl(const Scenario& scenario, int count,
                                           const NoiseProfile& noise, Rng& rng) {
  validate(scenario);
  if (count < 1) throw std::invalid_argument("count must be at least 1");
  const std::vector<int> known = known_classes(scenario);
  if (known.empty()) throw std::invalid_argument("no known classes to observe");

  LabeledDataset data;
  data.num_classes = scenario.num_classes();
  data.num_words = scenario.num_words();
  for (const PoolObject& obj : scenario.pool) data.class_names.push_back(obj.class_name);
  data.word_names = scenario.word_names;

  std::vector<int> true_places(static_cast<std::size_t>(count));
  data.observations.resize(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const auto iu = static_cast<std::size_t>(i);
    const int c = known[static_cast<std::size_t>(rng.uniform_int(
        static_cast<int>(known.size())))];
    const int p = scenario.pool[static_cast<std::size_t>(c)].place;
    true_places[iu] = p;
    Observation& obs = data.observations[iu];
    obs.position = scenario.places[static_cast<std::size_t>(p)].center;
    if (noise.position_jitter_sd > 0.0) {
      for (int axis = 0; axis < 3; ++axis) {
        obs.position[axis] += noise.position_jitter_sd * rng.normal();
      }
    }
    obs.object_class = c;
    // Misrecognitions at training time stay within the classes present in
    // the environment; novel classes only appear later, during episodes.
    if (rng.uniform() >= noise.detection_accuracy && known.size() > 1) {
      const auto pos = static_cast<std::size_t>(
          std::find(known.begin(), known.end(), c) - known.begin());
      auto other = static_cast<std::size_t>(
          rng.uniform_int(static_cast<int>(known.size()) - 1));
      if (other >= pos) ++other;
      obs.object_class = known[other];
    }
  }

  // Attach place-name words to round(fraction * count) records, walking
  // the places round-robin so every place can be named at least once.
  if (data.num_words > 0 && scenario.word_fraction > 0.0) {
    const int n_words = static_cast<int>(
        std::lround(scenario.word_fraction * static_cast<double>(count)));
    const int P = static_cast<int>(scenario.places.size());
    for (int j = 0; j < n_words; ++j) {
      const int p = j % P;
      const int word = scenario.places[static_cast<std::size_t>(p)].word;
      if (word < 0) continue;  // unnamed place
      std::vector<std::size_t> eligible;
      for (std::size_t i = 0; i < data.observations.size(); ++i) {
        if (true_places[i] == p && data.observations[i].words.empty()) {
          eligible.push_back(i);
        }
      }
      if (eligible.empty()) {
        for (std::size_t i = 0; i < data.observations.size(); ++i) {
          if (data.observations[i].words.empty()) eligible.push_back(i);
        }
      }
      if (eligible.empty()) break;  // every record already carries a word
      const std::size_t pick = eligible[static_cast<std::size_t>(
          rng.uniform_int(static_cast<int>(eligible.size())))];
      data.observations[pick].words.push_back(word);
    }
  }

  data.truth_assignments = std::move(true_places);
  return data;
}

std::vector<DetectedObject> scatter_impl(const Scenario& scenario, int n_objects,
                                         Rng& rng) {
  validate(scenario);
  if (n_objects < 0 || n_objects > scenario.num_classes()) {
    throw std::invalid_argument("object count must lie in [0, pool size]");
  }
  std::vector<int> unknown;
  std::vector<int> known;
  for (int c = 0; c < scenario.num_classes(); ++c) {
    (scenario.pool[static_cast<std::size_t>(c)].is_unknown ? unknown : known)
        .push_back(c);
  }
  std::vector<int> chosen;
  if (n_objects <= static_cast<int>(unknown.size())) {
    for (int pick : rng.sample_without_replacement(
             static_cast<int>(unknown.size()), n_objects)) {
      chosen.push_back(unknown[static_cast<std::size_t>(pick)]);
    }
  } else {
    chosen = unknown;
    const int rest = n_objects - static_cast<int>(unknown.size());
    for (int pick :
         rng.sample_without_replacement(static_cast<int>(known.size()), rest)) {
      chosen.push_back(known[static_cast<std::size_t>(pick)]);
    }
  }
  std::vector<DetectedObject> objects;
  objects.reserve(chosen.size());
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    DetectedObject obj;
    obj.id = static_cast<int>(i);
    obj.object_class = chosen[i];
    obj.position = rng.uniform_in_box(scenario.scatter_spec.lo, scenario.scatter_spec.hi);
    objects.push_back(obj);
  }
  return objects;
}

}  // namespace

LabeledDataset generate_training_data(const Scenario& scenario, int count,
                                      const NoiseProfile& noise,
                                      std::uint64_t seed) {
  Rng rng(seed);
  return generate_training_data_impl(scenario, count, noise, rng);
}

std::vector<DetectedObject> scatter(const Scenario& scenario, int n_objects,
                                    std::uint64_t seed) {
  Rng rng(seed);
  return scatter_impl(scenario, n_objects, rng);
}

std::vector<DetectedObject> observe(const std::vector<DetectedObject>& truth,
                                    int num_classes, const NoiseProfile& noise,
                                    Rng& rng) {
  std::vector<DetectedObject> observed = truth;
  for (DetectedObject& obj : observed) {
    if (rng.uniform() >= noise.detection_accuracy && num_classes > 1) {
      int other = rng.uniform_int(num_classes - 1);
      if (other >= obj.object_class) ++other;
      obj.object_class = other;
    }
    if (noise.position_jitter_sd > 0.0) {
      for (int axis = 0; axis < 3; ++axis) {
        obj.position[axis] += noise.position_jitter_sd * rng.normal();
      }
    }
  }
  return observed;
}

StepOutcome execute_step(std::vector<DetectedObject>& objects, const PlanStep& step,
                         const NoiseProfile& noise, Rng& rng) {
  auto it = std::find_if(objects.begin(), objects.end(), [&](const DetectedObject& o) {
    return o.id == step.object_id;
  });
  if (it == objects.end()) {
    throw StalePlanError("planned object " + std::to_string(step.object_id) +
                         " is no longer present");
  }
  if (rng.uniform() >= noise.grasp_success) return StepOutcome::GraspFailed;
  if (rng.uniform() >= noise.release_success) {
    it->position = step.target + rng.uniform_in_ball(0.5);
    return StepOutcome::ReleaseFailed;
  }
  it->position = step.target;
  return StepOutcome::Moved;
}

ScoreSheet score(const Scenario& scenario,
                 const std::vector<DetectedObject>& final_objects) {
  validate(scenario);
  auto inside = [&](const Vec3& pos, int place) {
    const Place& p = scenario.places[static_cast<std::size_t>(place)];
    return (pos - p.center).norm() <= p.radius;
  };
  auto inside_any = [&](const Vec3& pos) {
    for (std::size_t p = 0; p < scenario.places.size(); ++p) {
      if (inside(pos, static_cast<int>(p))) return true;
    }
    return false;
  };

  ScoreSheet sheet;
  int in_any = 0;
  int in_correct = 0;
  int unknown_total = 0;
  int unknown_correct = 0;
  for (const DetectedObject& obj : final_objects) {
    const PoolObject& pool = scenario.pool[static_cast<std::size_t>(obj.object_class)];
    const bool correct = inside(obj.position, pool.place);
    if (inside_any(obj.position)) ++in_any;
    if (correct) ++in_correct;
    if (pool.is_unknown) {
      ++unknown_total;
      if (correct) ++unknown_correct;
    }
  }
  const int n = static_cast<int>(final_objects.size());
  if (scenario.stage == Stage::Stage1) {
    sheet.lines.push_back({"object inside a toy box", 3, in_any});
    sheet.lines.push_back({"object inside its correct box", 2, in_correct});
    sheet.max_possible = 5 * n;
  } else {
    sheet.lines.push_back({"object at its correct place", 5, in_correct});
    if (unknown_total > 0) {
      sheet.lines.push_back({"unknown object at its correct place", 3, unknown_correct});
    }
    sheet.max_possible = 5 * n + 3 * unknown_total;
  }
  for (const ScoreLine& line : sheet.lines) sheet.total += line.subtotal();
  return sheet;
}

ScriptedOracle truth_oracle(const Scenario& scenario) {
  std::map<int, int> class_to_word;
  for (int c = 0; c < scenario.num_classes(); ++c) {
    const int p = scenario.pool[static_cast<std::size_t>(c)].place;
    const int word = scenario.places[static_cast<std::size_t>(p)].word;
    if (word >= 0) class_to_word[c] = word;
  }
  return ScriptedOracle(std::move(class_to_word));
}

EpisodeResult run_episode(const Scenario& scenario, const ConceptModel& model,
                          const EpisodeConfig& config, Oracle* oracle,
                          std::uint64_t seed) {
  validate(scenario);
  if ((config.planner == PlannerKind::Baseline1 ||
       config.planner == PlannerKind::Baseline2) &&
      config.db == nullptr) {
    throw std::invalid_argument("baseline planners need a tidy database");
  }

  Rng rng(seed);
  std::vector<DetectedObject> objects =
      scatter_impl(scenario, scenario.scatter_spec.count, rng);
  std::unordered_map<int, bool> handled;
  for (const DetectedObject& obj : objects) handled[obj.id] = false;

  EpisodeResult result;
  result.log.initial_loglik = marginal_object_loglik(objects, model);
  Vec3 robot_pos = config.robot_start;
  for (int step_idx = 1; step_idx <= config.planner_config.N; ++step_idx) {
    std::vector<DetectedObject> candidates;
    for (const DetectedObject& obj : objects) {
      if (!handled[obj.id]) candidates.push_back(obj);
    }
    if (candidates.empty()) break;
    result.log.events.push_back({step_idx, "detect", -1, std::nullopt});
    const std::vector<DetectedObject> observed =
        observe(candidates, scenario.num_classes(), config.noise, rng);

    PlanStep step;
    bool halted = false;
    switch (config.planner) {
      case PlannerKind::Proposed:
        step = plan_next(observed, model, config.planner_config, oracle);
        if (step.unknown_flag) {
          result.log.events.push_back({step_idx, "query", step.object_id, std::nullopt});
        }
        break;
      case PlannerKind::Baseline1:
        try {
          step = baseline_nearest(observed, robot_pos, *config.db);
        } catch (const MissingDatabaseEntryError&) {
          result.log.events.push_back({step_idx, "halt", -1, std::nullopt});
          halted = true;
        }
        break;
      case PlannerKind::Baseline2:
        step = baseline_random(observed, *config.db, rng,
                               config.baseline2_same_class);
        break;
    }
    if (halted) break;
    result.log.events.push_back({step_idx, "plan", step.object_id, std::nullopt});

    const StepOutcome outcome = execute_step(objects, step, config.noise, rng);
    std::string event;
    if (outcome == StepOutcome::GraspFailed) {
      event = "grasp_failed";
    } else {
      result.log.events.push_back({step_idx, "grasp", step.object_id, std::nullopt});
      handled[step.object_id] = true;
      robot_pos = step.target;
      event = outcome == StepOutcome::Moved ? "release" : "release_failed";
    }
    const double loglik = marginal_object_loglik(objects, model);
    result.log.events.push_back({step_idx, event, step.object_id, loglik});
    result.log.step_logliks.push_back(loglik);
  }
  result.score = score(scenario, objects);
  result.final_objects = std::move(objects);
  return result;
}

}  // namespace tidyplan
