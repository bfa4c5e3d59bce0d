#include "tidyplan/baselines.hpp"

#include <string>

namespace tidyplan {
namespace {

/// Baselines carry no definedness notion; definedness is pinned to 1
/// so the unknown-flag invariant (flag iff below threshold) holds.
PlanStep make_step(const DetectedObject& obj, const Vec3& target) {
  PlanStep step;
  step.object_id = obj.id;
  step.concept_index = -1;
  step.target = target;
  step.definedness = 1.0;
  step.log_ratio = 0.0;
  step.decision_log_ratio = 0.0;
  step.unknown_flag = false;
  return step;
}

}  // namespace

TidyDatabase TidyDatabase::from_dataset(const LabeledDataset& data) {
  std::vector<TidyRecord> records;
  records.reserve(data.size());
  for (const Observation& obs : data.observations) {
    records.push_back({obs.object_class, obs.position});
  }
  return TidyDatabase(std::move(records));
}

std::optional<Vec3> TidyDatabase::lookup(int object_class) const {
  for (const TidyRecord& r : records_) {
    if (r.object_class == object_class) return r.position;
  }
  return std::nullopt;
}

PlanStep baseline_nearest(const std::vector<DetectedObject>& detections,
                          const Vec3& robot_position, const TidyDatabase& db) {
  if (detections.empty()) throw std::invalid_argument("no detections to plan over");
  const DetectedObject* best = nullptr;
  Vec3 best_target = Vec3::Zero();
  double best_dist = 0.0;
  for (const DetectedObject& obj : detections) {
    const std::optional<Vec3> target = db.lookup(obj.object_class);
    if (!target) continue;  // class never seen tidied; cannot be handled
    const double dist = (obj.position - robot_position).norm();
    if (best == nullptr || dist < best_dist ||
        (dist == best_dist && obj.id < best->id)) {
      best = &obj;
      best_target = *target;
      best_dist = dist;
    }
  }
  if (best == nullptr) {
    throw MissingDatabaseEntryError(
        "no detected class has a database entry");
  }
  return make_step(*best, best_target);
}

PlanStep baseline_random(const std::vector<DetectedObject>& detections,
                         const TidyDatabase& db, Rng& rng, bool same_class) {
  if (detections.empty()) throw std::invalid_argument("no detections to plan over");
  if (db.empty()) throw MissingDatabaseEntryError("database is empty");
  const DetectedObject& obj =
      detections[static_cast<std::size_t>(rng.uniform_int(
          static_cast<int>(detections.size())))];
  if (same_class) {
    std::vector<const TidyRecord*> matching;
    for (const TidyRecord& r : db.records()) {
      if (r.object_class == obj.object_class) matching.push_back(&r);
    }
    if (matching.empty()) {
      throw MissingDatabaseEntryError("no database entry for object class " +
                                      std::to_string(obj.object_class));
    }
    const auto pick = static_cast<std::size_t>(
        rng.uniform_int(static_cast<int>(matching.size())));
    return make_step(obj, matching[pick]->position);
  }
  const auto pick = static_cast<std::size_t>(
      rng.uniform_int(static_cast<int>(db.records().size())));
  return make_step(obj, db.records()[pick].position);
}

}  // namespace tidyplan
