#pragma once

#include <optional>
#include <vector>

#include "tidyplan/planner.hpp"
#include "tidyplan/rng.hpp"
#include "tidyplan/types.hpp"

namespace tidyplan {

/// One remembered tidied position for one object class.
struct TidyRecord {
  int object_class = 0;
  Vec3 position = Vec3::Zero();
};

/// Class-to-position memory harvested from training data. Lookups
/// return the first record of the class (insertion order).
class TidyDatabase {
public:
  TidyDatabase() = default;
  explicit TidyDatabase(std::vector<TidyRecord> records)
      : records_(std::move(records)) {}

  /// One record per training observation, in dataset order.
  static TidyDatabase from_dataset(const LabeledDataset& data);

  [[nodiscard]] const std::vector<TidyRecord>& records() const { return records_; }
  [[nodiscard]] bool empty() const { return records_.empty(); }

  /// First recorded position for the class, if any.
  [[nodiscard]] std::optional<Vec3> lookup(int object_class) const;

private:
  std::vector<TidyRecord> records_;
};

/// Nearest-object, database-position planner: picks the detection
/// closest to robot_position (ties to lowest id) among those whose
/// class has a database entry, and targets that entry. Throws
/// MissingDatabaseEntryError when no detection has an entry.
PlanStep baseline_nearest(const std::vector<DetectedObject>& detections,
                          const Vec3& robot_position, const TidyDatabase& db);

/// Random-object, random-position planner: uniform detection, target
/// drawn uniformly from the record list (restricted to the chosen
/// object's class when same_class is set). Throws
/// MissingDatabaseEntryError when no usable record exists.
PlanStep baseline_random(const std::vector<DetectedObject>& detections,
                         const TidyDatabase& db, Rng& rng,
                         bool same_class = false);

}  // namespace tidyplan
