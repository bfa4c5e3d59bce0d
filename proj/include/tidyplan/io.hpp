#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "tidyplan/baselines.hpp"
#include "tidyplan/planner.hpp"
#include "tidyplan/sim.hpp"
#include "tidyplan/types.hpp"

namespace tidyplan::io {

inline constexpr int kFormatVersion = 1;

/// Shortest decimal string that round-trips the exact double.
std::string format_double(double value);

nlohmann::json to_json(const Vec3& v);
nlohmann::json to_json(const Mat3& m);
Vec3 vec3_from_json(const nlohmann::json& j);
Mat3 mat3_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ConceptModel& model);
ConceptModel model_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Hyperparams& h);
Hyperparams hyperparams_from_json(const nlohmann::json& j,
                                  const Hyperparams& defaults = {});

nlohmann::json to_json(const PlanStep& step);
nlohmann::json to_json(const ScoreSheet& sheet);
nlohmann::json to_json(const TidyDatabase& db);
TidyDatabase database_from_json(const nlohmann::json& j);

/// Dataset files are line-delimited: a version header line, then one
/// observation object per line (`position`, `class`, `words`, and
/// `truth` when known).
void save_dataset(const LabeledDataset& data, const std::string& path);
LabeledDataset load_dataset(const std::string& path);

void save_model(const ConceptModel& model, const std::string& path);
ConceptModel load_model(const std::string& path);

void save_database(const TidyDatabase& db, const std::string& path);
TidyDatabase load_database(const std::string& path);

/// Two-column CSV `sweep,joint_logprob`, one row per sweep.
void save_trace_csv(const std::vector<double>& trace, const std::string& path);

/// CSV `step,event,object,loglik`; loglik is empty except on the
/// event completing a step.
void save_episode_csv(const EpisodeLog& log, const std::string& path);

void save_plan(const std::vector<PlanStep>& steps, const std::string& path);

Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& scenario, const std::string& path);

/// Scripted oracle answers: an object mapping class names (or index
/// strings) to word names (or indices), resolved against the given
/// vocabularies.
std::map<int, int> load_oracle_map(const std::string& path,
                                   const std::vector<std::string>& class_names,
                                   const std::vector<std::string>& word_names);

void save_json(const nlohmann::json& j, const std::string& path);
nlohmann::json load_json(const std::string& path);
void save_text(const std::string& text, const std::string& path);

}  // namespace tidyplan::io
