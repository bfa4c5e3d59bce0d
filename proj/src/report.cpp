#include "tidyplan/report.hpp"

#include <algorithm>
#include <sstream>

#include "tidyplan/io.hpp"

namespace tidyplan {

std::string planner_name(PlannerKind kind) {
  switch (kind) {
    case PlannerKind::Proposed: return "proposed";
    case PlannerKind::Baseline1: return "baseline1";
    case PlannerKind::Baseline2: return "baseline2";
  }
  throw std::invalid_argument("unknown planner kind");
}

std::uint64_t fnv1a_hash(const std::string& text) {
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

namespace {

std::uint64_t hash_options(const Scenario& scenario, const EvaluateOptions& options) {
  nlohmann::json j;
  j["scenario"] = scenario.name;
  j["trials"] = options.trials;
  j["seed_base"] = options.seed_base;
  j["lambda"] = options.lambda;
  j["steps"] = options.steps;
  j["defer_unknowns"] = options.defer_unknowns;
  j["baseline2_same_class"] = options.baseline2_same_class;
  j["robot_start"] = io::to_json(options.robot_start);
  j["noise"] = {{"detection", options.noise.detection_accuracy},
                {"grasp", options.noise.grasp_success},
                {"release", options.noise.release_success},
                {"jitter", options.noise.position_jitter_sd}};
  nlohmann::json names = nlohmann::json::array();
  for (PlannerKind kind : options.planners) names.push_back(planner_name(kind));
  j["planners"] = names;
  return fnv1a_hash(j.dump());
}

}  // namespace

EvaluateReport evaluate(const Scenario& scenario, const ConceptModel& model,
                        const TidyDatabase& db, Oracle* oracle,
                        const EvaluateOptions& options) {
  if (options.trials < 1) throw std::invalid_argument("trials must be >= 1");
  const int steps =
      options.steps > 0 ? options.steps : scenario.scatter_spec.count;

  EvaluateReport report;
  report.steps = steps;
  report.trials = options.trials;
  report.config_hash = hash_options(scenario, options);

  for (PlannerKind kind : options.planners) {
    PlannerEvaluation eval;
    eval.planner = kind;
    EpisodeConfig config;
    config.planner = kind;
    config.planner_config.lambda = options.lambda;
    config.planner_config.N = steps;
    config.planner_config.defer_unknowns = options.defer_unknowns;
    config.noise = options.noise;
    config.robot_start = options.robot_start;
    config.db = &db;
    config.baseline2_same_class = options.baseline2_same_class;
    for (int trial = 0; trial < options.trials; ++trial) {
      const std::uint64_t seed = options.seed_base + static_cast<std::uint64_t>(trial);
      Oracle* episode_oracle = kind == PlannerKind::Proposed ? oracle : nullptr;
      const EpisodeResult result =
          run_episode(scenario, model, config, episode_oracle, seed);
      eval.scores.push_back(result.score.total);
      eval.score_max = result.score.max_possible;
      std::vector<double> padded = result.log.step_logliks;
      const double pad =
          padded.empty() ? result.log.initial_loglik : padded.back();
      padded.resize(static_cast<std::size_t>(steps), pad);
      double mean = 0.0;
      for (double v : padded) mean += v;
      eval.trial_means.push_back(steps > 0 ? mean / steps : 0.0);
      eval.step_logliks.push_back(std::move(padded));
    }
    double score_sum = 0.0;
    for (int s : eval.scores) score_sum += s;
    eval.score_mean = score_sum / options.trials;
    for (int s = 0; s < steps; ++s) {
      std::vector<double> column;
      column.reserve(eval.step_logliks.size());
      for (const std::vector<double>& trial : eval.step_logliks) {
        column.push_back(trial[static_cast<std::size_t>(s)]);
      }
      eval.step_stats.push_back(sample_stats(column));
    }
    report.planners.push_back(std::move(eval));
  }

  const auto proposed = std::find_if(
      report.planners.begin(), report.planners.end(),
      [](const PlannerEvaluation& e) { return e.planner == PlannerKind::Proposed; });
  if (proposed != report.planners.end() && options.trials >= 2) {
    for (const PlannerEvaluation& other : report.planners) {
      if (&other == &*proposed) continue;
      PairwiseTest test;
      test.a = PlannerKind::Proposed;
      test.b = other.planner;
      test.across_trial_means = welch_t_test(proposed->trial_means, other.trial_means);
      for (int s = 0; s < steps; ++s) {
        std::vector<double> xs;
        std::vector<double> ys;
        for (const auto& trial : proposed->step_logliks) {
          xs.push_back(trial[static_cast<std::size_t>(s)]);
        }
        for (const auto& trial : other.step_logliks) {
          ys.push_back(trial[static_cast<std::size_t>(s)]);
        }
        test.per_step.push_back(welch_t_test(xs, ys));
      }
      report.tests.push_back(std::move(test));
    }
  }
  return report;
}

nlohmann::json report_to_json(const EvaluateReport& report) {
  nlohmann::json j;
  j["format_version"] = io::kFormatVersion;
  char hash[17];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(report.config_hash));
  j["config_hash"] = hash;
  j["steps"] = report.steps;
  j["trials"] = report.trials;
  j["loglik_basis"] = "true-positions";
  j["planners"] = nlohmann::json::array();
  for (const PlannerEvaluation& eval : report.planners) {
    nlohmann::json p;
    p["name"] = planner_name(eval.planner);
    p["scores"] = eval.scores;
    p["score_mean"] = eval.score_mean;
    p["score_max"] = eval.score_max;
    nlohmann::json mean = nlohmann::json::array();
    nlohmann::json sd = nlohmann::json::array();
    for (const SampleStats& stats : eval.step_stats) {
      mean.push_back(stats.mean);
      sd.push_back(stats.n >= 2 ? nlohmann::json(stats.sd) : nlohmann::json(nullptr));
    }
    p["step_loglik_mean"] = std::move(mean);
    p["step_loglik_sd"] = std::move(sd);
    p["trial_means"] = eval.trial_means;
    j["planners"].push_back(std::move(p));
  }
  j["significance"] = nlohmann::json::array();
  for (const PairwiseTest& test : report.tests) {
    nlohmann::json t;
    t["a"] = planner_name(test.a);
    t["b"] = planner_name(test.b);
    t["across_trial_means"] = {{"t", test.across_trial_means.t},
                               {"df", test.across_trial_means.df},
                               {"p", test.across_trial_means.p_value}};
    nlohmann::json per_step = nlohmann::json::array();
    for (const WelchResult& r : test.per_step) {
      per_step.push_back({{"t", r.t}, {"df", r.df}, {"p", r.p_value}});
    }
    t["per_step"] = std::move(per_step);
    j["significance"].push_back(std::move(t));
  }
  return j;
}

std::string report_summary(const EvaluateReport& report) {
  std::ostringstream out;
  out << "trials: " << report.trials << ", steps per episode: " << report.steps
      << "\n";
  for (const PlannerEvaluation& eval : report.planners) {
    out << planner_name(eval.planner) << ": score "
        << io::format_double(eval.score_mean) << "/" << eval.score_max
        << " (per trial:";
    for (int s : eval.scores) out << ' ' << s;
    out << ")\n";
  }
  for (const PairwiseTest& test : report.tests) {
    out << planner_name(test.a) << " vs " << planner_name(test.b)
        << " (across-trial mean loglik): t="
        << io::format_double(test.across_trial_means.t)
        << ", p=" << io::format_double(test.across_trial_means.p_value) << "\n";
  }
  return out.str();
}

std::string report_steps_csv(const EvaluateReport& report) {
  std::ostringstream out;
  out << "planner,step,mean,sd\n";
  for (const PlannerEvaluation& eval : report.planners) {
    for (std::size_t s = 0; s < eval.step_stats.size(); ++s) {
      const SampleStats& stats = eval.step_stats[s];
      out << planner_name(eval.planner) << ',' << (s + 1) << ','
          << io::format_double(stats.mean) << ',';
      if (stats.n >= 2) out << io::format_double(stats.sd);
      out << '\n';
    }
  }
  return out.str();
}

std::string report_scores_csv(const EvaluateReport& report) {
  std::ostringstream out;
  out << "planner,trial,score,max\n";
  for (const PlannerEvaluation& eval : report.planners) {
    for (std::size_t t = 0; t < eval.scores.size(); ++t) {
      out << planner_name(eval.planner) << ',' << t << ',' << eval.scores[t] << ','
          << eval.score_max << '\n';
    }
  }
  return out.str();
}

}  // namespace tidyplan
