// Command-line driver: data generation, training, planning, episode
// simulation and multi-trial evaluation over scenario files.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tidyplan/gibbs.hpp"
#include "tidyplan/io.hpp"
#include "tidyplan/planner.hpp"
#include "tidyplan/report.hpp"
#include "tidyplan/sim.hpp"

namespace {

using namespace tidyplan;

Vec3 to_vec3(const std::vector<double>& v) {
  return {v[0], v[1], v[2]};
}

/// model.json -> model.db.json / model.trace.csv companions.
std::string companion_path(const std::string& model_path, const std::string& suffix) {
  const std::size_t dot = model_path.rfind('.');
  const std::size_t slash = model_path.rfind('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
    return model_path + suffix;
  }
  return model_path.substr(0, dot) + suffix;
}

PlannerKind parse_planner(const std::string& name) {
  if (name == "proposed") return PlannerKind::Proposed;
  if (name == "baseline1") return PlannerKind::Baseline1;
  if (name == "baseline2") return PlannerKind::Baseline2;
  throw CLI::ValidationError("--planner", "unknown planner '" + name + "'");
}

struct NoiseFlags {
  double detection = 1.0;
  double grasp = 1.0;
  double release = 1.0;
  double jitter = 0.0;
  bool stage_noise = false;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--detection-accuracy", detection,
                    "Probability of a correct class label");
    cmd->add_option("--grasp-success", grasp, "Grasp success probability");
    cmd->add_option("--release-success", release, "Release success probability");
    cmd->add_option("--observe-jitter", jitter,
                    "Isotropic position noise (meters, sd)");
    cmd->add_flag("--stage-noise", stage_noise,
                  "Use the measured per-stage failure rates instead");
  }

  [[nodiscard]] NoiseProfile resolve(const Scenario& scenario) const {
    if (stage_noise) return stage_noise_profile(scenario.stage);
    return {detection, grasp, release, jitter};
  }
};

struct DetectionsFile {
  std::vector<DetectedObject> objects;
};

DetectionsFile load_detections(const std::string& path,
                               const std::vector<std::string>& class_names) {
  const nlohmann::json j = io::load_json(path);
  DetectionsFile file;
  for (const nlohmann::json& o : j.at("objects")) {
    DetectedObject obj;
    obj.id = o.value("id", static_cast<int>(file.objects.size()));
    obj.position = io::vec3_from_json(o.at("position"));
    const nlohmann::json& cls = o.at("class");
    if (cls.is_number_integer()) {
      obj.object_class = cls.get<int>();
    } else {
      const auto name = cls.get<std::string>();
      obj.object_class = -1;
      for (std::size_t c = 0; c < class_names.size(); ++c) {
        if (class_names[c] == name) obj.object_class = static_cast<int>(c);
      }
      if (obj.object_class < 0) {
        throw std::runtime_error("unknown object class '" + name + "' in '" + path +
                                 "' (pass --scenario for name lookup)");
      }
    }
    file.objects.push_back(obj);
  }
  return file;
}

int cmd_generate(const std::string& scenario_path, int count, std::uint64_t seed,
                 const NoiseFlags& noise, double word_fraction,
                 const std::string& out) {
  Scenario scenario = io::load_scenario(scenario_path);
  if (word_fraction >= 0.0) scenario.word_fraction = word_fraction;
  const int n = count > 0 ? count : scenario.training_count;
  const LabeledDataset data =
      generate_training_data(scenario, n, noise.resolve(scenario), seed);
  io::save_dataset(data, out);
  std::cout << "wrote " << data.size() << " records to " << out << "\n";
  return 0;
}

int cmd_train(const std::string& dataset_path, const std::string& scenario_path,
              std::uint64_t seed, int iterations, const std::string& selection,
              const std::vector<double>& mu0_flag, CLI::Option* mu0_opt,
              const nlohmann::json& overrides, const std::string& out) {
  const LabeledDataset data = io::load_dataset(dataset_path);
  Hyperparams h;
  bool mu0_set = false;
  if (!scenario_path.empty()) {
    const Scenario scenario = io::load_scenario(scenario_path);
    h = scenario.hyperparams;
    mu0_set = scenario.mu0_specified;
  }
  h = io::hyperparams_from_json(overrides, h);
  if (!mu0_opt->empty()) {
    h.mu0 = to_vec3(mu0_flag);
    mu0_set = true;
  }
  if (!mu0_set) {
    // Default the Gaussian prior mean to the average observed position.
    Vec3 mean = Vec3::Zero();
    for (const Observation& obs : data.observations) mean += obs.position;
    h.mu0 = mean / static_cast<double>(data.size());
  }

  GibbsOptions options;
  options.iterations = iterations;
  if (selection == "map") {
    options.selection = ModelSelection::MapOverTrace;
  } else if (selection == "final") {
    options.selection = ModelSelection::FinalSweep;
  } else {
    throw CLI::ValidationError("--selection", "expected 'map' or 'final'");
  }
  const GibbsResult result = gibbs_fit(data, h, options, seed);
  io::save_model(result.state.model, out);
  io::save_trace_csv(result.trace, companion_path(out, ".trace.csv"));
  io::save_database(TidyDatabase::from_dataset(data), companion_path(out, ".db.json"));
  std::cout << "trained on " << data.size() << " records, " << iterations
            << " sweeps; selected sweep " << result.state.iteration
            << " (joint logprob " << io::format_double(result.state.joint_logprob)
            << ")\nwrote " << out << "\n";
  return 0;
}

int cmd_plan(const std::string& model_path, const std::string& objects_path,
             const std::string& scenario_path, const std::string& oracle_path,
             bool interactive, double lambda, int steps, bool defer,
             const std::string& out) {
  const ConceptModel model = io::load_model(model_path);
  std::vector<std::string> class_names;
  std::vector<std::string> word_names;
  std::unique_ptr<Scenario> scenario;
  if (!scenario_path.empty()) {
    scenario = std::make_unique<Scenario>(io::load_scenario(scenario_path));
    for (const PoolObject& o : scenario->pool) class_names.push_back(o.class_name);
    word_names = scenario->word_names;
  }
  const DetectionsFile detections = load_detections(objects_path, class_names);

  std::unique_ptr<Oracle> oracle;
  if (interactive) {
    oracle = std::make_unique<InteractiveOracle>(std::cin, std::cout, word_names,
                                                 class_names);
  } else if (!oracle_path.empty()) {
    oracle = std::make_unique<ScriptedOracle>(
        io::load_oracle_map(oracle_path, class_names, word_names));
  } else if (scenario) {
    oracle = std::make_unique<ScriptedOracle>(truth_oracle(*scenario));
  }

  PlannerConfig config;
  config.lambda = lambda;
  config.N = steps > 0 ? steps : static_cast<int>(detections.objects.size());
  config.defer_unknowns = defer;
  const std::vector<PlanStep> plan =
      plan_sequence(detections.objects, model, config, oracle.get());
  io::save_plan(plan, out);
  for (const PlanStep& step : plan) {
    std::cout << "object " << step.object_id << " -> concept " << step.concept_index
              << " at [" << io::format_double(step.target.x()) << ", "
              << io::format_double(step.target.y()) << ", "
              << io::format_double(step.target.z()) << "]"
              << (step.unknown_flag ? " (unknown, queried)" : "") << "\n";
  }
  std::cout << "wrote " << out << "\n";
  return 0;
}

int cmd_simulate(const std::string& scenario_path, const std::string& model_path,
                 const std::string& db_path, const std::string& planner,
                 std::uint64_t seed, double lambda, int steps, bool defer,
                 bool same_class, const NoiseFlags& noise,
                 const std::string& oracle_path,
                 const std::vector<double>& robot_start,
                 const std::string& out_score, const std::string& out_episode) {
  const Scenario scenario = io::load_scenario(scenario_path);
  const ConceptModel model = io::load_model(model_path);
  EpisodeConfig config;
  config.planner = parse_planner(planner);
  config.planner_config.lambda = lambda;
  config.planner_config.N =
      steps > 0 ? steps : scenario.scatter_spec.count;
  config.planner_config.defer_unknowns = defer;
  config.noise = noise.resolve(scenario);
  config.robot_start = to_vec3(robot_start);
  config.baseline2_same_class = same_class;
  TidyDatabase db;
  if (config.planner != PlannerKind::Proposed) {
    const std::string path =
        db_path.empty() ? companion_path(model_path, ".db.json") : db_path;
    db = io::load_database(path);
    config.db = &db;
  }
  std::vector<std::string> class_names;
  for (const PoolObject& o : scenario.pool) class_names.push_back(o.class_name);
  ScriptedOracle oracle =
      oracle_path.empty()
          ? truth_oracle(scenario)
          : ScriptedOracle(
                io::load_oracle_map(oracle_path, class_names, scenario.word_names));

  const EpisodeResult result = run_episode(scenario, model, config, &oracle, seed);
  io::save_json(io::to_json(result.score), out_score);
  io::save_episode_csv(result.log, out_episode);
  for (const ScoreLine& line : result.score.lines) {
    std::cout << line.rule << ": " << line.count << " x " << line.points_each
              << " = " << line.subtotal() << "\n";
  }
  std::cout << "total: " << result.score.total << "/" << result.score.max_possible
            << "\nwrote " << out_score << " and " << out_episode << "\n";
  return 0;
}

int cmd_evaluate(const std::string& scenario_path, const std::string& model_path,
                 const std::string& db_path,
                 const std::vector<std::string>& planner_names, int trials,
                 std::uint64_t seed, double lambda, int steps, bool defer,
                 bool same_class, const NoiseFlags& noise,
                 const std::string& oracle_path,
                 const std::vector<double>& robot_start,
                 const std::string& out_dir) {
  const Scenario scenario = io::load_scenario(scenario_path);
  const ConceptModel model = io::load_model(model_path);
  const std::string db_file =
      db_path.empty() ? companion_path(model_path, ".db.json") : db_path;
  const TidyDatabase db = io::load_database(db_file);

  EvaluateOptions options;
  options.planners.clear();
  for (const std::string& name : planner_names) {
    options.planners.push_back(parse_planner(name));
  }
  options.trials = trials;
  options.seed_base = seed;
  options.noise = noise.resolve(scenario);
  options.lambda = lambda;
  options.steps = steps;
  options.defer_unknowns = defer;
  options.baseline2_same_class = same_class;
  options.robot_start = to_vec3(robot_start);

  std::vector<std::string> class_names;
  for (const PoolObject& o : scenario.pool) class_names.push_back(o.class_name);
  ScriptedOracle oracle =
      oracle_path.empty()
          ? truth_oracle(scenario)
          : ScriptedOracle(
                io::load_oracle_map(oracle_path, class_names, scenario.word_names));

  const EvaluateReport report = evaluate(scenario, model, db, &oracle, options);
  std::filesystem::create_directories(out_dir);
  io::save_json(report_to_json(report), out_dir + "/report.json");
  io::save_text(report_steps_csv(report), out_dir + "/loglik_steps.csv");
  io::save_text(report_scores_csv(report), out_dir + "/scores.csv");
  std::cout << report_summary(report);
  std::cout << "wrote " << out_dir << "/report.json\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spatial-concept learning and tidy-up planning"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from a TOML/INI file");

  // generate
  auto* generate = app.add_subcommand("generate", "Sample a training dataset");
  std::string g_scenario;
  int g_count = 0;
  std::uint64_t g_seed = 0;
  double g_word_fraction = -1.0;
  std::string g_out = "dataset.jsonl";
  NoiseFlags g_noise;
  generate->add_option("--scenario", g_scenario, "Scenario file")->required();
  generate->add_option("--count", g_count,
                       "Record count (default: scenario training_count)");
  generate->add_option("--seed", g_seed, "Random seed");
  generate->add_option("--word-fraction", g_word_fraction,
                       "Override the scenario's word fraction");
  generate->add_option("--out", g_out, "Output dataset path");
  g_noise.add_to(generate);

  // train
  auto* train = app.add_subcommand("train", "Fit the concept model by Gibbs sampling");
  std::string t_dataset;
  std::string t_scenario;
  std::uint64_t t_seed = 0;
  int t_iterations = 100;
  std::string t_selection = "map";
  std::string t_out = "model.json";
  std::vector<double> t_mu0;
  double t_alpha = 0.0, t_beta = 0.0, t_gamma = 0.0, t_kappa0 = 0.0, t_nu0 = 0.0,
         t_psi0 = 0.0;
  int t_K = 0;
  train->add_option("--dataset", t_dataset, "Training dataset")->required();
  train->add_option("--scenario", t_scenario,
                    "Scenario file supplying hyperparameter defaults");
  train->add_option("--seed", t_seed, "Random seed");
  train->add_option("--iterations", t_iterations, "Gibbs sweeps");
  train->add_option("--selection", t_selection,
                    "Model selection: 'map' (best joint logprob) or 'final'");
  train->add_option("--out", t_out, "Output model path");
  auto* t_mu0_opt =
      train->add_option("--mu0", t_mu0, "Prior mean (default: dataset mean)")
          ->expected(3);
  auto* t_alpha_opt = train->add_option("--alpha", t_alpha, "Class concentration");
  auto* t_beta_opt = train->add_option("--beta", t_beta, "Word concentration");
  auto* t_gamma_opt = train->add_option("--gamma", t_gamma, "Mixing concentration");
  auto* t_kappa0_opt = train->add_option("--kappa0", t_kappa0, "Prior mean strength");
  auto* t_nu0_opt = train->add_option("--nu0", t_nu0, "Inverse-Wishart dof");
  auto* t_psi0_opt =
      train->add_option("--psi0", t_psi0, "Isotropic inverse-Wishart scale");
  auto* t_K_opt = train->add_option("-K,--concepts", t_K, "Weak-limit truncation");

  // plan
  auto* plan = app.add_subcommand("plan", "Plan tidy actions for a detection list");
  std::string p_model, p_objects, p_scenario, p_oracle;
  std::string p_out = "plan.json";
  bool p_interactive = false, p_defer = false;
  double p_lambda = 0.003;
  int p_steps = 0;
  plan->add_option("--model", p_model, "Trained model")->required();
  plan->add_option("--objects", p_objects, "Detection list (JSON)")->required();
  plan->add_option("--scenario", p_scenario, "Scenario file for name lookup");
  plan->add_option("--oracle-map", p_oracle, "Scripted word answers (JSON)");
  plan->add_flag("--interactive", p_interactive, "Prompt for unknown objects");
  plan->add_option("--lambda", p_lambda, "Unknown-object threshold");
  plan->add_option("--steps", p_steps, "Objects to tidy (default: all)");
  plan->add_flag("--defer-unknowns", p_defer, "Tidy unknown objects last");
  plan->add_option("--out", p_out, "Output plan path");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Run one scored episode");
  std::string s_scenario, s_model, s_db, s_oracle;
  std::string s_planner = "proposed";
  std::uint64_t s_seed = 0;
  double s_lambda = 0.003;
  int s_steps = 0;
  bool s_defer = false, s_same_class = false;
  std::vector<double> s_robot = {0.0, 0.0, 0.0};
  std::string s_out_score = "score.json";
  std::string s_out_episode = "episode.csv";
  NoiseFlags s_noise;
  simulate->add_option("--scenario", s_scenario, "Scenario file")->required();
  simulate->add_option("--model", s_model, "Trained model")->required();
  simulate->add_option("--db", s_db, "Tidy database (default: <model>.db.json)");
  simulate->add_option("--planner", s_planner, "proposed | baseline1 | baseline2");
  simulate->add_option("--seed", s_seed, "Random seed");
  simulate->add_option("--lambda", s_lambda, "Unknown-object threshold");
  simulate->add_option("--steps", s_steps, "Step budget (default: scatter count)");
  simulate->add_flag("--defer-unknowns", s_defer, "Tidy unknown objects last");
  simulate->add_flag("--baseline2-same-class", s_same_class,
                     "Restrict baseline2 targets to same-class records");
  simulate->add_option("--oracle-map", s_oracle, "Scripted word answers (JSON)");
  simulate->add_option("--robot-start", s_robot, "Initial robot position")
      ->expected(3);
  simulate->add_option("--out-score", s_out_score, "Score sheet output");
  simulate->add_option("--out-episode", s_out_episode, "Episode CSV output");
  s_noise.add_to(simulate);

  // evaluate
  auto* evaluate_cmd =
      app.add_subcommand("evaluate", "Multi-trial comparison across planners");
  std::string e_scenario, e_model, e_db, e_oracle;
  std::vector<std::string> e_planners = {"proposed", "baseline1", "baseline2"};
  int e_trials = 10;
  std::uint64_t e_seed = 0;
  double e_lambda = 0.003;
  int e_steps = 0;
  bool e_defer = false, e_same_class = false;
  std::vector<double> e_robot = {0.0, 0.0, 0.0};
  std::string e_out_dir = ".";
  NoiseFlags e_noise;
  evaluate_cmd->add_option("--scenario", e_scenario, "Scenario file")->required();
  evaluate_cmd->add_option("--model", e_model, "Trained model")->required();
  evaluate_cmd->add_option("--db", e_db, "Tidy database (default: <model>.db.json)");
  evaluate_cmd->add_option("--planners", e_planners, "Planners to compare")
      ->delimiter(',');
  evaluate_cmd->add_option("--trials", e_trials, "Episodes per planner");
  evaluate_cmd->add_option("--seed", e_seed, "Base seed (per-trial: seed + trial)")
      ->required();
  evaluate_cmd->add_option("--lambda", e_lambda, "Unknown-object threshold");
  evaluate_cmd->add_option("--steps", e_steps, "Step budget (default: scatter count)");
  evaluate_cmd->add_flag("--defer-unknowns", e_defer, "Tidy unknown objects last");
  evaluate_cmd->add_flag("--baseline2-same-class", e_same_class,
                         "Restrict baseline2 targets to same-class records");
  evaluate_cmd->add_option("--oracle-map", e_oracle, "Scripted word answers (JSON)");
  evaluate_cmd->add_option("--robot-start", e_robot, "Initial robot position")
      ->expected(3);
  evaluate_cmd->add_option("--out-dir", e_out_dir, "Report output directory");
  e_noise.add_to(evaluate_cmd);

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) {
      return cmd_generate(g_scenario, g_count, g_seed, g_noise, g_word_fraction,
                          g_out);
    }
    if (train->parsed()) {
      nlohmann::json overrides;
      if (!t_alpha_opt->empty()) overrides["alpha"] = t_alpha;
      if (!t_beta_opt->empty()) overrides["beta"] = t_beta;
      if (!t_gamma_opt->empty()) overrides["gamma"] = t_gamma;
      if (!t_kappa0_opt->empty()) overrides["kappa0"] = t_kappa0;
      if (!t_nu0_opt->empty()) overrides["nu0"] = t_nu0;
      if (!t_psi0_opt->empty()) overrides["psi0"] = t_psi0;
      if (!t_K_opt->empty()) overrides["K"] = t_K;
      return cmd_train(t_dataset, t_scenario, t_seed, t_iterations, t_selection,
                       t_mu0, t_mu0_opt, overrides, t_out);
    }
    if (plan->parsed()) {
      return cmd_plan(p_model, p_objects, p_scenario, p_oracle, p_interactive,
                      p_lambda, p_steps, p_defer, p_out);
    }
    if (simulate->parsed()) {
      return cmd_simulate(s_scenario, s_model, s_db, s_planner, s_seed, s_lambda,
                          s_steps, s_defer, s_same_class, s_noise, s_oracle,
                          s_robot, s_out_score, s_out_episode);
    }
    if (evaluate_cmd->parsed()) {
      return cmd_evaluate(e_scenario, e_model, e_db, e_planners, e_trials, e_seed,
                          e_lambda, e_steps, e_defer, e_same_class, e_noise,
                          e_oracle, e_robot, e_out_dir);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
