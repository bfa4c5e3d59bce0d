#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "support/oracles.hpp"
#include "support/testenv.hpp"
#include "tidyplan/io.hpp"
#include "tidyplan/rng.hpp"

using namespace tidyplan;

namespace {

std::string tmp_path(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "tidyplan_io_tests";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<std::string> lines_of(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

bool same_bits(double a, double b) {
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

double parse_double(const std::string& text) {
  double value = 0.0;
  std::from_chars(text.data(), text.data() + text.size(), value);
  return value;
}

void tamper_version(const std::string& path) {
  nlohmann::json j = io::load_json(path);
  j["format_version"] = io::kFormatVersion + 1;
  io::save_json(j, path);
}

}  // namespace

TEST_CASE("format_double emits the shortest exact representation") {
  const std::vector<double> tricky = {
      0.1,
      1.0 / 3.0,
      3.141592653589793,
      -2.5e17,
      1e-300,
      5e-324,  // smallest denormal
      std::numeric_limits<double>::max(),
      -1234.5678901234567,
      0.0,
      -0.0,
      std::nextafter(1.0, 2.0),
  };
  for (const double value : tricky) {
    const std::string text = io::format_double(value);
    CHECK(same_bits(parse_double(text), value));
  }
  CHECK(io::format_double(0.1) == "0.1");
  CHECK(io::format_double(2.0) == "2");

  Rng rng(61);
  for (int i = 0; i < 2000; ++i) {
    const double value = rng.normal() * std::pow(10.0, rng.uniform() * 40.0 - 20.0);
    CHECK(same_bits(parse_double(io::format_double(value)), value));
  }
}

TEST_CASE("vectors and matrices survive the JSON round trip exactly") {
  Rng rng(62);
  for (int i = 0; i < 100; ++i) {
    Vec3 v(rng.normal() * 1e3, rng.normal() * 1e-3, rng.normal());
    CHECK(io::vec3_from_json(io::to_json(v)) == v);
    Mat3 m;
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) m(r, c) = rng.normal();
    }
    CHECK(io::mat3_from_json(io::to_json(m)) == m);
  }
  CHECK_THROWS_AS(io::vec3_from_json(nlohmann::json::array({1.0, 2.0})),
                  std::runtime_error);
  CHECK_THROWS_AS(io::mat3_from_json(nlohmann::json::array({1.0, 2.0, 3.0})),
                  std::runtime_error);
}

TEST_CASE("a model file restores every parameter bit-for-bit") {
  Rng rng(63);
  ConceptModel model = oracle::random_separated_model(rng, 4, 3);
  model.M = 2;
  for (std::size_t k = 0; k < model.eta.size(); ++k) {
    model.eta[k] = (k % 2 == 0) ? std::vector<double>{0.25, 0.75}
                                : std::vector<double>{0.6, 0.4};
  }
  const std::string path = tmp_path("model.json");
  io::save_model(model, path);
  const ConceptModel loaded = io::load_model(path);
  CHECK(loaded.K == model.K);
  CHECK(loaded.L == model.L);
  CHECK(loaded.M == model.M);
  for (std::size_t k = 0; k < static_cast<std::size_t>(model.K); ++k) {
    CHECK(loaded.mu[k] == model.mu[k]);
    CHECK(loaded.sigma[k] == model.sigma[k]);
    CHECK(loaded.phi[k] == model.phi[k]);
    CHECK(loaded.eta[k] == model.eta[k]);
  }
  CHECK(loaded.pi == model.pi);

  tamper_version(path);
  CHECK_THROWS_AS(io::load_model(path), std::runtime_error);
}

TEST_CASE("hyperparameters round trip including the full scale matrix") {
  Hyperparams h;
  h.alpha = 0.3;
  h.beta = 2.25;
  h.gamma = 11.5;
  h.mu0 = Vec3(0.25, -1.5, 3.0);
  h.kappa0 = 0.01;
  h.psi0 << 0.02, 0.001, 0.0, 0.001, 0.03, 0.002, 0.0, 0.002, 0.04;
  h.nu0 = 42.0;
  h.K = 7;
  const Hyperparams loaded = io::hyperparams_from_json(io::to_json(h));
  CHECK(loaded.alpha == h.alpha);
  CHECK(loaded.beta == h.beta);
  CHECK(loaded.gamma == h.gamma);
  CHECK(loaded.mu0 == h.mu0);
  CHECK(loaded.kappa0 == h.kappa0);
  CHECK(loaded.psi0 == h.psi0);
  CHECK(loaded.nu0 == h.nu0);
  CHECK(loaded.K == h.K);
}

TEST_CASE("a scalar psi0 expands to an isotropic matrix and defaults fill gaps") {
  nlohmann::json j;
  j["psi0"] = 0.05;
  const Hyperparams h = io::hyperparams_from_json(j);
  CHECK(h.psi0 == 0.05 * Mat3::Identity());
  // Untouched fields keep the caller's defaults.
  Hyperparams defaults;
  defaults.alpha = 9.5;
  const Hyperparams kept = io::hyperparams_from_json(nlohmann::json::object(), defaults);
  CHECK(kept.alpha == 9.5);
  CHECK(kept.K == defaults.K);
}

TEST_CASE("dataset files are a header line plus one record per line") {
  LabeledDataset data;
  data.num_classes = 3;
  data.num_words = 2;
  data.class_names = {"cup", "book", "ball"};
  data.word_names = {"shelf", "sofa"};
  data.observations = {
      {Vec3(0.1, 0.2, 0.3), 0, {1}},
      {Vec3(-1.0 / 3.0, 2e-7, 4.0), 2, {}},
      {Vec3(5.0, 6.0, 7.0), 1, {0, 0}},
  };
  data.truth_assignments = std::vector<int>{0, 1, 0};
  const std::string path = tmp_path("dataset.jsonl");
  io::save_dataset(data, path);

  const std::vector<std::string> lines = lines_of(path);
  REQUIRE(lines.size() == 4);  // header + three records

  const LabeledDataset loaded = io::load_dataset(path);
  CHECK(loaded.num_classes == 3);
  CHECK(loaded.num_words == 2);
  CHECK(loaded.class_names == data.class_names);
  CHECK(loaded.word_names == data.word_names);
  REQUIRE(loaded.size() == 3);
  for (std::size_t i = 0; i < loaded.size(); ++i) {
    CHECK(loaded.observations[i].position == data.observations[i].position);
    CHECK(loaded.observations[i].object_class == data.observations[i].object_class);
    CHECK(loaded.observations[i].words == data.observations[i].words);
  }
  REQUIRE(loaded.truth_assignments.has_value());
  CHECK(*loaded.truth_assignments == std::vector<int>{0, 1, 0});

  // Truthless datasets stay truthless.
  data.truth_assignments.reset();
  io::save_dataset(data, path);
  CHECK_FALSE(io::load_dataset(path).truth_assignments.has_value());

  // The header's version gate rejects tampered files.
  std::ofstream out(path);
  out << R"({"format_version": 99, "num_classes": 1, "num_words": 0})" << '\n';
  out.close();
  CHECK_THROWS_AS(io::load_dataset(path), std::runtime_error);
}

TEST_CASE("database files restore records in order") {
  const TidyDatabase db({{2, Vec3(0.25, 0.5, 0.125)}, {0, Vec3(1e-9, -3.5, 2.0)}});
  const std::string path = tmp_path("db.json");
  io::save_database(db, path);
  const TidyDatabase loaded = io::load_database(path);
  REQUIRE(loaded.records().size() == 2);
  CHECK(loaded.records()[0].object_class == 2);
  CHECK(loaded.records()[0].position == Vec3(0.25, 0.5, 0.125));
  CHECK(loaded.records()[1].object_class == 0);
  CHECK(loaded.records()[1].position == Vec3(1e-9, -3.5, 2.0));

  tamper_version(path);
  CHECK_THROWS_AS(io::load_database(path), std::runtime_error);
}

TEST_CASE("scenarios round trip through save and load") {
  const Scenario original =
      io::load_scenario(testenv::scenario_path("stage2_2.json"));
  const std::string path = tmp_path("scenario.json");
  io::save_scenario(original, path);
  const Scenario loaded = io::load_scenario(path);

  CHECK(loaded.name == original.name);
  CHECK(loaded.stage == original.stage);
  CHECK(loaded.word_names == original.word_names);
  CHECK(loaded.word_fraction == original.word_fraction);
  CHECK(loaded.training_count == original.training_count);
  REQUIRE(loaded.places.size() == original.places.size());
  for (std::size_t p = 0; p < loaded.places.size(); ++p) {
    CHECK(loaded.places[p].name == original.places[p].name);
    CHECK(loaded.places[p].center == original.places[p].center);
    CHECK(loaded.places[p].radius == original.places[p].radius);
    CHECK(loaded.places[p].word == original.places[p].word);
  }
  REQUIRE(loaded.pool.size() == original.pool.size());
  for (std::size_t c = 0; c < loaded.pool.size(); ++c) {
    CHECK(loaded.pool[c].class_name == original.pool[c].class_name);
    CHECK(loaded.pool[c].place == original.pool[c].place);
    CHECK(loaded.pool[c].is_unknown == original.pool[c].is_unknown);
  }
  CHECK(loaded.scatter_spec.count == original.scatter_spec.count);
  CHECK(loaded.scatter_spec.lo == original.scatter_spec.lo);
  CHECK(loaded.scatter_spec.hi == original.scatter_spec.hi);
  CHECK(loaded.hyperparams.alpha == original.hyperparams.alpha);
  CHECK(loaded.hyperparams.beta == original.hyperparams.beta);
  CHECK(loaded.hyperparams.gamma == original.hyperparams.gamma);
  CHECK(loaded.hyperparams.psi0 == original.hyperparams.psi0);
  CHECK(loaded.hyperparams.K == original.hyperparams.K);
  CHECK_FALSE(loaded.mu0_specified);  // the shipped file leaves mu0 out

  // A pinned location prior survives the trip.
  Scenario pinned = original;
  pinned.mu0_specified = true;
  pinned.hyperparams.mu0 = Vec3(1.0, 2.0, 3.0);
  io::save_scenario(pinned, path);
  const Scenario repinned = io::load_scenario(path);
  CHECK(repinned.mu0_specified);
  CHECK(repinned.hyperparams.mu0 == Vec3(1.0, 2.0, 3.0));

  tamper_version(path);
  CHECK_THROWS_AS(io::load_scenario(path), std::runtime_error);
}

TEST_CASE("the trace CSV is a header plus one row per sweep") {
  const std::vector<double> trace = {-120.5, -98.25, -97.0 + 1.0 / 3.0};
  const std::string path = tmp_path("trace.csv");
  io::save_trace_csv(trace, path);
  const std::vector<std::string> lines = lines_of(path);
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == "sweep,joint_logprob");
  CHECK(lines[1] == "1,-120.5");
  CHECK(lines[2] == "2,-98.25");
  // Sweep numand value columns parse back exactly.
  const auto comma = lines[3].find(',');
  CHECK(lines[3].substr(0, comma) == "3");
  CHECK(same_bits(parse_double(lines[3].substr(comma + 1)), trace[2]));

  io::save_trace_csv({}, path);
  CHECK(lines_of(path).size() == 1);  // header only
}

TEST_CASE("the episode CSV carries logliks only on completing events") {
  EpisodeLog log;
  log.events = {
      {1, "detect", -1, std::nullopt},
      {1, "plan", 4, std::nullopt},
      {1, "grasp", 4, std::nullopt},
      {1, "release", 4, -12.5},
      {2, "detect", -1, std::nullopt},
      {2, "plan", 2, std::nullopt},
      {2, "grasp_failed", 2, -12.5},
  };
  const std::string path = tmp_path("episode.csv");
  io::save_episode_csv(log, path);
  const std::vector<std::string> lines = lines_of(path);
  REQUIRE(lines.size() == 8);
  CHECK(lines[0] == "step,event,object,loglik");
  CHECK(lines[1] == "1,detect,-1,");
  CHECK(lines[2] == "1,plan,4,");
  CHECK(lines[3] == "1,grasp,4,");
  CHECK(lines[4] == "1,release,4,-12.5");
  CHECK(lines[5] == "2,detect,-1,");
  CHECK(lines[7] == "2,grasp_failed,2,-12.5");
}

TEST_CASE("plan files list every step field") {
  PlanStep a;
  a.object_id = 3;
  a.concept_index = 1;
  a.target = Vec3(0.5, 0.25, 0.125);
  a.definedness = 0.0625;
  a.log_ratio = 4.5;
  a.decision_log_ratio = 4.5;
  a.unknown_flag = false;
  PlanStep b;
  b.object_id = 9;
  b.concept_index = 2;
  b.target = Vec3(1.0, 2.0, 3.0);
  b.definedness = 0.0001;
  b.log_ratio = 2.0;
  b.decision_log_ratio = 7.75;
  b.unknown_flag = true;
  b.resolved_word = 5;

  const std::string path = tmp_path("plan.json");
  io::save_plan({a, b}, path);
  const nlohmann::json j = io::load_json(path);
  CHECK(j["format_version"] == io::kFormatVersion);
  REQUIRE(j["steps"].size() == 2);
  CHECK(j["steps"][0]["object_id"] == 3);
  CHECK(j["steps"][0]["concept"] == 1);
  CHECK(j["steps"][0]["target"][2] == 0.125);
  CHECK(j["steps"][0]["definedness"] == 0.0625);
  CHECK(j["steps"][0]["unknown"] == false);
  CHECK(j["steps"][0]["resolved_word"].is_null());
  CHECK(j["steps"][1]["unknown"] == true);
  CHECK(j["steps"][1]["resolved_word"] == 5);
  CHECK(j["steps"][1]["log_ratio"] == 2.0);
  CHECK(j["steps"][1]["decision_log_ratio"] == 7.75);
}

TEST_CASE("score sheets serialize their lines and totals") {
  ScoreSheet sheet;
  sheet.lines = {{"object inside a toy box", 3, 7}, {"object inside its correct box", 2, 4}};
  sheet.total = 29;
  sheet.max_possible = 50;
  const nlohmann::json j = io::to_json(sheet);
  CHECK(j["total"] == 29);
  CHECK(j["max_possible"] == 50);
  REQUIRE(j["lines"].size() == 2);
  CHECK(j["lines"][0]["rule"] == "object inside a toy box");
  CHECK(j["lines"][0]["points_each"] == 3);
  CHECK(j["lines"][0]["count"] == 7);
  CHECK(j["lines"][0]["subtotal"] == 21);
}

TEST_CASE("oracle answer files resolve names and indices") {
  const Scenario s = io::load_scenario(testenv::scenario_path("stage2_2.json"));
  std::vector<std::string> class_names;
  for (const PoolObject& obj : s.pool) class_names.push_back(obj.class_name);

  const std::string path = tmp_path("oracle.json");
  nlohmann::json j;
  j["format_version"] = io::kFormatVersion;
  j["answers"] = {{"doll_penguin", "sofa"}, {"3", 2}};
  io::save_json(j, path);
  const std::map<int, int> mapping =
      io::load_oracle_map(path, class_names, s.word_names);
  REQUIRE(mapping.size() == 2);
  CHECK(mapping.at(9) == 5);  // doll_penguin -> sofa
  CHECK(mapping.at(3) == 2);

  // A bare object also works (no "answers" wrapper).
  io::save_json(nlohmann::json{{"doll_monkey", "sofa"}}, path);
  const std::map<int, int> bare = io::load_oracle_map(path, class_names, s.word_names);
  CHECK(bare.at(10) == 5);

  io::save_json(nlohmann::json{{"no_such_class", "sofa"}}, path);
  CHECK_THROWS_AS(io::load_oracle_map(path, class_names, s.word_names),
                  std::runtime_error);
  io::save_json(nlohmann::json{{"doll_monkey", "no_such_word"}}, path);
  CHECK_THROWS_AS(io::load_oracle_map(path, class_names, s.word_names),
                  std::runtime_error);
}

TEST_CASE("unreadable or malformed files fail loudly") {
  CHECK_THROWS_AS(io::load_json(tmp_path("does_not_exist.json")), std::runtime_error);
  const std::string path = tmp_path("garbage.json");
  io::save_text("this is { not json", path);
  CHECK_THROWS_AS(io::load_json(path), std::runtime_error);
  CHECK(slurp(path) == "this is { not json");
}
