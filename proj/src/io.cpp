#include "tidyplan/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace tidyplan::io {
namespace {

using nlohmann::json;

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  return out;
}

void require_version(const json& j, const std::string& path) {
  if (!j.contains("format_version") || !j["format_version"].is_number_integer() ||
      j["format_version"].get<int>() != kFormatVersion) {
    throw std::runtime_error("'" + path + "' has a missing or unsupported format_version");
  }
}

int resolve_name(const json& j, const std::vector<std::string>& names,
                 const std::string& what) {
  if (j.is_number_integer()) {
    const int index = j.get<int>();
    if (index < 0 || static_cast<std::size_t>(index) >= names.size()) {
      throw std::runtime_error(what + " index " + std::to_string(index) +
                               " out of range");
    }
    return index;
  }
  const auto name = j.get<std::string>();
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<int>(i);
  }
  throw std::runtime_error("unknown " + what + " '" + name + "'");
}

}  // namespace

std::string format_double(double value) {
  char buf[40];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

json to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json to_json(const Mat3& m) {
  json rows = json::array();
  for (int r = 0; r < 3; ++r) {
    rows.push_back(json::array({m(r, 0), m(r, 1), m(r, 2)}));
  }
  return rows;
}

Vec3 vec3_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) throw std::runtime_error("expected a 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Mat3 mat3_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) throw std::runtime_error("expected a 3x3 matrix");
  Mat3 m;
  for (int r = 0; r < 3; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || row.size() != 3) {
      throw std::runtime_error("expected a 3x3 matrix");
    }
    for (int c = 0; c < 3; ++c) m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

json to_json(const ConceptModel& model) {
  json j;
  j["format_version"] = kFormatVersion;
  j["K"] = model.K;
  j["L"] = model.L;
  j["M"] = model.M;
  j["mu"] = json::array();
  j["sigma"] = json::array();
  for (int k = 0; k < model.K; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    j["mu"].push_back(to_json(model.mu[ku]));
    j["sigma"].push_back(to_json(model.sigma[ku]));
  }
  j["phi"] = model.phi;
  j["eta"] = model.eta;
  j["pi"] = model.pi;
  return j;
}

ConceptModel model_from_json(const json& j) {
  ConceptModel model;
  model.K = j.at("K").get<int>();
  model.L = j.at("L").get<int>();
  model.M = j.at("M").get<int>();
  for (const json& v : j.at("mu")) model.mu.push_back(vec3_from_json(v));
  for (const json& m : j.at("sigma")) model.sigma.push_back(mat3_from_json(m));
  model.phi = j.at("phi").get<std::vector<std::vector<double>>>();
  model.eta = j.at("eta").get<std::vector<std::vector<double>>>();
  model.pi = j.at("pi").get<std::vector<double>>();
  validate(model);
  return model;
}

json to_json(const Hyperparams& h) {
  json j;
  j["alpha"] = h.alpha;
  j["beta"] = h.beta;
  j["gamma"] = h.gamma;
  j["mu0"] = to_json(h.mu0);
  j["kappa0"] = h.kappa0;
  j["psi0"] = to_json(h.psi0);
  j["nu0"] = h.nu0;
  j["K"] = h.K;
  return j;
}

Hyperparams hyperparams_from_json(const json& j, const Hyperparams& defaults) {
  Hyperparams h = defaults;
  if (j.contains("alpha")) h.alpha = j["alpha"].get<double>();
  if (j.contains("beta")) h.beta = j["beta"].get<double>();
  if (j.contains("gamma")) h.gamma = j["gamma"].get<double>();
  if (j.contains("mu0")) h.mu0 = vec3_from_json(j["mu0"]);
  if (j.contains("kappa0")) h.kappa0 = j["kappa0"].get<double>();
  if (j.contains("psi0")) {
    // Either a full matrix or a scalar for an isotropic diagonal.
    if (j["psi0"].is_number()) {
      h.psi0 = Mat3::Identity() * j["psi0"].get<double>();
    } else {
      h.psi0 = mat3_from_json(j["psi0"]);
    }
  }
  if (j.contains("nu0")) h.nu0 = j["nu0"].get<double>();
  if (j.contains("K")) h.K = j["K"].get<int>();
  validate(h);
  return h;
}

json to_json(const PlanStep& step) {
  json j;
  j["object_id"] = step.object_id;
  j["concept"] = step.concept_index;
  j["target"] = to_json(step.target);
  j["definedness"] = step.definedness;
  j["log_ratio"] = step.log_ratio;
  j["decision_log_ratio"] = step.decision_log_ratio;
  j["unknown"] = step.unknown_flag;
  j["resolved_word"] = step.resolved_word ? json(*step.resolved_word) : json(nullptr);
  return j;
}

json to_json(const ScoreSheet& sheet) {
  json j;
  j["lines"] = json::array();
  for (const ScoreLine& line : sheet.lines) {
    j["lines"].push_back({{"rule", line.rule},
                          {"points_each", line.points_each},
                          {"count", line.count},
                          {"subtotal", line.subtotal()}});
  }
  j["total"] = sheet.total;
  j["max_possible"] = sheet.max_possible;
  return j;
}

json to_json(const TidyDatabase& db) {
  json j;
  j["format_version"] = kFormatVersion;
  j["records"] = json::array();
  for (const TidyRecord& r : db.records()) {
    j["records"].push_back({{"class", r.object_class}, {"position", to_json(r.position)}});
  }
  return j;
}

TidyDatabase database_from_json(const json& j) {
  std::vector<TidyRecord> records;
  for (const json& r : j.at("records")) {
    records.push_back({r.at("class").get<int>(), vec3_from_json(r.at("position"))});
  }
  return TidyDatabase(std::move(records));
}

void save_dataset(const LabeledDataset& data, const std::string& path) {
  std::ofstream out = open_output(path);
  json header;
  header["format_version"] = kFormatVersion;
  header["num_classes"] = data.num_classes;
  header["num_words"] = data.num_words;
  header["class_names"] = data.class_names;
  header["word_names"] = data.word_names;
  out << header.dump() << '\n';
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Observation& obs = data.observations[i];
    json record;
    record["position"] = to_json(obs.position);
    record["class"] = obs.object_class;
    record["words"] = obs.words;
    if (data.truth_assignments) record["truth"] = (*data.truth_assignments)[i];
    out << record.dump() << '\n';
  }
}

LabeledDataset load_dataset(const std::string& path) {
  std::ifstream in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("'" + path + "' is empty");
  const json header = json::parse(line);
  require_version(header, path);
  LabeledDataset data;
  data.num_classes = header.at("num_classes").get<int>();
  data.num_words = header.at("num_words").get<int>();
  if (header.contains("class_names")) {
    data.class_names = header["class_names"].get<std::vector<std::string>>();
  }
  if (header.contains("word_names")) {
    data.word_names = header["word_names"].get<std::vector<std::string>>();
  }
  std::vector<int> truth;
  bool any_truth = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json record = json::parse(line);
    Observation obs;
    obs.position = vec3_from_json(record.at("position"));
    obs.object_class = record.at("class").get<int>();
    if (record.contains("words")) obs.words = record["words"].get<std::vector<int>>();
    data.observations.push_back(std::move(obs));
    if (record.contains("truth")) {
      any_truth = true;
      truth.push_back(record["truth"].get<int>());
    } else {
      truth.push_back(-1);
    }
  }
  if (any_truth && truth.size() == data.size()) data.truth_assignments = truth;
  validate(data);
  return data;
}

void save_model(const ConceptModel& model, const std::string& path) {
  save_json(to_json(model), path);
}

ConceptModel load_model(const std::string& path) {
  const json j = load_json(path);
  require_version(j, path);
  return model_from_json(j);
}

void save_database(const TidyDatabase& db, const std::string& path) {
  save_json(to_json(db), path);
}

TidyDatabase load_database(const std::string& path) {
  const json j = load_json(path);
  require_version(j, path);
  return database_from_json(j);
}

void save_trace_csv(const std::vector<double>& trace, const std::string& path) {
  std::ofstream out = open_output(path);
  out << "sweep,joint_logprob\n";
  for (std::size_t t = 0; t < trace.size(); ++t) {
    out << (t + 1) << ',' << format_double(trace[t]) << '\n';
  }
}

void save_episode_csv(const EpisodeLog& log, const std::string& path) {
  std::ofstream out = open_output(path);
  out << "step,event,object,loglik\n";
  for (const EpisodeEvent& e : log.events) {
    out << e.step << ',' << e.event << ',' << e.object_id << ',';
    if (e.loglik) out << format_double(*e.loglik);
    out << '\n';
  }
}

void save_plan(const std::vector<PlanStep>& steps, const std::string& path) {
  json j;
  j["format_version"] = kFormatVersion;
  j["steps"] = json::array();
  for (const PlanStep& step : steps) j["steps"].push_back(to_json(step));
  save_json(j, path);
}

Scenario load_scenario(const std::string& path) {
  const json j = load_json(path);
  require_version(j, path);
  Scenario scenario;
  scenario.name = j.value("name", std::string{});
  const auto stage = j.at("stage").get<std::string>();
  if (stage == "stage1") {
    scenario.stage = Stage::Stage1;
  } else if (stage == "stage2_1") {
    scenario.stage = Stage::Stage2_1;
  } else if (stage == "stage2_2") {
    scenario.stage = Stage::Stage2_2;
  } else {
    throw std::runtime_error("unknown stage '" + stage + "' in '" + path + "'");
  }
  if (j.contains("word_names")) {
    scenario.word_names = j["word_names"].get<std::vector<std::string>>();
  }
  scenario.word_fraction = j.value("word_fraction", 0.05);
  scenario.training_count = j.value("training_count", 225);
  for (const json& p : j.at("places")) {
    Place place;
    place.name = p.at("name").get<std::string>();
    place.center = vec3_from_json(p.at("center"));
    place.radius = p.value("radius", 0.3);
    if (p.contains("word")) {
      place.word = resolve_name(p["word"], scenario.word_names, "word");
    }
    scenario.places.push_back(std::move(place));
  }
  std::vector<std::string> place_names;
  for (const Place& p : scenario.places) place_names.push_back(p.name);
  for (const json& o : j.at("pool")) {
    PoolObject obj;
    obj.class_name = o.at("class").get<std::string>();
    obj.place = resolve_name(o.at("place"), place_names, "place");
    obj.is_unknown = o.value("unknown", false);
    scenario.pool.push_back(std::move(obj));
  }
  const json& sc = j.at("scatter");
  scenario.scatter_spec.count = sc.at("count").get<int>();
  scenario.scatter_spec.lo = vec3_from_json(sc.at("lo"));
  scenario.scatter_spec.hi = vec3_from_json(sc.at("hi"));
  if (j.contains("hyperparams")) {
    scenario.mu0_specified = j["hyperparams"].contains("mu0");
    scenario.hyperparams = hyperparams_from_json(j["hyperparams"]);
  }
  validate(scenario);
  return scenario;
}

void save_scenario(const Scenario& scenario, const std::string& path) {
  json j;
  j["format_version"] = kFormatVersion;
  j["name"] = scenario.name;
  switch (scenario.stage) {
    case Stage::Stage1: j["stage"] = "stage1"; break;
    case Stage::Stage2_1: j["stage"] = "stage2_1"; break;
    case Stage::Stage2_2: j["stage"] = "stage2_2"; break;
  }
  j["word_names"] = scenario.word_names;
  j["word_fraction"] = scenario.word_fraction;
  j["training_count"] = scenario.training_count;
  j["places"] = json::array();
  for (const Place& p : scenario.places) {
    json place;
    place["name"] = p.name;
    place["center"] = to_json(p.center);
    place["radius"] = p.radius;
    if (p.word >= 0) place["word"] = p.word;
    j["places"].push_back(std::move(place));
  }
  j["pool"] = json::array();
  for (const PoolObject& o : scenario.pool) {
    j["pool"].push_back({{"class", o.class_name},
                         {"place", scenario.places[static_cast<std::size_t>(o.place)].name},
                         {"unknown", o.is_unknown}});
  }
  j["scatter"] = {{"count", scenario.scatter_spec.count},
                  {"lo", to_json(scenario.scatter_spec.lo)},
                  {"hi", to_json(scenario.scatter_spec.hi)}};
  json h = to_json(scenario.hyperparams);
  if (!scenario.mu0_specified) h.erase("mu0");
  j["hyperparams"] = std::move(h);
  save_json(j, path);
}

std::map<int, int> load_oracle_map(const std::string& path,
                                   const std::vector<std::string>& class_names,
                                   const std::vector<std::string>& word_names) {
  const json j = load_json(path);
  const json& answers = j.contains("answers") ? j["answers"] : j;
  std::map<int, int> mapping;
  for (const auto& [key, value] : answers.items()) {
    if (key == "format_version") continue;
    int object_class = -1;
    // Keys are strings in JSON: try the class vocabulary first, then
    // a bare integer.
    bool named = false;
    for (std::size_t c = 0; c < class_names.size(); ++c) {
      if (class_names[c] == key) {
        object_class = static_cast<int>(c);
        named = true;
        break;
      }
    }
    if (!named) {
      try {
        object_class = std::stoi(key);
      } catch (const std::exception&) {
        throw std::runtime_error("unknown object class '" + key + "' in '" + path + "'");
      }
    }
    mapping[object_class] = resolve_name(value, word_names, "word");
  }
  return mapping;
}

void save_json(const json& j, const std::string& path) {
  std::ofstream out = open_output(path);
  out << j.dump(2) << '\n';
}

json load_json(const std::string& path) {
  std::ifstream in = open_input(path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("failed to parse '" + path + "': " + e.what());
  }
  return j;
}

void save_text(const std::string& text, const std::string& path) {
  std::ofstream out = open_output(path);
  out << text;
}

}  // namespace tidyplan::io
