#include <cmath>
#include <fstream>
#include <set>

#include "qds/cli/cli.hpp"

namespace qds::cli {

namespace {

const std::vector<std::pair<std::string, Task>>& task_table() {
  static const std::vector<std::pair<std::string, Task>> table = {
      {"evolve", Task::kEvolve},
      {"unravel", Task::kUnravel},
      {"davies-build", Task::kDaviesBuild},
      {"cp-check", Task::kCpCheck},
      {"thermo-ledger", Task::kThermoLedger},
      {"spinboson-report", Task::kSpinBosonReport},
  };
  return table;
}

void reject_unknown_keys(const nlohmann::json& j, const std::set<std::string>& allowed,
                         const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw ValidationError("unknown key \"" + key + "\" in " + where);
  }
}

std::vector<double> parse_grid(const nlohmann::json& j) {
  if (!j.is_array()) throw ValidationError("grid must be an array of numbers");
  if (j.empty()) throw ValidationError("grid is empty");
  std::vector<double> grid;
  for (const auto& v : j) {
    if (!v.is_number()) throw ValidationError("grid entries must be numbers");
    const double t = v.get<double>();
    if (!std::isfinite(t)) throw ValidationError("grid entries must be finite");
    if (!grid.empty() && !(t > grid.back())) {
      throw ValidationError("grid must be strictly increasing");
    }
    grid.push_back(t);
  }
  return grid;
}

}  // namespace

std::string task_name(Task t) {
  for (const auto& [name, task] : task_table()) {
    if (task == t) return name;
  }
  return "unknown";
}

Scenario parse_scenario(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("scenario must be a JSON object");
  reject_unknown_keys(j, {"model", "task", "grid", "observables", "initial_state", "options",
                          "output", "seed", "description"},
                      "scenario");
  Scenario s;

  if (!j.contains("model") || !j["model"].is_object()) {
    throw ValidationError("scenario needs a \"model\" object");
  }
  const auto& model = j["model"];
  reject_unknown_keys(model, {"preset", "params"}, "model");
  if (!model.contains("preset") || !model["preset"].is_string()) {
    throw ValidationError("model.preset must be a string");
  }
  s.preset = model["preset"].get<std::string>();
  if (model.contains("params")) {
    if (!model["params"].is_object()) throw ValidationError("model.params must be an object");
    s.params = model["params"];
  }

  if (!j.contains("task") || !j["task"].is_string()) {
    throw ValidationError("scenario needs a \"task\" string");
  }
  const auto name = j["task"].get<std::string>();
  bool found = false;
  for (const auto& [key, task] : task_table()) {
    if (key == name) {
      s.task = task;
      found = true;
    }
  }
  if (!found) throw ValidationError("unknown task \"" + name + "\"");

  if (j.contains("grid")) s.grid = parse_grid(j["grid"]);

  if (j.contains("observables")) {
    if (!j["observables"].is_array()) throw ValidationError("observables must be an array");
    s.observables = j["observables"];
  }
  if (j.contains("initial_state")) s.initial_state = j["initial_state"];
  if (j.contains("options")) {
    if (!j["options"].is_object()) throw ValidationError("options must be an object");
    s.options = j["options"];
  }

  if (j.contains("output")) {
    const auto& out = j["output"];
    if (!out.is_object()) throw ValidationError("output must be an object");
    reject_unknown_keys(out, {"path", "format"}, "output");
    if (out.contains("path")) {
      if (!out["path"].is_string()) throw ValidationError("output.path must be a string");
      s.output.path = out["path"].get<std::string>();
    }
    if (out.contains("format")) {
      const auto f = out["format"].is_string() ? out["format"].get<std::string>() : "";
      if (f == "csv") {
        s.output.format = Format::kCsv;
      } else if (f == "json") {
        s.output.format = Format::kJson;
      } else {
        throw ValidationError("output.format must be \"csv\" or \"json\"");
      }
    }
  }

  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw ValidationError("seed must be a non-negative integer");
    s.seed = j["seed"].get<std::uint64_t>();
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open scenario file " + file.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("scenario is not valid JSON: ") + e.what());
  }
  return parse_scenario(j);
}

}  // namespace qds::cli
