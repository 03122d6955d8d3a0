#pragma once

// Scenario-driven front end. A scenario is one JSON file:
//
//   {
//     "model":   { "preset": "two-level", "params": { "omega": 1.0, ... } },
//     "task":    "evolve" | "unravel" | "davies-build" | "cp-check"
//                | "thermo-ledger" | "spinboson-report",
//     "grid":    [t0, t1, ...],                  strictly increasing
//     "observables":   ["sigma3", "n", "p1", "coherence_12",
//                       { "name": "x", "matrix": <matrix> }],
//     "initial_state": "ground" | "excited" | "maximally-mixed" | "plus"
//                      | { "level": k }  (1-based) | { "coherent": [re, im] }
//                      | { "thermal": nbar } | <matrix>,
//     "options": { task-specific },
//     "output":  { "path": "out.csv", "format": "csv" | "json" },
//     "seed":    42,
//     "description": "free text"
//   }
//
// Matrices use the library JSON encoding {"dim", "re", "im"}.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "qds/davies.hpp"
#include "qds/errors.hpp"
#include "qds/gkls.hpp"
#include "qds/models.hpp"

namespace qds::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitIo = 1,
  kExitValidation = 2,
  kExitContract = 3,
  kExitUnknownPreset = 4,
};

class UnknownPreset : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// A contract failure that comes with a machine-readable report.
class ReportedViolation : public ContractViolation {
 public:
  ReportedViolation(const std::string& what, nlohmann::json details)
      : ContractViolation(what), details_(std::move(details)) {}
  const nlohmann::json& details() const { return details_; }

 private:
  nlohmann::json details_;
};

enum class Task { kEvolve, kUnravel, kDaviesBuild, kCpCheck, kThermoLedger, kSpinBosonReport };
enum class Format { kCsv, kJson };

std::string task_name(Task t);

struct OutputSpec {
  std::string path;  // empty -> "<task>.<format>"
  Format format = Format::kCsv;
};

struct Scenario {
  std::string preset;
  nlohmann::json params = nlohmann::json::object();
  Task task = Task::kEvolve;
  std::optional<std::vector<double>> grid;
  nlohmann::json observables = nlohmann::json::array();
  nlohmann::json initial_state;  // null -> "ground"
  nlohmann::json options = nlohmann::json::object();
  OutputSpec output;
  std::optional<std::uint64_t> seed;
};

/// Throws ValidationError on schema violations.
Scenario parse_scenario(const nlohmann::json& j);

/// Throws IoError when unreadable, ValidationError when not JSON.
Scenario load_scenario(const std::filesystem::path& file);

// ---------------------------------------------------------------------------
// Presets

struct PresetInfo {
  std::string name;
  std::string doc;
};

/// Alphabetized model presets.
std::vector<PresetInfo> model_preset_catalog();

/// A preset instantiated with its parameters (defaults filled in).
struct Model {
  std::string preset;
  nlohmann::json params;
  Index dim = 0;
  std::optional<GklsGenerator> generator;
  std::optional<DaviesGenerator> davies;
  std::optional<double> beta;
  std::optional<models::BlochBoltzmannDiscrete> bloch_boltzmann;
  std::optional<models::SpinBosonCoupling> spin_boson;
};

/// Throws UnknownPreset for unregistered names and ValidationError for bad
/// or unknown parameters.
Model build_model(const std::string& preset, const nlohmann::json& params);

// ---------------------------------------------------------------------------
// Running

struct NamedObservable {
  std::string name;
  Operator matrix;
  bool complex_valued = false;  // reported as name.re / name.im
};

std::vector<NamedObservable> resolve_observables(const nlohmann::json& spec, const Model& model);
DensityMatrix resolve_initial_state(const nlohmann::json& spec, const Model& model);

struct RunOptions {
  std::filesystem::path out_dir = ".";
  std::optional<std::uint64_t> seed;  // overrides the scenario
};

struct RunResult {
  std::filesystem::path artifact;
  nlohmann::json summary;
};

/// Checks everything that can be checked without running.
void validate_scenario(const Scenario& s);

RunResult run_scenario(const Scenario& s, const RunOptions& options);

/// Exit code and error object for an exception escaping a run.
std::pair<int, nlohmann::json> describe_error(const std::exception& e);

/// Full command line: `qds [--out DIR] [--seed N] [--quiet] <run FILE | validate FILE | list-presets>`.
/// QDS_OUT_DIR supplies the output directory when --out is absent.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qds::cli
