#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "qds/cli/cli.hpp"
#include "qds/davies.hpp"

namespace qds::cli {

namespace {

int report(const std::exception& e, std::ostream& err) {
  const auto [code, object] = describe_error(e);
  err << object.dump() << '\n';
  return code;
}

void list_presets(std::ostream& out) {
  out << "model presets:\n";
  for (const auto& p : model_preset_catalog()) out << "  " << p.name << "  " << p.doc << '\n';
  out << "spectral presets:\n";
  for (const auto& [name, doc] : spectral_preset_catalog()) out << "  " << name << "  " << doc << '\n';
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Markovian open quantum system dynamics from scenario files", "qds"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string out_dir;
  std::uint64_t seed = 0;
  bool quiet = false;
  auto* out_opt = app.add_option("--out", out_dir, "directory for relative output paths");
  auto* seed_opt = app.add_option("--seed", seed, "seed overriding the scenario");
  app.add_flag("--quiet", quiet, "suppress the summary on stdout");

  std::string file;
  auto* run_cmd = app.add_subcommand("run", "run a scenario");
  run_cmd->add_option("file", file, "scenario JSON")->required();
  auto* validate = app.add_subcommand("validate", "check a scenario without running it");
  validate->add_option("file", file, "scenario JSON")->required();
  auto* list = app.add_subcommand("list-presets", "list model and spectral presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << nlohmann::json{{"status", "error"}, {"kind", "usage"}, {"exit_code", int(kExitValidation)},
                          {"message", e.what()}}
               .dump()
        << '\n';
    return kExitValidation;
  }

  try {
    if (list->parsed()) {
      list_presets(out);
      return kExitOk;
    }
    const Scenario s = load_scenario(file);
    if (validate->parsed()) {
      validate_scenario(s);
      if (!quiet) out << nlohmann::json{{"status", "ok"}, {"task", task_name(s.task)}, {"preset", s.preset}}.dump() << '\n';
      return kExitOk;
    }
    RunOptions options;
    if (*out_opt) {
      options.out_dir = out_dir;
    } else if (const char* env = std::getenv("QDS_OUT_DIR"); env != nullptr && *env != '\0') {
      options.out_dir = env;
    }
    if (*seed_opt) options.seed = seed;
    const RunResult r = run_scenario(s, options);
    if (!quiet) out << r.summary.dump() << '\n';
    return kExitOk;
  } catch (const std::exception& e) {
    return report(e, err);
  }
}

}  // namespace qds::cli
