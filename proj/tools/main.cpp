#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>

#include <CLI11.hpp>

#include "config.hpp"
#include "decolab/kernels.hpp"
#include "decolab/types.hpp"
#include "experiments.hpp"
#include "manifest.hpp"

namespace fs = std::filesystem;
using namespace decolab;
using namespace decolab::cli;

namespace {

enum Exit { ok = 0, failure = 1, schema = 2, numerical = 3 };

ExperimentConfig resolve(const std::string& path, const std::string& preset) {
  if (!preset.empty()) {
    const Preset* p = find_preset(preset);
    if (!p) throw SchemaError("unknown preset '" + preset + "' (see list-presets)");
    return parse_config(p->config);
  }
  if (path.empty()) throw SchemaError("give a config file or --preset");
  return load_config(path);
}

fs::path output_dir(const ExperimentConfig& cfg, const std::string& override_dir) {
  fs::path d = override_dir.empty() ? fs::path(cfg.output_dir) : fs::path(override_dir);
  if (const char* root = std::getenv("DECOLAB_OUTPUT_ROOT"); root && *root && d.is_relative()) d = fs::path(root) / d;
  return d;
}

int run(const std::string& path, const std::string& preset, const std::string& out_override) {
  ExperimentConfig cfg;
  try {
    cfg = resolve(path, preset);
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return schema;
  }
  const fs::path dir = output_dir(cfg, out_override);
  try {
    fs::create_directories(dir);
  } catch (const fs::filesystem_error& e) {
    std::cerr << "cannot create output directory: " << e.what() << "\n";
    return failure;
  }
  std::cerr << cfg.experiment << " '" << cfg.name << "' -> " << dir.string() << " (kernels: " << kernels::active().name
            << ")\n";
  try {
    auto res = run_experiment(cfg, dir.string());
    if (res.summary.value("weak_coupling_warning", false))
      std::cerr << "warning: g sqrt(N)/Delta > 0.2, the dispersive picture is unreliable\n";
    if (res.summary.value("dissociation_warning", false))
      std::cerr << "warning: initial state has more than 1% weight above the dissociation threshold\n";
    write_manifest(dir.string(), cfg, res.files, res.summary);
    std::cout << res.summary.dump(2) << "\n";
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return schema;
  } catch (const NumericalError& e) {
    std::cerr << "numerical validation failed in " << cfg.experiment << ": " << e.what() << "\n";
    return numerical;
  } catch (const InputError& e) {
    std::cerr << "invalid input in " << cfg.experiment << ": " << e.what() << "\n";
    return schema;
  } catch (const std::exception& e) {
    std::cerr << "error in " << cfg.experiment << ": " << e.what() << "\n";
    return failure;
  }
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"decolab: decoherence experiments on Morse, Dicke and cavity models"};
  app.require_subcommand(1);

  std::string config, preset, out_dir;
  auto* run_cmd = app.add_subcommand("run", "run an experiment from a config file or a preset");
  run_cmd->add_option("config", config, "JSON config");
  run_cmd->add_option("--preset", preset, "named preset instead of a config file");
  run_cmd->add_option("-o,--output", out_dir, "output directory (overrides the config)");

  auto* validate_cmd = app.add_subcommand("validate", "check a config against its schema");
  validate_cmd->add_option("config", config, "JSON config")->required();

  auto* list_cmd = app.add_subcommand("list-presets", "print the preset catalog");

  std::string show;
  auto* show_cmd = app.add_subcommand("show-preset", "print the config of one preset");
  show_cmd->add_option("name", show, "preset name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (*run_cmd) {
    if (!config.empty() && !preset.empty()) {
      std::cerr << "give either a config file or --preset\n";
      return schema;
    }
    return run(config, preset, out_dir);
  }
  if (*validate_cmd) {
    try {
      auto cfg = load_config(config);
      std::cout << "ok: " << cfg.experiment << " '" << cfg.name << "'\n";
      return ok;
    } catch (const SchemaError& e) {
      std::cerr << "schema error: " << e.what() << "\n";
      return schema;
    }
  }
  if (*list_cmd) {
    for (const auto& p : presets())
      std::cout << std::left << std::setw(14) << p.name << " figure=" << std::setw(9) << p.figure
                << " budget=" << std::setw(5) << (std::to_string(p.budget_seconds) + "s") << " "
                << p.description << "\n";
    return ok;
  }
  if (*show_cmd) {
    const Preset* p = find_preset(show);
    if (!p) {
      std::cerr << "unknown preset '" << show << "'\n";
      return schema;
    }
    std::cout << p->config.dump(2) << "\n";
    return ok;
  }
  return failure;
}
