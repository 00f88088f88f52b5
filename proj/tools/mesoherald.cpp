// Command-line driver: runs experiment configs or bundled figure presets to
// deterministic data directories, validates configs, and numerically compares
// completed runs.
//
// Exit codes: 0 success; 1 configuration/usage error; 2 numeric flags raised
// (truncation, zero evidence, boundary minima) or comparison above tolerance.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "meso/experiment.hpp"
#include "meso/parallel.hpp"
#include "meso/version.hpp"

namespace {

int report_run(const meso::RunManifest& man) {
  std::printf("[%s] wrote %zu outputs to %s (%.0f ms)\n", man.label.c_str(),
              man.outputs.size(), man.dir.c_str(), man.wall_ms);
  std::printf("  resource truncation deficit: %.3g, distribution tail: %.3g\n",
              man.resource_deficit, man.distribution_tail);
  for (const std::string& f : man.flags) {
    std::printf("  FLAG: %s\n", f.c_str());
  }
  return man.flags.empty() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(meso::kToolName) +
               " — conditional non-Gaussian state preparation by displaced "
               "photon counting"};
  app.set_version_flag("--version", std::string(meso::kToolVersion));
  app.require_subcommand(1);

  std::string config_path;
  auto* cmd_run = app.add_subcommand("run", "Run an experiment config file");
  cmd_run->add_option("config", config_path, "INI config file")
      ->required()
      ->check(CLI::ExistingFile);

  std::string preset_name, preset_out = "out";
  auto* cmd_preset =
      app.add_subcommand("preset", "Run a bundled figure preset");
  cmd_preset->add_option("name", preset_name, "fig2, fig3, fig4 or fig5")
      ->required();
  cmd_preset->add_option("--out", preset_out, "Base output directory")
      ->capture_default_str();

  std::string manifest_a, manifest_b;
  double tol = 0.0;
  auto* cmd_compare =
      app.add_subcommand("compare", "Numerically diff two run manifests");
  cmd_compare->add_option("manifest_a", manifest_a, "First manifest.json")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_compare->add_option("manifest_b", manifest_b, "Second manifest.json")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_compare
      ->add_option("--tol", tol,
                   "Largest numeric difference still counted as a match")
      ->capture_default_str();

  std::string validate_path;
  auto* cmd_validate = app.add_subcommand(
      "validate", "Check a config file and echo its canonical form");
  cmd_validate->add_option("config", validate_path, "INI config file")
      ->required()
      ->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*cmd_run) {
      meso::ExperimentConfig config =
          meso::ExperimentConfig::from_ini_file(config_path);
      return report_run(meso::run(config));
    }
    if (*cmd_preset) {
      std::vector<meso::ExperimentConfig> configs;
      try {
        configs = meso::preset(preset_name);
      } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
      }
      int worst = 0;
      for (meso::ExperimentConfig& c : configs) {
        c.out_dir =
            (std::filesystem::path(preset_out) / c.out_dir).string();
        worst = std::max(worst, report_run(meso::run(c)));
      }
      return worst;
    }
    if (*cmd_compare) {
      meso::CompareReport rep = meso::compare_runs(manifest_a, manifest_b);
      std::fputs(rep.to_text().c_str(), stdout);
      if (rep.within(tol)) {
        std::printf("runs match within tol = %g\n", tol);
        return 0;
      }
      std::printf("runs differ beyond tol = %g (max |diff| = %g)\n", tol,
                  rep.max_abs_diff());
      return 2;
    }
    if (*cmd_validate) {
      meso::ExperimentConfig config =
          meso::ExperimentConfig::from_ini_file(validate_path);
      config.validate();
      std::fputs(config.to_ini().c_str(), stdout);
      return 0;
    }
  } catch (const meso::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
