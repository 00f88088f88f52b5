#pragma once

#include <string>
#include <vector>

#include "meso/config.hpp"

// Experiment driver: runs a configuration to a directory of CSV/binary
// outputs plus a JSON manifest, expands figure presets, and numerically
// compares two completed runs.

namespace meso {

struct OutputRecord {
  std::string file;  // path relative to the run directory
  std::string kind;  // "table", "wigner-csv", "wigner-binary", "config"
  std::string fnv1a64;
};

struct RunManifest {
  std::string tool;
  std::string version;
  std::string label;
  std::string config_hash;  // fnv1a64 of the canonical config text
  double resource_deficit = 0.0;   // resource-state norm lost to truncation
  double distribution_tail = 0.0;  // 1 - sum of P(m) over 0..m_max
  std::vector<std::string> flags;  // numeric warnings; non-empty means the
                                   // run needs attention (CLI exits 2)
  double wall_ms = 0.0;
  std::vector<OutputRecord> outputs;

  std::string dir;  // directory the manifest lives in (not serialized)

  std::string to_json() const;
  static RunManifest from_json(const std::string& text);
  static RunManifest load(const std::string& manifest_path);
};

// Runs the experiment, writing every output (and manifest.json) under
// config.out_dir. All data files are byte-deterministic for a given config;
// only the manifest's wall_ms varies between identical runs.
RunManifest run(const ExperimentConfig& config);

// Parameter sets of the bundled figure presets. fig3/fig4/fig5 are single
// configurations; fig2 expands to its four panels (both resources, both
// displacement phases). Out directories are relative ("<label>"), rebased by
// the CLI.
std::vector<ExperimentConfig> preset(const std::string& name);
std::vector<std::string> preset_names();

struct FileDiff {
  std::string file;
  std::string status;  // identical | differs | config-differs | only-a |
                       // only-b | shape-mismatch | unreadable
  double max_abs_diff = 0.0;
  std::string detail;
};

struct CompareReport {
  std::vector<FileDiff> files;

  // Largest numeric deviation across all comparable outputs.
  double max_abs_diff() const;
  // True when every shared data file matched byte-for-byte or within tol.
  // Config files may differ (that is what a cutoff or parameter study looks
  // like); missing, extra or unreadable files never pass.
  bool within(double tol) const;
  std::string to_text() const;
};

// Loads both manifests and numerically diffs every output they share
// (by parsed cell values for tables, by grid values for Wigner binaries).
CompareReport compare_runs(const std::string& manifest_a_path,
                           const std::string& manifest_b_path);

}  // namespace meso
