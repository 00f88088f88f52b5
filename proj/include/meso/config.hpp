#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "meso/detector.hpp"
#include "meso/fock.hpp"
#include "meso/phasespace.hpp"

// Experiment configuration: an INI-style plain-text document with
// [experiment], [wigner] and [detector] sections, parsed strictly (unknown
// sections or keys are errors) and serialized canonically so that configs
// round-trip losslessly and hash stably.

namespace meso {

// Invalid configuration; carries every violated precondition, not just the
// first one found.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

enum class Resource { kSplitSqueezed, kEpr };

std::string to_string(Resource r);
Resource resource_from_string(const std::string& s);

struct ExperimentConfig {
  // [experiment]
  std::string label = "custom";
  Resource resource = Resource::kSplitSqueezed;
  double squeezing_db = 10.0;
  double alpha_mag = 4.0;
  double alpha_phase = 0.0;  // radians; 0 = squeezed axis, pi/2 = antisqueezed
  int n_signal = 50;
  int n_ancilla = 80;
  int m_max = 50;                  // herald distribution range 0..m_max
  std::vector<int> conditioning;   // m values that get state/Wigner outputs
  unsigned long long seed = 1;     // Monte-Carlo oracles only
  std::string out_dir = "out";

  // [wigner]
  bool emit_wigner = true;
  int grid_n = 201;
  double grid_half_range = 6.0;  // ignored when grid_auto
  bool grid_auto = false;
  bool wigner_binary = false;  // also write .wmap next to each Wigner CSV

  // [detector]
  bool with_detector = false;
  DetectorModel detector;
  bool detector_v_max_auto = true;  // v_max derived from m_max unless given
  int detector_target_m = 25;       // condition on the bin whose mode is this
  int window_bins = 1;              // odd; >1 integrates a bin window at v*

  cplx alpha() const;
  GridSpec grid_for(const FockVector& psi) const;
  GridSpec grid_for(const DensityMatrix& rho) const;

  // Throws ConfigError listing every violation.
  void validate() const;

  // Canonical INI text (stable key order, shortest round-trip numbers).
  std::string to_ini() const;
  static ExperimentConfig from_ini(const std::string& text);
  static ExperimentConfig from_ini_file(const std::string& path);
};

// Low-level INI-subset reader shared with tests: '#' or ';' comments,
// [section] headers, key = value pairs, whitespace-trimmed.
std::map<std::string, std::map<std::string, std::string>> parse_ini(
    const std::string& text);

}  // namespace meso
