#include "meso/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "meso/util.hpp"

namespace meso {

namespace {

std::string join(const std::vector<std::string>& parts,
                 const std::string& sep) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw std::invalid_argument("expected true/false, got '" + s + "'");
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, ',')) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(parse_int(cur));
  }
  return out;
}

std::string format_int_list(const std::vector<int>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(v[i]);
  }
  return out;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : std::runtime_error("invalid configuration:\n  - " +
                         join(violations, "\n  - ")),
      violations_(std::move(violations)) {}

std::string to_string(Resource r) {
  return r == Resource::kSplitSqueezed ? "split_squeezed" : "epr";
}

Resource resource_from_string(const std::string& s) {
  if (s == "split_squeezed") return Resource::kSplitSqueezed;
  if (s == "epr") return Resource::kEpr;
  throw std::invalid_argument("resource must be 'split_squeezed' or 'epr', got '" +
                              s + "'");
}

cplx ExperimentConfig::alpha() const {
  return std::polar(alpha_mag, alpha_phase);
}

GridSpec ExperimentConfig::grid_for(const FockVector& psi) const {
  return grid_auto ? auto_grid(psi, grid_n)
                   : GridSpec::centered(grid_half_range, grid_n);
}

GridSpec ExperimentConfig::grid_for(const DensityMatrix& rho) const {
  return grid_auto ? auto_grid(rho, grid_n)
                   : GridSpec::centered(grid_half_range, grid_n);
}

void ExperimentConfig::validate() const {
  std::vector<std::string> v;
  if (label.empty()) v.push_back("label must be non-empty");
  if (!(squeezing_db >= 0.0)) v.push_back("squeezing_db must be >= 0");
  if (!(alpha_mag >= 0.0)) v.push_back("alpha_mag must be >= 0");
  if (!std::isfinite(alpha_phase)) v.push_back("alpha_phase must be finite");
  if (n_signal < 1) v.push_back("n_signal must be >= 1");
  if (n_ancilla < 1) v.push_back("n_ancilla must be >= 1");
  if (m_max < 0 || m_max > n_ancilla) {
    v.push_back("m_max must be in [0, n_ancilla]");
  }
  for (int m : conditioning) {
    if (m < 0 || m > m_max) {
      v.push_back("conditioning m=" + std::to_string(m) +
                  " outside [0, m_max]");
    }
  }
  if (out_dir.empty()) v.push_back("out_dir must be non-empty");
  if (grid_n < 2) v.push_back("grid_n must be >= 2");
  if (!grid_auto && !(grid_half_range > 0.0)) {
    v.push_back("half_range must be > 0");
  }
  if (with_detector) {
    if (detector_target_m < 0 || detector_target_m > m_max) {
      v.push_back("target_m must be in [0, m_max]");
    }
    if (window_bins < 1 || window_bins % 2 == 0) {
      v.push_back("window_bins must be a positive odd count");
    }
    try {
      DetectorModel d = detector;
      if (detector_v_max_auto) {
        d.v_max = DetectorModel::required_v_max(m_max, d.excess_noise);
      }
      d.validate(m_max);
    } catch (const std::invalid_argument& e) {
      v.push_back(std::string("detector: ") + e.what());
    }
  }
  if (!v.empty()) throw ConfigError(std::move(v));
}

std::string ExperimentConfig::to_ini() const {
  std::ostringstream os;
  os << "[experiment]\n";
  os << "label = " << label << "\n";
  os << "resource = " << to_string(resource) << "\n";
  os << "squeezing_db = " << format_double(squeezing_db) << "\n";
  os << "alpha_mag = " << format_double(alpha_mag) << "\n";
  os << "alpha_phase = " << format_double(alpha_phase) << "\n";
  os << "n_signal = " << n_signal << "\n";
  os << "n_ancilla = " << n_ancilla << "\n";
  os << "m_max = " << m_max << "\n";
  os << "conditioning = " << format_int_list(conditioning) << "\n";
  os << "seed = " << seed << "\n";
  os << "out_dir = " << out_dir << "\n";
  os << "\n[wigner]\n";
  os << "enabled = " << (emit_wigner ? "true" : "false") << "\n";
  os << "grid_n = " << grid_n << "\n";
  os << "half_range = " << format_double(grid_half_range) << "\n";
  os << "auto = " << (grid_auto ? "true" : "false") << "\n";
  os << "binary = " << (wigner_binary ? "true" : "false") << "\n";
  os << "\n[detector]\n";
  os << "enabled = " << (with_detector ? "true" : "false") << "\n";
  os << "efficiency = " << format_double(detector.efficiency) << "\n";
  os << "excess_noise = " << format_double(detector.excess_noise) << "\n";
  os << "mean_gain = " << format_double(detector.mean_gain) << "\n";
  os << "dark_sigma = " << format_double(detector.dark_sigma) << "\n";
  os << "v_max = "
     << (detector_v_max_auto ? std::string("auto")
                             : format_double(detector.v_max))
     << "\n";
  os << "dv = " << format_double(detector.dv) << "\n";
  os << "variance_convention = "
     << (detector.variance_convention == VarianceConvention::kAsPrinted
             ? "as-printed"
             : "classical")
     << "\n";
  os << "target_m = " << detector_target_m << "\n";
  os << "window_bins = " << window_bins << "\n";
  return os.str();
}

std::map<std::string, std::map<std::string, std::string>> parse_ini(
    const std::string& text) {
  std::map<std::string, std::map<std::string, std::string>> doc;
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    size_t cut = line.find_first_of("#;");
    if (cut != std::string::npos) line.erase(cut);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError({"line " + std::to_string(lineno) +
                           ": unterminated section header"});
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) {
        throw ConfigError(
            {"line " + std::to_string(lineno) + ": empty section name"});
      }
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError({"line " + std::to_string(lineno) +
                         ": expected 'key = value', got '" + line + "'"});
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError(
          {"line " + std::to_string(lineno) + ": empty key"});
    }
    auto [it, fresh] = doc[section].emplace(key, value);
    if (!fresh) {
      throw ConfigError({"line " + std::to_string(lineno) +
                         ": duplicate key '" + key + "' in [" + section +
                         "]"});
    }
  }
  return doc;
}

ExperimentConfig ExperimentConfig::from_ini(const std::string& text) {
  auto doc = parse_ini(text);
  ExperimentConfig c;
  std::vector<std::string> errs;

  auto eat = [&](const std::string& section, const std::string& key,
                 auto&& apply) {
    auto sit = doc.find(section);
    if (sit == doc.end()) return;
    auto kit = sit->second.find(key);
    if (kit == sit->second.end()) return;
    try {
      apply(kit->second);
    } catch (const std::exception& e) {
      errs.push_back("[" + section + "] " + key + ": " + e.what());
    }
    sit->second.erase(kit);
  };

  eat("experiment", "label", [&](const std::string& s) { c.label = s; });
  eat("experiment", "resource",
      [&](const std::string& s) { c.resource = resource_from_string(s); });
  eat("experiment", "squeezing_db",
      [&](const std::string& s) { c.squeezing_db = parse_double(s); });
  eat("experiment", "alpha_mag",
      [&](const std::string& s) { c.alpha_mag = parse_double(s); });
  eat("experiment", "alpha_phase",
      [&](const std::string& s) { c.alpha_phase = parse_double(s); });
  eat("experiment", "n_signal",
      [&](const std::string& s) { c.n_signal = parse_int(s); });
  eat("experiment", "n_ancilla",
      [&](const std::string& s) { c.n_ancilla = parse_int(s); });
  eat("experiment", "m_max",
      [&](const std::string& s) { c.m_max = parse_int(s); });
  eat("experiment", "conditioning",
      [&](const std::string& s) { c.conditioning = parse_int_list(s); });
  eat("experiment", "seed", [&](const std::string& s) {
    c.seed = static_cast<unsigned long long>(std::stoull(s));
  });
  eat("experiment", "out_dir", [&](const std::string& s) { c.out_dir = s; });

  eat("wigner", "enabled",
      [&](const std::string& s) { c.emit_wigner = parse_bool(s); });
  eat("wigner", "grid_n",
      [&](const std::string& s) { c.grid_n = parse_int(s); });
  eat("wigner", "half_range",
      [&](const std::string& s) { c.grid_half_range = parse_double(s); });
  eat("wigner", "auto",
      [&](const std::string& s) { c.grid_auto = parse_bool(s); });
  eat("wigner", "binary",
      [&](const std::string& s) { c.wigner_binary = parse_bool(s); });

  eat("detector", "enabled",
      [&](const std::string& s) { c.with_detector = parse_bool(s); });
  eat("detector", "efficiency",
      [&](const std::string& s) { c.detector.efficiency = parse_double(s); });
  eat("detector", "excess_noise", [&](const std::string& s) {
    c.detector.excess_noise = parse_double(s);
  });
  eat("detector", "mean_gain",
      [&](const std::string& s) { c.detector.mean_gain = parse_double(s); });
  eat("detector", "dark_sigma",
      [&](const std::string& s) { c.detector.dark_sigma = parse_double(s); });
  eat("detector", "v_max", [&](const std::string& s) {
    if (s == "auto") {
      c.detector_v_max_auto = true;
    } else {
      c.detector_v_max_auto = false;
      c.detector.v_max = parse_double(s);
    }
  });
  eat("detector", "dv",
      [&](const std::string& s) { c.detector.dv = parse_double(s); });
  eat("detector", "variance_convention", [&](const std::string& s) {
    if (s == "as-printed") {
      c.detector.variance_convention = VarianceConvention::kAsPrinted;
    } else if (s == "classical") {
      c.detector.variance_convention = VarianceConvention::kClassical;
    } else {
      throw std::invalid_argument("must be 'as-printed' or 'classical'");
    }
  });
  eat("detector", "target_m",
      [&](const std::string& s) { c.detector_target_m = parse_int(s); });
  eat("detector", "window_bins",
      [&](const std::string& s) { c.window_bins = parse_int(s); });

  // Anything left over is a typo or an unknown option.
  for (const auto& [section, keys] : doc) {
    if (section != "experiment" && section != "wigner" &&
        section != "detector") {
      errs.push_back("unknown section [" + section + "]");
      continue;
    }
    for (const auto& [key, value] : keys) {
      errs.push_back("unknown key '" + key + "' in [" + section + "]");
    }
  }
  if (!errs.empty()) throw ConfigError(std::move(errs));
  return c;
}

ExperimentConfig ExperimentConfig::from_ini_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError({"cannot open config file '" + path + "'"});
  std::ostringstream ss;
  ss << f.rdbuf();
  return from_ini(ss.str());
}

}  // namespace meso
