#include "meso/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "meso/detector.hpp"
#include "meso/heralding.hpp"
#include "meso/phasespace.hpp"
#include "meso/util.hpp"
#include "meso/version.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace meso {

namespace {

// Writes one output file and records its checksum.
struct OutputWriter {
  fs::path dir;
  std::vector<OutputRecord>* records;

  void write(const std::string& name, const std::string& kind,
             const std::string& bytes) {
    fs::path p = dir / name;
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open for writing: " + p.string());
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    f.close();
    if (!f) throw std::runtime_error("short write: " + p.string());
    records->push_back({name, kind, hex64(fnv1a64(bytes))});
  }
};

std::string distribution_csv(const HeraldedEnsemble& ens) {
  std::ostringstream os;
  os << "m,probability,parity,reliable\n";
  for (int m = 0; m <= ens.m_max(); ++m) {
    os << m << ',' << format_double(ens.probs[m]) << ','
       << format_double(parity_expectation(ens.states[m])) << ','
       << (ens.reliable[m] ? 1 : 0) << '\n';
  }
  return os.str();
}

std::string state_csv(const FockVector& psi) {
  std::ostringstream os;
  os << "n,re,im\n";
  for (int n = 0; n <= psi.cutoff(); ++n) {
    os << n << ',' << format_double(psi.a[n].real()) << ','
       << format_double(psi.a[n].imag()) << '\n';
  }
  return os.str();
}

std::string pv_csv(const ResponseMatrix& resp,
                   const std::vector<double>& prior) {
  std::ostringstream os;
  os << "v,probability\n";
  for (int i = 0; i < resp.bins; ++i) {
    os << format_double(resp.v_at(i)) << ','
       << format_double(evidence(resp, prior, i)) << '\n';
  }
  return os.str();
}

std::string posterior_csv(const std::vector<double>& post) {
  std::ostringstream os;
  os << "m,posterior\n";
  for (size_t m = 0; m < post.size(); ++m) {
    os << m << ',' << format_double(post[m]) << '\n';
  }
  return os.str();
}

std::string populations_csv(const DensityMatrix& rho) {
  std::ostringstream os;
  os << "n,population\n";
  for (int n = 0; n <= rho.n; ++n) {
    os << n << ',' << format_double(rho.at(n, n).real()) << '\n';
  }
  return os.str();
}

std::string wigner_csv_string(const WignerMap& map) {
  std::ostringstream os;
  write_wigner_csv(map, os);
  return os.str();
}

std::string wigner_binary_string(const WignerMap& map) {
  std::ostringstream os(std::ios::binary);
  write_wigner_binary(map, os);
  return os.str();
}

// Accumulates metrics.csv. Wigner-dependent cells stay empty when the map was
// not computed.
struct MetricsTable {
  std::ostringstream os;
  MetricsTable() {
    os << "kind,id,probability,parity,purity,wigner_min,wigner_min_x,"
          "wigner_min_p,negativity_volume,wigner_integral\n";
  }
  void add(const std::string& kind, int id, double probability, double parity,
           double pur, const NegativityMetrics* nm, double integral) {
    os << kind << ',' << id << ',' << format_double(probability) << ','
       << format_double(parity) << ',' << format_double(pur) << ',';
    if (nm) {
      os << format_double(nm->min_value) << ',' << format_double(nm->min_x)
         << ',' << format_double(nm->min_p) << ','
         << format_double(nm->negativity_volume) << ','
         << format_double(integral);
    } else {
      os << ",,,,";
    }
    os << '\n';
  }
};

}  // namespace

RunManifest run(const ExperimentConfig& config) {
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();

  RunManifest man;
  man.tool = kToolName;
  man.version = kToolVersion;
  man.label = config.label;
  const std::string ini = config.to_ini();
  man.config_hash = hex64(fnv1a64(ini));
  man.dir = config.out_dir;

  fs::create_directories(config.out_dir);
  OutputWriter out{config.out_dir, &man.outputs};

  const double r = db_to_r(config.squeezing_db);
  // Deficits are measured and flagged rather than thrown, so a marginal
  // cutoff still produces inspectable outputs.
  TwoModeState resource =
      config.resource == Resource::kSplitSqueezed
          ? split_squeezed_state(r, 0.0, config.n_signal, config.n_ancilla,
                                 2.0)
          : epr_state(r, config.n_ancilla, 2.0);
  man.resource_deficit = resource.truncation_deficit();
  if (man.resource_deficit > 1e-6) {
    man.flags.push_back("resource state loses " +
                        format_double(man.resource_deficit) +
                        " of its norm to truncation; raise the cutoffs");
  }

  HeraldedEnsemble ens = herald_ensemble(resource, config.alpha(),
                                         config.m_max);
  man.distribution_tail = ens.tail_mass();

  out.write("config.ini", "config", ini);
  out.write("distribution.csv", "table", distribution_csv(ens));

  MetricsTable metrics;
  auto analyze = [&](const std::string& kind, int id, double probability,
                     double parity, double pur, const WignerMap* map) {
    if (!map) {
      metrics.add(kind, id, probability, parity, pur, nullptr, 0.0);
      return;
    }
    NegativityMetrics nm = negativity_metrics(*map);
    if (nm.min_value < 0.0 && nm.min_on_boundary) {
      man.flags.push_back("wigner minimum for " + kind + " " +
                          std::to_string(id) +
                          " sits on the grid boundary; enlarge the grid");
    }
    metrics.add(kind, id, probability, parity, pur, &nm, map->integral());
  };

  for (int m : config.conditioning) {
    const FockVector& psi = ens.states[m];
    if (!ens.reliable[m]) {
      man.flags.push_back(
          "conditioning outcome m=" + std::to_string(m) + " has probability " +
          format_double(ens.probs[m]) + " below the reliability floor");
    }
    const std::string tag = "m" + std::to_string(m);
    out.write("state_" + tag + ".csv", "table", state_csv(psi));
    if (config.emit_wigner) {
      WignerMap map = wigner(psi, config.grid_for(psi));
      out.write("wigner_" + tag + ".csv", "wigner-csv",
                wigner_csv_string(map));
      if (config.wigner_binary) {
        out.write("wigner_" + tag + ".wmap", "wigner-binary",
                  wigner_binary_string(map));
      }
      analyze("pure", m, ens.probs[m], parity_expectation(psi), 1.0, &map);
    } else {
      analyze("pure", m, ens.probs[m], parity_expectation(psi), 1.0, nullptr);
    }
  }

  if (config.with_detector) {
    DetectorModel det = config.detector;
    if (config.detector_v_max_auto) {
      double need =
          DetectorModel::required_v_max(config.m_max, det.excess_noise);
      det.v_max = det.dv * std::ceil(need / det.dv - 1e-9);
    }
    ResponseMatrix resp = detector_response(det, config.m_max);
    out.write("pv_distribution.csv", "table", pv_csv(resp, ens.probs));
    try {
      int vstar =
          posterior_mode_bin(resp, ens.probs, config.detector_target_m);
      int half = (config.window_bins - 1) / 2;
      int lo = std::max(0, vstar - half);
      int hi = std::min(resp.bins - 1, vstar + half);
      std::vector<double> post = posterior(resp, ens.probs, lo, hi);
      out.write("posterior.csv", "table", posterior_csv(post));
      DensityMatrix rho = herald_mixed(ens, resp, lo, hi);
      out.write("mixed_state.csv", "table", populations_csv(rho));
      double ev = 0.0;
      for (int v = lo; v <= hi; ++v) ev += evidence(resp, ens.probs, v);
      if (config.emit_wigner) {
        WignerMap map = wigner(rho, config.grid_for(rho));
        out.write("wigner_mixed.csv", "wigner-csv", wigner_csv_string(map));
        if (config.wigner_binary) {
          out.write("wigner_mixed.wmap", "wigner-binary",
                    wigner_binary_string(map));
        }
        analyze("mixed", config.detector_target_m, ev,
                parity_expectation(rho), purity(rho), &map);
      } else {
        analyze("mixed", config.detector_target_m, ev,
                parity_expectation(rho), purity(rho), nullptr);
      }
    } catch (const std::domain_error& e) {
      man.flags.push_back(std::string("detector conditioning failed: ") +
                          e.what());
    }
  }

  out.write("metrics.csv", "table", metrics.os.str());

  man.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  std::ofstream mf(fs::path(config.out_dir) / "manifest.json",
                   std::ios::binary | std::ios::trunc);
  if (!mf) throw std::runtime_error("cannot write manifest.json");
  mf << man.to_json();
  return man;
}

std::string RunManifest::to_json() const {
  ordered_json j;
  j["tool"] = tool;
  j["version"] = version;
  j["label"] = label;
  j["config_hash"] = config_hash;
  j["resource_deficit"] = resource_deficit;
  j["distribution_tail"] = distribution_tail;
  j["flags"] = flags;
  j["wall_ms"] = wall_ms;
  j["outputs"] = ordered_json::array();
  for (const OutputRecord& rec : outputs) {
    j["outputs"].push_back(ordered_json{
        {"file", rec.file}, {"kind", rec.kind}, {"fnv1a64", rec.fnv1a64}});
  }
  return j.dump(2) + "\n";
}

RunManifest RunManifest::from_json(const std::string& text) {
  ordered_json j = ordered_json::parse(text);
  RunManifest m;
  m.tool = j.at("tool").get<std::string>();
  m.version = j.at("version").get<std::string>();
  m.label = j.at("label").get<std::string>();
  m.config_hash = j.at("config_hash").get<std::string>();
  m.resource_deficit = j.at("resource_deficit").get<double>();
  m.distribution_tail = j.at("distribution_tail").get<double>();
  m.flags = j.at("flags").get<std::vector<std::string>>();
  m.wall_ms = j.at("wall_ms").get<double>();
  for (const auto& rec : j.at("outputs")) {
    m.outputs.push_back({rec.at("file").get<std::string>(),
                         rec.at("kind").get<std::string>(),
                         rec.at("fnv1a64").get<std::string>()});
  }
  return m;
}

RunManifest RunManifest::load(const std::string& manifest_path) {
  std::ifstream f(manifest_path, std::ios::binary);
  if (!f) {
    throw std::runtime_error("cannot open manifest: " + manifest_path);
  }
  std::ostringstream ss;
  ss << f.rdbuf();
  RunManifest m = from_json(ss.str());
  m.dir = fs::path(manifest_path).parent_path().string();
  return m;
}

std::vector<std::string> preset_names() {
  return {"fig2", "fig3", "fig4", "fig5"};
}

std::vector<ExperimentConfig> preset(const std::string& name) {
  ExperimentConfig base;
  base.resource = Resource::kSplitSqueezed;
  base.squeezing_db = 10.0;
  base.alpha_mag = 4.0;
  base.alpha_phase = 0.0;
  base.n_signal = 50;
  base.n_ancilla = 80;
  base.m_max = 50;
  base.grid_n = 201;
  base.grid_half_range = 6.0;

  if (name == "fig2") {
    // Four panels: heralded state at m = 24, both resources, displacement
    // along the squeezed (phi = 0) and antisqueezed (phi = pi/2) axes.
    std::vector<ExperimentConfig> out;
    for (Resource res : {Resource::kSplitSqueezed, Resource::kEpr}) {
      for (int quarter = 0; quarter <= 1; ++quarter) {
        ExperimentConfig c = base;
        c.resource = res;
        c.alpha_phase = quarter ? M_PI / 2.0 : 0.0;
        c.conditioning = {24};
        c.label = std::string("fig2_") +
                  (res == Resource::kSplitSqueezed ? "split" : "epr") +
                  (quarter ? "_phi90" : "_phi0");
        c.out_dir = c.label;
        out.push_back(std::move(c));
      }
    }
    return out;
  }
  if (name == "fig3") {
    // Parity and probability versus m over the full sweep; no Wigner grids.
    ExperimentConfig c = base;
    c.label = "fig3";
    c.out_dir = "fig3";
    c.emit_wigner = false;
    return {c};
  }
  if (name == "fig4") {
    ExperimentConfig c = base;
    c.label = "fig4";
    c.out_dir = "fig4";
    c.conditioning = {18, 22, 26, 36};
    return {c};
  }
  if (name == "fig5") {
    ExperimentConfig c = base;
    c.label = "fig5";
    c.out_dir = "fig5";
    c.m_max = 80;  // the detector prior needs the full outcome range
    c.conditioning = {25};
    c.with_detector = true;
    c.detector.efficiency = 0.9;
    c.detector.excess_noise = 1.1;
    c.detector_target_m = 25;
    return {c};
  }
  throw std::invalid_argument("unknown preset '" + name +
                              "' (expected fig2, fig3, fig4 or fig5)");
}

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + p.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

bool parse_cell(const std::string& s, double* out) {
  if (s.empty()) return false;
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) return false;
  *out = v;
  return true;
}

std::vector<std::vector<std::string>> split_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (line.empty() || line.back() == ',') cells.push_back("");
    rows.push_back(std::move(cells));
  }
  return rows;
}

FileDiff diff_tables(const std::string& file, const std::string& a,
                     const std::string& b) {
  FileDiff d{file, "identical", 0.0, ""};
  auto ra = split_csv(a), rb = split_csv(b);
  if (ra.size() != rb.size()) {
    d.status = "shape-mismatch";
    d.detail = std::to_string(ra.size()) + " vs " + std::to_string(rb.size()) +
               " rows";
    d.max_abs_diff = std::numeric_limits<double>::infinity();
    return d;
  }
  for (size_t i = 0; i < ra.size(); ++i) {
    if (ra[i].size() != rb[i].size()) {
      d.status = "shape-mismatch";
      d.detail = "row " + std::to_string(i + 1) + ": " +
                 std::to_string(ra[i].size()) + " vs " +
                 std::to_string(rb[i].size()) + " columns";
      d.max_abs_diff = std::numeric_limits<double>::infinity();
      return d;
    }
    for (size_t c = 0; c < ra[i].size(); ++c) {
      if (ra[i][c] == rb[i][c]) continue;
      double va, vb;
      if (parse_cell(ra[i][c], &va) && parse_cell(rb[i][c], &vb)) {
        double diff = std::abs(va - vb);
        if (diff > d.max_abs_diff) d.max_abs_diff = diff;
        d.status = "differs";
      } else {
        d.status = "differs";
        d.max_abs_diff = std::numeric_limits<double>::infinity();
        if (d.detail.empty()) {
          d.detail = "text cell at row " + std::to_string(i + 1) + ", col " +
                     std::to_string(c + 1);
        }
      }
    }
  }
  return d;
}

FileDiff diff_wmaps(const std::string& file, const std::string& a,
                    const std::string& b) {
  FileDiff d{file, "identical", 0.0, ""};
  std::istringstream sa(a, std::ios::binary), sb(b, std::ios::binary);
  WignerMap wa = read_wigner_binary(sa), wb = read_wigner_binary(sb);
  if (wa.grid.nx != wb.grid.nx || wa.grid.np != wb.grid.np) {
    d.status = "shape-mismatch";
    d.detail = "grid dims differ";
    d.max_abs_diff = std::numeric_limits<double>::infinity();
    return d;
  }
  double diff = 0.0;
  diff = std::max(diff, std::abs(wa.grid.x_min - wb.grid.x_min));
  diff = std::max(diff, std::abs(wa.grid.x_max - wb.grid.x_max));
  diff = std::max(diff, std::abs(wa.grid.p_min - wb.grid.p_min));
  diff = std::max(diff, std::abs(wa.grid.p_max - wb.grid.p_max));
  diff = std::max(diff,
                  std::abs(wa.convention_constant - wb.convention_constant));
  for (size_t i = 0; i < wa.w.size(); ++i) {
    diff = std::max(diff, std::abs(wa.w[i] - wb.w[i]));
  }
  if (diff > 0.0) d.status = "differs";
  d.max_abs_diff = diff;
  return d;
}

}  // namespace

double CompareReport::max_abs_diff() const {
  double m = 0.0;
  for (const FileDiff& d : files) m = std::max(m, d.max_abs_diff);
  return m;
}

bool CompareReport::within(double tol) const {
  for (const FileDiff& d : files) {
    if (d.status == "identical" || d.status == "config-differs") continue;
    if (d.status == "differs" && d.max_abs_diff <= tol) continue;
    return false;
  }
  return true;
}

std::string CompareReport::to_text() const {
  std::ostringstream os;
  for (const FileDiff& d : files) {
    os << d.status << "  " << d.file;
    if (d.status == "differs") os << "  max|diff| = " << d.max_abs_diff;
    if (!d.detail.empty()) os << "  (" << d.detail << ")";
    os << '\n';
  }
  return os.str();
}

CompareReport compare_runs(const std::string& manifest_a_path,
                           const std::string& manifest_b_path) {
  RunManifest ma = RunManifest::load(manifest_a_path);
  RunManifest mb = RunManifest::load(manifest_b_path);
  CompareReport rep;

  std::map<std::string, OutputRecord> in_b;
  for (const OutputRecord& rec : mb.outputs) in_b[rec.file] = rec;

  for (const OutputRecord& rec : ma.outputs) {
    auto it = in_b.find(rec.file);
    if (it == in_b.end()) {
      rep.files.push_back({rec.file, "only-a",
                           std::numeric_limits<double>::infinity(), ""});
      continue;
    }
    OutputRecord other = it->second;
    in_b.erase(it);
    try {
      std::string bytes_a = read_file(fs::path(ma.dir) / rec.file);
      std::string bytes_b = read_file(fs::path(mb.dir) / other.file);
      if (bytes_a == bytes_b) {
        rep.files.push_back({rec.file, "identical", 0.0, ""});
      } else if (rec.kind == "config") {
        // Comparing runs with different settings (e.g. a cutoff study) is the
        // point of this tool; note the difference without failing on it.
        rep.files.push_back({rec.file, "config-differs", 0.0,
                             "settings differ; data files are compared "
                             "numerically"});
      } else if (rec.kind == "wigner-binary") {
        rep.files.push_back(diff_wmaps(rec.file, bytes_a, bytes_b));
      } else {
        rep.files.push_back(diff_tables(rec.file, bytes_a, bytes_b));
      }
    } catch (const std::exception& e) {
      rep.files.push_back({rec.file, "unreadable",
                           std::numeric_limits<double>::infinity(), e.what()});
    }
  }
  for (const auto& [file, rec] : in_b) {
    rep.files.push_back(
        {file, "only-b", std::numeric_limits<double>::infinity(), ""});
  }
  return rep;
}

}  // namespace meso
