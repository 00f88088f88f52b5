#include "meso/detector.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "meso/parallel.hpp"
#include "meso/util.hpp"

namespace meso {

namespace {

void renormalize(std::vector<double>& col, double target = 1.0) {
  double s = 0.0;
  for (double v : col) s += v;
  if (s <= 0.0) {
    throw std::domain_error("detector column has no mass on the grid");
  }
  double scale = target / s;
  for (double& v : col) v *= scale;
}

}  // namespace

double DetectorModel::required_v_max(int m_max, double excess_noise) {
  return m_max + 5.0 * std::sqrt(m_max * std::max(0.0, excess_noise - 1.0));
}

void DetectorModel::validate(int m_max) const {
  if (!(efficiency >= 0.0 && efficiency <= 1.0)) {
    throw std::invalid_argument("efficiency must be in [0, 1]");
  }
  if (!(excess_noise >= 1.0)) {
    throw std::invalid_argument("excess_noise must be >= 1");
  }
  if (!(mean_gain > 0.0)) {
    throw std::invalid_argument("mean_gain must be > 0");
  }
  if (!(dark_sigma >= 0.0)) {
    throw std::invalid_argument("dark_sigma must be >= 0");
  }
  if (!(dv > 0.0)) {
    throw std::invalid_argument("dv must be > 0");
  }
  if (m_max < 0) {
    throw std::invalid_argument("m_max must be >= 0");
  }
  double need = required_v_max(m_max, excess_noise);
  if (v_max + 1e-12 < need) {
    throw std::invalid_argument(
        "v_max " + format_double(v_max) + " does not cover conditioning on m=" +
        std::to_string(m_max) + " (need >= " + format_double(need) + ")");
  }
}

std::map<std::string, std::string> DetectorModel::to_kv() const {
  return {
      {"efficiency", format_double(efficiency)},
      {"excess_noise", format_double(excess_noise)},
      {"mean_gain", format_double(mean_gain)},
      {"dark_sigma", format_double(dark_sigma)},
      {"v_max", format_double(v_max)},
      {"dv", format_double(dv)},
      {"variance_convention",
       variance_convention == VarianceConvention::kAsPrinted ? "as-printed"
                                                             : "classical"},
  };
}

DetectorModel DetectorModel::from_kv(
    const std::map<std::string, std::string>& kv) {
  DetectorModel m;
  for (const auto& [key, value] : kv) {
    if (key == "efficiency") {
      m.efficiency = parse_double(value);
    } else if (key == "excess_noise") {
      m.excess_noise = parse_double(value);
    } else if (key == "mean_gain") {
      m.mean_gain = parse_double(value);
    } else if (key == "dark_sigma") {
      m.dark_sigma = parse_double(value);
    } else if (key == "v_max") {
      m.v_max = parse_double(value);
    } else if (key == "dv") {
      m.dv = parse_double(value);
    } else if (key == "variance_convention") {
      if (value == "as-printed") {
        m.variance_convention = VarianceConvention::kAsPrinted;
      } else if (value == "classical") {
        m.variance_convention = VarianceConvention::kClassical;
      } else {
        throw std::invalid_argument(
            "variance_convention must be 'as-printed' or 'classical', got '" +
            value + "'");
      }
    } else {
      throw std::invalid_argument("unknown detector key '" + key + "'");
    }
  }
  return m;
}

std::vector<double> binomial_response(double efficiency, int m) {
  if (efficiency < 0.0 || efficiency > 1.0) {
    throw std::invalid_argument("efficiency must be in [0, 1]");
  }
  std::vector<double> p(static_cast<size_t>(m) + 1, 0.0);
  if (efficiency == 0.0) {
    p[0] = 1.0;
    return p;
  }
  if (efficiency == 1.0) {
    p[m] = 1.0;
    return p;
  }
  const double le = std::log(efficiency);
  const double lq = std::log1p(-efficiency);
  const double lgm = std::lgamma(m + 1.0);
  for (int b = 0; b <= m; ++b) {
    p[b] = std::exp(lgm - std::lgamma(b + 1.0) - std::lgamma(m - b + 1.0) +
                    b * le + (m - b) * lq);
  }
  return p;
}

std::vector<double> amplification_response(const DetectorModel& model, int b) {
  if (b < 0) throw std::invalid_argument("photon count must be >= 0");
  const int bins = model.n_bins();
  std::vector<double> col(static_cast<size_t>(bins), 0.0);
  const double var = model.gain_variance(b);
  if (b == 0 || var <= 0.0) {
    // Degenerate column: all mass in the bin containing v = b.
    int idx = static_cast<int>(b / model.dv + 0.5);
    if (idx >= bins) {
      throw std::invalid_argument("grid does not reach v = " +
                                  std::to_string(b));
    }
    col[idx] = 1.0;
    return col;
  }
  const double inv2v = 1.0 / (2.0 * var);
  for (int i = 0; i < bins; ++i) {
    double d = model.v_at(i) - b;
    col[i] = std::exp(-d * d * inv2v);
  }
  renormalize(col);
  return col;
}

std::vector<double> dark_noise_convolve(const std::vector<double>& column,
                                        double sigma, double dv) {
  if (sigma < 0.0) throw std::invalid_argument("sigma must be >= 0");
  if (!(dv > 0.0)) throw std::invalid_argument("dv must be > 0");
  if (sigma == 0.0) return column;
  const int bins = static_cast<int>(column.size());
  const int half = static_cast<int>(std::ceil(5.0 * sigma / dv));
  std::vector<double> kernel(static_cast<size_t>(2 * half) + 1);
  const double inv2v = 1.0 / (2.0 * sigma * sigma);
  for (int j = -half; j <= half; ++j) {
    kernel[j + half] = std::exp(-(j * dv) * (j * dv) * inv2v);
  }
  double mass_in = 0.0;
  for (double v : column) mass_in += v;
  std::vector<double> out(column.size(), 0.0);
  for (int i = 0; i < bins; ++i) {
    if (column[i] == 0.0) continue;
    int lo = std::max(0, i - half);
    int hi = std::min(bins - 1, i + half);
    for (int j = lo; j <= hi; ++j) {
      out[j] += column[i] * kernel[j - i + half];
    }
  }
  renormalize(out, mass_in);
  return out;
}

ResponseMatrix detector_response(const DetectorModel& model, int m_max) {
  model.validate(m_max);
  const int bins = model.n_bins();

  // Gain-stage columns P(v|b), shared by every photon-number column.
  std::vector<std::vector<double>> amp(static_cast<size_t>(m_max) + 1);
  parallel_for(m_max + 1,
               [&](int b) { amp[b] = amplification_response(model, b); });

  ResponseMatrix r;
  r.m_max = m_max;
  r.bins = bins;
  r.dv = model.dv;
  r.p.assign(static_cast<size_t>(bins) * (m_max + 1), 0.0);
  parallel_for(m_max + 1, [&](int m) {
    std::vector<double> col(static_cast<size_t>(bins), 0.0);
    std::vector<double> pb = binomial_response(model.efficiency, m);
    for (int b = 0; b <= m; ++b) {
      if (pb[b] == 0.0) continue;
      const std::vector<double>& a = amp[b];
      for (int i = 0; i < bins; ++i) col[i] += pb[b] * a[i];
    }
    if (model.dark_sigma > 0.0) {
      col = dark_noise_convolve(col, model.dark_sigma, model.dv);
    }
    renormalize(col);
    std::copy(col.begin(), col.end(), r.column(m));
  });
  return r;
}

double evidence(const ResponseMatrix& response,
                const std::vector<double>& prior, int v_bin) {
  if (static_cast<int>(prior.size()) != response.m_max + 1) {
    throw std::invalid_argument("prior length does not match response m range");
  }
  if (v_bin < 0 || v_bin >= response.bins) {
    throw std::out_of_range("v_bin outside grid");
  }
  double ev = 0.0;
  for (int m = 0; m <= response.m_max; ++m) {
    ev += response.at(v_bin, m) * prior[m];
  }
  return ev;
}

std::vector<double> posterior(const ResponseMatrix& response,
                              const std::vector<double>& prior, int v_bin) {
  return posterior(response, prior, v_bin, v_bin);
}

std::vector<double> posterior(const ResponseMatrix& response,
                              const std::vector<double>& prior, int v_lo_bin,
                              int v_hi_bin) {
  if (static_cast<int>(prior.size()) != response.m_max + 1) {
    throw std::invalid_argument("prior length does not match response m range");
  }
  if (v_lo_bin < 0 || v_hi_bin >= response.bins || v_lo_bin > v_hi_bin) {
    throw std::out_of_range("v bin window outside grid");
  }
  std::vector<double> post(prior.size(), 0.0);
  double ev = 0.0;
  for (int m = 0; m <= response.m_max; ++m) {
    double lk = 0.0;
    for (int v = v_lo_bin; v <= v_hi_bin; ++v) lk += response.at(v, m);
    post[m] = lk * prior[m];
    ev += post[m];
  }
  if (ev <= 0.0) {
    throw std::domain_error("zero-evidence output bin: posterior undefined");
  }
  for (double& v : post) v /= ev;
  return post;
}

int posterior_mode_bin(const ResponseMatrix& response,
                       const std::vector<double>& prior, int target_m) {
  if (static_cast<int>(prior.size()) != response.m_max + 1) {
    throw std::invalid_argument("prior length does not match response m range");
  }
  int best_bin = -1;
  double best_ev = 0.0;
  for (int v = 0; v < response.bins; ++v) {
    int mode = 0;
    double mode_val = 0.0, ev = 0.0;
    for (int m = 0; m <= response.m_max; ++m) {
      double w = response.at(v, m) * prior[m];
      ev += w;
      if (w > mode_val) {
        mode_val = w;
        mode = m;
      }
    }
    if (ev > 0.0 && mode == target_m && ev > best_ev) {
      best_ev = ev;
      best_bin = v;
    }
  }
  if (best_bin < 0) {
    throw std::domain_error("no output bin has posterior mode m=" +
                            std::to_string(target_m));
  }
  return best_bin;
}

DensityMatrix herald_mixed(const HeraldedEnsemble& ensemble,
                           const ResponseMatrix& response, int v_bin) {
  return herald_mixed(ensemble, response, v_bin, v_bin);
}

DensityMatrix herald_mixed(const HeraldedEnsemble& ensemble,
                           const ResponseMatrix& response, int v_lo_bin,
                           int v_hi_bin) {
  if (ensemble.m_max() != response.m_max) {
    throw std::invalid_argument(
        "ensemble and response cover different m ranges");
  }
  std::vector<double> post =
      posterior(response, ensemble.probs, v_lo_bin, v_hi_bin);
  const int n = ensemble.states.empty() ? 0 : ensemble.states[0].cutoff();
  DensityMatrix rho(n);
  for (int m = 0; m <= ensemble.m_max(); ++m) {
    if (post[m] <= 0.0) continue;
    const FockVector& psi = ensemble.states[m];
    for (int i = 0; i <= n; ++i) {
      if (psi.a[i] == cplx(0.0)) continue;
      cplx wi = post[m] * psi.a[i];
      for (int j = 0; j <= n; ++j) {
        rho.at(i, j) += wi * std::conj(psi.a[j]);
      }
    }
  }
  return rho;
}

}  // namespace meso
