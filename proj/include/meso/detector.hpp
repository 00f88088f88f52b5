#pragma once

#include <map>
#include <string>
#include <vector>

#include "meso/heralding.hpp"
#include "meso/phasespace.hpp"

// Mesoscopic detector with finite quantum efficiency and amplification excess
// noise: response matrix P(v|m), Bayesian photon-number posterior, and the
// mixed signal states heralded by a noisy outcome.

namespace meso {

// Width of the per-absorption gain Gaussian, from the printed exponent
// exp(-(v - b)^2 / (b(F_e - 1))) (variance b(F_e-1)/2) or from the classical
// carrier-counting variance b(F_e-1). Selectable because the two readings
// differ by a factor 2 in variance; "as-printed" is the default.
enum class VarianceConvention { kAsPrinted, kClassical };

// Detector parameters. Outputs are expressed in gain-normalized units
// v = V / mean_gain on a uniform grid of bin centers 0, dv, 2*dv, ..., so
// mean_gain itself cancels from every probability; it is carried only so a
// caller can convert back to raw charge.
struct DetectorModel {
  double efficiency = 1.0;    // photon absorption probability, in [0, 1]
  double excess_noise = 1.0;  // F_e, normalized second moment of the gain
  double mean_gain = 1.0;     // <M>, charge carriers per absorbed photon
  double dark_sigma = 0.0;    // rms dark/readout noise in v units
  double v_max = 30.0;        // top of the output grid in v units
  double dv = 0.1;            // bin width in v units
  VarianceConvention variance_convention = VarianceConvention::kAsPrinted;

  int n_bins() const { return static_cast<int>(v_max / dv + 0.5) + 1; }
  double v_at(int i) const { return i * dv; }

  // Variance of the gain Gaussian for b absorbed photons, in v units.
  double gain_variance(int b) const {
    double v = b * (excess_noise - 1.0);
    return variance_convention == VarianceConvention::kAsPrinted ? 0.5 * v : v;
  }

  // Smallest v_max that keeps at least 5 sigma of the widest column on the
  // grid when conditioning on up to m_max photons.
  static double required_v_max(int m_max, double excess_noise);

  // Throws std::invalid_argument on out-of-range parameters or a grid that
  // does not cover [0, required_v_max(m_max)].
  void validate(int m_max) const;

  std::map<std::string, std::string> to_kv() const;
  static DetectorModel from_kv(const std::map<std::string, std::string>& kv);
};

// P(v|m) for m = 0..m_max, column-contiguous; every column is normalized to
// unit mass on the grid.
struct ResponseMatrix {
  int m_max = 0;
  int bins = 0;
  double dv = 0.1;
  std::vector<double> p;  // p[m * bins + v_bin]

  double at(int v_bin, int m) const {
    return p[static_cast<size_t>(m) * bins + v_bin];
  }
  const double* column(int m) const {
    return p.data() + static_cast<size_t>(m) * bins;
  }
  double* column(int m) { return p.data() + static_cast<size_t>(m) * bins; }
  double v_at(int i) const { return i * dv; }
};

// Absorption statistics: P(b|m) = C(m,b) eps^b (1-eps)^{m-b}, b = 0..m.
std::vector<double> binomial_response(double efficiency, int m);

// Normalized output distribution over the grid for exactly b absorbed
// photons: a discretized Gaussian centered at v = b with gain_variance(b);
// for b = 0 all mass sits in the v = 0 bin.
std::vector<double> amplification_response(const DetectorModel& model, int b);

// Column convolved with a zero-mean Gaussian of width sigma (v units) and
// renormalized on the grid. sigma = 0 is the identity.
std::vector<double> dark_noise_convolve(const std::vector<double>& column,
                                        double sigma, double dv);

// Full response P(v|m) = sum_b P(v|b) P(b|m), columns built in parallel.
ResponseMatrix detector_response(const DetectorModel& model, int m_max);

// Marginal outcome probability P(v_bin) = sum_m P(v_bin|m) prior[m].
double evidence(const ResponseMatrix& response,
                const std::vector<double>& prior, int v_bin);

// Bayes posterior P(m|v_bin), normalized over m. Throws std::domain_error
// when the bin has zero evidence under the prior.
std::vector<double> posterior(const ResponseMatrix& response,
                              const std::vector<double>& prior, int v_bin);

// Posterior conditioned on v falling anywhere in [v_lo_bin, v_hi_bin].
std::vector<double> posterior(const ResponseMatrix& response,
                              const std::vector<double>& prior, int v_lo_bin,
                              int v_hi_bin);

// The single bin of maximal evidence among bins whose posterior mode equals
// target_m (ties in the mode broken toward smaller m). Throws
// std::domain_error if no bin has that mode.
int posterior_mode_bin(const ResponseMatrix& response,
                       const std::vector<double>& prior, int target_m);

// Mixed signal state heralded by the outcome bin:
//   rho = sum_m P(m|v) |psi_m><psi_m|,
// with the ensemble's probabilities as the prior. Unit trace by construction.
DensityMatrix herald_mixed(const HeraldedEnsemble& ensemble,
                           const ResponseMatrix& response, int v_bin);
DensityMatrix herald_mixed(const HeraldedEnsemble& ensemble,
                           const ResponseMatrix& response, int v_lo_bin,
                           int v_hi_bin);

}  // namespace meso
