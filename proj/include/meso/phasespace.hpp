#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "meso/fock.hpp"

// Wigner functions, parity, purity and negativity metrics for single-mode
// states given in the Fock basis.

namespace meso {

// Single-mode mixed state, Hermitian matrix in the Fock basis.
struct DensityMatrix {
  int n = 0;
  std::vector<cplx> e;

  DensityMatrix() = default;
  explicit DensityMatrix(int cutoff)
      : n(cutoff),
        e(static_cast<size_t>(cutoff + 1) * static_cast<size_t>(cutoff + 1)) {}

  cplx& at(int i, int j) { return e[static_cast<size_t>(i) * (n + 1) + j]; }
  cplx at(int i, int j) const {
    return e[static_cast<size_t>(i) * (n + 1) + j];
  }

  double trace() const;
  double mean_photon_number() const;

  static DensityMatrix pure(const FockVector& psi);
};

// Tr(rho^2).
double purity(const DensityMatrix& rho);

// Expectation of the photon-number parity operator, sum_n (-1)^n rho_nn.
double parity_expectation(const DensityMatrix& rho);
double parity_expectation(const FockVector& psi);

struct GridSpec {
  int nx = 201, np = 201;
  double x_min = -6.0, x_max = 6.0;
  double p_min = -6.0, p_max = 6.0;

  static GridSpec centered(double half_range, int n = 201) {
    return GridSpec{n, n, -half_range, half_range, -half_range, half_range};
  }
  double x_at(int i) const {
    return nx > 1 ? x_min + (x_max - x_min) * i / (nx - 1) : x_min;
  }
  double p_at(int i) const {
    return np > 1 ? p_min + (p_max - p_min) * i / (np - 1) : p_min;
  }
  double dx() const { return nx > 1 ? (x_max - x_min) / (nx - 1) : 0.0; }
  double dp() const { return np > 1 ? (p_max - p_min) / (np - 1) : 0.0; }
};

// Sampled Wigner function. Values are the displaced-parity form
//   W(gamma) = (2/pi) Tr[rho D(gamma) P D^dag(gamma)]
// on the axes x = sqrt(2) Re gamma, p = sqrt(2) Im gamma (hbar = 1, vacuum
// x-variance 1/2). Point values then satisfy W(0,0) = (2/pi) <parity>, the
// vacuum peak is 2/pi, and the quadrature integral carries the measure factor
// convention_constant = d^2gamma / (dx dp) = 1/2:
//   sum W * dx * dp * convention_constant = 1.
struct WignerMap {
  GridSpec grid;
  double convention_constant = 0.5;
  std::vector<double> w;  // row-major, w[ip * nx + ix]

  double at(int ix, int ip) const { return w[static_cast<size_t>(ip) * grid.nx + ix]; }
  double integral() const;
};

// Evaluate the Wigner function on a grid. The Fock-basis kernel is computed
// with the same bounded per-diagonal recurrence as the displacement matrix;
// cost is O(n^2) per grid point and the grid is processed in parallel rows.
WignerMap wigner(const DensityMatrix& rho, const GridSpec& grid);
WignerMap wigner(const FockVector& psi, const GridSpec& grid);

// Single-point evaluation (exact, no grid).
double wigner_at(const DensityMatrix& rho, double x, double p);
double wigner_at(const FockVector& psi, double x, double p);

struct NegativityMetrics {
  double min_value = 0;
  double min_x = 0, min_p = 0;
  // integral of max(-W, 0), calibrated so the single-photon state gives the
  // closed-form lobe volume (2 e^{-1/2} - 1)/2.
  double negativity_volume = 0;
  // set when the grid minimum lies on the boundary: the grid is too small to
  // trust min_value / min location.
  bool min_on_boundary = false;
};

NegativityMetrics negativity_metrics(const WignerMap& map);

// Grid sized from the state's quadrature spread (at least +/-5 sigma on each
// axis, never smaller than +/-6).
GridSpec auto_grid(const DensityMatrix& rho, int n = 201);
GridSpec auto_grid(const FockVector& psi, int n = 201);

// CSV rows "x,p,w" (p outer loop, x inner), full double precision.
void write_wigner_csv(const WignerMap& map, std::ostream& os);

// Compact binary format: magic "MESOWMAP", u32 version, u32 nx, u32 np,
// f64 x_min, x_max, p_min, p_max, convention_constant, then row-major f64
// values (native little-endian).
void write_wigner_binary(const WignerMap& map, std::ostream& os);
WignerMap read_wigner_binary(std::istream& is);

}  // namespace meso
