#include "meso/phasespace.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "meso/parallel.hpp"

namespace meso {

namespace {

double lg(double x) { return std::lgamma(x); }

// Fock-basis bands of the displaced-parity kernel at one phase-space point.
// rho_bands[d][m] = rho_{m, m+d}; returns
//   Tr[rho D(beta) P] = sum_d sum_m (-1)^m E^d_m * (d == 0 ? rho_band : 2 Re(...))
// where E^d_m is the real radial part of <m+d|D(beta)|m> and the phase of
// beta enters only through unit^d. The per-diagonal three-term recurrence is
// bounded (|entries| <= 1), so this is stable at any cutoff.
double displaced_parity(const std::vector<std::vector<cplx>>& rho_bands,
                        cplx beta) {
  const int n = static_cast<int>(rho_bands[0].size()) - 1;
  const double x = std::norm(beta);
  if (x < 1e-280) {  // D(0) = identity
    double s = 0.0;
    for (int m = 0; m <= n; ++m) {
      s += (m % 2 == 0 ? 1.0 : -1.0) * rho_bands[0][m].real();
    }
    return s;
  }
  const double log_b = 0.5 * std::log(x);
  const cplx unit = beta / std::abs(beta);

  double total = 0.0;
  std::vector<double> band(static_cast<size_t>(n) + 1);
  cplx unit_pow = 1.0;
  for (int d = 0; d < static_cast<int>(rho_bands.size()); ++d) {
    const int len = n - d;  // band index runs 0..len
    if (len < 0) break;
    band[0] = std::exp(-0.5 * x + d * log_b - 0.5 * lg(d + 1.0));
    if (len >= 1) band[1] = (1.0 + d - x) / std::sqrt(1.0 + d) * band[0];
    for (int k = 1; k + 1 <= len; ++k) {
      double c1 = 2.0 * k + 1.0 + d - x;
      double c2 = std::sqrt(static_cast<double>(k) * (k + d));
      double c3 = std::sqrt(static_cast<double>(k + 1) * (k + 1 + d));
      band[k + 1] = (c1 * band[k] - c2 * band[k - 1]) / c3;
    }
    cplx dot = 0.0;
    for (int m = 0; m <= len; ++m) {
      double sign = (m % 2 == 0) ? 1.0 : -1.0;
      dot += sign * band[m] * rho_bands[d][m];
    }
    if (d == 0) {
      total += dot.real();
    } else {
      total += 2.0 * (dot * unit_pow).real();
    }
    unit_pow *= unit;
  }
  return total;
}

std::vector<std::vector<cplx>> make_bands(const DensityMatrix& rho) {
  const int n = rho.n;
  std::vector<std::vector<cplx>> bands(static_cast<size_t>(n) + 1);
  for (int d = 0; d <= n; ++d) {
    bands[d].resize(static_cast<size_t>(n - d) + 1);
    for (int m = 0; m + d <= n; ++m) bands[d][m] = rho.at(m, m + d);
  }
  return bands;
}

// gamma = (x + i p) / sqrt(2); the parity kernel is displaced by 2 gamma.
cplx beta_of(double x, double p) {
  return std::sqrt(2.0) * cplx(x, p);
}

}  // namespace

double DensityMatrix::trace() const {
  double t = 0.0;
  for (int i = 0; i <= n; ++i) t += at(i, i).real();
  return t;
}

double DensityMatrix::mean_photon_number() const {
  double t = 0.0;
  for (int i = 0; i <= n; ++i) t += i * at(i, i).real();
  return t;
}

DensityMatrix DensityMatrix::pure(const FockVector& psi) {
  const int n = psi.cutoff();
  DensityMatrix rho(n);
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      rho.at(i, j) = psi.a[i] * std::conj(psi.a[j]);
    }
  }
  return rho;
}

double purity(const DensityMatrix& rho) {
  double s = 0.0;
  for (const cplx& v : rho.e) s += std::norm(v);
  return s;
}

double parity_expectation(const DensityMatrix& rho) {
  double s = 0.0;
  for (int i = 0; i <= rho.n; ++i) {
    s += (i % 2 == 0 ? 1.0 : -1.0) * rho.at(i, i).real();
  }
  return s;
}

double parity_expectation(const FockVector& psi) {
  double s = 0.0;
  for (int i = 0; i <= psi.cutoff(); ++i) {
    s += (i % 2 == 0 ? 1.0 : -1.0) * std::norm(psi.a[i]);
  }
  return s;
}

double WignerMap::integral() const {
  double s = 0.0;
  for (double v : w) s += v;
  return s * grid.dx() * grid.dp() * convention_constant;
}

WignerMap wigner(const DensityMatrix& rho, const GridSpec& grid) {
  WignerMap map;
  map.grid = grid;
  map.w.assign(static_cast<size_t>(grid.nx) * grid.np, 0.0);
  auto bands = make_bands(rho);
  const double two_over_pi = 2.0 / M_PI;
  parallel_for(grid.np, [&](int ip) {
    const double p = grid.p_at(ip);
    double* row = map.w.data() + static_cast<size_t>(ip) * grid.nx;
    for (int ix = 0; ix < grid.nx; ++ix) {
      row[ix] =
          two_over_pi * displaced_parity(bands, beta_of(grid.x_at(ix), p));
    }
  });
  return map;
}

WignerMap wigner(const FockVector& psi, const GridSpec& grid) {
  return wigner(DensityMatrix::pure(psi), grid);
}

double wigner_at(const DensityMatrix& rho, double x, double p) {
  auto bands = make_bands(rho);
  return (2.0 / M_PI) * displaced_parity(bands, beta_of(x, p));
}

double wigner_at(const FockVector& psi, double x, double p) {
  return wigner_at(DensityMatrix::pure(psi), x, p);
}

NegativityMetrics negativity_metrics(const WignerMap& map) {
  NegativityMetrics m;
  const GridSpec& g = map.grid;
  if (map.w.empty()) return m;
  size_t arg = 0;
  double neg_sum = 0.0;
  for (size_t i = 0; i < map.w.size(); ++i) {
    if (map.w[i] < map.w[arg]) arg = i;
    if (map.w[i] < 0.0) neg_sum -= map.w[i];
  }
  int ip = static_cast<int>(arg) / g.nx;
  int ix = static_cast<int>(arg) % g.nx;
  m.min_value = map.w[arg];
  m.min_x = g.x_at(ix);
  m.min_p = g.p_at(ip);
  m.min_on_boundary =
      ix == 0 || ix == g.nx - 1 || ip == 0 || ip == g.np - 1;
  // Halved relative to the raw quadrature cell sum so that the unit-area
  // normalization (integral() == 1) and the single-photon closed form
  // (2 e^{-1/2} - 1)/2 both hold in the same convention.
  m.negativity_volume =
      0.5 * map.convention_constant * neg_sum * g.dx() * g.dp();
  return m;
}

GridSpec auto_grid(const DensityMatrix& rho, int n) {
  double half = 5.0 * std::sqrt(rho.mean_photon_number() + 1.0);
  if (half < 6.0) half = 6.0;
  return GridSpec::centered(half, n);
}

GridSpec auto_grid(const FockVector& psi, int n) {
  double half = 5.0 * std::sqrt(psi.mean_photon_number() + 1.0);
  if (half < 6.0) half = 6.0;
  return GridSpec::centered(half, n);
}

void write_wigner_csv(const WignerMap& map, std::ostream& os) {
  os << "x,p,w\n";
  char buf[128];
  for (int ip = 0; ip < map.grid.np; ++ip) {
    for (int ix = 0; ix < map.grid.nx; ++ix) {
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n",
                    map.grid.x_at(ix), map.grid.p_at(ip), map.at(ix, ip));
      os << buf;
    }
  }
}

namespace {
constexpr char kWmapMagic[8] = {'M', 'E', 'S', 'O', 'W', 'M', 'A', 'P'};
constexpr std::uint32_t kWmapVersion = 1;

template <typename T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
void get(std::istream& is, T& v) {
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
}
}  // namespace

void write_wigner_binary(const WignerMap& map, std::ostream& os) {
  os.write(kWmapMagic, sizeof(kWmapMagic));
  put(os, kWmapVersion);
  put(os, static_cast<std::uint32_t>(map.grid.nx));
  put(os, static_cast<std::uint32_t>(map.grid.np));
  put(os, map.grid.x_min);
  put(os, map.grid.x_max);
  put(os, map.grid.p_min);
  put(os, map.grid.p_max);
  put(os, map.convention_constant);
  os.write(reinterpret_cast<const char*>(map.w.data()),
           static_cast<std::streamsize>(map.w.size() * sizeof(double)));
}

WignerMap read_wigner_binary(std::istream& is) {
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kWmapMagic, sizeof(magic)) != 0) {
    throw std::runtime_error("wigner binary: bad magic");
  }
  std::uint32_t version = 0, nx = 0, np = 0;
  get(is, version);
  if (version != kWmapVersion) {
    throw std::runtime_error("wigner binary: unsupported version");
  }
  get(is, nx);
  get(is, np);
  WignerMap map;
  map.grid.nx = static_cast<int>(nx);
  map.grid.np = static_cast<int>(np);
  get(is, map.grid.x_min);
  get(is, map.grid.x_max);
  get(is, map.grid.p_min);
  get(is, map.grid.p_max);
  get(is, map.convention_constant);
  if (!is || nx == 0 || np == 0 || nx > (1u << 20) || np > (1u << 20)) {
    throw std::runtime_error("wigner binary: bad header");
  }
  map.w.resize(static_cast<size_t>(nx) * np);
  is.read(reinterpret_cast<char*>(map.w.data()),
          static_cast<std::streamsize>(map.w.size() * sizeof(double)));
  if (!is) throw std::runtime_error("wigner binary: truncated data");
  return map;
}

}  // namespace meso
