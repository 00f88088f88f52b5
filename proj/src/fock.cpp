#include "meso/fock.hpp"

#include <cmath>

namespace meso {

namespace {

double lg(double x) { return std::lgamma(x); }

}  // namespace

double FockVector::norm2() const {
  double s = 0.0;
  for (const cplx& c : a) s += std::norm(c);
  return s;
}

void FockVector::normalize() {
  double n = std::sqrt(norm2());
  if (n <= 0.0) throw std::runtime_error("cannot normalize a zero vector");
  for (cplx& c : a) c /= n;
}

double FockVector::mean_photon_number() const {
  double s = 0.0, w = 0.0;
  for (size_t n = 0; n < a.size(); ++n) {
    double p = std::norm(a[n]);
    s += static_cast<double>(n) * p;
    w += p;
  }
  return w > 0.0 ? s / w : 0.0;
}

double TwoModeState::norm2() const {
  double s = 0.0;
  for (const cplx& c : amp) s += std::norm(c);
  return s;
}

double db_to_r(double squeezing_db) {
  if (squeezing_db < 0.0) {
    throw std::invalid_argument("squeezing_db must be non-negative");
  }
  return squeezing_db * std::log(10.0) / 20.0;
}

FockVector squeezed_vacuum(double r, double theta, int n_cut,
                           double deficit_tol) {
  if (r < 0.0) throw std::invalid_argument("r must be non-negative");
  FockVector v(n_cut);
  if (r == 0.0) {
    v.a[0] = 1.0;
    return v;
  }
  double log_t2 = std::log(std::tanh(r) / 2.0);
  double log_ch = 0.5 * std::log(std::cosh(r));
  for (int j = 0; 2 * j <= n_cut; ++j) {
    double mag =
        std::exp(-log_ch + j * log_t2 - lg(j + 1.0) + 0.5 * lg(2.0 * j + 1.0));
    double sign = (j % 2 == 0) ? 1.0 : -1.0;
    v.a[2 * j] = sign * mag * std::polar(1.0, theta * j);
  }
  double deficit = v.truncation_deficit();
  if (deficit > deficit_tol) {
    throw truncation_error("squeezed_vacuum: cutoff too small, deficit " +
                               std::to_string(deficit),
                           deficit);
  }
  return v;
}

TwoModeState split_squeezed_state(double r, double theta, int n_signal,
                                  int n_ancilla, double deficit_tol) {
  if (r < 0.0) throw std::invalid_argument("r must be non-negative");
  TwoModeState s(n_signal, n_ancilla);
  if (r == 0.0) {
    s.at(0, 0) = 1.0;
    return s;
  }
  double log_t = std::log(std::tanh(r));
  double log_ch = 0.5 * std::log(std::cosh(r));
  double log4 = std::log(4.0);
  for (int n = 0; n <= n_signal; ++n) {
    for (int k = (n % 2); k <= n_ancilla; k += 2) {
      // only even total photon number n + k is populated
      int t = n + k;
      int j = t / 2;
      double mag = std::exp(-log_ch + j * (log_t - log4) - lg(j + 1.0) +
                            lg(t + 1.0) - 0.5 * lg(n + 1.0) - 0.5 * lg(k + 1.0));
      double sign = (j % 2 == 0) ? 1.0 : -1.0;
      s.at(n, k) = sign * mag * std::polar(1.0, theta * j);
    }
  }
  double deficit = s.truncation_deficit();
  if (deficit > deficit_tol) {
    throw truncation_error("split_squeezed_state: cutoffs too small, deficit " +
                               std::to_string(deficit),
                           deficit);
  }
  return s;
}

TwoModeState epr_state(double r, int n, double deficit_tol) {
  if (r < 0.0) throw std::invalid_argument("r must be non-negative");
  TwoModeState s(n, n);
  double t = std::tanh(r);
  double ch = std::cosh(r);
  double lam = 1.0 / ch;
  for (int k = 0; k <= n; ++k) {
    s.at(k, k) = lam;
    lam *= -t;
  }
  double deficit = s.truncation_deficit();
  if (deficit > deficit_tol) {
    throw truncation_error(
        "epr_state: cutoff too small, deficit " + std::to_string(deficit),
        deficit);
  }
  return s;
}

ComplexOperator displacement_matrix(cplx alpha, int n) {
  ComplexOperator d(n);
  double x = std::norm(alpha);
  if (x == 0.0) {
    for (int i = 0; i <= n; ++i) d.at(i, i) = 1.0;
    return d;
  }
  double log_a = 0.5 * std::log(x);
  cplx unit = alpha / std::abs(alpha);
  // Phase relating the upper triangle to the lower one:
  // <k|D|k+off> = <k+off|D|k> * (-conj(alpha)/alpha)^off.
  cplx flip = -std::conj(alpha) / alpha;

  // Work one diagonal at a time. With E_k = <k+off|D(alpha)|k>,
  //   E_0 = exp(-x/2 + off*ln|alpha| - lgamma(off+1)/2) * unit^off,
  //   sqrt((k+1)(k+1+off)) E_{k+1} = (2k+1+off-x) E_k - sqrt(k(k+off)) E_{k-1},
  // which is the generalized-Laguerre three-term recurrence in a scaling where
  // every term is bounded, so it is stable at any size.
  std::vector<cplx> band(n + 1);
  cplx phase_up = 1.0;
  for (int off = 0; off <= n; ++off) {
    double e0 = std::exp(-0.5 * x + off * log_a - 0.5 * lg(off + 1.0));
    cplx seed = e0 * std::pow(unit, off);
    band[0] = seed;
    if (n - off >= 1) {
      band[1] = (1.0 + off - x) / std::sqrt(1.0 * (1.0 + off)) * seed;
    }
    for (int k = 1; k + 1 <= n - off; ++k) {
      double c1 = (2.0 * k + 1.0 + off - x);
      double c2 = std::sqrt(static_cast<double>(k) * (k + off));
      double c3 = std::sqrt(static_cast<double>(k + 1) * (k + 1 + off));
      band[k + 1] = (c1 * band[k] - c2 * band[k - 1]) / c3;
    }
    for (int k = 0; k + off <= n; ++k) {
      d.at(k + off, k) = band[k];
      if (off > 0) d.at(k, k + off) = band[k] * phase_up;
    }
    phase_up *= flip;
  }
  return d;
}

ComplexOperator upsilon_operator(cplx alpha, int n) {
  ComplexOperator u(n);
  double x = std::norm(alpha);
  for (int i = 0; i <= n; ++i) {
    u.at(i, i) = x + static_cast<double>(i);
    if (i < n) {
      double s = std::sqrt(i + 1.0);
      u.at(i + 1, i) = alpha * s;          // alpha * a^dag
      u.at(i, i + 1) = std::conj(alpha) * s;  // conj(alpha) * a
    }
  }
  return u;
}

double unitarity_defect(const ComplexOperator& d, int rows) {
  double worst = 0.0;
  for (int m = 0; m <= rows; ++m) {
    for (int mp = m; mp <= rows; ++mp) {
      cplx s = 0.0;
      for (int k = 0; k <= d.n; ++k) {
        s += d.at(m, k) * std::conj(d.at(mp, k));
      }
      double target = (m == mp) ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(s - target));
    }
  }
  return worst;
}

}  // namespace meso
