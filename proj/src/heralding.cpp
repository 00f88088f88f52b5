#include "meso/heralding.hpp"

#include <cmath>

#include "meso/parallel.hpp"

namespace meso {

namespace {

double lg(double x) { return std::lgamma(x); }

FockVector contract_row(const TwoModeState& state, const ComplexOperator& d,
                        int m) {
  FockVector v(state.n_signal);
  for (int n = 0; n <= state.n_signal; ++n) {
    cplx s = 0.0;
    for (int k = 0; k <= state.n_ancilla; ++k) {
      s += state.at(n, k) * d.at(m, k);
    }
    v.a[n] = s;
  }
  return v;
}

}  // namespace

HeraldResult herald_pure(const TwoModeState& state, cplx alpha, int m) {
  if (m < 0 || m > state.n_ancilla) {
    throw std::invalid_argument("herald_pure: m outside ancilla cutoff");
  }
  ComplexOperator d = displacement_matrix(alpha, state.n_ancilla);
  HeraldResult res;
  res.psi = contract_row(state, d, m);
  res.prob = res.psi.norm2();
  res.reliable = res.prob >= kProbabilityFloor;
  if (res.prob > 0.0) res.psi.normalize();
  return res;
}

std::vector<double> herald_distribution(const TwoModeState& state, cplx alpha,
                                        int m_max) {
  if (m_max > state.n_ancilla) {
    throw std::invalid_argument("herald_distribution: m_max outside cutoff");
  }
  ComplexOperator d = displacement_matrix(alpha, state.n_ancilla);
  std::vector<double> p(m_max + 1, 0.0);
  for (int m = 0; m <= m_max; ++m) {
    double s = 0.0;
    for (int n = 0; n <= state.n_signal; ++n) {
      cplx v = 0.0;
      for (int k = 0; k <= state.n_ancilla; ++k) {
        v += state.at(n, k) * d.at(m, k);
      }
      s += std::norm(v);
    }
    p[m] = s;
  }
  return p;
}

double HeraldedEnsemble::tail_mass() const {
  double s = 0.0;
  for (double p : probs) s += p;
  return 1.0 - s;
}

HeraldedEnsemble herald_ensemble(const TwoModeState& state, cplx alpha,
                                 int m_max) {
  if (m_max > state.n_ancilla) {
    throw std::invalid_argument("herald_ensemble: m_max outside cutoff");
  }
  ComplexOperator d = displacement_matrix(alpha, state.n_ancilla);
  HeraldedEnsemble ens;
  ens.states.resize(m_max + 1);
  ens.probs.resize(m_max + 1);
  ens.reliable.resize(m_max + 1);
  ens.alpha_mag = std::abs(alpha);
  ens.alpha_phase = std::arg(alpha);
  ens.n_signal = state.n_signal;
  ens.n_ancilla = state.n_ancilla;
  parallel_for(m_max + 1, [&](int m) {
    FockVector v = contract_row(state, d, m);
    double p = v.norm2();
    ens.probs[m] = p;
    if (p > 0.0) v.normalize();
    ens.states[m] = std::move(v);
  });
  // vector<bool> packs bits; fill it outside the parallel region.
  for (int m = 0; m <= m_max; ++m) {
    ens.reliable[m] = ens.probs[m] >= kProbabilityFloor;
  }
  return ens;
}

FockVector herald_series_reference(double r, cplx alpha, int m, int n_signal,
                                   int n_ancilla) {
  ComplexOperator d = displacement_matrix(alpha, n_ancilla);
  double log_t = (r > 0.0) ? std::log(std::tanh(r)) : 0.0;
  double log_ch = 0.5 * std::log(std::cosh(r));

  // c_j = (-1)^j (tanh r)^j / (4^j j! sqrt(cosh r)), theta = 0.
  auto c_coeff = [&](int j) -> double {
    if (r == 0.0) return j == 0 ? 1.0 : 0.0;
    double mag = std::exp(-log_ch + j * (log_t - std::log(4.0)) - lg(j + 1.0));
    return (j % 2 == 0) ? mag : -mag;
  };

  FockVector v(n_signal);
  // Even signal components gather even-k ancilla terms; odd components gather
  // odd-k terms. Each series runs over the shared index j = (n + k)/2.
  for (int n = 0; n <= n_signal; ++n) {
    cplx s = 0.0;
    for (int k = n % 2; k <= n_ancilla; k += 2) {
      int j = (n + k) / 2;
      double w =
          std::exp(lg(n + k + 1.0) - 0.5 * lg(n + 1.0) - 0.5 * lg(k + 1.0));
      s += c_coeff(j) * w * d.at(m, k);
    }
    v.a[n] = s;
  }
  if (v.norm2() > 0.0) v.normalize();
  return v;
}

FockVector cat_state(cplx beta, bool even, int n_cut) {
  FockVector v(n_cut);
  double b = std::abs(beta);
  if (b == 0.0) {
    // limits: even cat -> vacuum, odd cat -> single photon
    if (even) {
      v.a[0] = 1.0;
    } else {
      if (n_cut < 1) throw std::invalid_argument("cat_state: cutoff < 1");
      v.a[1] = 1.0;
    }
    return v;
  }
  cplx unit = beta / b;
  double x = b * b;
  double norm_const =
      1.0 / std::sqrt(2.0 * (1.0 + (even ? 1.0 : -1.0) * std::exp(-2.0 * x)));
  for (int n = even ? 0 : 1; n <= n_cut; n += 2) {
    double mag = std::exp(-0.5 * x + n * std::log(b) - 0.5 * lg(n + 1.0));
    v.a[n] = 2.0 * norm_const * mag * std::pow(unit, n);
  }
  return v;
}

double cat_fidelity(const FockVector& psi, cplx beta) {
  double even_w = 0.0, odd_w = 0.0;
  for (int n = 0; n <= psi.cutoff(); ++n) {
    (n % 2 == 0 ? even_w : odd_w) += std::norm(psi.a[n]);
  }
  FockVector cat = cat_state(beta, even_w >= odd_w, psi.cutoff());
  cplx ov = 0.0;
  for (int n = 0; n <= psi.cutoff(); ++n) {
    ov += std::conj(cat.a[n]) * psi.a[n];
  }
  return std::norm(ov);
}

double coherent_fidelity(const FockVector& psi, cplx gamma) {
  double x = std::norm(gamma);
  cplx ov = 0.0;
  for (int n = 0; n <= psi.cutoff(); ++n) {
    // <n|gamma> = e^{-|gamma|^2/2} gamma^n / sqrt(n!)
    double mag = std::exp(-0.5 * x + 0.5 * n * std::log(x > 0 ? x : 1.0) -
                          0.5 * lg(n + 1.0));
    cplx coh = (x > 0 ? mag * std::pow(gamma / std::abs(gamma), n)
                      : (n == 0 ? cplx(1.0) : cplx(0.0)));
    ov += std::conj(coh) * psi.a[n];
  }
  return std::norm(ov);
}

cplx mean_annihilation(const FockVector& psi) {
  cplx s = 0.0;
  for (int n = 0; n + 1 <= psi.cutoff(); ++n) {
    s += std::conj(psi.a[n]) * std::sqrt(n + 1.0) * psi.a[n + 1];
  }
  return s;
}

PhaseRoleReport phase_role_diagnostics(double r, double alpha_mag, int m,
                                       int n_signal, int n_ancilla) {
  PhaseRoleReport rep;
  TwoModeState state = split_squeezed_state(r, 0.0, n_signal, n_ancilla);

  auto opposite_weight = [&](const FockVector& psi) {
    double w = 0.0;
    for (int n = 0; n <= psi.cutoff(); ++n) {
      if (n % 2 != m % 2) w += std::norm(psi.a[n]);
    }
    return w;
  };

  HeraldResult h0 = herald_pure(state, cplx(alpha_mag, 0.0), m);
  rep.prob_phi0 = h0.prob;
  rep.opp_weight_phi0 = opposite_weight(h0.psi);

  HeraldResult h90 = herald_pure(state, cplx(0.0, alpha_mag), m);
  rep.prob_phi90 = h90.prob;
  rep.opp_weight_phi90 = opposite_weight(h90.psi);
  rep.mean_a_phi90 = mean_annihilation(h90.psi);
  rep.coherent_fidelity_phi90 = coherent_fidelity(h90.psi, rep.mean_a_phi90);

  // Near-diagonal approximation audit at phi = 0 (the phase factor
  // e^{-i phi delta} is exact by construction, so phi = 0 isolates the
  // magnitude error).
  double x = alpha_mag * alpha_mag;
  int pad = m + 20 + static_cast<int>(4.0 * alpha_mag * std::sqrt(m + 1.0));
  ComplexOperator d = displacement_matrix(cplx(alpha_mag, 0.0), pad);
  for (int delta : {-2, -1, 1, 2}) {
    if (m + delta < 0) continue;
    PhaseRoleReport::NearDiagonalCheck chk;
    chk.delta = delta;
    chk.exact = d.at(m, m + delta);
    double mag = std::exp(-x) *
                 std::pow(static_cast<double>(m), 0.5 * std::abs(delta)) /
                 std::tgamma(std::abs(delta) + 1.0) *
                 std::pow(alpha_mag, delta);
    chk.approx = ((delta % 2 == 0) ? 1.0 : -1.0) * mag;
    chk.rel_err = std::abs(chk.approx / chk.exact - 1.0);
    rep.near_diagonal.push_back(chk);
  }
  rep.regime_ok = m * x < 0.5;
  return rep;
}

}  // namespace meso
