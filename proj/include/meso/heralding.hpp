#pragma once

#include <optional>
#include <string>
#include <vector>

#include "meso/fock.hpp"

// Ideal conditional preparation: a displaced-Fock projective measurement on
// the ancilla of a two-mode resource heralds a pure state on the signal mode.

namespace meso {

// Below this outcome probability the normalized heralded state is dominated
// by truncation noise and is flagged unreliable.
inline constexpr double kProbabilityFloor = 1e-12;

struct HeraldResult {
  FockVector psi;   // normalized signal state
  double prob = 0;  // P(m), squared norm before normalization
  bool reliable = true;
};

// Signal state heralded by outcome m of the displaced photon counter:
// psi(n) ~ sum_k amp(n, k) * <m|D(alpha)|k>, prob = squared norm.
HeraldResult herald_pure(const TwoModeState& state, cplx alpha, int m);

// P(m) for m = 0..m_max in one pass.
std::vector<double> herald_distribution(const TwoModeState& state, cplx alpha,
                                        int m_max);

// Every heralded state and probability for m = 0..m_max, sharing one
// displacement matrix. The workhorse behind distributions, parity sweeps and
// detector mixtures.
struct HeraldedEnsemble {
  std::vector<FockVector> states;  // index m, normalized
  std::vector<double> probs;       // index m
  std::vector<bool> reliable;

  // source descriptor
  std::string resource;
  double r = 0, alpha_mag = 0, alpha_phase = 0;
  int n_signal = 0, n_ancilla = 0;

  int m_max() const { return static_cast<int>(probs.size()) - 1; }
  double tail_mass() const;  // 1 - sum of probs
};

HeraldedEnsemble herald_ensemble(const TwoModeState& state, cplx alpha,
                                 int m_max);

// Independent reference for herald_pure on the split squeezed resource,
// evaluated as an explicit double series with the even-k and odd-k ancilla
// contributions accumulated separately (the rearranged series form), rather
// than as a matrix contraction. Used as a cross-check.
FockVector herald_series_reference(double r, cplx alpha, int m, int n_signal,
                                   int n_ancilla);

// Even/odd coherent-state superposition (|beta> +/- |-beta>) with the exact
// finite-beta normalization 1/sqrt(2(1 +/- e^{-2|beta|^2})).
FockVector cat_state(cplx beta, bool even, int n_cut);

// Overlap probability |<cat(beta)|psi>|^2 with the cat parity chosen to match
// the dominant parity of psi.
double cat_fidelity(const FockVector& psi, cplx beta);

// Squared overlap with the coherent state |gamma>.
double coherent_fidelity(const FockVector& psi, cplx gamma);

// Mean of the annihilation operator.
cplx mean_annihilation(const FockVector& psi);

// Diagnostics for the role of the displacement phase at fixed |alpha| and m
// (split squeezed resource, theta = 0):
//  - weight of the Fock components whose parity is opposite to m, for the
//    displacement along the squeezed axis (phi = 0) and along the
//    anti-squeezed axis (phi = pi/2);
//  - fidelity of the phi = pi/2 output with the coherent state matching its
//    mean field;
//  - accuracy of the small-displacement near-diagonal element formula
//        <m|D|m+delta> ~ e^{-|alpha|^2} m^{|delta|/2} / |delta|!
//                        * (-1)^delta |alpha|^delta e^{-i phi delta}
//    against the exact matrix elements.
struct PhaseRoleReport {
  double prob_phi0 = 0, opp_weight_phi0 = 0;
  double prob_phi90 = 0, opp_weight_phi90 = 0;
  double coherent_fidelity_phi90 = 0;
  cplx mean_a_phi90;

  struct NearDiagonalCheck {
    int delta = 0;
    cplx exact, approx;
    double rel_err = 0;  // |approx/exact - 1|
  };
  std::vector<NearDiagonalCheck> near_diagonal;

  // The last term of the exact element sum dominates (and the approximation
  // can be trusted) only when m|alpha|^2 << |delta| + 1; flagged, never fatal.
  bool regime_ok = true;
};

PhaseRoleReport phase_role_diagnostics(double r, double alpha_mag, int m,
                                       int n_signal = 50, int n_ancilla = 80);

}  // namespace meso
