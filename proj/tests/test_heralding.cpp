#include <algorithm>
#include <cmath>
#include <complex>

#include "doctest.h"
#include "meso/fock.hpp"
#include "meso/heralding.hpp"
#include "meso/phasespace.hpp"
#include "oracle_utils.hpp"

using namespace meso;

namespace {

double fidelity(const FockVector& a, const FockVector& b) {
  cplx ov = 0.0;
  const int n = std::min(a.cutoff(), b.cutoff());
  for (int i = 0; i <= n; ++i) ov += std::conj(a.a[i]) * b.a[i];
  return std::norm(ov);
}

// The working point used throughout: 10 dB squeezing, split on a balanced
// coupler, |alpha| = 4 along the squeezed axis.
TwoModeState bulk_resource() {
  return split_squeezed_state(db_to_r(10.0), 0.0, 50, 80);
}

}  // namespace

TEST_SUITE("heralding") {

// ---------------------------------------------------------------------------
// Degenerate resources give closed-form outcomes
// ---------------------------------------------------------------------------

TEST_CASE("vacuum resource gives Poisson counts and heralds vacuum") {
  TwoModeState vac = split_squeezed_state(0.0, 0.0, 20, 60);
  const cplx alpha(1.5, -0.5);
  const double x = std::norm(alpha);
  std::vector<double> p = herald_distribution(vac, alpha, 25);
  for (int m = 0; m <= 25; ++m) {
    const double poisson =
        std::exp(-x + m * std::log(x) - std::lgamma(m + 1.0));
    CHECK(p[m] == doctest::Approx(poisson).epsilon(1e-12));
  }
  HeraldResult h = herald_pure(vac, alpha, 7);
  CHECK(std::abs(h.psi.a[0]) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(parity_expectation(h.psi) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("zero displacement projects onto definite photon-number parity") {
  TwoModeState st = bulk_resource();
  HeraldResult even = herald_pure(st, cplx(0, 0), 2);
  HeraldResult odd = herald_pure(st, cplx(0, 0), 3);
  CHECK(parity_expectation(even.psi) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(parity_expectation(odd.psi) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(even.prob > 0.0);
  CHECK(odd.prob > 0.0);
}

TEST_CASE("number-correlated resource heralds Fock states at zero displacement") {
  const double r = 0.9;
  TwoModeState st = epr_state(r, 40);
  const double t = std::tanh(r);
  for (int m : {0, 1, 5, 12}) {
    HeraldResult h = herald_pure(st, cplx(0, 0), m);
    CHECK(std::abs(h.psi.a[m]) == doctest::Approx(1.0).epsilon(1e-14));
    const double expect = std::pow(t * t, m) / (std::cosh(r) * std::cosh(r));
    CHECK(h.prob == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("herald_pure rejects outcomes beyond the ancilla cutoff") {
  TwoModeState st = split_squeezed_state(0.5, 0.0, 10, 12);
  CHECK_THROWS_AS(herald_pure(st, cplx(1, 0), 13), std::invalid_argument);
  CHECK_THROWS_AS(herald_pure(st, cplx(1, 0), -1), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Working-point regression pins (10 dB, alpha = 4, cutoffs 50/80)
// ---------------------------------------------------------------------------

TEST_CASE("working-point count distribution and parities") {
  TwoModeState st = bulk_resource();
  HeraldedEnsemble ens = herald_ensemble(st, cplx(4, 0), 50);

  // Most likely outcome and its nearly-even heralded state.
  int modal = static_cast<int>(
      std::max_element(ens.probs.begin(), ens.probs.end()) - ens.probs.begin());
  CHECK(modal == 17);
  CHECK(ens.probs[17] == doctest::Approx(0.11869797).epsilon(1e-7));
  CHECK(parity_expectation(ens.states[17]) ==
        doctest::Approx(0.98949179).epsilon(1e-7));

  // The mid-tail window where the heralded states turn strongly non-classical.
  const double p_pin[4] = {5.22268615e-2, 3.53114265e-2, 2.26936149e-2,
                           1.41317045e-2};
  const double parity_pin[4] = {-0.22454180, -0.40539593, -0.17824861,
                                +0.28088518};
  for (int i = 0; i < 4; ++i) {
    const int m = 21 + i;
    CHECK(ens.probs[m] == doctest::Approx(p_pin[i]).epsilon(1e-7));
    CHECK(parity_expectation(ens.states[m]) ==
          doctest::Approx(parity_pin[i]).epsilon(1e-6));
  }

  // The grid of outcomes captures essentially all the probability: the mass
  // past m = 50 dominates the tail, and extending the grid to the full
  // ancilla range leaves only the resource's own truncation defect.
  CHECK(ens.tail_mass() > 0.0);
  CHECK(ens.tail_mass() < 1e-6);
  HeraldedEnsemble every = herald_ensemble(st, cplx(4, 0), 80);
  CHECK(every.tail_mass() == doctest::Approx(9.563e-10).epsilon(2e-2));
  for (int m = 0; m <= 50; ++m) CHECK(ens.reliable[m]);
}

TEST_CASE("ensemble, single-outcome and distribution paths agree exactly") {
  TwoModeState st = bulk_resource();
  const cplx alpha(4, 0);
  HeraldedEnsemble ens = herald_ensemble(st, alpha, 30);
  std::vector<double> dist = herald_distribution(st, alpha, 30);
  for (int m : {0, 9, 17, 24, 30}) {
    HeraldResult h = herald_pure(st, alpha, m);
    CHECK(h.prob == ens.probs[m]);
    CHECK(dist[m] == ens.probs[m]);
    for (int n = 0; n <= 50; ++n) CHECK(h.psi.a[n] == ens.states[m].a[n]);
  }
}

TEST_CASE("rearranged-series reference reproduces the heralded states") {
  TwoModeState st = bulk_resource();
  const double r = db_to_r(10.0);
  for (int m : {0, 7, 17, 24}) {
    HeraldResult h = herald_pure(st, cplx(4, 0), m);
    FockVector ref = herald_series_reference(r, cplx(4, 0), m, 50, 80);
    CHECK(fidelity(h.psi, ref) > 1.0 - 1e-10);
  }
  HeraldResult h = herald_pure(st, cplx(0, 4), 13);
  FockVector ref = herald_series_reference(r, cplx(0, 4), 13, 50, 80);
  CHECK(fidelity(h.psi, ref) > 1.0 - 1e-10);
}

TEST_CASE("number-correlated resource: count distribution ignores the "
          "displacement phase") {
  TwoModeState st = epr_state(db_to_r(10.0), 80);
  std::vector<double> along = herald_distribution(st, cplx(4, 0), 50);
  std::vector<double> across = herald_distribution(st, cplx(0, 4), 50);
  for (int m = 0; m <= 50; ++m) CHECK(along[m] == across[m]);
}

TEST_CASE("unconditioned marginal of the number-correlated resource is "
          "thermal") {
  const double r = db_to_r(10.0);
  TwoModeState st = epr_state(r, 80);
  double par = 0.0;
  for (int n = 0; n <= 80; ++n) {
    par += (n % 2 == 0 ? 1.0 : -1.0) * std::norm(st.at(n, n));
  }
  const double sh = std::sinh(r);
  CHECK(par == doctest::Approx(1.0 / (2.0 * sh * sh + 1.0)).epsilon(1e-12));
}

// ---------------------------------------------------------------------------
// Coherent-state superpositions
// ---------------------------------------------------------------------------

TEST_CASE("cat_state limits and normalization") {
  FockVector even0 = cat_state(cplx(0, 0), true, 10);
  CHECK(std::abs(even0.a[0]) == 1.0);
  FockVector odd0 = cat_state(cplx(0, 0), false, 10);
  CHECK(std::abs(odd0.a[1]) == 1.0);

  FockVector even = cat_state(cplx(1.3, 0.4), true, 40);
  CHECK(even.norm2() == doctest::Approx(1.0).epsilon(1e-12));
  for (int n = 1; n <= 39; n += 2) CHECK(std::abs(even.a[n]) == 0.0);

  FockVector odd = cat_state(cplx(0, 0.9), false, 40);
  CHECK(odd.norm2() == doctest::Approx(1.0).epsilon(1e-12));
  for (int n = 0; n <= 40; n += 2) CHECK(std::abs(odd.a[n]) == 0.0);

  // A tiny odd superposition is the single-photon state.
  FockVector tiny = cat_state(cplx(1e-3, 0), false, 10);
  CHECK(std::norm(tiny.a[1]) > 1.0 - 1e-5);
}

TEST_CASE("even superposition mean photon number") {
  const cplx beta(0, 0.9);
  FockVector cat = cat_state(beta, true, 40);
  const double x = std::norm(beta);
  CHECK(cat.mean_photon_number() ==
        doctest::Approx(x * std::tanh(x)).epsilon(1e-12));
}

TEST_CASE("cat_fidelity matches the parity of its argument") {
  const cplx beta(1.1, -0.7);
  CHECK(cat_fidelity(cat_state(beta, true, 40), beta) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cat_fidelity(cat_state(beta, false, 40), beta) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("coherent_fidelity and mean_annihilation on a displaced vacuum") {
  const cplx gamma(0.9, -1.4);
  ComplexOperator d = displacement_matrix(gamma, 60);
  FockVector coh(60);
  for (int n = 0; n <= 60; ++n) coh.a[n] = d.at(n, 0);
  CHECK(coherent_fidelity(coh, gamma) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(mean_annihilation(coh) - gamma) < 1e-12);
  CHECK(coherent_fidelity(coh, cplx(0, 0)) ==
        doctest::Approx(std::exp(-std::norm(gamma))).epsilon(1e-10));
}

TEST_CASE("zero-displacement heralds drift away from plain superpositions as "
          "the count grows") {
  // Overlap with the coherent-superposition family at beta = i sqrt(m t / 2),
  // t = tanh r: the sequence decreases instead of approaching one, because the
  // heralded states carry a residual quadrature deformation at fixed r.
  const double r = db_to_r(10.0);
  const double t = std::tanh(r);
  TwoModeState st = bulk_resource();
  const int ms[4] = {4, 8, 16, 24};
  const double pin[4] = {0.82438157, 0.73802633, 0.59214479, 0.47480336};
  double fids[4];
  for (int i = 0; i < 4; ++i) {
    HeraldResult h = herald_pure(st, cplx(0, 0), ms[i]);
    cplx beta(0.0, std::sqrt(ms[i] * t / 2.0));
    fids[i] = cat_fidelity(h.psi, beta);
    CHECK(fids[i] == doctest::Approx(pin[i]).epsilon(1e-6));
  }
  CHECK(fids[0] > fids[1]);
  CHECK(fids[1] > fids[2]);
  CHECK(fids[2] > fids[3]);

  // The alternative strength reading beta^2 = m tanh(r/2) decreases as well.
  double alt[4];
  for (int i = 0; i < 4; ++i) {
    HeraldResult h = herald_pure(st, cplx(0, 0), ms[i]);
    cplx beta(0.0, std::sqrt(ms[i] * std::tanh(r / 2.0)));
    alt[i] = cat_fidelity(h.psi, beta);
  }
  CHECK(alt[0] == doctest::Approx(0.9066).epsilon(1e-2));
  CHECK(alt[3] == doctest::Approx(0.7539).epsilon(1e-2));
  CHECK(alt[0] > alt[1]);
  CHECK(alt[1] > alt[2]);
  CHECK(alt[2] > alt[3]);
}

TEST_CASE("the m = 24 zero-displacement herald is a quadrature-deformed "
          "superposition") {
  // No plain superposition fits the state well, but squeezing one by
  // s ~ 0.25 recovers near-unit overlap.
  TwoModeState st = bulk_resource();
  HeraldResult h = herald_pure(st, cplx(0, 0), 24);

  double best_plain = 0.0;
  for (double b = 2.8; b <= 4.6; b += 0.05) {
    best_plain = std::max(best_plain, cat_fidelity(h.psi, cplx(0.0, b)));
  }
  CHECK(best_plain < 0.97);

  const int dim = 60;
  double best_squeezed = 0.0;
  for (double theta : {0.0, M_PI / 2, M_PI, 3 * M_PI / 2}) {
    oracle::Mat sq = oracle::squeeze_expm(0.25, theta, dim);
    for (double b = 3.10; b <= 3.27; b += 0.02) {
      FockVector cat = cat_state(cplx(0.0, b), true, dim - 1);
      oracle::Vec v = sq * oracle::to_eigen(cat);
      cplx ov = 0.0;
      for (int n = 0; n <= 50; ++n) ov += std::conj(v(n)) * h.psi.a[n];
      best_squeezed = std::max(best_squeezed, std::norm(ov));
    }
  }
  CHECK(best_squeezed > 0.999);
  CHECK(best_squeezed > best_plain + 0.02);
}

// ---------------------------------------------------------------------------
// Displacement-phase diagnostics
// ---------------------------------------------------------------------------

TEST_CASE("phase diagnostics at a rare outcome far outside the displaced bulk") {
  PhaseRoleReport rep = phase_role_diagnostics(db_to_r(10.0), 0.5, 20);

  CHECK(rep.prob_phi0 == doctest::Approx(4.71016729e-5).epsilon(1e-6));
  // The outcome sits ~8 standard deviations above the displaced photon
  // distribution, where the heralded state is dominated by the parity
  // OPPOSITE to the count.
  CHECK(rep.opp_weight_phi0 == doctest::Approx(0.979423956).epsilon(1e-6));

  CHECK(rep.prob_phi90 == doctest::Approx(1.05821403e-4).epsilon(1e-6));
  CHECK(rep.opp_weight_phi90 == doctest::Approx(0.353227023).epsilon(1e-6));
  CHECK(rep.coherent_fidelity_phi90 ==
        doctest::Approx(0.889037151).epsilon(1e-6));
  CHECK(std::abs(rep.mean_a_phi90.real()) < 1e-8);
  CHECK(rep.mean_a_phi90.imag() == doctest::Approx(3.078141).epsilon(1e-5));
  CHECK_FALSE(rep.regime_ok);  // m |alpha|^2 = 5 is far from small
}

TEST_CASE("phase diagnostics in the displaced bulk: opposite parity is "
          "suppressed") {
  PhaseRoleReport rep = phase_role_diagnostics(db_to_r(10.0), 4.0, 16);
  CHECK(rep.opp_weight_phi0 == doctest::Approx(0.024876081).epsilon(1e-6));
  CHECK(rep.opp_weight_phi0 < 0.05);
}

TEST_CASE("near-diagonal element formula: accurate only when m|alpha|^2 is "
          "small") {
  // Checks are ordered delta = -2, -1, +1, +2.
  PhaseRoleReport wide = phase_role_diagnostics(db_to_r(10.0), 0.5, 30);
  REQUIRE(wide.near_diagonal.size() == 4);
  CHECK_FALSE(wide.regime_ok);  // m |alpha|^2 = 7.5
  CHECK(wide.near_diagonal[0].rel_err == doctest::Approx(488.86).epsilon(1e-3));
  CHECK(wide.near_diagonal[1].rel_err == doctest::Approx(23.886).epsilon(1e-3));
  CHECK(wide.near_diagonal[2].rel_err == doctest::Approx(7.3247).epsilon(1e-3));
  CHECK(wide.near_diagonal[3].rel_err == doctest::Approx(20.559).epsilon(1e-3));

  PhaseRoleReport narrow = phase_role_diagnostics(db_to_r(10.0), 0.05, 30);
  CHECK(narrow.regime_ok);  // m |alpha|^2 = 0.075
  CHECK(narrow.near_diagonal[2].rel_err ==
        doctest::Approx(0.020312).epsilon(1e-3));
  CHECK(narrow.near_diagonal[3].rel_err ==
        doctest::Approx(0.024522).epsilon(1e-3));
  CHECK(narrow.near_diagonal[2].rel_err < 0.1);
  CHECK(narrow.near_diagonal[3].rel_err < 0.1);
}

}  // TEST_SUITE("heralding")
