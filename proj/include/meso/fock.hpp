#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

// Truncated Fock-space states and operators: squeezed vacuum, split squeezed
// vacuum, two-mode squeezed (EPR) state, displacement matrix elements, and the
// displaced photon-number observable.
//
// All amplitudes are built in the log-factorial domain and every factorial
// ratio is evaluated through std::lgamma or a term-to-term recurrence, so the
// constructors stay accurate well past n = 100.

namespace meso {

using cplx = std::complex<double>;

inline constexpr double kDefaultDeficitTol = 1e-6;

// Thrown when a nominally normalized state loses more probability to
// truncation than the caller allows.
class truncation_error : public std::runtime_error {
 public:
  truncation_error(const std::string& what, double deficit)
      : std::runtime_error(what), deficit_(deficit) {}
  double deficit() const { return deficit_; }

 private:
  double deficit_;
};

// Single-mode pure state: amplitudes over photon numbers 0..cutoff.
struct FockVector {
  std::vector<cplx> a;

  FockVector() = default;
  explicit FockVector(int cutoff) : a(static_cast<size_t>(cutoff) + 1) {}

  int cutoff() const { return static_cast<int>(a.size()) - 1; }
  double norm2() const;
  // 1 - norm2: the probability mass lost to truncation for a state that
  // would be exactly normalized at infinite cutoff.
  double truncation_deficit() const { return 1.0 - norm2(); }
  void normalize();
  double mean_photon_number() const;
};

// Two-mode pure state, amplitudes indexed (signal photon number, ancilla
// photon number), row-major over the ancilla index.
struct TwoModeState {
  int n_signal = 0;   // signal cutoff
  int n_ancilla = 0;  // ancilla cutoff
  std::vector<cplx> amp;

  TwoModeState() = default;
  TwoModeState(int ns, int na)
      : n_signal(ns),
        n_ancilla(na),
        amp(static_cast<size_t>(ns + 1) * static_cast<size_t>(na + 1)) {}

  cplx& at(int ns, int na) {
    return amp[static_cast<size_t>(ns) * (n_ancilla + 1) + na];
  }
  cplx at(int ns, int na) const {
    return amp[static_cast<size_t>(ns) * (n_ancilla + 1) + na];
  }
  double norm2() const;
  double truncation_deficit() const { return 1.0 - norm2(); }
};

// Dense operator on the truncated single-mode space, (n+1) x (n+1).
struct ComplexOperator {
  int n = 0;
  std::vector<cplx> e;

  ComplexOperator() = default;
  explicit ComplexOperator(int cutoff)
      : n(cutoff),
        e(static_cast<size_t>(cutoff + 1) * static_cast<size_t>(cutoff + 1)) {}

  cplx& at(int i, int j) { return e[static_cast<size_t>(i) * (n + 1) + j]; }
  cplx at(int i, int j) const {
    return e[static_cast<size_t>(i) * (n + 1) + j];
  }
};

// Squeezing strength from a noise-reduction figure in dB:
// r = dB * ln(10)/20, i.e. quadrature variance ratio e^{-2r} = 10^(-dB/10).
double db_to_r(double squeezing_db);

// Squeezed vacuum |r e^{i theta}> truncated at n_cut. Amplitudes live on even
// photon numbers only:
//   a_{2j} = (-1)^j e^{i j theta} exp(-ln(cosh r)/2 + j ln(tanh r / 2)
//            - lgamma(j+1) + lgamma(2j+1)/2).
// Throws truncation_error if the lost tail exceeds deficit_tol.
FockVector squeezed_vacuum(double r, double theta, int n_cut,
                           double deficit_tol = kDefaultDeficitTol);

// Single-mode squeezed vacuum split on a balanced beam splitter, written
// directly in the (signal, ancilla) Fock basis:
//   amp(n, k) = (-1)^j e^{i j theta} * (tanh r)^j / (4^j j!) / sqrt(cosh r)
//               * (n+k)! / (sqrt(n!) sqrt(k!)),   j = (n+k)/2,
// and exactly zero whenever n + k is odd.
TwoModeState split_squeezed_state(double r, double theta, int n_signal,
                                  int n_ancilla,
                                  double deficit_tol = kDefaultDeficitTol);

// Two-mode squeezed vacuum with perfect photon-number correlation:
//   amp(n, n) = (-tanh r)^n / cosh r, off-diagonal exactly zero.
TwoModeState epr_state(double r, int n,
                       double deficit_tol = kDefaultDeficitTol);

// Matrix elements <m|D(alpha)|k> of D(alpha) = exp(alpha a^dag - conj(alpha) a)
// on the truncated basis, computed by a per-diagonal three-term recurrence
// whose every intermediate is bounded by 1 in magnitude. Entries are accurate
// to machine precision for |alpha| <= 4 and n well past 300; there is no
// overflow at any size.
ComplexOperator displacement_matrix(cplx alpha, int n);

// The displaced photon-number observable
//   Upsilon(alpha) = |alpha|^2 I + (alpha a^dag + conj(alpha) a) + a^dag a,
// Hermitian by construction.
ComplexOperator upsilon_operator(cplx alpha, int n);

// Worst-case deviation from row orthonormality, max over m, m' <= rows of
// |sum_k Delta_mk conj(Delta_m'k) - delta_mm'|. The physical operator is
// unitary; on a truncated basis the defect is small only while every kept row
// has negligible support beyond column n (displaced |m> has number spread
// ~ |alpha| sqrt(2m+1), so pad n accordingly).
double unitarity_defect(const ComplexOperator& d, int rows);

}  // namespace meso
