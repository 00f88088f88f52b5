#pragma once

// Dense generator-exponential references built with Eigen, used only by the
// tests. These deliberately use a different algorithm family (matrix
// exponentials of the generators) from the library's recurrences, so
// agreement between the two is meaningful evidence of correctness.

#include <cmath>
#include <complex>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "meso/fock.hpp"
#include "meso/phasespace.hpp"

namespace oracle {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using meso::cplx;

inline Mat annihilation(int dim) {
  Mat a = Mat::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(double(n));
  return a;
}

// exp(alpha a^dag - conj(alpha) a)
inline Mat displacement_expm(cplx alpha, int dim) {
  Mat a = annihilation(dim);
  Mat g = alpha * a.adjoint() - std::conj(alpha) * a;
  return g.exp();
}

// exp((r/2)(e^{-i theta} a^2 - e^{i theta} a^dag^2))
inline Mat squeeze_expm(double r, double theta, int dim) {
  Mat a = annihilation(dim);
  cplx phase(std::cos(theta), std::sin(theta));
  Mat g = 0.5 * r *
          (std::conj(phase) * (a * a) - phase * (a.adjoint() * a.adjoint()));
  return g.exp();
}

inline Mat kron(const Mat& x, const Mat& y) {
  Mat out(x.rows() * y.rows(), x.cols() * y.cols());
  for (int i = 0; i < x.rows(); ++i)
    for (int j = 0; j < x.cols(); ++j)
      out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
  return out;
}

// Two-mode squeezed vacuum exp(r(ab - a^dag b^dag)) |0,0>, flattened with the
// first-mode index major (matching TwoModeState::at).
inline Vec epr_expm(double r, int dim) {
  Mat a = kron(annihilation(dim), Mat::Identity(dim, dim));
  Mat b = kron(Mat::Identity(dim, dim), annihilation(dim));
  Mat g = r * (a * b - a.adjoint() * b.adjoint());
  Vec vac = Vec::Zero(dim * dim);
  vac(0) = 1.0;
  return g.exp() * vac;
}

// Balanced beam splitter exp((pi/4)(a b^dag - a^dag b)) acting on
// (squeezed vacuum) x (vacuum), same flattening.
inline Vec split_expm(double r, double theta, int dim) {
  Mat a = kron(annihilation(dim), Mat::Identity(dim, dim));
  Mat b = kron(Mat::Identity(dim, dim), annihilation(dim));
  Mat g = (M_PI / 4.0) * (a * b.adjoint() - a.adjoint() * b);
  Mat sq = squeeze_expm(r, theta, dim);
  Vec in = Vec::Zero(dim * dim);
  for (int n = 0; n < dim; ++n) in(n * dim) = sq(n, 0);
  return g.exp() * in;
}

inline Mat to_eigen(const meso::ComplexOperator& op) {
  Mat out(op.n + 1, op.n + 1);
  for (int i = 0; i <= op.n; ++i)
    for (int j = 0; j <= op.n; ++j) out(i, j) = op.at(i, j);
  return out;
}

inline Mat to_eigen(const meso::DensityMatrix& rho) {
  Mat out(rho.n + 1, rho.n + 1);
  for (int i = 0; i <= rho.n; ++i)
    for (int j = 0; j <= rho.n; ++j) out(i, j) = rho.at(i, j);
  return out;
}

inline Vec to_eigen(const meso::FockVector& psi) {
  Vec out(psi.cutoff() + 1);
  for (int n = 0; n <= psi.cutoff(); ++n) out(n) = psi.a[n];
  return out;
}

// Largest |x(i,j) - y(i,j)| over a shared leading block.
inline double block_max_diff(const Mat& x, const Mat& y, int rows, int cols) {
  double worst = 0.0;
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      worst = std::max(worst, std::abs(x(i, j) - y(i, j)));
  return worst;
}

}  // namespace oracle
