// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "srwdoa/common.hpp"

namespace srwdoa {

// Prolate spheroidal wave functions: eigenfunctions of
//   (xi r)(tau) = integral_{-1}^{1} exp(i c zeta tau) r(zeta) dzeta.
// Computed by expanding in normalized Legendre polynomials and diagonalizing
// the tridiagonal matrix of the commuting differential operator, which stays
// numerically stable for large c.  Eigenvalues lambda_l are recovered from the
// integral relation evaluated at the point where |phi_l| is largest.
struct PswfBasis {
  double c = 0.0;
  double eps = 1e-4;
  int d = 0;                   // truncation order: functions l = 0 .. 2d
  Eigen::VectorXcd lambda;     // 2d+1 eigenvalues, |lambda_l| non-increasing
  Eigen::MatrixXd beta;        // Legendre coefficients, column l
  Eigen::MatrixXd Phi;         // (2d+1) x (2d+1): Phi(q, l) = phi_l(tau_q)
  Eigen::PartialPivLU<Eigen::MatrixXd> Phi_lu;  // of Phi^T (for weight solves)
  double phi_condition = 0.0;

  int n_funcs() const { return 2 * d + 1; }
  // Uniform sample grid tau_q = (q - d) / d for q = 0 .. 2d (0-based).
  double tau_grid(int q) const { return static_cast<double>(q - d) / d; }

  // Evaluate phi_l at tau in [-1, 1] for l = 0 .. 2d; rows = points.
  Eigen::MatrixXd evaluate(const Eigen::VectorXd& taus) const;
  Eigen::VectorXd evaluate_one(double tau) const;
};

struct compute_basis_options {
  int max_funcs = 257;      // resource guard on 2d+1
  double max_condition = 1e10;  // guard on cond(Phi)
};

PswfBasis compute_basis(double c, double eps = 1e-4,
                        const compute_basis_options& opt = {});

// phi_l((r_q - r_p) / r_max) for l = 0 .. 2d (the SDP kernel sample vector).
Eigen::VectorXd kernel_vector(const PswfBasis& basis, const Eigen::VectorXd& grid_r,
                              int q, int p);

}  // namespace srwdoa
