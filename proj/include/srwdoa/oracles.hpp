// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "srwdoa/common.hpp"

namespace srwdoa {
// Independent reference computations used by the test suite and the `oracle`
// CLI report.  These deliberately avoid the library's production code paths:
// the PSWF reference discretizes the integral kernel directly, the metric
// reference matches by brute-force permutation, etc.
namespace oracles {

// Gauss-Legendre nodes/weights on [-1, 1] (Golub-Welsch, long double).
void gauss_legendre(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights);

// |eigenvalues| of the bandlimited kernel, descending: discretize
// exp(i c x y) with an n-point Gauss-Legendre rule and eigendecompose.
Eigen::VectorXd pswf_kernel_eigs(double c, int n = 400);

// Metrics by exhaustive permutation matching (K <= 10).
double rmse_reference(const std::vector<double>& truths,
                      const std::vector<std::vector<double>>& per_trial);
double success_reference(const std::vector<double>& truths,
                         const std::vector<std::vector<double>>& per_trial,
                         double margin_deg);

// Minimum-norm solution of Ax = b via dense decomposition.
Eigen::VectorXd least_norm_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

// Report line for the `oracle` subcommand.
struct Check {
  std::string name;
  std::string detail;
  bool pass = false;
};

// Run the full derived-value report (quadrature eigenvalues, grid counts,
// kernel interpolation error, adjoint identity, node-map pin, etc.).
std::vector<Check> run_derived_checks(bool quick);

}  // namespace oracles
}  // namespace srwdoa
