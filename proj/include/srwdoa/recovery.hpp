// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "srwdoa/common.hpp"
#include "srwdoa/pswf.hpp"
#include "srwdoa/steering.hpp"

namespace srwdoa {

struct DoaEstimate {
  std::vector<double> thetas_deg;   // sorted ascending, exactly K
  std::vector<double> freqs;        // matching spatial frequencies
  std::vector<double> powers;       // per-component power proxies
  bool rank_warning = false;        // weak spectral gap in the source of nodes
  bool alias_warning = false;       // |f| clipped to [-1/2, 1/2]
};

struct NodeExtraction {
  Eigen::VectorXcd nodes;   // K unit-modulus
  Eigen::VectorXd powers;   // K, >= 0
  bool rank_warning = false;
};

// Matrix-pencil node extraction from a Hermitian Toeplitz T ~ sum p_k u_k u_k^H
// with u_k(m) = z_k^m: shift-invariance of the top-K eigenspace.  The rank
// guard flags lambda_{K+1}/lambda_K above `guard` (degenerate/noisy input);
// estimates are still returned.
NodeExtraction extract_nodes(const Eigen::MatrixXcd& T, int K, double guard = 1e-2);

// Node -> spatial frequency.  The Toeplitz entries v_n sample the source
// kernel exp(-i 2 pi f rmax tau) at tau = n/d, so z = exp(-i 2 pi f rmax / d)
// and f = -arg(z) d / (2 pi rmax).  Clips to [-1/2, 1/2]; sets alias flag if
// clipping was needed.
std::vector<double> nodes_to_frequencies(const Eigen::VectorXcd& nodes, double rmax,
                                         int d, bool* alias_warning = nullptr);

// theta = arcsin(2 f), degrees.  Requires |f| <= 1/2.
double freq_to_theta(double f);

// Full back-end: T -> sorted DOA estimate.
DoaEstimate recover_doas(const Eigen::MatrixXcd& T, int K, double rmax, int d,
                         double guard = 1e-2);

}  // namespace srwdoa
