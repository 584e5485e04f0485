// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <optional>

#include "srwdoa/anm.hpp"
#include "srwdoa/recovery.hpp"
#include "srwdoa/signal_model.hpp"

namespace srwdoa {

struct SrwOptions {
  double pswf_eps = 1e-4;
  double sigma_scale = 1.0;    // eta multiplier on the noise bound
  AnmOptions anm;
  SolverConfig solver;
  double rank_guard = 1e-2;
  bool reuse_warm_start = false;  // seed each solve from the previous one
};

struct SrwEstimate {
  DoaEstimate doa;
  AnmResult anm;
  double solve_seconds = 0.0;
};

// End-to-end gridless estimator for a fixed (geometry, bin set): builds the
// virtual grid and basis once, assembles the SDP once, then maps each new
// snapshot to DOAs.  Safe to reuse across Monte Carlo trials.
class SrwEstimator {
 public:
  SrwEstimator(const ArrayGeometry& g, const Eigen::VectorXd& alphas, int K,
               bool equality_data, const SrwOptions& opt = {});

  SrwEstimate estimate(const Eigen::MatrixXcd& X, double sigma) const;

  const VirtualGrid& grid() const { return problem_->grid(); }
  const PswfBasis& basis() const { return problem_->basis(); }
  const AnmProblem& problem() const { return *problem_; }

 private:
  int K_;
  SrwOptions opt_;
  std::unique_ptr<AnmProblem> problem_;
  mutable std::optional<Solution> last_;
};

// One-shot convenience wrapper.
SrwEstimate estimate_srw(const ArrayGeometry& g, const BinnedSnapshot& snap,
                         double sigma, int K, const SrwOptions& opt = {});

}  // namespace srwdoa
