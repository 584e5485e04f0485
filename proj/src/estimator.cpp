// SPDX-License-Identifier: Apache-2.0
#include "srwdoa/estimator.hpp"

namespace srwdoa {

SrwEstimator::SrwEstimator(const ArrayGeometry& g, const Eigen::VectorXd& alphas,
                           int K, bool equality_data, const SrwOptions& opt)
    : K_(K), opt_(opt) {
  require(K >= 1, "need at least one source");
  VirtualGrid grid = build_virtual_grid(g, alphas, opt.anm.dedup_tol);
  const double c = kPi * grid.rmax();
  PswfBasis basis = compute_basis(c, opt.pswf_eps);
  require(K <= basis.d, "K exceeds the Toeplitz pencil order d");
  problem_ = std::make_unique<AnmProblem>(std::move(grid), std::move(basis),
                                          g.size(), static_cast<int>(alphas.size()),
                                          equality_data, opt.anm);
}

SrwEstimate SrwEstimator::estimate(const Eigen::MatrixXcd& X, double sigma) const {
  const Solution* warm =
      (opt_.reuse_warm_start && last_.has_value()) ? &*last_ : nullptr;
  SolverConfig cfg = opt_.solver;
  cfg.warm_start = warm != nullptr;

  SrwEstimate out;
  out.anm = problem_->solve(X, sigma * opt_.sigma_scale, cfg, warm);
  if (opt_.reuse_warm_start) last_ = out.anm.diagnostics;
  out.doa = recover_doas(out.anm.T, K_, problem_->grid().rmax(), problem_->basis().d,
                         opt_.rank_guard);
  out.solve_seconds = out.anm.diagnostics.solve_seconds;
  return out;
}

SrwEstimate estimate_srw(const ArrayGeometry& g, const BinnedSnapshot& snap,
                         double sigma, int K, const SrwOptions& opt) {
  SrwEstimator est(g, snap.alphas, K, /*equality_data=*/sigma == 0.0, opt);
  return est.estimate(snap.X, sigma);
}

}  // namespace srwdoa
