// SPDX-License-Identifier: Apache-2.0
#include "srwdoa/conic.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace srwdoa {

int cone_rows(const std::vector<Cone>& cones) {
  int m = 0;
  for (const auto& k : cones) m += k.rows();
  return m;
}

void ConicProgram::validate() const {
  require(A.rows() == b.size(), "A/b row mismatch");
  require(A.cols() == c.size(), "A/c column mismatch");
  require(cone_rows(cones) == b.size(), "cone dims do not cover b");
  for (const auto& k : cones) {
    require(k.dim >= 1, "empty cone");
    if (k.complex_pair)
      require(k.type == Cone::Psd && k.dim % 2 == 0,
              "complex_pair requires an even-side PSD block");
  }
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::MaxIterations: return "max_iterations";
    case SolveStatus::PrimalInfeasible: return "primal_infeasible";
    case SolveStatus::DualInfeasible: return "dual_infeasible";
  }
  return "?";
}

// ---------- packing helpers ----------

Eigen::VectorXd svec(const Eigen::MatrixXd& S) {
  const int n = static_cast<int>(S.rows());
  Eigen::VectorXd v(n * (n + 1) / 2);
  int k = 0;
  for (int a = 0; a < n; ++a) {
    v(k++) = S(a, a);
    for (int b = a + 1; b < n; ++b) v(k++) = M_SQRT2 * S(b, a);
  }
  return v;
}

Eigen::MatrixXd smat(const Eigen::VectorXd& v, int side) {
  Eigen::MatrixXd S(side, side);
  int k = 0;
  for (int a = 0; a < side; ++a) {
    S(a, a) = v(k++);
    for (int b = a + 1; b < side; ++b) {
      const double x = v(k++) * M_SQRT1_2;
      S(b, a) = x;
      S(a, b) = x;
    }
  }
  return S;
}

Eigen::MatrixXd realify(const Eigen::MatrixXcd& H) {
  require((H - H.adjoint()).norm() <= 1e-10 * (1.0 + H.norm()),
          "realify expects a Hermitian matrix");
  const int n = static_cast<int>(H.rows());
  Eigen::MatrixXd R(2 * n, 2 * n);
  R.topLeftCorner(n, n) = H.real();
  R.bottomRightCorner(n, n) = H.real();
  R.topRightCorner(n, n) = -H.imag();
  R.bottomLeftCorner(n, n) = H.imag();
  return R;
}

// ---------- projections ----------

namespace {

// Clamp-negative-eigenvalues reconstruction, using whichever side (positive
// or negative eigenvalues) is cheaper to rebuild from.
template <typename Mat>
Mat psd_clamp(const Mat& S) {
  Eigen::SelfAdjointEigenSolver<Mat> es(S);
  const auto& w = es.eigenvalues();
  const int n = static_cast<int>(w.size());
  int nneg = 0;
  while (nneg < n && w(nneg) < 0.0) ++nneg;
  if (nneg == 0) return S;
  if (nneg == n) return Mat::Zero(n, n);
  if (nneg <= n - nneg) {
    Mat out = S;
    for (int i = 0; i < nneg; ++i)
      out.noalias() -= w(i) * es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
    return out;
  }
  Mat out = Mat::Zero(n, n);
  for (int i = nneg; i < n; ++i)
    out.noalias() += w(i) * es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
  return out;
}

void project_psd_block(Eigen::Ref<Eigen::VectorXd> block, int side, bool complex_pair) {
  if (!complex_pair) {
    Eigen::MatrixXd S = smat(block, side);
    block = svec(psd_clamp(S));
    return;
  }
  // Hermitian embedding: rebuild the complex half, project, re-embed.  The
  // average over the two redundant copies keeps the map symmetric.
  const int h = side / 2;
  const Eigen::MatrixXd S = smat(block, side);
  Eigen::MatrixXcd H(h, h);
  for (int j = 0; j < h; ++j)
    for (int i = 0; i < h; ++i)
      H(i, j) = cxd(0.5 * (S(i, j) + S(h + i, h + j)),
                    0.5 * (S(h + i, j) - S(h + j, i)));
  const Eigen::MatrixXcd Hp = psd_clamp(Eigen::MatrixXcd((H + H.adjoint()) / 2.0));
  Eigen::MatrixXd R(side, side);
  R.topLeftCorner(h, h) = Hp.real();
  R.bottomRightCorner(h, h) = Hp.real();
  R.topRightCorner(h, h) = -Hp.imag();
  R.bottomLeftCorner(h, h) = Hp.imag();
  block = svec(R);
}

}  // namespace

Eigen::MatrixXd project_psd(const Eigen::MatrixXd& S) {
  require(S.rows() == S.cols(), "project_psd: square input required");
  require(S.allFinite(), "project_psd: non-finite input");
  return psd_clamp(Eigen::MatrixXd(0.5 * (S + S.transpose())));
}

void project_soc_inplace(Eigen::Ref<Eigen::VectorXd> block) {
  const int n = static_cast<int>(block.size());
  if (n == 1) {
    block(0) = std::max(block(0), 0.0);
    return;
  }
  const double t = block(0);
  const double nx = block.tail(n - 1).norm();
  if (nx <= t) return;
  if (nx <= -t) {
    block.setZero();
    return;
  }
  const double a = 0.5 * (nx + t);
  block(0) = a;
  block.tail(n - 1) *= a / nx;
}

void project_cones_inplace(Eigen::VectorXd& s, const std::vector<Cone>& cones,
                           bool dual) {
  int off = 0;
  for (const auto& k : cones) {
    const int len = k.rows();
    switch (k.type) {
      case Cone::Zero:
        // primal cone {0}; dual cone is everything
        if (!dual) s.segment(off, len).setZero();
        break;
      case Cone::Soc:
        project_soc_inplace(s.segment(off, len));
        break;
      case Cone::Psd:
        project_psd_block(s.segment(off, len), k.dim, k.complex_pair);
        break;
    }
    off += len;
  }
}

// ---------- prepared solver ----------

PreparedSolver::PreparedSolver(ConicProgram prog, bool scaling, int ruiz_iterations)
    : prog_(std::move(prog)), scaling_(scaling), ruiz_iterations_(ruiz_iterations) {
  prog_.validate();
  prepare();
}

void PreparedSolver::set_b(const Eigen::VectorXd& b) {
  require(b.size() == prog_.b.size(), "set_b: dimension change");
  prog_.b = b;
}

void PreparedSolver::prepare() {
  const int m = prog_.constraints(), n = prog_.vars();
  As_ = prog_.A;
  drow_ = Eigen::VectorXd::Ones(m);
  ecol_ = Eigen::VectorXd::Ones(n);

  // Ruiz equilibration with cone-uniform row scaling (a diagonal scaling must
  // keep each SOC/PSD block's rows on a single scale to preserve the cone).
  const int ruiz_iters = scaling_ ? ruiz_iterations_ : 0;
  Eigen::VectorXd rnorm(m), cnorm(n);
  for (int it = 0; it < ruiz_iters; ++it) {
    rnorm.setZero();
    cnorm.setZero();
    for (int j = 0; j < As_.outerSize(); ++j)
      for (Eigen::SparseMatrix<double>::InnerIterator a(As_, j); a; ++a) {
        const double v = std::abs(a.value());
        rnorm(a.row()) = std::max(rnorm(a.row()), v);
        cnorm(j) = std::max(cnorm(j), v);
      }
    int off = 0;
    for (const auto& k : prog_.cones) {
      const int len = k.rows();
      if (k.type != Cone::Zero) {
        const double blk = rnorm.segment(off, len).maxCoeff();
        rnorm.segment(off, len).setConstant(blk);
      }
      off += len;
    }
    for (int i = 0; i < m; ++i)
      rnorm(i) = rnorm(i) > 1e-12 ? 1.0 / std::sqrt(rnorm(i)) : 1.0;
    for (int j = 0; j < n; ++j)
      cnorm(j) = cnorm(j) > 1e-12 ? 1.0 / std::sqrt(cnorm(j)) : 1.0;
    for (int j = 0; j < As_.outerSize(); ++j)
      for (Eigen::SparseMatrix<double>::InnerIterator a(As_, j); a; ++a)
        a.valueRef() *= rnorm(a.row()) * cnorm(j);
    drow_.array() *= rnorm.array();
    ecol_.array() *= cnorm.array();
  }

  // Finish with one L2 pass.  Max-norm equilibration leaves dense columns
  // with large Euclidean norms (a column touching thousands of rows keeps
  // norm ~sqrt(nnz)), which starves those variables' dual updates; unit L2
  // columns restore the balance.  Row scaling must stay uniform inside each
  // SOC/PSD block, so blocks get their rms row norm.
  if (ruiz_iters > 0) {
    Eigen::VectorXd csq = Eigen::VectorXd::Zero(n);
    for (int j = 0; j < As_.outerSize(); ++j)
      for (Eigen::SparseMatrix<double>::InnerIterator a(As_, j); a; ++a)
        csq(j) += a.value() * a.value();
    for (int j = 0; j < n; ++j) csq(j) = csq(j) > 1e-24 ? 1.0 / std::sqrt(csq(j)) : 1.0;
    for (int j = 0; j < As_.outerSize(); ++j)
      for (Eigen::SparseMatrix<double>::InnerIterator a(As_, j); a; ++a)
        a.valueRef() *= csq(j);
    ecol_.array() *= csq.array();

    Eigen::VectorXd rsq = Eigen::VectorXd::Zero(m);
    for (int j = 0; j < As_.outerSize(); ++j)
      for (Eigen::SparseMatrix<double>::InnerIterator a(As_, j); a; ++a)
        rsq(a.row()) += a.value() * a.value();
    Eigen::VectorXd rscale(m);
    int off = 0;
    for (const auto& k : prog_.cones) {
      const int len = k.rows();
      if (k.type == Cone::Zero) {
        for (int i = 0; i < len; ++i)
          rscale(off + i) = rsq(off + i) > 1e-24 ? 1.0 / std::sqrt(std::sqrt(rsq(off + i))) : 1.0;
      } else {
        const double mean = rsq.segment(off, len).mean();
        rscale.segment(off, len)
            .setConstant(mean > 1e-24 ? 1.0 / std::sqrt(std::sqrt(mean)) : 1.0);
      }
      off += len;
    }
    for (int j = 0; j < As_.outerSize(); ++j)
      for (Eigen::SparseMatrix<double>::InnerIterator a(As_, j); a; ++a)
        a.valueRef() *= rscale(a.row());
    drow_.array() *= rscale.array();
  }

  Eigen::SparseMatrix<double> gram = Eigen::SparseMatrix<double>(As_.transpose()) * As_;
  Eigen::SparseMatrix<double> eye(n, n);
  eye.setIdentity();
  gram += eye;
  ldlt_.compute(gram);
  require(ldlt_.info() == Eigen::Success, "normal-equation factorization failed");
}

namespace {

struct ScaledView {
  Eigen::VectorXd bh, ch;  // scaled b, c
  double beta = 1.0, gamma = 1.0;
};

}  // namespace

Solution PreparedSolver::solve(const SolverConfig& cfg, const Solution* warm) const {
  return solve_with_b(prog_.b, cfg, warm);
}

Solution PreparedSolver::solve_with_b(const Eigen::VectorXd& bvec, const SolverConfig& cfg,
                                      const Solution* warm) const {
  const auto t_start = std::chrono::steady_clock::now();
  const int m = prog_.constraints(), n = prog_.vars();
  require(bvec.size() == m, "rhs length mismatch");

  ScaledView sv;
  sv.bh = drow_.cwiseProduct(bvec);
  sv.ch = ecol_.cwiseProduct(prog_.c);
  const double nb = sv.bh.norm(), nc = sv.ch.norm();
  sv.beta = nb > 1e-12 ? 1.0 / nb : 1.0;
  sv.gamma = nc > 1e-12 ? 1.0 / nc : 1.0;
  sv.bh *= sv.beta;
  sv.ch *= sv.gamma;

  const double norm_b_unscaled = bvec.norm();
  const double norm_c_unscaled = prog_.c.norm();

  // g = M^{-1} (ch, bh) for the tau elimination
  Eigen::VectorXd gx = ldlt_.solve(sv.ch - As_.transpose() * sv.bh);
  Eigen::VectorXd gy = sv.bh + As_ * gx;
  const double denom_g = 1.0 + sv.ch.dot(gx) + sv.bh.dot(gy);

  // The iteration state is the pre-projection point t; the cone iterate and
  // its Moreau complement are reconstructed as u = Pi(t), v = u - t, so any
  // t (including extrapolated ones) yields a complementary (u, v) pair.
  const int N = n + m + 1;
  Eigen::VectorXd tcur = Eigen::VectorXd::Zero(N);
  tcur(N - 1) = 2.0;  // cold start: tau kick, w_tau = 2
  if (cfg.warm_start && warm && warm->x.size() == n && warm->y.size() == m &&
      warm->s.size() == m) {
    tcur.head(n) = sv.beta * warm->x.cwiseQuotient(ecol_);
    tcur.segment(n, m) =
        sv.gamma * warm->y.cwiseQuotient(drow_) - sv.beta * drow_.cwiseProduct(warm->s);
    tcur(N - 1) = 1.0;
  }

  Solution sol;
  if (cfg.record_objective) sol.objective_trace.reserve(static_cast<size_t>(cfg.max_iterations));
  bool log_header_written = false;

  Eigen::VectorXd ux(n), uy(m), vy(m);
  double utau = 0.0, vkappa = 0.0;
  Eigen::VectorXd wx(n), wy(m), px(n), py(m);
  Eigen::VectorXd tnext(N), rvec(N);
  const double alpha = cfg.alpha;

  // Anderson acceleration (type II) on the fixed-point map t -> tnext.
  // Ring buffers of first differences; the mixed point is
  //   t_aa = t + r - (S + Y) gamma,  gamma = argmin ||r - Y gamma||.
  // Safeguard: an accelerated point is kept only while its own fixed-point
  // residual stays within aa_guard of the plain step it replaced; otherwise
  // the saved plain step is restored and the memory cleared.  Plain steps
  // have non-increasing residual (averaged operator), so rollbacks cannot
  // loop forever.
  const int aamem = std::max(0, cfg.aa_memory);
  Eigen::MatrixXd aaS, aaY, aaG;
  Eigen::VectorXd prev_t, prev_r, saved_plain;
  int aacols = 0, aahead = 0;
  bool have_prev = false, last_was_aa = false;
  double r_ref = 0.0;
  // Stagnation switches: acceleration is retired for good when the residual
  // makes no relative progress against its best over a long window, or when
  // rollbacks pile up without such progress.  On infeasible instances the
  // residual settles at the displacement-ray norm (acceleration can only
  // nibble at it while scrambling the iterate), so these hand the iteration
  // back to the plain map, whose divergence produces the certificates.
  bool aa_dead = false;
  double best_rnorm = std::numeric_limits<double>::infinity();
  int last_improve_it = 0, rejects_since_improve = 0;
  const int stagnation_window = 50 * std::max(aamem, 1);
  if (aamem > 0) {
    aaS.resize(N, aamem);
    aaY.resize(N, aamem);
    aaG = Eigen::MatrixXd::Zero(aamem, aamem);
    prev_t.resize(N);
    prev_r.resize(N);
    saved_plain.resize(N);
  }

  auto unscale_into = [&](Solution& out, double tau) {
    out.x = ecol_.cwiseProduct(ux) / (sv.beta * tau);
    out.y = drow_.cwiseProduct(uy) / (sv.gamma * tau);
    out.s = vy.cwiseQuotient(drow_) / (sv.beta * tau);
  };

  auto residuals = [&](const Solution& cand, double& pres, double& dres, double& gap,
                       double& obj) {
    Eigen::VectorXd rp = prog_.A * cand.x + cand.s - bvec;
    Eigen::VectorXd rd = prog_.A.transpose() * cand.y + prog_.c;
    const double ctx = prog_.c.dot(cand.x), bty = bvec.dot(cand.y);
    pres = rp.norm() / (1.0 + norm_b_unscaled);
    dres = rd.norm() / (1.0 + norm_c_unscaled);
    gap = std::abs(ctx + bty) / (1.0 + std::abs(ctx) + std::abs(bty));
    obj = ctx;
  };

  int it = 0;
  for (; it <= cfg.max_iterations; ++it) {
    // u = Pi(t): x free, y in K*, tau >= 0; v = u - t (Moreau complement)
    ux = tcur.head(n);
    uy = tcur.segment(n, m);
    project_cones_inplace(uy, prog_.cones, /*dual=*/true);
    utau = std::max(tcur(N - 1), 0.0);
    vy = uy - tcur.segment(n, m);
    vkappa = utau - tcur(N - 1);

    if (cfg.record_objective && it > 0) {
      const double tau_safe = std::max(utau, 1e-300);
      sol.objective_trace.push_back(sv.ch.dot(ux) / (sv.beta * sv.gamma * tau_safe));
    }

    const bool last = (it == cfg.max_iterations);
    if ((it > 0 && it % cfg.check_interval == 0) || last) {
      if (utau > 1e-12 * std::max(1.0, vkappa)) {
        Solution cand;
        unscale_into(cand, utau);
        double pres, dres, gap, obj;
        residuals(cand, pres, dres, gap, obj);
        if (cfg.iteration_log) {
          if (!log_header_written) {
            *cfg.iteration_log << "iteration, primal_res, dual_res, gap\n";
            log_header_written = true;
          }
          char line[128];
          std::snprintf(line, sizeof line, "%d, %.9e, %.9e, %.9e\n", it, pres, dres, gap);
          *cfg.iteration_log << line;
        }
        if ((pres <= cfg.eps_primal && dres <= cfg.eps_dual && gap <= cfg.eps_gap) || last) {
          sol.x = std::move(cand.x);
          sol.y = std::move(cand.y);
          sol.s = std::move(cand.s);
          sol.primal_residual = pres;
          sol.dual_residual = dres;
          sol.gap = gap;
          sol.objective = obj;
          sol.status = (pres <= cfg.eps_primal && dres <= cfg.eps_dual && gap <= cfg.eps_gap)
                           ? SolveStatus::Optimal
                           : SolveStatus::MaxIterations;
          sol.iterations = it;
          break;
        }
      } else {
        // tau collapsed: look for infeasibility certificates
        const double bty = sv.bh.dot(uy);
        if (bty < -1e-12) {
          Eigen::VectorXd ycert = uy / (-bty);
          if ((As_.transpose() * ycert).norm() <= cfg.eps_primal) {
            sol.y = drow_.cwiseProduct(ycert);  // scaled certificate direction
            sol.x = Eigen::VectorXd::Zero(n);
            sol.s = Eigen::VectorXd::Zero(m);
            sol.status = SolveStatus::PrimalInfeasible;
            sol.iterations = it;
            break;
          }
        }
        const double ctx = sv.ch.dot(ux);
        if (ctx < -1e-12) {
          Eigen::VectorXd xcert = ux / (-ctx);
          Eigen::VectorXd p = As_ * xcert;
          Eigen::VectorXd sfit = -p;
          project_cones_inplace(sfit, prog_.cones, /*dual=*/false);
          if ((p + sfit).norm() <= cfg.eps_dual) {
            sol.x = ecol_.cwiseProduct(xcert);
            sol.y = Eigen::VectorXd::Zero(m);
            sol.s = Eigen::VectorXd::Zero(m);
            sol.status = SolveStatus::DualInfeasible;
            sol.iterations = it;
            break;
          }
        }
        if (last) {
          const double tau_safe = std::max(utau, 1e-300);
          Solution cand;
          unscale_into(cand, tau_safe);
          double pres, dres, gap, obj;
          residuals(cand, pres, dres, gap, obj);
          sol.x = std::move(cand.x);
          sol.y = std::move(cand.y);
          sol.s = std::move(cand.s);
          sol.primal_residual = pres;
          sol.dual_residual = dres;
          sol.gap = gap;
          sol.objective = obj;
          sol.status = SolveStatus::MaxIterations;
          sol.iterations = it;
          break;
        }
      }
    }
    if (last) break;

    // w = u + v; utilde = (I + Q)^{-1} w via the reduced normal equations
    wx = ux;
    wy = uy + vy;
    const double wtau = utau + vkappa;
    px = ldlt_.solve(wx - As_.transpose() * wy);
    py = wy + As_ * px;
    const double ztau = (wtau + sv.ch.dot(px) + sv.bh.dot(py)) / denom_g;
    // t+ = alpha * utilde + (1 - alpha) * u - v   (v_x = 0, x free)
    tnext.head(n) = alpha * (px - gx * ztau) + (1.0 - alpha) * ux;
    tnext.segment(n, m) = alpha * (py - gy * ztau) + (1.0 - alpha) * uy - vy;
    tnext(N - 1) = alpha * ztau + (1.0 - alpha) * utau - vkappa;

    if (aamem == 0 || aa_dead) {
      tcur.swap(tnext);
      continue;
    }

    rvec = tnext - tcur;
    const double rnorm = rvec.norm();
    if (rnorm < 0.999 * best_rnorm) {
      best_rnorm = rnorm;
      last_improve_it = it;
      rejects_since_improve = 0;
    } else if (it - last_improve_it > stagnation_window) {
      aa_dead = true;
      if (last_was_aa) tcur = saved_plain; else tcur.swap(tnext);
      last_was_aa = false;
      continue;
    }
    if (last_was_aa && rnorm > cfg.aa_guard * r_ref) {
      // the accelerated point regressed: restore the plain step it replaced
      tcur = saved_plain;
      aacols = 0;
      aahead = 0;
      have_prev = false;
      last_was_aa = false;
      if (++rejects_since_improve > 25) aa_dead = true;
      continue;
    }
    if (have_prev) {
      const int slot = aahead;
      aaS.col(slot) = tcur - prev_t;
      aaY.col(slot) = rvec - prev_r;
      aacols = std::min(aacols + 1, aamem);
      aahead = (aahead + 1) % aamem;
      for (int j = 0; j < aacols; ++j) {
        const double g = aaY.col(slot).dot(aaY.col(j));
        aaG(slot, j) = g;
        aaG(j, slot) = g;
      }
    }
    prev_t = tcur;
    prev_r = rvec;
    have_prev = true;

    bool accepted = false;
    // On infeasible instances the iterates diverge along a ray with constant
    // fixed-point residual; extrapolating along affine combinations of ray
    // points can hold tau away from the collapse that produces certificates.
    // Acceleration is therefore suspended once tau is negligible against
    // kappa.
    const bool tau_alive = utau > 1e-9 * std::max(1.0, vkappa);
    if (aacols >= 1 && tau_alive) {
      Eigen::MatrixXd G = aaG.topLeftCorner(aacols, aacols);
      const double reg = 1e-10 * std::max(G.trace(), 1e-30);
      G.diagonal().array() += reg;
      Eigen::VectorXd rhs(aacols);
      for (int j = 0; j < aacols; ++j) rhs(j) = aaY.col(j).dot(rvec);
      Eigen::VectorXd gamma = G.ldlt().solve(rhs);
      if (gamma.allFinite()) {
        tcur += rvec;
        for (int j = 0; j < aacols; ++j)
          tcur.noalias() -= gamma(j) * (aaS.col(j) + aaY.col(j));
        // The map is positively homogeneous (solutions come in rays through
        // the origin), and the mixing weights leave the scale along the
        // iterate ray uncontrolled; left alone it can drift to the trivial
        // zero solution, where neither tolerances nor certificates can ever
        // fire.  Pin the scale to the plain step's.
        const double tnorm = tcur.norm();
        if (tnorm > 1e-300) {
          tcur *= tnext.norm() / tnorm;
          saved_plain = tnext;
          r_ref = rnorm;
          last_was_aa = true;
          accepted = true;
        } else {
          tcur = prev_t;  // degenerate mix; the plain fallback below applies
        }
      }
    }
    if (!accepted) {
      tcur.swap(tnext);
      last_was_aa = false;
    }
  }
  if (sol.iterations == 0) sol.iterations = it;

  sol.solve_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return sol;
}

Solution solve(const ConicProgram& prog, const SolverConfig& cfg, const Solution* warm) {
  PreparedSolver ps(prog, cfg.scaling, cfg.ruiz_iterations);
  return ps.solve(cfg, warm);
}

}  // namespace srwdoa
