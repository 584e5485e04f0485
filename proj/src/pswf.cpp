// SPDX-License-Identifier: Apache-2.0
#include "srwdoa/pswf.hpp"

#include <cmath>
#include <vector>

namespace srwdoa {

namespace {

using ld = long double;
using VectorXld = Eigen::Matrix<ld, Eigen::Dynamic, 1>;
using MatrixXld = Eigen::Matrix<ld, Eigen::Dynamic, Eigen::Dynamic>;

// Spherical Bessel j_0..j_kmax at x >= 0 via Miller's backward recurrence
// (stable for k > x, where upward recursion blows up).
VectorXld spherical_bessel(int kmax, ld x) {
  VectorXld j(kmax + 1);
  if (x < 1e-30L) {
    j.setZero();
    j(0) = 1.0L;
    return j;
  }
  const int start = kmax + 20 + static_cast<int>(x);
  ld jp = 0.0L, jc = 1e-300L;
  std::vector<ld> tmp(static_cast<size_t>(start) + 1);
  for (int k = start; k >= 1; --k) {
    ld jm = (2 * k + 1) / x * jc - jp;
    jp = jc;
    jc = jm;
    if (k - 1 <= kmax) tmp[static_cast<size_t>(k - 1)] = jc;
    if (std::abs(jc) > 1e250L) {  // renormalize to avoid overflow
      ld scale = 1e-250L;
      jc *= scale;
      jp *= scale;
      for (int i = k - 1; i <= kmax; ++i)
        if (i >= 0) tmp[static_cast<size_t>(i)] *= scale;
    }
  }
  const ld j0 = std::sin(x) / x;
  const ld scale = j0 / tmp[0];
  for (int k = 0; k <= kmax; ++k) j(k) = tmp[static_cast<size_t>(k)] * scale;
  return j;
}

// Normalized Legendre P~_k(t) = sqrt((2k+1)/2) P_k(t), k = 0..kmax, one point.
VectorXld legendre_normalized(int kmax, ld t) {
  VectorXld p(kmax + 1);
  ld pm = 1.0L, pc = t;
  p(0) = pm;
  if (kmax >= 1) p(1) = pc;
  for (int k = 1; k < kmax; ++k) {
    ld pn = ((2 * k + 1) * t * pc - k * pm) / (k + 1);
    pm = pc;
    pc = pn;
    p(k + 1) = pc;
  }
  for (int k = 0; k <= kmax; ++k) p(k) *= std::sqrt((2.0L * k + 1.0L) / 2.0L);
  return p;
}

// Eigenvectors of the commuting differential operator restricted to one
// parity chain, expressed in the normalized Legendre basis.
// Matrix elements (normalized basis, indices k = parity, parity+2, ...):
//   A_kk     = k(k+1) + c^2 (2k(k+1) - 1) / ((2k-1)(2k+3))
//   A_k,k+2  = c^2 (k+1)(k+2) / ((2k+3) sqrt((2k+1)(2k+5)))
struct ParityChain {
  VectorXld eigvals;   // ascending
  MatrixXld eigvecs;   // columns, in chain-local coordinates
  std::vector<int> ks; // Legendre degree of each chain row
};

ParityChain solve_parity(int parity, int nleg, ld c) {
  std::vector<int> ks;
  for (int k = parity; k < nleg; k += 2) ks.push_back(k);
  const int n = static_cast<int>(ks.size());
  VectorXld diag(n), off(n - 1);
  for (int i = 0; i < n; ++i) {
    const ld k = ks[static_cast<size_t>(i)];
    diag(i) = k * (k + 1) + c * c * (2 * k * (k + 1) - 1) / ((2 * k - 1) * (2 * k + 3));
  }
  for (int i = 0; i + 1 < n; ++i) {
    const ld k = ks[static_cast<size_t>(i)];
    off(i) = c * c * (k + 1) * (k + 2) /
             ((2 * k + 3) * std::sqrt((2 * k + 1) * (2 * k + 5)));
  }
  Eigen::SelfAdjointEigenSolver<MatrixXld> es;
  es.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
  require(es.info() == Eigen::Success, "prolate operator eigensolve failed");
  return ParityChain{es.eigenvalues(), es.eigenvectors(), std::move(ks)};
}

}  // namespace

Eigen::MatrixXd PswfBasis::evaluate(const Eigen::VectorXd& taus) const {
  const int npts = static_cast<int>(taus.size());
  const int kmax = static_cast<int>(beta.rows()) - 1;
  Eigen::MatrixXd out(npts, n_funcs());
  for (int i = 0; i < npts; ++i) {
    require(std::abs(taus(i)) <= 1.0 + 1e-12, "phi evaluation outside [-1, 1]");
    const VectorXld p = legendre_normalized(kmax, static_cast<ld>(taus(i)));
    for (int l = 0; l < n_funcs(); ++l) {
      ld acc = 0.0L, comp = 0.0L;  // compensated summation
      for (int k = 0; k <= kmax; ++k) {
        const ld term = static_cast<ld>(beta(k, l)) * p(k);
        const ld y = term - comp;
        const ld t = acc + y;
        comp = (t - acc) - y;
        acc = t;
      }
      out(i, l) = static_cast<double>(acc);
    }
  }
  return out;
}

Eigen::VectorXd PswfBasis::evaluate_one(double tau) const {
  Eigen::VectorXd t(1);
  t(0) = tau;
  return evaluate(t).row(0);
}

PswfBasis compute_basis(double c, double eps, const compute_basis_options& opt) {
  require(c > 0.0, "bandwidth parameter must be positive");
  require(eps > 0.0 && eps < 1.0, "precision threshold must lie in (0, 1)");

  const ld lc = static_cast<ld>(c);
  const int nleg = std::max(120, static_cast<int>(2.0 * c) + 80);
  const ParityChain even = solve_parity(0, nleg, lc);
  const ParityChain odd = solve_parity(1, nleg, lc);

  const int lmax_avail = static_cast<int>(even.ks.size() + odd.ks.size()) - 4;

  // Full Legendre coefficient table, column l (interleaving parity chains:
  // the commuting operator's ascending eigenvalues give the natural order).
  MatrixXld beta_all = MatrixXld::Zero(nleg, lmax_avail);
  for (int l = 0; l < lmax_avail; ++l) {
    const ParityChain& ch = (l % 2 == 0) ? even : odd;
    const int col = l / 2;
    for (size_t i = 0; i < ch.ks.size(); ++i)
      beta_all(ch.ks[i], l) = ch.eigvecs(static_cast<long>(i), col);
  }

  // Eigenvalues from the integral relation
  //   lambda_l phi_l(t0) = sum_k beta_kl 2 i^k sqrt((2k+1)/2) j_k(c t0),
  // evaluated where |phi_l| is largest (t0 = 1 underflows for small l at
  // large c, which would poison the quotient).
  const int ngrid = 33;
  MatrixXld grid_vals(ngrid, lmax_avail);
  std::vector<VectorXld> leg_at(static_cast<size_t>(ngrid));
  for (int i = 0; i < ngrid; ++i) {
    const ld t = static_cast<ld>(i) / (ngrid - 1);
    leg_at[static_cast<size_t>(i)] = legendre_normalized(nleg - 1, t);
    grid_vals.row(i) = (leg_at[static_cast<size_t>(i)].transpose() * beta_all);
  }
  std::vector<VectorXld> bessel_at(static_cast<size_t>(ngrid));
  Eigen::VectorXcd lam_all(lmax_avail);
  for (int l = 0; l < lmax_avail; ++l) {
    int best = 0;
    for (int i = 1; i < ngrid; ++i)
      if (std::abs(grid_vals(i, l)) > std::abs(grid_vals(best, l))) best = i;
    const ld t0 = static_cast<ld>(best) / (ngrid - 1);
    if (bessel_at[static_cast<size_t>(best)].size() == 0)
      bessel_at[static_cast<size_t>(best)] = spherical_bessel(nleg - 1, lc * t0);
    const VectorXld& jk = bessel_at[static_cast<size_t>(best)];
    // i^k cycle: sum real (k % 4 in {0, 2}) and imaginary (1, 3) parts
    ld acc_re = 0.0L, comp_re = 0.0L, acc_im = 0.0L, comp_im = 0.0L;
    for (int k = 0; k < nleg; ++k) {
      const ld base = beta_all(k, l) * 2.0L *
                      std::sqrt((2.0L * k + 1.0L) / 2.0L) * jk(k);
      const int ph = k % 4;
      const ld term_re = (ph == 0) ? base : (ph == 2 ? -base : 0.0L);
      const ld term_im = (ph == 1) ? base : (ph == 3 ? -base : 0.0L);
      ld y = term_re - comp_re, t = acc_re + y;
      comp_re = (t - acc_re) - y;
      acc_re = t;
      y = term_im - comp_im;
      t = acc_im + y;
      comp_im = (t - acc_im) - y;
      acc_im = t;
    }
    const ld denom = grid_vals(best, l);
    lam_all(l) = cxd(static_cast<double>(acc_re / denom),
                     static_cast<double>(acc_im / denom));
  }

  // Truncation order: the first l with |lambda_l| < eps sets d = ceil(l/2),
  // floored by the anti-aliasing requirement d >= ceil(c/pi) (and d >= 1).
  int lstar = -1;
  for (int l = 0; l < lmax_avail; ++l)
    if (std::abs(lam_all(l)) < eps) {
      lstar = l;
      break;
    }
  require(lstar >= 0, "eigenvalue decay not reached; enlarge the basis cap");
  const int d_eps = (lstar + 1) / 2;
  const int d = std::max({d_eps, static_cast<int>(std::ceil(c / kPi)), 1});
  require(2 * d + 1 <= opt.max_funcs, "basis size exceeds the configured cap");
  require(2 * d + 1 <= lmax_avail, "internal basis table too small");

  PswfBasis basis;
  basis.c = c;
  basis.eps = eps;
  basis.d = d;
  basis.lambda = lam_all.head(2 * d + 1);
  basis.beta.resize(nleg, 2 * d + 1);
  for (int l = 0; l < 2 * d + 1; ++l)
    for (int k = 0; k < nleg; ++k) basis.beta(k, l) = static_cast<double>(beta_all(k, l));

  // Uniform-grid sample matrix and its factorization (of Phi^T, for weights).
  Eigen::VectorXd taus(2 * d + 1);
  for (int q = 0; q <= 2 * d; ++q) taus(q) = basis.tau_grid(q);
  basis.Phi = basis.evaluate(taus);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(basis.Phi);
  basis.phi_condition =
      svd.singularValues()(0) / svd.singularValues()(svd.singularValues().size() - 1);
  require(basis.phi_condition < opt.max_condition,
          "interpolation matrix ill-conditioned; relax eps or reduce d");
  basis.Phi_lu = Eigen::PartialPivLU<Eigen::MatrixXd>(basis.Phi.transpose());
  return basis;
}

Eigen::VectorXd kernel_vector(const PswfBasis& basis, const Eigen::VectorXd& grid_r,
                              int q, int p) {
  const int Mt = static_cast<int>(grid_r.size());
  require(q >= 0 && q < Mt && p >= 0 && p < Mt, "kernel_vector index out of range");
  const double tau = (grid_r(q) - grid_r(p)) / grid_r(Mt - 1);
  return basis.evaluate_one(tau);
}

}  // namespace srwdoa
