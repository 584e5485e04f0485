// SPDX-License-Identifier: Apache-2.0
#include "srwdoa/anm.hpp"

#include <cmath>
#include <utility>
#include <vector>

namespace srwdoa {

namespace {

// Variable layout shared by assembly and extraction:
//   [W | Z | g]
// W: column-major lower triangle, diagonal first in each column; strictly
//    lower entries are (Re, Im) pairs when Hermitian, Re only when real.
// Z: column-major, (Re, Im) per entry.
// g: basis coefficients of the lag interpolant, one real dof per function.
//    The conjugate-symmetric lag stack [v_d^*, .., v_0, .., v_d] equals
//    Phi g, so by the parity phi_l(-tau) = (-1)^l phi_l(tau) the coefficient
//    g_l is real for even l and imaginary for odd l; dof l stores Re g_l or
//    Im g_l accordingly.  Every kernel entry is then the plain evaluation
//    Q_qp = sum_l phi_l(tau_qp) g_l, which keeps the constraint matrix free
//    of the interpolation matrix's inverse (whose conditioning grows with
//    the bandwidth product) and structurally Hermitian.
struct DofLayout {
  int J, Mt, d, per;
  int off_W = 0, off_Z = 0, off_g = 0, n = 0;
  std::vector<int> wcol;

  DofLayout(int J_, int Mt_, int d_, bool hermitian_W)
      : J(J_), Mt(Mt_), d(d_), per(hermitian_W ? 2 : 1), wcol(J_) {
    int pos = 0;
    for (int a = 0; a < J; ++a) {
      wcol[a] = pos;
      pos += 1 + per * (J - 1 - a);
    }
    off_W = 0;
    off_Z = pos;
    off_g = off_Z + 2 * Mt * J;
    n = off_g + 2 * d + 1;
  }

  int wdiag(int a) const { return off_W + wcol[a]; }
  int wre(int i, int j) const { return off_W + wcol[j] + 1 + per * (i - j - 1); }
  int wim(int i, int j) const { return wre(i, j) + 1; }  // Hermitian mode only
  int zre(int q, int j) const { return off_Z + 2 * (j * Mt + q); }
  int zim(int q, int j) const { return zre(q, j) + 1; }
  int gdof(int l) const { return off_g + l; }  // l = 0 .. 2d
};

using Coef = std::pair<int, double>;  // (dof, coefficient)

}  // namespace

Eigen::MatrixXcd compute_Q(const Eigen::VectorXcd& v, const PswfBasis& basis,
                           const VirtualGrid& grid) {
  const int d = basis.d;
  require(static_cast<int>(v.size()) == d + 1, "v must hold d+1 lags");
  require(std::abs(v(0).imag()) <= 1e-10 * (1.0 + std::abs(v(0))),
          "zero lag must be real");
  const int Mt = grid.size();
  Eigen::VectorXcd stack(2 * d + 1);
  for (int l = 0; l < 2 * d + 1; ++l)
    stack(l) = l < d ? std::conj(v(d - l)) : v(l - d);
  Eigen::MatrixXcd Q(Mt, Mt);
  for (int q = 0; q < Mt; ++q)
    for (int p = 0; p < Mt; ++p) {
      const Eigen::VectorXd w =
          basis.Phi_lu.solve(kernel_vector(basis, grid.r, q, p));
      Q(q, p) = (w.cast<cxd>().array() * stack.array()).sum();
    }
  require((Q - Q.adjoint()).norm() <= 1e-8 * (1.0 + Q.norm()),
          "kernel interpolation lost Hermitian symmetry");
  return Q;
}

Eigen::MatrixXcd build_T(const Eigen::VectorXcd& v) {
  const int n = static_cast<int>(v.size());
  require(n >= 1, "empty first column");
  require(std::abs(v(0).imag()) <= 1e-10 * (1.0 + std::abs(v(0))),
          "zero lag must be real");
  Eigen::MatrixXcd T(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) T(i, j) = i >= j ? v(i - j) : std::conj(v(j - i));
  return T;
}

Eigen::MatrixXcd psi_of_T(const Eigen::MatrixXcd& T, double c, int d) {
  require(d >= 1, "band transform needs d >= 1");
  require(T.rows() == d + 1 && T.cols() == d + 1, "T side must be d+1");
  require(c / (2.0 * d) < kPi / 2 - 1e-9, "band edge reaches the tangent pole");
  const double t2 = std::pow(std::tan(c / (2.0 * d)), 2);
  const auto blk = [&](int ri, int ci) { return T.block(ri, ci, d, d); };
  const Eigen::MatrixXcd sum = blk(0, 0) + blk(1, 1);
  const Eigen::MatrixXcd cross = blk(1, 0) + blk(0, 1);
  return t2 * (sum + cross) - (sum - cross);
}

AnmProblem::AnmProblem(VirtualGrid grid, PswfBasis basis, int n_sensors, int n_bins,
                       bool equality_data, const AnmOptions& opt)
    : grid_(std::move(grid)),
      basis_(std::move(basis)),
      M_(n_sensors),
      J_(n_bins),
      Mt_(grid_.size()),
      d_(basis_.d),
      equality_(equality_data),
      opt_(opt) {
  require(M_ >= 1 && J_ >= 1, "need at least one sensor and one bin");
  require(grid_.index_map.rows() == M_ && grid_.index_map.cols() == J_,
          "virtual grid shape does not match (sensors, bins)");
  assemble_program();
}

void AnmProblem::assemble_program() {
  const int J = J_, Mt = Mt_, d = d_, M = M_;
  const DofLayout lay(J, Mt, d, opt_.hermitian_W);
  off_W_ = lay.off_W;
  off_Z_ = lay.off_Z;
  off_v_ = lay.off_g;
  n_ = lay.n;

  const int data_rows = 2 * M * J;
  const int N = J + Mt;  // complex side of the block matrix [[W, Z^H], [Z, Q]]
  const int side_big = 2 * N;
  const int side_psi = 2 * d;
  soc_row_ = 0;
  const int data_start = equality_ ? 0 : 1;  // SOC spends row 0 on the radius
  const int off_big = data_rows + data_start;
  const int off_psi = off_big + side_big * (side_big + 1) / 2;
  const int m_total = off_psi + side_psi * (side_psi + 1) / 2;

  std::vector<Cone> cones;
  if (equality_)
    cones.push_back({Cone::Zero, data_rows, false});
  else
    cones.push_back({Cone::Soc, data_rows + 1, false});
  cones.push_back({Cone::Psd, side_big, true});
  cones.push_back({Cone::Psd, side_psi, true});

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(data_rows) +
                4 * static_cast<size_t>(Mt) * (Mt + 1) / 2 * (2 * d + 1) +
                8 * static_cast<size_t>(N + d * (2 * d + 1)));

  // Data-fit rows: s = [sigma;] vec_real(X) - vec_real(chi(Z)).
  for (int j = 0; j < J; ++j)
    for (int m = 0; m < M; ++m) {
      const int r = data_start + 2 * (j * M + m);
      const int q = grid_.index_map(m, j);
      trips.emplace_back(r, lay.zre(q, j), 1.0);
      trips.emplace_back(r + 1, lay.zim(q, j), 1.0);
    }

  // One complex lower-triangle entry of a Hermitian block, emitted into the
  // four svec slots of its real embedding.  s = -Ax on these rows (b = 0), so
  // coefficients enter negated.
  const auto emit_entry = [&](int blk_off, int half, int i, int j,
                              const std::vector<Coef>& re_coefs,
                              const std::vector<Coef>& im_coefs) {
    const int side2 = 2 * half;
    const double wr = (i == j) ? 1.0 : M_SQRT2;
    const int r_re1 = blk_off + svec_index(i, j, side2);
    const int r_re2 = blk_off + svec_index(i + half, j + half, side2);
    for (const auto& [dof, cf] : re_coefs) {
      if (cf == 0.0) continue;
      trips.emplace_back(r_re1, dof, -wr * cf);
      trips.emplace_back(r_re2, dof, -wr * cf);
    }
    if (i == j) return;  // diagonal of a Hermitian block carries no imaginary part
    const int r_im1 = blk_off + svec_index(i + half, j, side2);   // +Im G_ij
    const int r_im2 = blk_off + svec_index(j + half, i, side2);   // -Im G_ij
    for (const auto& [dof, cf] : im_coefs) {
      if (cf == 0.0) continue;
      trips.emplace_back(r_im1, dof, -M_SQRT2 * cf);
      trips.emplace_back(r_im2, dof, M_SQRT2 * cf);
    }
  };

  // W occupies rows/cols 0 .. J-1 of the block matrix.
  for (int a = 0; a < J; ++a) {
    emit_entry(off_big, N, a, a, {{lay.wdiag(a), 1.0}}, {});
    for (int i = a + 1; i < J; ++i) {
      std::vector<Coef> im;
      if (opt_.hermitian_W) im.push_back({lay.wim(i, a), 1.0});
      emit_entry(off_big, N, i, a, {{lay.wre(i, a), 1.0}}, im);
    }
  }
  // Z occupies the lower-left block: G(J+q, b) = Z(q, b).
  for (int b = 0; b < J; ++b)
    for (int q = 0; q < Mt; ++q)
      emit_entry(off_big, N, J + q, b, {{lay.zre(q, b), 1.0}},
                 {{lay.zim(q, b), 1.0}});
  // Q occupies the lower-right block, linear in the g dofs:
  //   Re Q_qp = sum_{l even} phi_l(tau_qp) g_l,
  //   Im Q_qp = sum_{l odd}  phi_l(tau_qp) g_l.
  Eigen::VectorXd h00;
  for (int p = 0; p < Mt; ++p)
    for (int q = p; q < Mt; ++q) {
      const Eigen::VectorXd h = kernel_vector(basis_, grid_.r, q, p);
      if (q == 0 && p == 0) h00 = h;
      std::vector<Coef> re, im;
      re.reserve(d + 1);
      im.reserve(d);
      for (int l = 0; l <= 2 * d; ++l)
        (l % 2 == 0 ? re : im).push_back({lay.gdof(l), h(l)});
      emit_entry(off_big, N, J + q, J + p, re, im);
    }

  // Band LMI block.  Psi_ab collects four shifted Toeplitz samples; expand
  // each onto the lags, then map each lag onto the g dofs through the basis
  // values at the uniform nodes, v_k = sum_l phi_l(k/d) g_l.
  require(basis_.c / (2.0 * d) < kPi / 2 - 1e-9,
          "band edge reaches the tangent pole");
  Eigen::MatrixXd phi_lag(d + 1, 2 * d + 1);  // phi_lag(k, l) = phi_l(k/d)
  for (int k = 0; k <= d; ++k)
    phi_lag.row(k) = basis_.evaluate_one(static_cast<double>(k) / d).transpose();
  const double t2 = std::pow(std::tan(basis_.c / (2.0 * d)), 2);
  for (int b = 0; b < d; ++b)
    for (int a = b; a < d; ++a) {
      Eigen::VectorXd re_acc = Eigen::VectorXd::Zero(d + 1);
      Eigen::VectorXd im_acc = Eigen::VectorXd::Zero(d + 1);
      const auto add_lag = [&](int i, int j, double mult) {
        const int k = i - j;
        re_acc(std::abs(k)) += mult;
        if (k > 0) im_acc(k) += mult;
        if (k < 0) im_acc(-k) -= mult;
      };
      add_lag(a, b, t2 - 1.0);
      add_lag(a + 1, b + 1, t2 - 1.0);
      add_lag(a + 1, b, t2 + 1.0);
      add_lag(a, b + 1, t2 + 1.0);
      std::vector<Coef> re, im;
      for (int l = 0; l <= 2 * d; ++l) {
        double cf = 0.0;
        if (l % 2 == 0) {
          for (int k = 0; k <= d; ++k) cf += re_acc(k) * phi_lag(k, l);
          re.push_back({lay.gdof(l), cf});
        } else {
          for (int k = 1; k <= d; ++k) cf += im_acc(k) * phi_lag(k, l);
          im.push_back({lay.gdof(l), cf});
        }
      }
      emit_entry(off_psi, d, a, b, re, im);
    }

  // Objective: (trace W + Q_00) / 2, with Q_00 expanded onto the g dofs.
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n_);
  for (int a = 0; a < J; ++a) c(lay.wdiag(a)) = 0.5;
  for (int l = 0; l <= 2 * d; l += 2) c(lay.gdof(l)) += 0.5 * h00(l);

  ConicProgram prog;
  prog.c = std::move(c);
  prog.b = Eigen::VectorXd::Zero(m_total);
  prog.A.resize(m_total, n_);
  prog.A.setFromTriplets(trips.begin(), trips.end());
  prog.A.makeCompressed();
  prog.cones = std::move(cones);
  prog.validate();
  b_template_ = prog.b;
  solver_ = std::make_unique<PreparedSolver>(std::move(prog));
}

AnmResult AnmProblem::solve(const Eigen::MatrixXcd& X, double sigma,
                            const SolverConfig& cfg, const Solution* warm) const {
  require(X.rows() == M_ && X.cols() == J_, "snapshot shape mismatch");
  require(sigma >= 0.0, "sigma must be nonnegative");
  require(!(equality_ && sigma != 0.0),
          "equality-mode problem cannot absorb sigma > 0");

  Eigen::VectorXd b = b_template_;
  int r = soc_row_;
  if (!equality_) b(r++) = sigma;
  for (int j = 0; j < J_; ++j)
    for (int m = 0; m < M_; ++m) {
      b(r++) = X(m, j).real();
      b(r++) = X(m, j).imag();
    }

  Solution sol = solver_->solve_with_b(b, cfg, warm);

  const DofLayout lay(J_, Mt_, d_, opt_.hermitian_W);
  AnmResult res;
  const Eigen::VectorXd& x = sol.x;
  res.W.resize(J_, J_);
  for (int a = 0; a < J_; ++a) {
    res.W(a, a) = x(lay.wdiag(a));
    for (int i = a + 1; i < J_; ++i) {
      const cxd wij(x(lay.wre(i, a)), opt_.hermitian_W ? x(lay.wim(i, a)) : 0.0);
      res.W(i, a) = wij;
      res.W(a, i) = std::conj(wij);
    }
  }
  res.Z.resize(Mt_, J_);
  for (int j = 0; j < J_; ++j)
    for (int q = 0; q < Mt_; ++q)
      res.Z(q, j) = cxd(x(lay.zre(q, j)), x(lay.zim(q, j)));
  res.v.resize(d_ + 1);
  for (int k = 0; k <= d_; ++k) {
    const Eigen::VectorXd phik = basis_.evaluate_one(static_cast<double>(k) / d_);
    double re = 0.0, im = 0.0;
    for (int l = 0; l <= 2 * d_; ++l)
      (l % 2 == 0 ? re : im) += phik(l) * x(lay.gdof(l));
    res.v(k) = cxd(re, k == 0 ? 0.0 : im);  // zero lag is real by parity
  }
  res.T = build_T(res.v);
  res.objective = sol.objective;
  res.diagnostics = std::move(sol);
  return res;
}

AnmResult solve_anm(const Eigen::MatrixXcd& X, const VirtualGrid& grid,
                    const PswfBasis& basis, double sigma, const SolverConfig& cfg,
                    const AnmOptions& opt) {
  AnmProblem prob(grid, basis, grid.sensors(), grid.bins(), sigma == 0.0, opt);
  return prob.solve(X, sigma, cfg);
}

double atomic_norm_upper_check(double f, double beta, const Eigen::VectorXcd& cvec,
                               const VirtualGrid& grid, const PswfBasis& basis,
                               const SolverConfig& cfg) {
  require(std::abs(f) <= 0.5, "|f| must not exceed 1/2");
  require(std::abs(cvec.norm() - 1.0) <= 1e-9, "cvec must have unit norm");
  require(static_cast<int>(cvec.size()) == grid.bins(), "cvec length != bins");
  const Eigen::VectorXcd a = general_steering(grid, f);
  const Eigen::MatrixXcd Zatom = beta * a * cvec.transpose();
  const Eigen::MatrixXcd X = chi_apply(grid, Zatom);
  AnmProblem prob(grid, basis, grid.sensors(), grid.bins(), /*equality_data=*/true);
  return prob.solve(X, 0.0, cfg).objective;
}

}  // namespace srwdoa
