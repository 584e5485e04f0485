// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>

#include "srwdoa/conic.hpp"
#include "srwdoa/pswf.hpp"
#include "srwdoa/steering.hpp"

namespace srwdoa {

// The SDP behind the gridless wideband estimator:
//   minimize   (trace(W) + Q_{11}) / 2
//   subject to [[W, Z^H], [Z, Q]] >= 0,
//              ||X - chi(Z)||_F <= sigma,
//              Q_{qp} = h_qp' Phi^{-1} [v_d^*, .., v_1^*, v_0, v_1, .., v_d]',
//              Psi(T) >= 0 with T = toep([v_0 .. v_d]).
// Variables: W (J x J Hermitian), Z (Mt x J complex), v (v_0 real, v_1..v_d
// complex).  Everything is realified before it reaches the conic solver.

// Dense Q from the interpolation weights (reference path; the assembled
// program encodes the same linear map in sparse triplet form).
Eigen::MatrixXcd compute_Q(const Eigen::VectorXcd& v, const PswfBasis& basis,
                           const VirtualGrid& grid);

// Hermitian Toeplitz from first column [v_0, v_1, .., v_d]:
// T(i, j) = v_{i-j} for i >= j.
Eigen::MatrixXcd build_T(const Eigen::VectorXcd& v);

// Band LMI: Psi(T) = tan^2(c/2d) (J1+J2) T (J1+J2)^H - (J1-J2) T (J1-J2)^H,
// J1 = [I_d, 0], J2 = [0, I_d].  PSD iff T's spectral content stays inside
// the band |omega| <= c/d.
Eigen::MatrixXcd psi_of_T(const Eigen::MatrixXcd& T, double c, int d);

struct AnmOptions {
  bool hermitian_W = true;   // false: restrict W to real symmetric
  double dedup_tol = -1.0;   // virtual grid merge tolerance (< 0: default)
};

struct AnmResult {
  Eigen::MatrixXcd W;   // J x J
  Eigen::MatrixXcd Z;   // Mt x J
  Eigen::VectorXcd v;   // d+1 entries, v(0) real
  Eigen::MatrixXcd T;   // (d+1) x (d+1)
  double objective = 0.0;
  Solution diagnostics;
};

// Assembled problem with cached solver state; resolve with new (X, sigma)
// without re-equilibrating or re-factorizing.
class AnmProblem {
 public:
  AnmProblem(VirtualGrid grid, PswfBasis basis, int n_sensors, int n_bins,
             bool equality_data, const AnmOptions& opt = {});

  AnmResult solve(const Eigen::MatrixXcd& X, double sigma, const SolverConfig& cfg,
                  const Solution* warm = nullptr) const;

  const VirtualGrid& grid() const { return grid_; }
  const PswfBasis& basis() const { return basis_; }
  const ConicProgram& program() const { return solver_->program(); }
  bool equality_data() const { return equality_; }

 private:
  VirtualGrid grid_;
  PswfBasis basis_;
  int M_, J_, Mt_, d_;
  bool equality_;
  AnmOptions opt_;
  std::unique_ptr<PreparedSolver> solver_;
  // dof layout offsets
  int off_W_ = 0, off_Z_ = 0, off_v_ = 0, n_ = 0;
  int soc_row_ = -1;  // start of the data-fit rows
  mutable Eigen::VectorXd b_template_;

  void assemble_program();
  friend struct AnmIntrospect;
};

// Convenience: assemble + solve in one go.
AnmResult solve_anm(const Eigen::MatrixXcd& X, const VirtualGrid& grid,
                    const PswfBasis& basis, double sigma, const SolverConfig& cfg,
                    const AnmOptions& opt = {});

// Atomic-norm sanity probe: builds the noiseless data of a single atom
// beta * a(f) cvec^T (||cvec|| = 1), solves with sigma = 0, and returns the
// objective, which should approximate beta up to the basis truncation slack.
double atomic_norm_upper_check(double f, double beta, const Eigen::VectorXcd& cvec,
                               const VirtualGrid& grid, const PswfBasis& basis,
                               const SolverConfig& cfg);

}  // namespace srwdoa
