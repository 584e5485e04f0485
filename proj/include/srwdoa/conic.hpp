// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <vector>

#include <Eigen/Sparse>

#include "srwdoa/common.hpp"

namespace srwdoa {

// Cone taxonomy for the operator-splitting solver.
//   Zero:  {0}^dim                       (equality rows; dual is free)
//   Soc:   {(t, x): ||x||_2 <= t}, dim = 1 + len(x)
//   Psd:   real symmetric PSD, side n, packed dim n(n+1)/2 (svec, column-major
//          lower triangle, off-diagonals scaled by sqrt(2))
// complex_pair marks a Psd block that is the 2x2 real embedding of a Hermitian
// matrix (side must be even); projection then runs on the complex half, which
// is cheaper and keeps the embedding structure exact.
struct Cone {
  enum Type { Zero, Soc, Psd } type = Zero;
  int dim = 0;   // Zero/Soc: packed length; Psd: side of the matrix
  bool complex_pair = false;

  int rows() const { return type == Psd ? dim * (dim + 1) / 2 : dim; }
};

int cone_rows(const std::vector<Cone>& cones);

// min c'x  s.t.  Ax + s = b,  s in K  (K = product of cones, in order)
struct ConicProgram {
  Eigen::VectorXd c;
  Eigen::VectorXd b;
  Eigen::SparseMatrix<double> A;  // m x n, m = cone_rows(cones)
  std::vector<Cone> cones;

  int vars() const { return static_cast<int>(c.size()); }
  int constraints() const { return static_cast<int>(b.size()); }
  void validate() const;
};

struct SolverConfig {
  int max_iterations = 50000;
  double eps_primal = 1e-6;
  double eps_dual = 1e-6;
  double eps_gap = 1e-6;
  double alpha = 1.5;        // over-relaxation
  bool scaling = true;       // Ruiz equilibration
  int ruiz_iterations = 15;
  int check_interval = 25;
  bool record_objective = false;  // keep per-iteration primal objective trace
  bool warm_start = false;        // start from the supplied previous solution
  std::ostream* iteration_log = nullptr;  // CSV: iteration, primal_res, dual_res, gap
  // Anderson acceleration of the fixed-point iteration (type-II, safeguarded:
  // an accelerated step is rolled back unless it shrinks the fixed-point
  // residual below aa_guard times the step it replaced; accepted steps are
  // rescaled back to the plain step's norm because the embedding is
  // positively homogeneous and extrapolation would otherwise drift the
  // iterate scale).  0 memory disables.
  int aa_memory = 10;
  double aa_guard = 0.9999;
};

enum class SolveStatus {
  Optimal,
  MaxIterations,     // best iterate returned, tolerances not met
  PrimalInfeasible,  // certificate in y
  DualInfeasible,    // certificate in x (primal unbounded)
};

const char* to_string(SolveStatus s);

struct Solution {
  Eigen::VectorXd x, y, s;
  SolveStatus status = SolveStatus::MaxIterations;
  int iterations = 0;
  double primal_residual = 0.0;  // ||Ax + s - b|| / (1 + ||b||)
  double dual_residual = 0.0;    // ||A'y + c|| / (1 + ||c||)
  double gap = 0.0;              // |c'x + b'y| / (1 + |c'x| + |b'y|)
  double objective = 0.0;        // c'x
  double solve_seconds = 0.0;
  std::vector<double> objective_trace;
};

// --- projections (exposed for property tests) ---

// Euclidean projection onto the PSD cone: clamp negative eigenvalues.
Eigen::MatrixXd project_psd(const Eigen::MatrixXd& S);

// Projection onto the second-order cone; block = (t, x).
void project_soc_inplace(Eigen::Ref<Eigen::VectorXd> block);

// Project s onto K (dual=false) or K* (dual=true), block by block.
void project_cones_inplace(Eigen::VectorXd& s, const std::vector<Cone>& cones,
                           bool dual);

// svec/smat with the sqrt(2) off-diagonal convention (isometry).
Eigen::VectorXd svec(const Eigen::MatrixXd& S);
Eigen::MatrixXd smat(const Eigen::VectorXd& v, int side);
inline int svec_index(int row, int col, int side) {
  // column-major lower triangle, row >= col
  return col * side - col * (col - 1) / 2 + (row - col);
}

// [[Re, -Im], [Im, Re]] embedding of a Hermitian matrix; eigenvalues doubled.
Eigen::MatrixXd realify(const Eigen::MatrixXcd& H);

// One-shot solve.
Solution solve(const ConicProgram& prog, const SolverConfig& cfg,
               const Solution* warm = nullptr);

// Factorization/scaling cache for families of programs that share (A, cones)
// and differ only in b (and possibly c): Monte Carlo resolves reuse the
// equilibration and the sparse LDLT.
class PreparedSolver {
 public:
  explicit PreparedSolver(ConicProgram prog, bool scaling = true,
                          int ruiz_iterations = 15);

  // Replace the right-hand side (same sparsity/cones).
  void set_b(const Eigen::VectorXd& b);
  const ConicProgram& program() const { return prog_; }

  Solution solve(const SolverConfig& cfg, const Solution* warm = nullptr) const;
  // Same, with a per-call right-hand side (does not touch stored state).
  Solution solve_with_b(const Eigen::VectorXd& b, const SolverConfig& cfg,
                        const Solution* warm = nullptr) const;

 private:
  ConicProgram prog_;                 // unscaled
  bool scaling_ = true;
  int ruiz_iterations_ = 15;
  Eigen::SparseMatrix<double> As_;    // D A E
  Eigen::VectorXd drow_, ecol_;       // equilibration diagonals
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;  // I + As'As
  void prepare();
};

}  // namespace srwdoa
