// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "srwdoa/conic.hpp"
#include "srwdoa/oracles.hpp"

using namespace srwdoa;

namespace {

Eigen::SparseMatrix<double> sparse_from(const Eigen::MatrixXd& D) {
  return D.sparseView();
}

// Independent residual check on returned iterates (no solver internals).
void check_certified_optimum(const ConicProgram& prog, const Solution& sol,
                             double eps) {
  REQUIRE(sol.status == SolveStatus::Optimal);
  const double pres = (prog.A * sol.x + sol.s - prog.b).norm() / (1.0 + prog.b.norm());
  const double dres =
      (prog.A.transpose() * sol.y + prog.c).norm() / (1.0 + prog.c.norm());
  const double ctx = prog.c.dot(sol.x), bty = prog.b.dot(sol.y);
  const double gap = std::abs(ctx + bty) / (1.0 + std::abs(ctx) + std::abs(bty));
  CHECK(pres <= eps * 1.01);
  CHECK(dres <= eps * 1.01);
  CHECK(gap <= eps * 1.01);
}

}  // namespace

TEST_CASE("psd projection examples") {
  Eigen::MatrixXd D = Eigen::Vector2d(1.0, -1.0).asDiagonal();
  const Eigen::MatrixXd P = project_psd(D);
  CHECK(std::abs(P(0, 0) - 1.0) < 1e-14);
  CHECK(std::abs(P(1, 1)) < 1e-14);
  CHECK(std::abs(P(0, 1)) < 1e-14);

  // PSD input is untouched
  Eigen::MatrixXd S(2, 2);
  S << 2.0, 0.3, 0.3, 1.0;
  CHECK((project_psd(S) - S).cwiseAbs().maxCoeff() < 1e-13);

  // negative definite input projects to zero
  const Eigen::MatrixXd Z = project_psd(-Eigen::MatrixXd::Identity(4, 4));
  CHECK(Z.cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("soc projection examples") {
  // interior points are fixed
  Eigen::VectorXd b(3);
  b << 10.0, 3.0, 4.0;  // t = 10, ||x|| = 5
  Eigen::VectorXd p = b;
  project_soc_inplace(p);
  CHECK((p - b).norm() < 1e-14);

  // polar-cone interior maps to the origin
  b << -10.0, 3.0, 4.0;
  p = b;
  project_soc_inplace(p);
  CHECK(p.norm() < 1e-14);

  // boundary formula
  b << 0.0, 3.0, 4.0;
  p = b;
  project_soc_inplace(p);
  CHECK(p(0) == doctest::Approx(2.5));
  CHECK(p(1) == doctest::Approx(1.5));
  CHECK(p(2) == doctest::Approx(2.0));
}

TEST_CASE("projections are idempotent and non-expansive") {
  Rng rng(321);
  for (int t = 0; t < 1000; ++t) {
    if (t % 2 == 0) {
      const int dim = 2 + static_cast<int>(rng.next_u64() % 6);
      Eigen::VectorXd u(dim), v(dim);
      for (int i = 0; i < dim; ++i) {
        u(i) = rng.normal() * 3.0;
        v(i) = rng.normal() * 3.0;
      }
      Eigen::VectorXd pu = u, pv = v;
      project_soc_inplace(pu);
      project_soc_inplace(pv);
      Eigen::VectorXd ppu = pu;
      project_soc_inplace(ppu);
      CHECK((ppu - pu).norm() <= 1e-12 * (1.0 + pu.norm()));
      CHECK((pu - pv).norm() <= (u - v).norm() + 1e-12);
    } else {
      const int n = 2 + static_cast<int>(rng.next_u64() % 4);
      Eigen::MatrixXd U(n, n), V(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          U(i, j) = rng.normal();
          V(i, j) = rng.normal();
        }
      U = (U + U.transpose()).eval();
      V = (V + V.transpose()).eval();
      const Eigen::MatrixXd PU = project_psd(U), PV = project_psd(V);
      CHECK((project_psd(PU) - PU).norm() <= 1e-11 * (1.0 + PU.norm()));
      CHECK((PU - PV).norm() <= (U - V).norm() + 1e-11);
      // nearest-point property in Frobenius norm: eigenvalue clamp
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(PU);
      CHECK(es.eigenvalues().minCoeff() > -1e-12);
    }
  }
}

TEST_CASE("svec smat round trip and indexing") {
  Rng rng(9);
  const int n = 5;
  Eigen::MatrixXd S(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) S(i, j) = rng.normal();
  S = (S + S.transpose()).eval();

  const Eigen::VectorXd v = svec(S);
  REQUIRE(v.size() == n * (n + 1) / 2);
  CHECK((smat(v, n) - S).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(v.norm() == doctest::Approx(S.norm()).epsilon(1e-12));  // isometry

  // packed index agrees with svec layout
  for (int col = 0; col < n; ++col)
    for (int row = col; row < n; ++row) {
      const double expect = row == col ? S(row, col) : M_SQRT2 * S(row, col);
      CHECK(v(svec_index(row, col, n)) == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("hermitian embedding") {
  SUBCASE("scalar") {
    Eigen::MatrixXcd H(1, 1);
    H(0, 0) = 3.0;
    const Eigen::MatrixXd R = realify(H);
    CHECK((R - 3.0 * Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-14);
  }
  SUBCASE("pauli-like spectrum") {
    Eigen::MatrixXcd H(2, 2);
    H << cxd(0, 0), cxd(0, 1), cxd(0, -1), cxd(0, 0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(realify(H));
    const Eigen::VectorXd w = es.eigenvalues();
    CHECK(w(0) == doctest::Approx(-1.0));
    CHECK(w(1) == doctest::Approx(-1.0));
    CHECK(w(2) == doctest::Approx(1.0));
    CHECK(w(3) == doctest::Approx(1.0));
  }
  SUBCASE("doubled eigenvalue multiset") {
    Rng rng(55);
    const int n = 4;
    Eigen::MatrixXcd H(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) H(i, j) = rng.cnormal();
    H = ((H + H.adjoint()) / 2.0).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ec(H);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> er(realify(H));
    for (int i = 0; i < n; ++i) {
      CHECK(er.eigenvalues()(2 * i) == doctest::Approx(ec.eigenvalues()(i)).epsilon(1e-10));
      CHECK(er.eigenvalues()(2 * i + 1) ==
            doctest::Approx(ec.eigenvalues()(i)).epsilon(1e-10));
    }
  }
  SUBCASE("complex-pair cone projection equals the dense complex projection") {
    Rng rng(66);
    const int n = 3;
    Eigen::MatrixXcd H(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) H(i, j) = rng.cnormal();
    H = ((H + H.adjoint()) / 2.0).eval();
    // reference: clamp in the complex domain, then embed
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ec(H);
    const Eigen::MatrixXcd Hp = ec.eigenvectors() *
                                ec.eigenvalues().cwiseMax(0.0).asDiagonal() *
                                ec.eigenvectors().adjoint();
    Eigen::VectorXd packed = svec(realify(H));
    std::vector<Cone> cones{Cone{Cone::Psd, 2 * n, true}};
    project_cones_inplace(packed, cones, false);
    CHECK((smat(packed, 2 * n) - realify(Hp)).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("analytic sdp: smallest diagonal with unit off-diagonal") {
  // minimize t subject to [[t, 1], [1, t]] PSD; optimum t = 1.
  // svec variable s (dim 3) with A x + s = b, s PSD-packed.
  ConicProgram prog;
  prog.c.resize(1);
  prog.c << 1.0;
  Eigen::MatrixXd A(3, 1);
  A << -1.0, 0.0, -1.0;
  prog.A = sparse_from(A);
  prog.b.resize(3);
  prog.b << 0.0, M_SQRT2, 0.0;
  prog.cones = {Cone{Cone::Psd, 2, false}};

  const SolverConfig cfg;
  const Solution sol = solve(prog, cfg);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.x(0) == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(sol.objective == doctest::Approx(1.0).epsilon(1e-5));
  check_certified_optimum(prog, sol, 1e-6);

  SUBCASE("deterministic re-solve") {
    const Solution again = solve(prog, cfg);
    CHECK((again.x - sol.x).norm() == 0.0);
    CHECK(again.iterations == sol.iterations);
  }
  SUBCASE("iteration log emits csv rows") {
    std::ostringstream log;
    SolverConfig lcfg;
    lcfg.iteration_log = &log;
    (void)solve(prog, lcfg);
    const std::string text = log.str();
    CHECK(text.rfind("iteration, primal_res, dual_res, gap\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') >= 2);
  }
}

TEST_CASE("analytic sdp: trace minimization over X >= I") {
  // minimize trace X s.t. X - I PSD (side 3); optimum trace = 3.
  // x = svec(X) (6 vars); constraint -x + s = -svec(I).
  const int side = 3, pk = 6;
  ConicProgram prog;
  prog.c = Eigen::VectorXd::Zero(pk);
  for (int i = 0; i < side; ++i) prog.c(svec_index(i, i, side)) = 1.0;
  Eigen::MatrixXd A = -Eigen::MatrixXd::Identity(pk, pk);
  prog.A = sparse_from(A);
  prog.b = -svec(Eigen::MatrixXd::Identity(side, side));
  prog.cones = {Cone{Cone::Psd, side, false}};

  const Solution sol = solve(prog, SolverConfig{});
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(3.0).epsilon(1e-5));
  check_certified_optimum(prog, sol, 1e-6);
  const Eigen::MatrixXd X = smat(sol.x, side);
  CHECK((X - Eigen::MatrixXd::Identity(side, side)).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("equality-only program reduces to a least-norm solve") {
  // Zero objective over equality rows: the iterates stay in the row space of
  // A, so the limit is the least-norm feasible point (in the original metric
  // when equilibration is off).
  Rng rng(12);
  for (bool scaling : {true, false}) {
    const int m = 4, n = 7;
    Eigen::MatrixXd A(m, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) A(i, j) = rng.normal();
    Eigen::VectorXd b = A * Eigen::VectorXd::NullaryExpr(n, [&](int) { return rng.normal(); });

    ConicProgram prog;
    prog.c = Eigen::VectorXd::Zero(n);
    prog.A = sparse_from(A);
    prog.b = b;
    prog.cones = {Cone{Cone::Zero, m, false}};

    SolverConfig cfg;
    cfg.scaling = scaling;
    const Solution sol = solve(prog, cfg);
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK((A * sol.x - b).norm() / (1.0 + b.norm()) < 1e-6);

    const Eigen::VectorXd ref = oracles::least_norm_solve(A, b);
    CHECK((A * ref - b).norm() < 1e-10);
    if (!scaling) CHECK((sol.x - ref).norm() < 1e-4 * (1.0 + ref.norm()));
  }
}

TEST_CASE("infeasibility certificates") {
  SUBCASE("contradictory equalities are primal infeasible") {
    // x = 1 and x = 2
    ConicProgram prog;
    prog.c = Eigen::VectorXd::Zero(1);
    Eigen::MatrixXd A(2, 1);
    A << 1.0, 1.0;
    prog.A = sparse_from(A);
    prog.b.resize(2);
    prog.b << 1.0, 2.0;
    prog.cones = {Cone{Cone::Zero, 2, false}};
    const Solution sol = solve(prog, SolverConfig{});
    CHECK(sol.status == SolveStatus::PrimalInfeasible);
    // certificate direction: b'y < 0 while A'y vanishes relative to it
    const double bty = prog.b.dot(sol.y);
    CHECK(bty < 0.0);
    CHECK((prog.A.transpose() * sol.y).norm() < 1e-6 * std::abs(bty));
  }
  SUBCASE("unbounded objective is dual infeasible") {
    // minimize -x s.t. x >= 0 (one-dimensional second-order cone)
    ConicProgram prog;
    prog.c.resize(1);
    prog.c << -1.0;
    Eigen::MatrixXd A(1, 1);
    A << -1.0;
    prog.A = sparse_from(A);
    prog.b = Eigen::VectorXd::Zero(1);
    prog.cones = {Cone{Cone::Soc, 1, false}};
    const Solution sol = solve(prog, SolverConfig{});
    CHECK(sol.status == SolveStatus::DualInfeasible);
    // certificate ray: objective strictly decreasing with -A x in the cone
    const double ctx = prog.c.dot(sol.x);
    CHECK(ctx < 0.0);
    Eigen::VectorXd dir = -(prog.A * sol.x);
    Eigen::VectorXd proj = dir;
    project_soc_inplace(proj);
    CHECK((proj - dir).norm() < 1e-6 * std::abs(ctx));
  }
}

TEST_CASE("soc feasibility shaping") {
  // minimize t subject to ||x - x0|| <= t: optimum t = 0 at x = x0.
  const int n = 3;
  ConicProgram prog;
  prog.c = Eigen::VectorXd::Zero(n + 1);
  prog.c(0) = 1.0;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n + 1, n + 1);
  A(0, 0) = -1.0;
  for (int i = 0; i < n; ++i) A(1 + i, 1 + i) = -1.0;
  prog.A = sparse_from(A);
  prog.b = Eigen::VectorXd::Zero(n + 1);
  Eigen::VectorXd x0(n);
  x0 << 0.3, -1.2, 0.5;
  prog.b.tail(n) = -x0;
  prog.cones = {Cone{Cone::Soc, n + 1, false}};

  const Solution sol = solve(prog, SolverConfig{});
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.objective < 1e-4);
  CHECK((sol.x.tail(n) - x0).norm() < 1e-4);
}

TEST_CASE("prepared solver reuses the factorization across right-hand sides") {
  // minimize t s.t. [[t, g], [g, t]] PSD for varying g: optimum t = |g|.
  ConicProgram prog;
  prog.c.resize(1);
  prog.c << 1.0;
  Eigen::MatrixXd A(3, 1);
  A << -1.0, 0.0, -1.0;
  prog.A = sparse_from(A);
  prog.b.resize(3);
  prog.b << 0.0, M_SQRT2 * 1.0, 0.0;
  prog.cones = {Cone{Cone::Psd, 2, false}};

  PreparedSolver ps(prog);
  const SolverConfig cfg;
  for (double g : {1.0, 2.5, 0.3}) {
    Eigen::VectorXd b(3);
    b << 0.0, M_SQRT2 * g, 0.0;
    const Solution sol = ps.solve_with_b(b, cfg);
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(sol.objective == doctest::Approx(std::abs(g)).epsilon(1e-4));
  }

  SUBCASE("warm start accepts the previous solution") {
    Eigen::VectorXd b(3);
    b << 0.0, M_SQRT2 * 2.4, 0.0;
    const Solution cold = ps.solve_with_b(b, cfg);
    b(1) = M_SQRT2 * 2.5;
    SolverConfig wcfg = cfg;
    wcfg.warm_start = true;
    const Solution warm = ps.solve_with_b(b, wcfg, &cold);
    REQUIRE(warm.status == SolveStatus::Optimal);
    CHECK(warm.objective == doctest::Approx(2.5).epsilon(1e-4));
    CHECK(warm.iterations <= cold.iterations);
  }
}

TEST_CASE("acceleration off still converges and certificates survive") {
  // the plain (memory 0) iteration must agree with the accelerated one
  ConicProgram prog;
  prog.c.resize(1);
  prog.c << 1.0;
  Eigen::MatrixXd A(3, 1);
  A << -1.0, 0.0, -1.0;
  prog.A = sparse_from(A);
  prog.b.resize(3);
  prog.b << 0.0, M_SQRT2, 0.0;
  prog.cones = {Cone{Cone::Psd, 2, false}};

  SolverConfig plain;
  plain.aa_memory = 0;
  const Solution sol = solve(prog, plain);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("program validation") {
  ConicProgram prog;
  prog.c = Eigen::VectorXd::Zero(2);
  prog.b = Eigen::VectorXd::Zero(3);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(3, 2);
  prog.A = sparse_from(A);
  prog.cones = {Cone{Cone::Zero, 2, false}};  // rows mismatch: 2 != 3
  CHECK_THROWS_AS(prog.validate(), Error);
  prog.cones = {Cone{Cone::Zero, 3, false}};
  CHECK_NOTHROW(prog.validate());
}
