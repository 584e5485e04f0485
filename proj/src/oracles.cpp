// SPDX-License-Identifier: Apache-2.0
#include "srwdoa/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <limits>
#include <numeric>

#include "srwdoa/harness.hpp"
#include "srwdoa/pswf.hpp"
#include "srwdoa/recovery.hpp"
#include "srwdoa/signal_model.hpp"
#include "srwdoa/steering.hpp"

namespace srwdoa {
namespace oracles {

void gauss_legendre(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
  require(n >= 1, "need at least one node");
  using MatL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  using VecL = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
  VecL diag = VecL::Zero(n), sub = VecL::Zero(std::max(n - 1, 1));
  for (int k = 1; k < n; ++k)
    sub(k - 1) = k / std::sqrt(4.0L * k * k - 1.0L);
  Eigen::SelfAdjointEigenSolver<MatL> es;
  es.computeFromTridiagonal(diag, sub.head(std::max(n - 1, 0)),
                            Eigen::ComputeEigenvectors);
  require(es.info() == Eigen::Success, "Golub-Welsch failed");
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    nodes(i) = static_cast<double>(es.eigenvalues()(i));
    const long double v0 = es.eigenvectors()(0, i);
    weights(i) = static_cast<double>(2.0L * v0 * v0);
  }
}

Eigen::VectorXd pswf_kernel_eigs(double c, int n) {
  Eigen::VectorXd x, w;
  gauss_legendre(n, x, w);
  Eigen::MatrixXcd A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      A(i, j) = std::polar(std::sqrt(w(i) * w(j)), c * x(i) * x(j));
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(A, /*computeEigenvectors=*/false);
  require(es.info() == Eigen::Success, "kernel eigendecomposition failed");
  Eigen::VectorXd mags = es.eigenvalues().cwiseAbs();
  std::sort(mags.data(), mags.data() + mags.size(), std::greater<double>());
  return mags;
}

namespace {

// Best assignment by exhaustive permutation (min total absolute error).
std::vector<int> best_permutation(const std::vector<double>& truths,
                                  const std::vector<double>& est) {
  const int K = static_cast<int>(truths.size());
  require(static_cast<int>(est.size()) == K, "estimate count mismatch");
  require(K >= 1 && K <= 10, "exhaustive matcher supports 1..10");
  std::vector<int> perm(static_cast<size_t>(K)), best;
  std::iota(perm.begin(), perm.end(), 0);
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double cost = 0.0;
    for (int i = 0; i < K; ++i)
      cost += std::abs(truths[static_cast<size_t>(i)] -
                       est[static_cast<size_t>(perm[static_cast<size_t>(i)])]);
    if (cost < best_cost) {
      best_cost = cost;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

namespace {

// Insertion sort (own code path, no <algorithm>): the matched errors are the
// rank-order differences between the two sorted lists.
std::vector<double> sorted_copy(const std::vector<double>& v) {
  std::vector<double> out = v;
  for (size_t i = 1; i < out.size(); ++i) {
    const double key = out[i];
    size_t j = i;
    while (j > 0 && out[j - 1] > key) {
      out[j] = out[j - 1];
      --j;
    }
    out[j] = key;
  }
  return out;
}

std::vector<double> matched_errors(const std::vector<double>& truths,
                                   const std::vector<double>& est) {
  require(truths.size() == est.size(), "estimate count mismatch");
  const std::vector<double> ts = sorted_copy(truths), es = sorted_copy(est);
  std::vector<double> err(ts.size());
  for (size_t i = 0; i < ts.size(); ++i) err[i] = ts[i] - es[i];
  return err;
}

}  // namespace

double rmse_reference(const std::vector<double>& truths,
                      const std::vector<std::vector<double>>& per_trial) {
  require(!per_trial.empty(), "no trials");
  double acc = 0.0;
  for (const auto& est : per_trial) {
    const auto err = matched_errors(truths, est);
    double sq = 0.0;
    for (double e : err) sq += e * e;
    acc += std::min(std::sqrt(sq / static_cast<double>(truths.size())), 90.0);
  }
  return acc / static_cast<double>(per_trial.size());
}

double success_reference(const std::vector<double>& truths,
                         const std::vector<std::vector<double>>& per_trial,
                         double margin_deg) {
  require(!per_trial.empty(), "no trials");
  int ok = 0;
  for (const auto& est : per_trial) {
    bool all = true;
    for (double e : matched_errors(truths, est))
      if (std::abs(e) >= margin_deg) all = false;
    ok += all ? 1 : 0;
  }
  return static_cast<double>(ok) / static_cast<double>(per_trial.size());
}

Eigen::VectorXd least_norm_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  require(A.rows() == b.size(), "dimension mismatch");
  return A.completeOrthogonalDecomposition().solve(b);
}

namespace {

Check make_check(const std::string& name, bool pass, const char* fmt, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, ap);
  va_end(ap);
  return Check{name, buf, pass};
}

void check_pswf(std::vector<Check>& out, double c, int quad_n) {
  const PswfBasis basis = compute_basis(c, 1e-4);
  const Eigen::VectorXd ref = pswf_kernel_eigs(c, quad_n);
  double worst = 0.0;
  for (int l = 0; l <= 2 * basis.d; ++l) {
    const double mine = std::abs(basis.lambda(l));
    worst = std::max(worst, std::abs(mine - ref(l)) / ref(l));
  }
  // decay beyond the plunge index 2c/pi
  const int l0 = static_cast<int>(std::ceil(2.0 * c / kPi));
  bool decays = true;
  for (int l = l0 + 1; l <= 2 * basis.d; ++l)
    if (!(std::abs(basis.lambda(l)) < std::abs(basis.lambda(l - 1)))) decays = false;
  const double tail = std::abs(basis.lambda(2 * basis.d)) /
                      std::abs(basis.lambda(std::min(l0, 2 * basis.d)));
  char name[64];
  std::snprintf(name, sizeof name, "pswf-lambda-c%g", c);
  out.push_back(make_check(
      name, worst < 1e-8 && decays && tail < 1e-2,
      "d=%d worst_rel_dev=%.3e decay_monotone=%d tail_ratio=%.3e", basis.d, worst,
      decays ? 1 : 0, tail));
}

}  // namespace

std::vector<Check> run_derived_checks(bool quick) {
  std::vector<Check> out;
  const int cases = quick ? 20 : 100;

  {  // quadrature self-test: degree-8 polynomial integrated exactly by n = 10
    Eigen::VectorXd x, w;
    gauss_legendre(10, x, w);
    double ix2 = 0.0, icos = 0.0;
    for (int i = 0; i < 10; ++i) {
      ix2 += w(i) * std::pow(x(i), 8);
      icos += w(i) * std::cos(x(i));
    }
    const double e1 = std::abs(ix2 - 2.0 / 9.0), e2 = std::abs(icos - 2.0 * std::sin(1.0));
    out.push_back(make_check("gauss-legendre", e1 < 1e-14 && e2 < 1e-14,
                             "err_x8=%.2e err_cos=%.2e", e1, e2));
  }

  check_pswf(out, 1.0, quick ? 240 : 400);
  check_pswf(out, 10.0, quick ? 240 : 400);
  if (!quick) check_pswf(out, 29.0, 400);

  {  // small-c pin: lambda_0 -> 2 as c -> 0
    const PswfBasis b = compute_basis(0.1, 1e-4);
    const double l0 = std::abs(b.lambda(0));
    out.push_back(
        make_check("pswf-lambda0-small-c", std::abs(l0 - 1.9989) < 2e-3,
                   "|lambda_0(0.1)|=%.6f (expect ~1.9989)", l0));
  }

  {  // virtual grid size, benchmark geometry: only the reference element (0)
     // collides across bins, so the count is M*J - (J-1)
    WidebandParams p;
    const ArrayGeometry g =
        random_geometry(8, 8 * p.center_wavelength() / 2.0, 12345);
    const Eigen::VectorXd bins = select_bins(p);
    const Eigen::VectorXd alphas = 2.0 * bins / p.speed_mps;
    const VirtualGrid grid = build_virtual_grid(g, alphas);
    // independent dedup count
    std::vector<double> vals;
    for (int m = 0; m < g.size(); ++m)
      for (int j = 0; j < alphas.size(); ++j) vals.push_back(alphas(j) * g.positions(m));
    std::sort(vals.begin(), vals.end());
    int count = 0;
    double last = -1.0;
    for (double v : vals)
      if (count == 0 || v - last > grid.tol) {
        ++count;
        last = v;
      }
    const int expect = g.size() * static_cast<int>(alphas.size()) -
                       (static_cast<int>(alphas.size()) - 1);
    out.push_back(make_check("virtual-grid-size",
                             grid.size() == count && grid.size() == expect,
                             "grid=%d independent=%d structural=%d", grid.size(),
                             count, expect));
  }

  {  // PSWF interpolation of in-band exponentials on the uniform tau grid
    const PswfBasis b = compute_basis(10.0, 1e-4);
    Rng rng(7);
    const int d = b.d;
    double worst = 0.0;
    for (int t = 0; t < cases; ++t) {
      const double omega = rng.uniform(-b.c, b.c);
      Eigen::VectorXcd gvals(2 * d + 1);
      for (int q = 0; q < 2 * d + 1; ++q)
        gvals(q) = std::polar(1.0, omega * b.tau_grid(q));
      // coefficients from the sample matrix, then evaluate off-grid
      const Eigen::PartialPivLU<Eigen::MatrixXd> lu(b.Phi);
      const Eigen::VectorXcd coef = lu.solve(gvals);
      for (int s = 0; s < 7; ++s) {
        const double tau = rng.uniform(-1.0, 1.0);
        const Eigen::VectorXd ph = b.evaluate_one(tau);
        const cxd interp = ph.cast<cxd>().dot(coef);
        worst = std::max(worst, std::abs(interp - std::polar(1.0, omega * tau)));
      }
    }
    out.push_back(make_check("kernel-interpolation", worst < 10 * b.eps,
                             "max_err=%.3e (budget %.1e)", worst, 10 * b.eps));
  }

  {  // chi adjoint identity <chi(Z), Y> == <Z, chi*(Y)>
    Rng rng(11);
    double worst = 0.0;
    for (int t = 0; t < cases; ++t) {
      const int M = 3 + static_cast<int>(rng.next_u64() % 4);
      const int J = 2 + static_cast<int>(rng.next_u64() % 3);
      Eigen::VectorXd pos(M);
      pos(0) = 0.0;
      for (int m = 1; m < M; ++m) pos(m) = pos(m - 1) + rng.uniform(0.3, 2.0);
      Eigen::VectorXd alphas(J);
      for (int j = 0; j < J; ++j) alphas(j) = rng.uniform(0.5, 2.0);
      const VirtualGrid grid = build_virtual_grid(ArrayGeometry{pos}, alphas);
      Eigen::MatrixXcd Z(grid.size(), J), Y(M, J);
      for (int q = 0; q < grid.size(); ++q)
        for (int j = 0; j < J; ++j) Z(q, j) = rng.cnormal();
      for (int m = 0; m < M; ++m)
        for (int j = 0; j < J; ++j) Y(m, j) = rng.cnormal();
      const cxd lhs = (chi_apply(grid, Z).conjugate().cwiseProduct(Y)).sum();
      const cxd rhs = (Z.conjugate().cwiseProduct(chi_adjoint(grid, Y))).sum();
      worst = std::max(worst, std::abs(lhs - rhs));
    }
    out.push_back(make_check("chi-adjoint", worst < 1e-12, "max_dev=%.3e", worst));
  }

  {  // model consistency: synthesized snapshot == chi(sum of atoms)
    Rng rng(13);
    double worst = 0.0;
    for (int t = 0; t < cases; ++t) {
      WidebandParams p;
      p.n_bins = 2 + static_cast<int>(rng.next_u64() % 4);
      SourceScene sc;
      const int K = 1 + static_cast<int>(rng.next_u64() % 3);
      for (int k = 0; k < K; ++k) sc.thetas_deg.push_back(rng.uniform(-80.0, 80.0));
      std::sort(sc.thetas_deg.begin(), sc.thetas_deg.end());
      bool distinct = true;
      for (int k = 1; k < K; ++k)
        if (sc.thetas_deg[static_cast<size_t>(k)] -
                sc.thetas_deg[static_cast<size_t>(k - 1)] < 1e-6)
          distinct = false;
      if (!distinct) continue;
      const ArrayGeometry g =
          random_geometry(3 + static_cast<int>(rng.next_u64() % 5),
                          8 * p.center_wavelength() / 2.0, rng.next_u64());
      const SynthesisResult syn = synthesize_full(g, sc, p, rng.next_u64());
      const VirtualGrid grid = build_virtual_grid(g, syn.snapshot.alphas);
      Eigen::MatrixXcd Zsum = Eigen::MatrixXcd::Zero(grid.size(), p.n_bins);
      for (int k = 0; k < K; ++k) {
        const double f = 0.5 * std::sin(sc.thetas_deg[static_cast<size_t>(k)] * kDeg);
        Zsum.noalias() +=
            general_steering(grid, f) * syn.spectra.row(k);
      }
      const double dev = (chi_apply(grid, Zsum) - syn.snapshot.X).norm() /
                         syn.snapshot.X.norm();
      worst = std::max(worst, dev);
    }
    out.push_back(make_check("model-chi-consistency", worst < 1e-12,
                             "max_rel_dev=%.3e over %d instances", worst, cases));
  }

  {  // node map inverts the frequency embedding (d >= rmax keeps |arg| <= pi,
     // mirroring the production d >= c/pi floor that rules out phase wrap)
    Rng rng(17);
    double worst = 0.0;
    const double rmax = 11.3;
    const int d = 12;
    for (int t = 0; t < cases; ++t) {
      const double f = rng.uniform(-0.5, 0.5);
      Eigen::VectorXcd z(1);
      z(0) = std::polar(1.0, -2.0 * kPi * f * rmax / d);
      const auto back = nodes_to_frequencies(z, rmax, d);
      worst = std::max(worst, std::abs(back[0] - f));
    }
    out.push_back(make_check("node-map-roundtrip", worst < 1e-12, "max_dev=%.3e", worst));
  }

  {  // metric implementations agree with the sorted-rank reference, and the
     // rank pairing attains the exhaustive assignment optimum
    Rng rng(19);
    double worst_r = 0.0, worst_s = 0.0, worst_opt = 0.0;
    for (int t = 0; t < 100; ++t) {
      const int K = 1 + static_cast<int>(rng.next_u64() % 4);
      const int T = 1 + static_cast<int>(rng.next_u64() % 4);
      std::vector<double> truths;
      for (int k = 0; k < K; ++k) truths.push_back(rng.uniform(-80.0, 80.0));
      std::vector<std::vector<double>> trials;
      for (int i = 0; i < T; ++i) {
        std::vector<double> est;
        for (int k = 0; k < K; ++k)
          est.push_back(rng.uniform(0.0, 1.0) < 0.5
                            ? truths[static_cast<size_t>(k)] + rng.uniform(-8.0, 8.0)
                            : rng.uniform(-90.0, 90.0));
        trials.push_back(std::move(est));
      }
      for (const auto& est : trials) {
        const auto perm = match_assignment(truths, est);
        const auto exh = best_permutation(truths, est);
        double cost = 0.0, cost_exh = 0.0;
        for (size_t i = 0; i < truths.size(); ++i) {
          cost += std::abs(truths[i] - est[static_cast<size_t>(perm[i])]);
          cost_exh += std::abs(truths[i] - est[static_cast<size_t>(exh[i])]);
        }
        worst_opt = std::max(worst_opt, cost - cost_exh);
      }
      worst_r = std::max(worst_r,
                         std::abs(rmse(truths, trials) - rmse_reference(truths, trials)));
      worst_s = std::max(
          worst_s, std::abs(success_probability(truths, trials, 5.0) -
                            success_reference(truths, trials, 5.0)));
    }
    out.push_back(make_check("metric-equivalence",
                             worst_r < 1e-12 && worst_s == 0.0 && worst_opt < 1e-9,
                             "rmse_dev=%.3e success_dev=%.3e opt_gap=%.3e", worst_r,
                             worst_s, worst_opt));
  }

  return out;
}

}  // namespace oracles
}  // namespace srwdoa
