// SPDX-License-Identifier: Apache-2.0
#include "srwdoa/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace srwdoa {

NodeExtraction extract_nodes(const Eigen::MatrixXcd& T, int K, double guard) {
  const int n = static_cast<int>(T.rows());
  require(T.cols() == n && n >= 2, "T must be square with side >= 2");
  require(K >= 1 && K <= n - 1, "need 1 <= K <= side - 1");

  const Eigen::MatrixXcd Th = 0.5 * (T + T.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Th);
  require(es.info() == Eigen::Success, "eigendecomposition failed");
  const Eigen::VectorXd& w = es.eigenvalues();  // ascending

  NodeExtraction out;
  const double lamK = std::max(w(n - K), 0.0);
  const double lamK1 = std::max(w(n - K - 1), 0.0);
  out.rank_warning = !(lamK > 0.0) || lamK1 / std::max(lamK, 1e-300) > guard;

  const Eigen::MatrixXcd Us = es.eigenvectors().rightCols(K);
  // Shift invariance: rows 0..n-2 of Us map onto rows 1..n-1 through F.
  const Eigen::MatrixXcd U1 = Us.topRows(n - 1);
  const Eigen::MatrixXcd U2 = Us.bottomRows(n - 1);
  const Eigen::MatrixXcd F = U1.colPivHouseholderQr().solve(U2);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ces(F);
  require(ces.info() == Eigen::Success, "pencil eigendecomposition failed");

  out.nodes.resize(K);
  for (int k = 0; k < K; ++k) {
    const cxd z = ces.eigenvalues()(k);
    const double m = std::abs(z);
    out.nodes(k) = m > 1e-12 ? z / m : cxd(1.0, 0.0);
  }

  // Least-squares power fit: min_p || T - sum p_k u_k u_k^H ||_F, p real.
  Eigen::MatrixXcd U(n, K);
  for (int k = 0; k < K; ++k)
    for (int m = 0; m < n; ++m) U(m, k) = std::pow(out.nodes(k), m);
  Eigen::MatrixXd G(K, K);
  Eigen::VectorXd g(K);
  for (int k = 0; k < K; ++k) {
    for (int l = 0; l < K; ++l) G(k, l) = std::norm(U.col(k).dot(U.col(l)));
    g(k) = std::real(U.col(k).dot(Th * U.col(k)));
  }
  out.powers = G.ldlt().solve(g).cwiseMax(0.0);
  return out;
}

std::vector<double> nodes_to_frequencies(const Eigen::VectorXcd& nodes, double rmax,
                                         int d, bool* alias_warning) {
  require(rmax > 0.0 && d >= 1, "need rmax > 0 and d >= 1");
  bool clipped = false;
  std::vector<double> freqs(nodes.size());
  for (int k = 0; k < nodes.size(); ++k) {
    double f = -std::arg(nodes(k)) * d / (2.0 * kPi * rmax);
    if (std::abs(f) > 0.5) {
      clipped = true;
      f = std::clamp(f, -0.5, 0.5);
    }
    freqs[static_cast<size_t>(k)] = f;
  }
  if (alias_warning) *alias_warning = clipped;
  return freqs;
}

double freq_to_theta(double f) {
  require(std::abs(f) <= 0.5 + 1e-12, "spatial frequency outside [-1/2, 1/2]");
  return std::asin(std::clamp(2.0 * f, -1.0, 1.0)) / kDeg;
}

DoaEstimate recover_doas(const Eigen::MatrixXcd& T, int K, double rmax, int d,
                         double guard) {
  const NodeExtraction nx = extract_nodes(T, K, guard);
  DoaEstimate est;
  est.rank_warning = nx.rank_warning;
  est.freqs = nodes_to_frequencies(nx.nodes, rmax, d, &est.alias_warning);

  std::vector<int> order(est.freqs.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return est.freqs[a] < est.freqs[b]; });

  std::vector<double> freqs_sorted, powers;
  for (int idx : order) {
    freqs_sorted.push_back(est.freqs[static_cast<size_t>(idx)]);
    powers.push_back(nx.powers(idx));
    est.thetas_deg.push_back(freq_to_theta(est.freqs[static_cast<size_t>(idx)]));
  }
  est.freqs = std::move(freqs_sorted);
  est.powers = std::move(powers);
  return est;
}

}  // namespace srwdoa
