// SPDX-License-Identifier: Apache-2.0
#include "srwdoa/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace srwdoa {

BinCovariances segment_covariances(const Eigen::MatrixXcd& time_data,
                                   const WidebandParams& p, const SegmentSpec& seg) {
  p.validate();
  const int M = static_cast<int>(time_data.rows());
  const int N = static_cast<int>(time_data.cols());
  const int L = seg.segment_len;
  const int S = seg.n_segments;
  require(M >= 1 && N == p.n_samples, "time record shape mismatch");
  require(L >= 2 && S >= 1 && L <= N, "segment plan does not fit the record");
  const int hop = S == 1 ? 0 : (N - L) / (S - 1);
  require(S == 1 || hop >= 1, "record too short for this many segments");

  const Eigen::VectorXd targets = select_bins(p);
  const int J = static_cast<int>(targets.size());
  const double df = p.fs_hz / L;

  BinCovariances out;
  out.bin_hz.resize(J);
  out.R.reserve(static_cast<size_t>(J));
  for (int j = 0; j < J; ++j) {
    const int k = static_cast<int>(std::lround(targets(j) / df));
    out.bin_hz(j) = k * df;
    // Segment DFT at local bin k, 1/L normalized.
    Eigen::VectorXcd dft(L);
    for (int n = 0; n < L; ++n)
      dft(n) = std::polar(1.0 / L, -2.0 * kPi * k * n / L);
    Eigen::MatrixXcd R = Eigen::MatrixXcd::Zero(M, M);
    for (int s = 0; s < S; ++s) {
      const Eigen::VectorXcd snap = time_data.middleCols(s * hop, L) * dft;
      R.noalias() += snap * snap.adjoint();
    }
    out.R.push_back(R / S);
  }
  return out;
}

namespace {

// Mean of per-bin MUSIC pseudo-spectra over a uniform angle grid.
SpatialSpectrum music_spectrum(const std::vector<Eigen::MatrixXcd>& covs,
                               const Eigen::VectorXd& alphas, const ArrayGeometry& g,
                               int K, double step_deg) {
  const int M = g.size();
  const int J = static_cast<int>(covs.size());
  require(J >= 1 && alphas.size() == J, "covariance/frequency mismatch");
  require(K >= 1 && K < M, "MUSIC needs 1 <= K < sensors");
  require(step_deg > 0.0 && step_deg <= 10.0, "unreasonable grid step");

  const int npts = static_cast<int>(std::lround(180.0 / step_deg)) + 1;
  SpatialSpectrum spec;
  spec.grid_deg = Eigen::VectorXd::LinSpaced(npts, -90.0, 90.0);
  spec.values = Eigen::VectorXd::Zero(npts);

  for (int j = 0; j < J; ++j) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(covs[static_cast<size_t>(j)]);
    require(es.info() == Eigen::Success, "covariance eigendecomposition failed");
    const Eigen::MatrixXcd En = es.eigenvectors().leftCols(M - K);
    const Eigen::MatrixXcd B = En * En.adjoint();
    for (int i = 0; i < npts; ++i) {
      const double f = 0.5 * std::sin(spec.grid_deg(i) * kDeg);
      const Eigen::VectorXcd a = bin_steering(g, alphas(j), f);
      const double denom = std::max(std::real(a.dot(B * a)), 1e-30);
      spec.values(i) += 1.0 / denom;
    }
  }
  spec.values /= J;
  return spec;
}

// Top-K peaks with three-point parabolic refinement; deterministic fill-in
// from the largest remaining grid values if fewer than K local maxima exist.
DoaEstimate peaks_to_estimate(const SpatialSpectrum& spec, int K) {
  const int n = static_cast<int>(spec.grid_deg.size());
  const double step = spec.grid_deg(1) - spec.grid_deg(0);
  std::vector<int> cand;
  for (int i = 1; i + 1 < n; ++i)
    if (spec.values(i) > spec.values(i - 1) && spec.values(i) >= spec.values(i + 1))
      cand.push_back(i);
  std::stable_sort(cand.begin(), cand.end(),
                   [&](int a, int b) { return spec.values(a) > spec.values(b); });
  if (static_cast<int>(cand.size()) > K) cand.resize(static_cast<size_t>(K));

  while (static_cast<int>(cand.size()) < K) {
    int best = -1;
    for (int i = 0; i < n; ++i) {
      const bool taken = std::any_of(cand.begin(), cand.end(), [&](int c) {
        return std::abs(spec.grid_deg(c) - spec.grid_deg(i)) < 0.5;
      });
      if (!taken && (best < 0 || spec.values(i) > spec.values(best))) best = i;
    }
    require(best >= 0, "angle grid exhausted before finding K peaks");
    cand.push_back(best);
  }

  DoaEstimate est;
  for (int i : cand) {
    double theta = spec.grid_deg(i);
    if (i > 0 && i + 1 < n) {
      const double ym = spec.values(i - 1), y0 = spec.values(i),
                   yp = spec.values(i + 1);
      const double den = ym - 2.0 * y0 + yp;
      if (den < 0.0) theta += std::clamp(0.5 * (ym - yp) / den, -0.5, 0.5) * step;
    }
    est.thetas_deg.push_back(theta);
    est.powers.push_back(spec.values(i));
  }
  std::vector<int> order(est.thetas_deg.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return est.thetas_deg[static_cast<size_t>(a)] < est.thetas_deg[static_cast<size_t>(b)];
  });
  DoaEstimate sorted;
  for (int idx : order) {
    const double th = est.thetas_deg[static_cast<size_t>(idx)];
    sorted.thetas_deg.push_back(th);
    sorted.freqs.push_back(0.5 * std::sin(th * kDeg));
    sorted.powers.push_back(est.powers[static_cast<size_t>(idx)]);
  }
  return sorted;
}

Eigen::VectorXd alphas_of(const Eigen::VectorXd& bin_hz, const WidebandParams& p) {
  return 2.0 * bin_hz / p.speed_mps;
}

}  // namespace

DoaEstimate issm_music(const Eigen::MatrixXcd& time_data, const ArrayGeometry& g,
                       const WidebandParams& p, int K, const SegmentSpec& seg,
                       double grid_step_deg, SpatialSpectrum* spectrum_out) {
  require(seg.n_segments >= g.size(), "need at least as many segments as sensors");
  const BinCovariances covs = segment_covariances(time_data, p, seg);
  const SpatialSpectrum spec =
      music_spectrum(covs.R, alphas_of(covs.bin_hz, p), g, K, grid_step_deg);
  if (spectrum_out) *spectrum_out = spec;
  return peaks_to_estimate(spec, K);
}

DoaEstimate rss_estimate(const Eigen::MatrixXcd& time_data, const ArrayGeometry& g,
                         const WidebandParams& p, int K,
                         const std::vector<double>& initial_thetas_deg,
                         const SegmentSpec& seg, double grid_step_deg,
                         SpatialSpectrum* spectrum_out,
                         std::vector<Eigen::MatrixXcd>* focusing_out) {
  require(static_cast<int>(initial_thetas_deg.size()) == K,
          "need K initial angles");
  require(seg.n_segments >= g.size(), "need at least as many segments as sensors");
  const BinCovariances covs = segment_covariances(time_data, p, seg);
  const int J = static_cast<int>(covs.R.size());
  const Eigen::VectorXd alphas = alphas_of(covs.bin_hz, p);

  int ref = 0;
  for (int j = 1; j < J; ++j)
    if (std::abs(covs.bin_hz(j) - p.center_hz) < std::abs(covs.bin_hz(ref) - p.center_hz))
      ref = j;

  const int M = g.size();
  const auto steer_at = [&](int j) {
    Eigen::MatrixXcd A(M, K);
    for (int k = 0; k < K; ++k)
      A.col(k) =
          bin_steering(g, alphas(j), 0.5 * std::sin(initial_thetas_deg[static_cast<size_t>(k)] * kDeg));
    return A;
  };

  const Eigen::MatrixXcd A0 = steer_at(ref);
  if (focusing_out) focusing_out->clear();
  Eigen::MatrixXcd Rf = Eigen::MatrixXcd::Zero(M, M);
  for (int j = 0; j < J; ++j) {
    if (j == ref) {  // Procrustes of a frame onto itself is the identity
      Rf += covs.R[static_cast<size_t>(j)];
      if (focusing_out) focusing_out->push_back(Eigen::MatrixXcd::Identity(M, M));
      continue;
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A0 * steer_at(j).adjoint(),
                                           Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::MatrixXcd T = svd.matrixU() * svd.matrixV().adjoint();
    if (focusing_out) focusing_out->push_back(T);
    Rf += T * covs.R[static_cast<size_t>(j)] * T.adjoint();
  }
  Rf /= J;

  const SpatialSpectrum spec = music_spectrum(
      {Rf}, alphas.segment(ref, 1), g, K, grid_step_deg);
  if (spectrum_out) *spectrum_out = spec;
  return peaks_to_estimate(spec, K);
}

}  // namespace srwdoa
