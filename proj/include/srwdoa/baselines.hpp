// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "srwdoa/recovery.hpp"
#include "srwdoa/signal_model.hpp"

namespace srwdoa {

struct SpatialSpectrum {
  Eigen::VectorXd grid_deg;  // uniform, strictly increasing
  Eigen::VectorXd values;    // non-negative, finite
};

struct SegmentSpec {
  int n_segments = 16;
  int segment_len = 64;
};

// Incoherent wideband MUSIC: per-bin sample covariances from overlapping
// segment DFTs, per-bin MUSIC pseudo-spectra on a uniform angle grid,
// arithmetic mean across bins, top-K peaks with parabolic refinement.
DoaEstimate issm_music(const Eigen::MatrixXcd& time_data, const ArrayGeometry& g,
                       const WidebandParams& p, int K,
                       const SegmentSpec& seg = {}, double grid_step_deg = 0.1,
                       SpatialSpectrum* spectrum_out = nullptr);

// Coherent focusing baseline: per-bin unitary Procrustes alignment of the
// steering matrix at the initial angles onto the reference (center) bin,
// focused covariance, MUSIC at the reference bin.
DoaEstimate rss_estimate(const Eigen::MatrixXcd& time_data, const ArrayGeometry& g,
                         const WidebandParams& p, int K,
                         const std::vector<double>& initial_thetas_deg,
                         const SegmentSpec& seg = {}, double grid_step_deg = 0.1,
                         SpatialSpectrum* spectrum_out = nullptr,
                         std::vector<Eigen::MatrixXcd>* focusing_out = nullptr);

// Exposed for tests: the per-bin segment-DFT covariances and their bin
// frequencies (actual local DFT bin centers nearest the selected bins).
struct BinCovariances {
  std::vector<Eigen::MatrixXcd> R;  // one M x M PSD matrix per bin
  Eigen::VectorXd bin_hz;
};
BinCovariances segment_covariances(const Eigen::MatrixXcd& time_data,
                                   const WidebandParams& p, const SegmentSpec& seg);

}  // namespace srwdoa
