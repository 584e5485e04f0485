// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <vector>

#include "srwdoa/steering.hpp"

namespace srwdoa {

struct WidebandParams {
  double speed_mps = 1500.0;
  double center_hz = 500.0;
  double bandwidth_hz = 167.0;
  double fs_hz = 2000.0;
  int n_samples = 512;
  int n_bins = 10;

  void validate() const;
  double center_wavelength() const { return speed_mps / center_hz; }
};

struct SourceScene {
  std::vector<double> thetas_deg;
  std::vector<double> powers;  // empty -> all 1.0

  int count() const { return static_cast<int>(thetas_deg.size()); }
  void validate() const;
  double power(int k) const { return powers.empty() ? 1.0 : powers.at(k); }
};

struct BinnedSnapshot {
  Eigen::MatrixXcd X;       // M x J
  Eigen::VectorXd alphas;   // 2 / wavelength_j
  Eigen::VectorXd bin_hz;   // J
  int sensors() const { return static_cast<int>(X.rows()); }
  int bins() const { return static_cast<int>(X.cols()); }
};

// J DFT-grid frequencies spread as uniformly as possible over
// [center - BW/2, center + BW/2]; each an integer multiple of fs/n_samples.
Eigen::VectorXd select_bins(const WidebandParams& p);

// Noiseless per-bin snapshots (Eq. of the narrowband stack): X_{m,j} =
// sum_k S_{k,j} exp(-i 2 pi alpha_j r_m f_k), S seeded complex Gaussian.
BinnedSnapshot synthesize(const ArrayGeometry& g, const SourceScene& scene,
                          const WidebandParams& p, std::uint64_t seed);

// Same draw of S, but also returns the spectra and the complex baseband time
// record whose 1/N-normalized DFT at the selected bins equals X exactly
// (needed by the covariance-based reference estimators).
struct SynthesisResult {
  BinnedSnapshot snapshot;
  Eigen::MatrixXcd spectra;  // K x J
  Eigen::MatrixXcd time;     // M x n_samples
};
SynthesisResult synthesize_full(const ArrayGeometry& g, const SourceScene& scene,
                                const WidebandParams& p, std::uint64_t seed);

// Adds iid circular complex Gaussian noise with per-entry variance sigma_n^2
// chosen so that ||X_clean||_F^2 / (M J sigma_n^2) equals the linear SNR.
// Returns the noisy snapshot and sigma = sigma_n * sqrt(M J).
struct NoisySnapshot {
  BinnedSnapshot snapshot;
  double sigma = 0.0;
  double sigma_n = 0.0;  // per-entry std dev
};
NoisySnapshot apply_noise(const BinnedSnapshot& clean, double snr_db, std::uint64_t seed);

// Time-domain counterpart: iid CN(0, n_samples * sigma_n^2) per sample, so the
// 1/N-normalized full-record DFT has per-bin variance sigma_n^2.
Eigen::MatrixXcd apply_time_noise(const Eigen::MatrixXcd& time_clean, double sigma_n,
                                  std::uint64_t seed);

// Scenario description file: text "key = value" lines.
// Keys: speed_mps, center_hz, bandwidth_hz, fs_hz, n_samples, n_bins,
//       thetas_deg (comma list), seed.
struct Scenario {
  WidebandParams params;
  SourceScene scene;
  std::uint64_t seed = 0;
};
Scenario parse_scenario_text(const std::string& text);
Scenario load_scenario(const std::string& path);

std::vector<double> parse_double_list(const std::string& s);

namespace detail {
// "key = value" lines; '#' starts a comment; lines without '=' are ignored.
std::map<std::string, std::string> parse_key_values(const std::string& text);
}  // namespace detail

}  // namespace srwdoa
