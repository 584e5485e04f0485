// SPDX-License-Identifier: Apache-2.0
#include "srwdoa/signal_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace srwdoa {

void WidebandParams::validate() const {
  require(speed_mps > 0 && center_hz > 0 && bandwidth_hz > 0 && fs_hz > 0,
          "wideband parameters must be positive");
  require(center_hz + bandwidth_hz / 2.0 <= fs_hz / 2.0,
          "band must lie below Nyquist");
  require(center_hz - bandwidth_hz / 2.0 > 0.0, "band must stay above DC");
  require(n_bins >= 1, "need at least one bin");
  require(n_samples >= n_bins, "record too short for requested bins");
}

void SourceScene::validate() const {
  require(count() >= 1, "scene needs at least one source");
  for (double t : thetas_deg)
    require(std::abs(t) < 90.0, "directions must lie strictly inside (-90, 90) deg");
  for (int a = 0; a < count(); ++a)
    for (int b = a + 1; b < count(); ++b)
      require(thetas_deg[static_cast<size_t>(a)] != thetas_deg[static_cast<size_t>(b)],
              "directions must be pairwise distinct");
  if (!powers.empty()) {
    require(static_cast<int>(powers.size()) == count(), "powers/thetas length mismatch");
    for (double p : powers) require(p > 0.0, "source powers must be positive");
  }
}

Eigen::VectorXd select_bins(const WidebandParams& p) {
  p.validate();
  const double df = p.fs_hz / p.n_samples;
  const double lo = p.center_hz - p.bandwidth_hz / 2.0;
  const int J = p.n_bins;

  // count the DFT bins available in-band
  const int k_lo = static_cast<int>(std::ceil(lo / df - 1e-12));
  const int k_hi = static_cast<int>(std::floor((lo + p.bandwidth_hz) / df + 1e-12));
  require(k_hi - k_lo + 1 >= J, "band too narrow for requested bin count");

  // nearest DFT bin to each of J uniform targets, then de-duplicate greedily
  std::set<int> used;
  std::vector<int> ks;
  for (int j = 0; j < J; ++j) {
    const double target = lo + (j + 0.5) * p.bandwidth_hz / J;
    int k = static_cast<int>(std::llround(target / df));
    k = std::clamp(k, k_lo, k_hi);
    while (used.count(k) && k < k_hi) ++k;
    while (used.count(k) && k > k_lo) --k;
    require(!used.count(k), "could not place distinct bins");
    used.insert(k);
    ks.push_back(k);
  }
  std::sort(ks.begin(), ks.end());
  Eigen::VectorXd f(J);
  for (int j = 0; j < J; ++j) f(j) = ks[static_cast<size_t>(j)] * df;
  return f;
}

namespace {
Eigen::VectorXd alphas_for(const Eigen::VectorXd& bin_hz, double speed) {
  // alpha_j = 2 / wavelength_j = 2 f_j / speed
  return 2.0 * bin_hz / speed;
}
}  // namespace

SynthesisResult synthesize_full(const ArrayGeometry& g, const SourceScene& scene,
                                const WidebandParams& p, std::uint64_t seed) {
  scene.validate();
  const Eigen::VectorXd bin_hz = select_bins(p);
  const Eigen::VectorXd alphas = alphas_for(bin_hz, p.speed_mps);
  const int M = g.size(), J = p.n_bins, K = scene.count(), N = p.n_samples;

  Rng rng(seed_child(seed, 0x51));
  Eigen::MatrixXcd S(K, J);
  for (int k = 0; k < K; ++k) {
    const double amp = std::sqrt(scene.power(k));
    for (int j = 0; j < J; ++j) S(k, j) = amp * rng.cnormal();
  }

  Eigen::MatrixXcd X = Eigen::MatrixXcd::Zero(M, J);
  for (int k = 0; k < K; ++k) {
    const double f = 0.5 * std::sin(scene.thetas_deg[static_cast<size_t>(k)] * kDeg);
    for (int j = 0; j < J; ++j) {
      for (int m = 0; m < M; ++m)
        X(m, j) += S(k, j) * std::polar(1.0, -2.0 * kPi * alphas(j) * g.positions(m) * f);
    }
  }

  // Complex baseband record whose 1/N-normalized DFT at the selected bins
  // reproduces X exactly (bins are integer multiples of fs/N).
  Eigen::MatrixXcd time = Eigen::MatrixXcd::Zero(M, N);
  const double df = p.fs_hz / p.n_samples;
  for (int j = 0; j < J; ++j) {
    const long bin = std::lround(bin_hz(j) / df);
    for (int n = 0; n < N; ++n) {
      const cxd w = std::polar(1.0, 2.0 * kPi * static_cast<double>(bin) * n / N);
      for (int m = 0; m < M; ++m) time(m, n) += X(m, j) * w;
    }
  }

  SynthesisResult out;
  out.snapshot = BinnedSnapshot{std::move(X), alphas, bin_hz};
  out.spectra = std::move(S);
  out.time = std::move(time);
  return out;
}

BinnedSnapshot synthesize(const ArrayGeometry& g, const SourceScene& scene,
                          const WidebandParams& p, std::uint64_t seed) {
  return synthesize_full(g, scene, p, seed).snapshot;
}

NoisySnapshot apply_noise(const BinnedSnapshot& clean, double snr_db, std::uint64_t seed) {
  NoisySnapshot out;
  out.snapshot = clean;
  if (std::isinf(snr_db) && snr_db > 0) {
    out.sigma = 0.0;
    out.sigma_n = 0.0;
    return out;
  }
  const double MJ = static_cast<double>(clean.X.size());
  const double snr_lin = std::pow(10.0, snr_db / 10.0);
  const double sigma_n2 = clean.X.squaredNorm() / (MJ * snr_lin);
  out.sigma_n = std::sqrt(sigma_n2);
  out.sigma = out.sigma_n * std::sqrt(MJ);
  Rng rng(seed_child(seed, 0x17));
  for (int j = 0; j < clean.X.cols(); ++j)
    for (int m = 0; m < clean.X.rows(); ++m)
      out.snapshot.X(m, j) += out.sigma_n * rng.cnormal();
  return out;
}

Eigen::MatrixXcd apply_time_noise(const Eigen::MatrixXcd& time_clean, double sigma_n,
                                  std::uint64_t seed) {
  Eigen::MatrixXcd out = time_clean;
  if (sigma_n == 0.0) return out;
  const double sigma_t = sigma_n * std::sqrt(static_cast<double>(time_clean.cols()));
  Rng rng(seed_child(seed, 0x2b));
  for (int n = 0; n < out.cols(); ++n)
    for (int m = 0; m < out.rows(); ++m) out(m, n) += sigma_t * rng.cnormal();
  return out;
}

namespace detail {
std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const char* ws = " \t\r\n";
      auto a = s.find_first_not_of(ws);
      auto b = s.find_last_not_of(ws);
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (!key.empty()) kv[key] = val;
  }
  return kv;
}
}  // namespace detail

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    if (item.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    out.push_back(std::stod(item));
  }
  return out;
}

Scenario parse_scenario_text(const std::string& text) {
  auto kv = detail::parse_key_values(text);
  Scenario sc;
  auto getd = [&](const char* key, double& dst) {
    if (auto it = kv.find(key); it != kv.end()) dst = std::stod(it->second);
  };
  auto geti = [&](const char* key, int& dst) {
    if (auto it = kv.find(key); it != kv.end()) dst = std::stoi(it->second);
  };
  getd("speed_mps", sc.params.speed_mps);
  getd("center_hz", sc.params.center_hz);
  getd("bandwidth_hz", sc.params.bandwidth_hz);
  getd("fs_hz", sc.params.fs_hz);
  geti("n_samples", sc.params.n_samples);
  geti("n_bins", sc.params.n_bins);
  if (auto it = kv.find("thetas_deg"); it != kv.end())
    sc.scene.thetas_deg = parse_double_list(it->second);
  if (auto it = kv.find("seed"); it != kv.end()) sc.seed = std::stoull(it->second);
  sc.params.validate();
  if (!sc.scene.thetas_deg.empty()) sc.scene.validate();
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open scenario file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario_text(ss.str());
}

}  // namespace srwdoa
