// SPDX-License-Identifier: Apache-2.0
#include "srwdoa/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "srwdoa/baselines.hpp"

namespace srwdoa {

void ExperimentConfig::validate() const {
  params.validate();
  scene.validate();
  require(n_trials >= 1, "need at least one trial");
  require(margin_deg > 0.0, "success margin must be positive");
  require(!sweep_values.empty(), "sweep values must be non-empty");
  require(!methods.empty(), "method list must be non-empty");
  for (const auto& m : methods)
    require(m == "srw-doa" || m == "issm" || m == "rss", "unknown method: " + m);
  require(sweep_variable == "snr_db" || sweep_variable == "delta_theta_deg" ||
              sweep_variable == "n_bins",
          "unknown sweep variable: " + sweep_variable);
  if (geometry_file.empty()) require(n_sensors >= 2, "need at least two sensors");
  require(eta > 0.0, "eta must be positive");
  require(solver_eps > 0.0 && max_iterations >= 1, "bad solver settings");
  require(n_workers >= 1, "need at least one worker");
  if (sweep_variable == "delta_theta_deg")
    for (double v : sweep_values) require(v > 0.0, "separation must be positive");
  if (sweep_variable == "n_bins")
    for (double v : sweep_values)
      require(v >= 1.0 && v == std::floor(v), "bin counts must be positive integers");
}

ExperimentConfig parse_config_text(const std::string& text) {
  const auto kv = detail::parse_key_values(text);
  ExperimentConfig cfg;
  const auto getd = [&](const char* key, double& dst) {
    if (auto it = kv.find(key); it != kv.end()) dst = std::stod(it->second);
  };
  const auto geti = [&](const char* key, int& dst) {
    if (auto it = kv.find(key); it != kv.end()) dst = std::stoi(it->second);
  };
  const auto gets = [&](const char* key, std::string& dst) {
    if (auto it = kv.find(key); it != kv.end()) dst = it->second;
  };
  const auto getu = [&](const char* key, std::uint64_t& dst) {
    if (auto it = kv.find(key); it != kv.end()) dst = std::stoull(it->second);
  };

  getd("speed_mps", cfg.params.speed_mps);
  getd("center_hz", cfg.params.center_hz);
  getd("bandwidth_hz", cfg.params.bandwidth_hz);
  getd("fs_hz", cfg.params.fs_hz);
  geti("n_samples", cfg.params.n_samples);
  geti("n_bins", cfg.params.n_bins);
  if (auto it = kv.find("thetas_deg"); it != kv.end())
    cfg.scene.thetas_deg = parse_double_list(it->second);
  if (auto it = kv.find("powers"); it != kv.end())
    cfg.scene.powers = parse_double_list(it->second);

  gets("geometry_file", cfg.geometry_file);
  geti("n_sensors", cfg.n_sensors);
  getu("geometry_seed", cfg.geometry_seed);

  if (auto it = kv.find("methods"); it != kv.end()) {
    cfg.methods.clear();
    std::string item;
    std::istringstream in(it->second);
    while (std::getline(in, item, ',')) {
      const auto a = item.find_first_not_of(" \t");
      const auto b = item.find_last_not_of(" \t");
      if (a != std::string::npos) cfg.methods.push_back(item.substr(a, b - a + 1));
    }
  }
  gets("sweep_variable", cfg.sweep_variable);
  if (auto it = kv.find("sweep_values"); it != kv.end())
    cfg.sweep_values = parse_double_list(it->second);
  geti("n_trials", cfg.n_trials);
  getu("base_seed", cfg.base_seed);
  getd("margin_deg", cfg.margin_deg);
  getd("snr_db", cfg.snr_db);
  getd("eta", cfg.eta);
  getd("solver_eps", cfg.solver_eps);
  geti("max_iterations", cfg.max_iterations);
  getd("pswf_eps", cfg.pswf_eps);
  geti("n_workers", cfg.n_workers);
  gets("out_csv", cfg.out_csv);
  gets("fig_prefix", cfg.fig_prefix);
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::vector<int> match_assignment(const std::vector<double>& truths,
                                  const std::vector<double>& estimates) {
  const int K = static_cast<int>(truths.size());
  require(static_cast<int>(estimates.size()) == K,
          "trial produced a different number of estimates");
  require(K >= 1, "empty assignment");

  // Rank pairing: sort both lists and pair by rank.  For scalar angles this
  // attains the minimum total absolute error (rearrangement inequality), and
  // unlike a bare assignment search it is canonical: when several assignments
  // tie on total |error| (generic, e.g. all errors of one sign), rank pairing
  // picks the one that also minimizes every convex error functional, so the
  // matched-error multiset is well defined.
  auto ranks = [K](const std::vector<double>& vals) {
    std::vector<int> idx(static_cast<size_t>(K));
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int a, int b) { return vals[static_cast<size_t>(a)] <
                                                vals[static_cast<size_t>(b)]; });
    return idx;
  };
  const std::vector<int> ti = ranks(truths), ei = ranks(estimates);
  std::vector<int> perm(static_cast<size_t>(K));
  for (int r = 0; r < K; ++r)
    perm[static_cast<size_t>(ti[static_cast<size_t>(r)])] = ei[static_cast<size_t>(r)];
  return perm;
}

double trial_rms_deg(const std::vector<double>& truths,
                     const std::vector<double>& estimates) {
  const auto perm = match_assignment(truths, estimates);
  double sq = 0.0;
  for (size_t i = 0; i < truths.size(); ++i) {
    const double e = truths[i] - estimates[static_cast<size_t>(perm[i])];
    sq += e * e;
  }
  return std::min(std::sqrt(sq / static_cast<double>(truths.size())), 90.0);
}

double rmse(const std::vector<double>& truths,
            const std::vector<std::vector<double>>& per_trial_estimates) {
  require(!per_trial_estimates.empty(), "no trials");
  double acc = 0.0;
  for (const auto& est : per_trial_estimates) acc += trial_rms_deg(truths, est);
  return acc / static_cast<double>(per_trial_estimates.size());
}

double success_probability(const std::vector<double>& truths,
                           const std::vector<std::vector<double>>& per_trial_estimates,
                           double margin_deg) {
  require(!per_trial_estimates.empty(), "no trials");
  int ok = 0;
  for (const auto& est : per_trial_estimates) {
    const auto perm = match_assignment(truths, est);
    bool all = true;
    for (size_t i = 0; i < truths.size(); ++i)
      if (std::abs(truths[i] - est[static_cast<size_t>(perm[i])]) >= margin_deg)
        all = false;
    ok += all ? 1 : 0;
  }
  return static_cast<double>(ok) / static_cast<double>(per_trial_estimates.size());
}

double rmse_pooled(const std::vector<double>& truths,
                   const std::vector<std::vector<double>>& per_trial_estimates) {
  require(!per_trial_estimates.empty(), "no trials");
  double sq = 0.0;
  size_t cnt = 0;
  for (const auto& est : per_trial_estimates) {
    const auto perm = match_assignment(truths, est);
    for (size_t i = 0; i < truths.size(); ++i) {
      const double e = truths[i] - est[static_cast<size_t>(perm[i])];
      sq += e * e;
      ++cnt;
    }
  }
  return std::min(std::sqrt(sq / static_cast<double>(cnt)), 90.0);
}

std::uint64_t trial_seed(std::uint64_t base, int sweep_index, int trial_index) {
  return seed_child(seed_child(base, 0x10000u + static_cast<std::uint64_t>(sweep_index)),
                    static_cast<std::uint64_t>(trial_index));
}

namespace {

struct TrialRecord {
  std::vector<double> thetas;  // empty on failure
  double seconds = 0.0;
};

}  // namespace

MetricsSummary run_sweep(const ExperimentConfig& cfg, std::ostream* log) {
  cfg.validate();
  const ArrayGeometry g =
      cfg.geometry_file.empty()
          ? random_geometry(cfg.n_sensors,
                            cfg.n_sensors * cfg.params.center_wavelength() / 2.0,
                            cfg.geometry_seed)
          : load_geometry(cfg.geometry_file);

  MetricsSummary summary;
  for (size_t si = 0; si < cfg.sweep_values.size(); ++si) {
    const double val = cfg.sweep_values[si];

    WidebandParams params = cfg.params;
    SourceScene scene = cfg.scene;
    double snr_db = cfg.snr_db;
    if (cfg.sweep_variable == "snr_db") {
      snr_db = val;
    } else if (cfg.sweep_variable == "delta_theta_deg") {
      require(!cfg.scene.thetas_deg.empty(), "separation sweep needs a base angle");
      const double base_theta = cfg.scene.thetas_deg.front();
      scene.thetas_deg = {base_theta, base_theta + val};
      if (scene.powers.size() != 2) scene.powers.clear();
    } else {  // n_bins
      params.n_bins = static_cast<int>(val);
    }
    params.validate();
    scene.validate();
    const int K = scene.count();

    const Eigen::VectorXd bins = select_bins(params);
    const Eigen::VectorXd alphas = 2.0 * bins / params.speed_mps;

    std::optional<SrwEstimator> srw;
    if (std::find(cfg.methods.begin(), cfg.methods.end(), "srw-doa") !=
        cfg.methods.end()) {
      SrwOptions sopt;
      sopt.pswf_eps = cfg.pswf_eps;
      sopt.sigma_scale = cfg.eta;
      sopt.solver.eps_primal = sopt.solver.eps_dual = sopt.solver.eps_gap =
          cfg.solver_eps;
      sopt.solver.max_iterations = cfg.max_iterations;
      srw.emplace(g, alphas, K, /*equality_data=*/false, sopt);
    }
    const bool need_time =
        std::find(cfg.methods.begin(), cfg.methods.end(), "issm") != cfg.methods.end() ||
        std::find(cfg.methods.begin(), cfg.methods.end(), "rss") != cfg.methods.end();

    // records[method][trial]
    std::vector<std::vector<TrialRecord>> records(
        cfg.methods.size(), std::vector<TrialRecord>(static_cast<size_t>(cfg.n_trials)));

    const auto run_trial = [&](int t) {
      const std::uint64_t ts = trial_seed(cfg.base_seed, static_cast<int>(si), t);
      const SynthesisResult syn = synthesize_full(g, scene, params, seed_child(ts, 1));
      const NoisySnapshot noisy = apply_noise(syn.snapshot, snr_db, seed_child(ts, 2));
      Eigen::MatrixXcd time_noisy;
      if (need_time) time_noisy = apply_time_noise(syn.time, noisy.sigma_n, seed_child(ts, 3));
      std::vector<double> initials = scene.thetas_deg;
      {
        Rng r(seed_child(ts, 4));
        for (double& th : initials) th += r.uniform(-2.0, 2.0);
      }

      for (size_t mi = 0; mi < cfg.methods.size(); ++mi) {
        const std::string& m = cfg.methods[mi];
        TrialRecord rec;
        const auto t0 = std::chrono::steady_clock::now();
        try {
          if (m == "srw-doa")
            rec.thetas = srw->estimate(noisy.snapshot.X, noisy.sigma).doa.thetas_deg;
          else if (m == "issm")
            rec.thetas = issm_music(time_noisy, g, params, K).thetas_deg;
          else
            rec.thetas = rss_estimate(time_noisy, g, params, K, initials).thetas_deg;
        } catch (const std::exception&) {
          rec.thetas.clear();  // failed trial: unsuccessful, RMS capped below
        }
        rec.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        records[mi][static_cast<size_t>(t)] = std::move(rec);
      }
    };

    if (cfg.n_workers <= 1) {
      for (int t = 0; t < cfg.n_trials; ++t) run_trial(t);
    } else {
      std::vector<std::thread> pool;
      std::atomic<int> next{0};
      for (int w = 0; w < std::min(cfg.n_workers, cfg.n_trials); ++w)
        pool.emplace_back([&] {
          for (int t = next.fetch_add(1); t < cfg.n_trials; t = next.fetch_add(1))
            run_trial(t);
        });
      for (auto& th : pool) th.join();
    }

    for (size_t mi = 0; mi < cfg.methods.size(); ++mi) {
      MetricRow row;
      row.sweep_value = val;
      row.method = cfg.methods[mi];
      row.n_trials = cfg.n_trials;
      double rms_acc = 0.0, sec_acc = 0.0;
      int succ = 0;
      for (const auto& rec : records[mi]) {
        sec_acc += rec.seconds;
        if (static_cast<int>(rec.thetas.size()) != K) {
          rms_acc += 90.0;
          continue;
        }
        rms_acc += trial_rms_deg(scene.thetas_deg, rec.thetas);
        const auto perm = match_assignment(scene.thetas_deg, rec.thetas);
        bool all = true;
        for (size_t i = 0; i < scene.thetas_deg.size(); ++i)
          if (std::abs(scene.thetas_deg[i] -
                       rec.thetas[static_cast<size_t>(perm[i])]) >= cfg.margin_deg)
            all = false;
        succ += all ? 1 : 0;
      }
      row.rmse_deg = rms_acc / cfg.n_trials;
      row.success_prob = static_cast<double>(succ) / cfg.n_trials;
      row.mean_solve_s = sec_acc / cfg.n_trials;
      summary.rows.push_back(std::move(row));
      if (log) {
        const auto& r = summary.rows.back();
        *log << cfg.sweep_variable << "=" << r.sweep_value << " " << r.method
             << ": rmse=" << r.rmse_deg << " deg, success=" << r.success_prob
             << ", mean_solve=" << r.mean_solve_s << " s\n";
      }
    }
  }
  return summary;
}

std::string summary_to_csv(const MetricsSummary& s) {
  std::string out = "sweep_value, method, n_trials, rmse_deg, success_prob, mean_solve_s\n";
  char buf[256];
  for (const auto& r : s.rows) {
    std::snprintf(buf, sizeof buf, "%.12g, %s, %d, %.12g, %.12g, %.6g\n",
                  r.sweep_value, r.method.c_str(), r.n_trials, r.rmse_deg,
                  r.success_prob, r.mean_solve_s);
    out += buf;
  }
  return out;
}

void write_csv(const MetricsSummary& s, const std::string& path) {
  std::ofstream out(path);
  require(out.good(), "cannot open output CSV: " + path);
  out << summary_to_csv(s);
  require(out.good(), "failed writing CSV: " + path);
}

void write_figure_csvs(const MetricsSummary& s, const ExperimentConfig& cfg,
                       const std::string& prefix) {
  // Figure analogs: (1,2) success/RMSE vs SNR, (3,4) vs separation,
  // (5,6) vs bin count.
  int fig_success = 1, fig_rmse = 2;
  if (cfg.sweep_variable == "delta_theta_deg") {
    fig_success = 3;
    fig_rmse = 4;
  } else if (cfg.sweep_variable == "n_bins") {
    fig_success = 5;
    fig_rmse = 6;
  }

  const auto write_one = [&](int fig, bool success) {
    std::ofstream out(prefix + "fig" + std::to_string(fig) + ".csv");
    require(out.good(), "cannot open figure CSV");
    out << cfg.sweep_variable;
    for (const auto& m : cfg.methods) out << ", " << m;
    out << "\n";
    for (double val : cfg.sweep_values) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.12g", val);
      out << buf;
      for (const auto& m : cfg.methods) {
        double cell = std::nan("");
        for (const auto& r : s.rows)
          if (r.sweep_value == val && r.method == m)
            cell = success ? r.success_prob : r.rmse_deg;
        std::snprintf(buf, sizeof buf, ", %.12g", cell);
        out << buf;
      }
      out << "\n";
    }
  };
  write_one(fig_success, true);
  write_one(fig_rmse, false);
}

}  // namespace srwdoa
