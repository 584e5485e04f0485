// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "srwdoa/estimator.hpp"

namespace srwdoa {

// Monte Carlo experiment configuration.  File dialect: "key = value" lines,
// extending the scenario keys with
//   sweep_variable (snr_db | delta_theta_deg | n_bins), sweep_values (comma
//   list), methods (comma list of srw-doa | issm | rss), n_trials, base_seed,
//   margin_deg, snr_db, geometry_file | n_sensors + geometry_seed,
//   out_csv, fig_prefix, eta, solver_eps, max_iterations.
struct ExperimentConfig {
  WidebandParams params;
  SourceScene scene;
  std::string geometry_file;      // empty -> random via n_sensors/geometry_seed
  int n_sensors = 8;
  std::uint64_t geometry_seed = 12345;

  std::vector<std::string> methods{"srw-doa"};
  std::string sweep_variable = "snr_db";
  std::vector<double> sweep_values{10.0};
  int n_trials = 20;
  std::uint64_t base_seed = 1;
  double margin_deg = 5.0;
  double snr_db = 10.0;           // used when not the sweep variable
  double eta = 1.0;
  double solver_eps = 3e-5;
  int max_iterations = 50000;
  double pswf_eps = 1e-4;
  int n_workers = 1;              // trial-level thread pool size
  std::string out_csv = "metrics.csv";
  std::string fig_prefix;         // empty -> no figure CSVs

  void validate() const;
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

struct MetricRow {
  double sweep_value = 0.0;
  std::string method;
  int n_trials = 0;
  double rmse_deg = 0.0;
  double success_prob = 0.0;
  double mean_solve_s = 0.0;
};

struct MetricsSummary {
  std::vector<MetricRow> rows;
};

// Paper-style metrics.  Per trial: match estimates to truths by the minimum
// total-absolute-error assignment, form the per-trial RMS error (capped at
// 90 deg), then average RMS values across trials.  Success: every matched
// error below margin.
std::vector<int> match_assignment(const std::vector<double>& truths,
                                  const std::vector<double>& estimates);
double trial_rms_deg(const std::vector<double>& truths,
                     const std::vector<double>& estimates);
double rmse(const std::vector<double>& truths,
            const std::vector<std::vector<double>>& per_trial_estimates);
double success_probability(const std::vector<double>& truths,
                           const std::vector<std::vector<double>>& per_trial_estimates,
                           double margin_deg);

// Pooled-variance variant (root of the pooled mean square), kept for
// sensitivity checks; not used in the reported CSVs.
double rmse_pooled(const std::vector<double>& truths,
                   const std::vector<std::vector<double>>& per_trial_estimates);

std::uint64_t trial_seed(std::uint64_t base, int sweep_index, int trial_index);

MetricsSummary run_sweep(const ExperimentConfig& cfg, std::ostream* log = nullptr);

// Exact header: sweep_value, method, n_trials, rmse_deg, success_prob, mean_solve_s
std::string summary_to_csv(const MetricsSummary& s);
void write_csv(const MetricsSummary& s, const std::string& path);
// One file per figure analog: success and RMSE curves for the swept variable.
void write_figure_csvs(const MetricsSummary& s, const ExperimentConfig& cfg,
                       const std::string& prefix);

}  // namespace srwdoa
