// SPDX-License-Identifier: Apache-2.0
#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "srwdoa/harness.hpp"
#include "srwdoa/pswf.hpp"
#include "srwdoa/recovery.hpp"
#include "srwdoa/steering.hpp"

namespace py = pybind11;
using namespace srwdoa;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Gridless super-resolution wideband DOA estimation (native core)";

  m.def("version", [] { return std::string("0.1.0"); });

  m.def(
      "pswf_basis",
      [](double c, double eps) {
        const PswfBasis b = compute_basis(c, eps);
        py::dict out;
        out["d"] = b.d;
        out["lambda"] = Eigen::VectorXcd(b.lambda);
        out["condition"] = b.phi_condition;
        return out;
      },
      py::arg("c"), py::arg("eps") = 1e-4,
      "Truncation order and kernel eigenvalues for bandwidth parameter c");

  m.def(
      "select_bins",
      [](double speed_mps, double center_hz, double bandwidth_hz, double fs_hz,
         int n_samples, int n_bins) {
        WidebandParams p;
        p.speed_mps = speed_mps;
        p.center_hz = center_hz;
        p.bandwidth_hz = bandwidth_hz;
        p.fs_hz = fs_hz;
        p.n_samples = n_samples;
        p.n_bins = n_bins;
        return select_bins(p);
      },
      py::arg("speed_mps"), py::arg("center_hz"), py::arg("bandwidth_hz"),
      py::arg("fs_hz"), py::arg("n_samples"), py::arg("n_bins"));

  m.def(
      "virtual_grid",
      [](const Eigen::VectorXd& positions, const Eigen::VectorXd& alphas) {
        const VirtualGrid g = build_virtual_grid(make_geometry(positions), alphas);
        py::dict out;
        out["r"] = Eigen::VectorXd(g.r);
        out["index_map"] = Eigen::MatrixXi(g.index_map);
        return out;
      },
      py::arg("positions"), py::arg("alphas"));

  m.def("rmse", &rmse, py::arg("truths"), py::arg("per_trial_estimates"));
  m.def("success_probability", &success_probability, py::arg("truths"),
        py::arg("per_trial_estimates"), py::arg("margin_deg"));

  m.def(
      "recover_doas",
      [](const Eigen::MatrixXcd& T, int K, double rmax, int d) {
        const DoaEstimate e = recover_doas(T, K, rmax, d);
        py::dict out;
        out["thetas_deg"] = e.thetas_deg;
        out["freqs"] = e.freqs;
        out["powers"] = e.powers;
        out["rank_warning"] = e.rank_warning;
        return out;
      },
      py::arg("T"), py::arg("K"), py::arg("rmax"), py::arg("d"));

  m.def(
      "run_config_text",
      [](const std::string& text) {
        const ExperimentConfig cfg = parse_config_text(text);
        return summary_to_csv(run_sweep(cfg));
      },
      py::arg("text"), "Run a sweep from config text; returns the metrics CSV");
}
