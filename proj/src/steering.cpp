// SPDX-License-Identifier: Apache-2.0
#include "srwdoa/steering.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

namespace srwdoa {

ArrayGeometry make_geometry(Eigen::VectorXd positions) {
  require(positions.size() >= 2, "geometry needs at least 2 sensors");
  require(positions(0) == 0.0, "first sensor must sit at the reference (0 m)");
  for (int i = 1; i < positions.size(); ++i)
    require(positions(i) > positions(i - 1), "sensor positions must be strictly increasing");
  return ArrayGeometry{std::move(positions)};
}

ArrayGeometry random_geometry(int n_sensors, double aperture, std::uint64_t seed) {
  require(n_sensors >= 2, "geometry needs at least 2 sensors");
  require(aperture > 0.0, "aperture must be positive");
  Rng rng(seed);
  for (int attempt = 0; attempt < 100; ++attempt) {
    Eigen::VectorXd r(n_sensors);
    r(0) = 0.0;
    r(n_sensors - 1) = aperture;
    std::vector<double> inner(static_cast<size_t>(n_sensors) - 2);
    for (auto& v : inner) v = rng.uniform(0.0, aperture);
    std::sort(inner.begin(), inner.end());
    for (int i = 0; i < n_sensors - 2; ++i) r(i + 1) = inner[static_cast<size_t>(i)];
    bool ok = true;
    for (int i = 1; i < n_sensors; ++i)
      if (!(r(i) > r(i - 1))) ok = false;
    if (ok) return ArrayGeometry{std::move(r)};
  }
  throw Error("random_geometry: could not draw distinct positions");
}

ArrayGeometry load_geometry(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open geometry file: " + path);
  std::vector<double> vals;
  std::string line;
  while (std::getline(in, line)) {
    // strip comments and blanks
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    double v;
    if (ls >> v) vals.push_back(v);
  }
  require(!vals.empty(), "geometry file is empty: " + path);
  Eigen::VectorXd r = Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<long>(vals.size()));
  return make_geometry(std::move(r));
}

void save_geometry(const ArrayGeometry& g, const std::string& path) {
  std::ofstream out(path);
  require(out.good(), "cannot write geometry file: " + path);
  for (int i = 0; i < g.size(); ++i) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g\n", g.positions(i));
    out << buf;
  }
}

VirtualGrid build_virtual_grid(const ArrayGeometry& g, const Eigen::VectorXd& alphas,
                               double tol) {
  const int M = g.size();
  const int J = static_cast<int>(alphas.size());
  require(J >= 1, "need at least one bin");
  for (int j = 0; j < J; ++j) require(alphas(j) > 0.0, "alphas must be positive");

  double vmax = 0.0;
  std::vector<std::pair<double, int>> scaled;  // (value, m*J + j)
  scaled.reserve(static_cast<size_t>(M) * J);
  for (int m = 0; m < M; ++m)
    for (int j = 0; j < J; ++j) {
      double v = alphas(j) * g.positions(m);
      vmax = std::max(vmax, v);
      scaled.emplace_back(v, m * J + j);
    }
  if (tol < 0.0) tol = 1e-9 * vmax;

  std::stable_sort(scaled.begin(), scaled.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  // cluster-merge: a value joins the current representative if within tol
  std::vector<double> reps;
  VirtualGrid grid;
  grid.index_map.resize(M, J);
  for (const auto& [v, mj] : scaled) {
    if (reps.empty() || v - reps.back() > tol) reps.push_back(v);
    grid.index_map(mj / J, mj % J) = static_cast<int>(reps.size()) - 1;
  }
  grid.r = Eigen::Map<Eigen::VectorXd>(reps.data(), static_cast<long>(reps.size()));
  grid.tol = tol;
  return grid;
}

namespace {
void check_f(double f) {
  require(std::abs(f) <= 0.5, "spatial frequency out of [-1/2, 1/2]");
}
}  // namespace

Eigen::VectorXcd bin_steering(const ArrayGeometry& g, double alpha, double f) {
  check_f(f);
  Eigen::VectorXcd a(g.size());
  for (int m = 0; m < g.size(); ++m)
    a(m) = std::polar(1.0, -2.0 * kPi * alpha * g.positions(m) * f);
  return a;
}

Eigen::VectorXcd general_steering(const VirtualGrid& grid, double f) {
  check_f(f);
  Eigen::VectorXcd a(grid.size());
  for (int q = 0; q < grid.size(); ++q)
    a(q) = std::polar(1.0, -2.0 * kPi * grid.r(q) * f);
  return a;
}

Eigen::MatrixXcd chi_apply(const VirtualGrid& grid, const Eigen::MatrixXcd& Z) {
  require(Z.rows() == grid.size() && Z.cols() == grid.bins(),
          "chi_apply: Z dimensions do not match grid");
  Eigen::MatrixXcd out(grid.sensors(), grid.bins());
  for (int m = 0; m < grid.sensors(); ++m)
    for (int j = 0; j < grid.bins(); ++j) out(m, j) = Z(grid.index_map(m, j), j);
  return out;
}

Eigen::MatrixXcd chi_adjoint(const VirtualGrid& grid, const Eigen::MatrixXcd& Y) {
  require(Y.rows() == grid.sensors() && Y.cols() == grid.bins(),
          "chi_adjoint: Y dimensions do not match grid");
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(grid.size(), grid.bins());
  for (int m = 0; m < grid.sensors(); ++m)
    for (int j = 0; j < grid.bins(); ++j) out(grid.index_map(m, j), j) += Y(m, j);
  return out;
}

}  // namespace srwdoa
