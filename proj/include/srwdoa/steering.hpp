// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "srwdoa/common.hpp"

namespace srwdoa {

// Linear array: sensor offsets from the reference element, in meters.
// positions(0) == 0, strictly increasing.
struct ArrayGeometry {
  Eigen::VectorXd positions;
  int size() const { return static_cast<int>(positions.size()); }
  double aperture() const { return positions(positions.size() - 1); }
};

ArrayGeometry make_geometry(Eigen::VectorXd positions);

// Reference element at 0, last element at `aperture`, interior elements
// uniform on (0, aperture), sorted.  Degenerate draws (coincident positions)
// are rejected and redrawn.
ArrayGeometry random_geometry(int n_sensors, double aperture, std::uint64_t seed);

// One position (meters) per line; first line must be 0.
ArrayGeometry load_geometry(const std::string& path);
void save_geometry(const ArrayGeometry& g, const std::string& path);

// Sorted deduplicated union of the per-bin scaled positions {alpha_j * r_m},
// plus the (m, j) -> grid-row map that realizes the selection operator chi.
struct VirtualGrid {
  Eigen::VectorXd r;          // ascending, r(0) == 0, gaps > tol
  Eigen::MatrixXi index_map;  // M x J
  double tol = 0.0;
  int size() const { return static_cast<int>(r.size()); }
  double rmax() const { return r(r.size() - 1); }
  int sensors() const { return static_cast<int>(index_map.rows()); }
  int bins() const { return static_cast<int>(index_map.cols()); }
};

// tol < 0 selects the default 1e-9 * max scaled position.
VirtualGrid build_virtual_grid(const ArrayGeometry& g, const Eigen::VectorXd& alphas,
                               double tol = -1.0);

// Per-bin steering vector: element m = exp(-i 2 pi alpha r_m f), f = sin(theta)/2.
Eigen::VectorXcd bin_steering(const ArrayGeometry& g, double alpha, double f);

// Steering vector on the virtual grid: element q = exp(-i 2 pi r~_q f).
Eigen::VectorXcd general_steering(const VirtualGrid& grid, double f);

// Selection operator: output(m, j) = Z(index_map(m, j), j).
Eigen::MatrixXcd chi_apply(const VirtualGrid& grid, const Eigen::MatrixXcd& Z);

// Adjoint of chi_apply under <A,B> = Re trace(A^H B): scatter rows back.
Eigen::MatrixXcd chi_adjoint(const VirtualGrid& grid, const Eigen::MatrixXcd& Y);

}  // namespace srwdoa
