// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cstdio>

#include "srwdoa/common.hpp"
#include "srwdoa/steering.hpp"

using namespace srwdoa;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

}  // namespace

TEST_CASE("geometry validation") {
  CHECK_THROWS_AS(make_geometry(vec({1.0, 2.0})), Error);       // must start at 0
  CHECK_THROWS_AS(make_geometry(vec({0.0, 2.0, 2.0})), Error);  // strictly increasing
  CHECK_THROWS_AS(make_geometry(vec({0.0})), Error);            // at least two sensors
  const ArrayGeometry g = make_geometry(vec({0.0, 0.5, 2.0}));
  CHECK(g.size() == 3);
  CHECK(g.aperture() == doctest::Approx(2.0));
}

TEST_CASE("random geometry shape and determinism") {
  const ArrayGeometry a = random_geometry(8, 12.0, 42);
  CHECK(a.size() == 8);
  CHECK(a.positions(0) == 0.0);
  CHECK(a.positions(7) == doctest::Approx(12.0));
  for (int m = 1; m < 8; ++m) CHECK(a.positions(m) > a.positions(m - 1));
  const ArrayGeometry b = random_geometry(8, 12.0, 42);
  CHECK((a.positions - b.positions).norm() == 0.0);
  const ArrayGeometry c = random_geometry(8, 12.0, 43);
  CHECK((a.positions - c.positions).norm() > 0.0);
}

TEST_CASE("geometry file round trip") {
  const ArrayGeometry g = random_geometry(5, 7.5, 7);
  const std::string path = "geom_roundtrip.txt";
  save_geometry(g, path);
  const ArrayGeometry back = load_geometry(path);
  CHECK((g.positions - back.positions).cwiseAbs().maxCoeff() < 1e-12);
  std::remove(path.c_str());
}

TEST_CASE("bin steering values") {
  const ArrayGeometry g = make_geometry(vec({0.0, 1.0}));

  SUBCASE("frequency zero gives the all-ones vector") {
    const Eigen::VectorXcd a = bin_steering(g, 1.7, 0.0);
    CHECK((a - Eigen::VectorXcd::Ones(2)).norm() < 1e-15);
  }
  SUBCASE("scaled position 1 at f = 1/4 gives -i") {
    const Eigen::VectorXcd a = bin_steering(g, 1.0, 0.25);
    CHECK(std::abs(a(1) - cxd(0.0, -1.0)) < 1e-15);
  }
  SUBCASE("unit modulus entries") {
    const Eigen::VectorXcd a = bin_steering(g, 2.3, 0.41);
    for (int m = 0; m < 2; ++m) CHECK(std::abs(std::abs(a(m)) - 1.0) < 1e-15);
  }
  SUBCASE("frequency outside [-1/2, 1/2] rejected") {
    CHECK_THROWS_AS(bin_steering(g, 1.0, 0.51), Error);
    CHECK_NOTHROW(bin_steering(g, 1.0, 0.5));  // closed boundary
    CHECK_NOTHROW(bin_steering(g, 1.0, -0.5));
  }
}

TEST_CASE("virtual grid dedup example") {
  const ArrayGeometry g = make_geometry(vec({0.0, 1.0, 2.0}));
  const VirtualGrid grid = build_virtual_grid(g, vec({1.0, 2.0}));

  // {0,1,2} u {0,2,4} -> [0,1,2,4]
  REQUIRE(grid.size() == 4);
  CHECK((grid.r - vec({0.0, 1.0, 2.0, 4.0})).cwiseAbs().maxCoeff() < 1e-12);

  // second column reads grid rows {0, 2, 3}
  CHECK(grid.index_map(0, 1) == 0);
  CHECK(grid.index_map(1, 1) == 2);
  CHECK(grid.index_map(2, 1) == 3);

  // index map realizes alpha_j * r_m exactly
  for (int m = 0; m < 3; ++m)
    for (int j = 0; j < 2; ++j) {
      const double alpha = j == 0 ? 1.0 : 2.0;
      CHECK(std::abs(alpha * g.positions(m) - grid.r(grid.index_map(m, j))) <=
            grid.tol);
    }
}

TEST_CASE("virtual grid structure") {
  const ArrayGeometry g = random_geometry(6, 9.0, 99);

  SUBCASE("single bin with alpha 1 reproduces the physical array") {
    const VirtualGrid grid = build_virtual_grid(g, vec({1.0}));
    CHECK(grid.size() == g.size());
    CHECK((grid.r - g.positions).cwiseAbs().maxCoeff() < 1e-12);
    for (int m = 0; m < g.size(); ++m) CHECK(grid.index_map(m, 0) == m);
  }
  SUBCASE("size bounds, zero head, strict gaps") {
    const Eigen::VectorXd alphas = vec({0.7, 1.1, 1.3});
    const VirtualGrid grid = build_virtual_grid(g, alphas);
    CHECK(grid.r(0) == 0.0);
    CHECK(grid.size() >= g.size());
    CHECK(grid.size() <= g.size() * 3);
    for (int q = 1; q < grid.size(); ++q) CHECK(grid.r(q) - grid.r(q - 1) > grid.tol);
    CHECK(grid.sensors() == g.size());
    CHECK(grid.bins() == 3);
  }
}

TEST_CASE("general steering and the selection identity") {
  const ArrayGeometry g = make_geometry(vec({0.0, 1.0, 2.0}));
  const Eigen::VectorXd alphas = vec({1.0, 2.0});
  const VirtualGrid grid = build_virtual_grid(g, alphas);

  SUBCASE("f = 0 gives ones") {
    CHECK((general_steering(grid, 0.0) - Eigen::VectorXcd::Ones(4)).norm() < 1e-15);
  }
  SUBCASE("grid [0,1,2,4] at f = 1/4 gives [1, -i, -1, 1]") {
    const Eigen::VectorXcd a = general_steering(grid, 0.25);
    CHECK(std::abs(a(0) - cxd(1.0, 0.0)) < 1e-14);
    CHECK(std::abs(a(1) - cxd(0.0, -1.0)) < 1e-14);
    CHECK(std::abs(a(2) - cxd(-1.0, 0.0)) < 1e-14);
    CHECK(std::abs(a(3) - cxd(1.0, 0.0)) < 1e-14);
  }
  SUBCASE("rows selected by the index map reproduce bin steering") {
    for (double f : {-0.37, 0.02, 0.44}) {
      const Eigen::VectorXcd big = general_steering(grid, f);
      for (int j = 0; j < 2; ++j) {
        const Eigen::VectorXcd small = bin_steering(g, alphas(j), f);
        for (int m = 0; m < 3; ++m)
          CHECK(std::abs(big(grid.index_map(m, j)) - small(m)) < 1e-12);
      }
    }
  }
  SUBCASE("frequency range enforced") {
    CHECK_THROWS_AS(general_steering(grid, 0.6), Error);
  }
}

TEST_CASE("selection operator and its adjoint") {
  Rng rng(2024);
  const ArrayGeometry g = random_geometry(5, 6.0, 21);
  const Eigen::VectorXd alphas = vec({0.9, 1.4, 2.2});
  const VirtualGrid grid = build_virtual_grid(g, alphas);
  const int M = g.size(), J = 3, Mt = grid.size();

  SUBCASE("steering columns pass through the selection") {
    const double f = 0.31;
    Eigen::MatrixXcd Z(Mt, J);
    for (int j = 0; j < J; ++j) Z.col(j) = general_steering(grid, f);
    const Eigen::MatrixXcd X = chi_apply(grid, Z);
    for (int j = 0; j < J; ++j)
      CHECK((X.col(j) - bin_steering(g, alphas(j), f)).norm() < 1e-12);
  }
  SUBCASE("adjoint identity and non-expansiveness") {
    for (int t = 0; t < 50; ++t) {
      Eigen::MatrixXcd Z(Mt, J), Y(M, J);
      for (int q = 0; q < Mt; ++q)
        for (int j = 0; j < J; ++j) Z(q, j) = rng.cnormal();
      for (int m = 0; m < M; ++m)
        for (int j = 0; j < J; ++j) Y(m, j) = rng.cnormal();
      const cxd lhs = (chi_apply(grid, Z).conjugate().cwiseProduct(Y)).sum();
      const cxd rhs = (Z.conjugate().cwiseProduct(chi_adjoint(grid, Y))).sum();
      CHECK(std::abs(lhs - rhs) < 1e-12);
      CHECK(chi_apply(grid, Z).norm() <= Z.norm() + 1e-12);
    }
  }
  SUBCASE("apply after adjoint is the identity on data space") {
    Eigen::MatrixXcd Y(M, J);
    for (int m = 0; m < M; ++m)
      for (int j = 0; j < J; ++j) Y(m, j) = rng.cnormal();
    const Eigen::MatrixXcd back = chi_apply(grid, chi_adjoint(grid, Y));
    CHECK((back - Y).norm() < 1e-14);
  }
  SUBCASE("adjoint of zero is zero") {
    const Eigen::MatrixXcd zero = Eigen::MatrixXcd::Zero(M, J);
    CHECK(chi_adjoint(grid, zero).norm() == 0.0);
  }
  SUBCASE("dimension mismatch rejected") {
    CHECK_THROWS_AS(chi_apply(grid, Eigen::MatrixXcd::Zero(Mt + 1, J)), Error);
    CHECK_THROWS_AS(chi_adjoint(grid, Eigen::MatrixXcd::Zero(M + 1, J)), Error);
  }
}

TEST_CASE("single-bin identity selection") {
  const ArrayGeometry g = make_geometry(vec({0.0, 0.7, 1.9, 3.2}));
  const VirtualGrid grid = build_virtual_grid(g, vec({1.0}));
  Rng rng(5);
  Eigen::MatrixXcd Z(4, 1);
  for (int q = 0; q < 4; ++q) Z(q, 0) = rng.cnormal();
  CHECK((chi_apply(grid, Z) - Z).norm() == 0.0);
  CHECK((chi_adjoint(grid, Z) - Z).norm() == 0.0);
}
