// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "srwdoa/baselines.hpp"

using namespace srwdoa;

namespace {

struct Sim {
  ArrayGeometry g;
  WidebandParams p;
  Eigen::MatrixXcd time;
  SourceScene scene;
};

Sim make_sim(const std::vector<double>& thetas, double snr_db, std::uint64_t seed,
             int n_bins = 10) {
  Sim s{random_geometry(8, 12.0, 12345), {}, {}, {}};
  s.p.n_bins = n_bins;
  s.scene.thetas_deg = thetas;
  const SynthesisResult syn = synthesize_full(s.g, s.scene, s.p, seed);
  const NoisySnapshot noisy = apply_noise(syn.snapshot, snr_db, seed_child(seed, 9));
  s.time = apply_time_noise(syn.time, noisy.sigma_n, seed_child(seed, 10));
  return s;
}

}  // namespace

TEST_CASE("segment covariances") {
  const Sim s = make_sim({10.0}, 30.0, 4);
  const BinCovariances covs = segment_covariances(s.time, s.p, SegmentSpec{});

  REQUIRE(static_cast<int>(covs.R.size()) == s.p.n_bins);
  REQUIRE(covs.bin_hz.size() == s.p.n_bins);
  const double df_seg = s.p.fs_hz / 64.0;  // local DFT resolution
  const Eigen::VectorXd targets = select_bins(s.p);
  for (int j = 0; j < s.p.n_bins; ++j) {
    // PSD and Hermitian
    const Eigen::MatrixXcd& R = covs.R[static_cast<size_t>(j)];
    REQUIRE(R.rows() == 8);
    CHECK((R - R.adjoint()).norm() < 1e-12 * (1.0 + R.norm()));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(R);
    CHECK(es.eigenvalues().minCoeff() > -1e-12);
    // reported frequency is the local bin nearest the target
    CHECK(std::abs(covs.bin_hz(j) - targets(j)) <= df_seg / 2.0 + 1e-9);
  }

  SUBCASE("record too short for the plan") {
    WidebandParams p = s.p;
    p.n_samples = 70;  // 16 segments of 64 cannot fit
    CHECK_THROWS_AS(
        segment_covariances(Eigen::MatrixXcd::Zero(8, 70), p, SegmentSpec{}), Error);
  }
  SUBCASE("shape mismatch rejected") {
    CHECK_THROWS_AS(
        segment_covariances(Eigen::MatrixXcd::Zero(8, 100), s.p, SegmentSpec{}),
        Error);
  }
}

TEST_CASE("incoherent music baseline") {
  SUBCASE("single source at high snr") {
    const Sim s = make_sim({10.0}, 30.0, 21);
    const DoaEstimate est = issm_music(s.time, s.g, s.p, 1);
    REQUIRE(est.thetas_deg.size() == 1);
    CHECK(std::abs(est.thetas_deg[0] - 10.0) < 0.2);
  }
  SUBCASE("angles sorted and sized k") {
    const Sim s = make_sim({-20.0, 5.0, 40.0}, 20.0, 33);
    const DoaEstimate est = issm_music(s.time, s.g, s.p, 3);
    REQUIRE(est.thetas_deg.size() == 3);
    CHECK(est.thetas_deg[0] <= est.thetas_deg[1]);
    CHECK(est.thetas_deg[1] <= est.thetas_deg[2]);
  }
  SUBCASE("spectrum invariant under a global phase") {
    const Sim s = make_sim({-8.0, 25.0}, 15.0, 7);
    SpatialSpectrum a, b;
    (void)issm_music(s.time, s.g, s.p, 2, SegmentSpec{}, 0.1, &a);
    (void)issm_music((std::polar(1.0, 0.7) * s.time).eval(), s.g, s.p, 2,
                     SegmentSpec{}, 0.1, &b);
    REQUIRE(a.values.size() == b.values.size());
    CHECK((a.values - b.values).cwiseAbs().maxCoeff() <
          1e-9 * a.values.cwiseAbs().maxCoeff());
    // grid is uniform ascending and values are finite and non-negative
    for (int i = 1; i < a.grid_deg.size(); ++i)
      CHECK(a.grid_deg(i) > a.grid_deg(i - 1));
    CHECK(a.values.minCoeff() >= 0.0);
    CHECK(a.values.allFinite());
  }
  SUBCASE("insufficient segments are rejected") {
    const Sim s = make_sim({10.0}, 30.0, 21);
    SegmentSpec seg;
    seg.n_segments = 4;  // fewer than the 8 sensors
    CHECK_THROWS_AS(issm_music(s.time, s.g, s.p, 1, seg), Error);
  }
  SUBCASE("k must stay below the sensor count") {
    const Sim s = make_sim({10.0}, 30.0, 21);
    CHECK_THROWS_AS(issm_music(s.time, s.g, s.p, 8), Error);
  }
}

TEST_CASE("mirrored sources on a mirrored array resolve symmetrically") {
  // On a uniform array the response to -theta is the conjugate of the
  // response to +theta, so a balanced two-sided scene produces peaks at
  // mirrored angles; the estimates must come out (anti)symmetric.
  WidebandParams p;
  p.n_bins = 6;
  Eigen::VectorXd pos(8);
  for (int m = 0; m < 8; ++m) pos(m) = 1.5 * m;  // half-wavelength spacing
  const ArrayGeometry g = make_geometry(pos);
  SourceScene sc;
  sc.thetas_deg = {-24.0, 24.0};
  sc.powers = {1.0, 1.0};

  const SynthesisResult syn = synthesize_full(g, sc, p, 1001);
  const NoisySnapshot noisy = apply_noise(syn.snapshot, 30.0, 2002);
  const Eigen::MatrixXcd time = apply_time_noise(syn.time, noisy.sigma_n, 3003);
  const DoaEstimate est = issm_music(time, g, p, 2);
  REQUIRE(est.thetas_deg.size() == 2);
  CHECK(est.thetas_deg[0] < 0.0);
  CHECK(est.thetas_deg[1] > 0.0);
  CHECK(std::abs(est.thetas_deg[0] + est.thetas_deg[1]) < 0.2);
}

TEST_CASE("focused subspace baseline") {
  SUBCASE("true initial angles at high snr") {
    const Sim s = make_sim({-5.0, 30.0}, 30.0, 11);
    const DoaEstimate est = rss_estimate(s.time, s.g, s.p, 2, {-5.0, 30.0});
    REQUIRE(est.thetas_deg.size() == 2);
    CHECK(std::abs(est.thetas_deg[0] + 5.0) < 0.1);
    CHECK(std::abs(est.thetas_deg[1] - 30.0) < 0.1);
  }
  SUBCASE("focusing matrices are unitary") {
    const Sim s = make_sim({-5.0, 30.0}, 20.0, 13);
    std::vector<Eigen::MatrixXcd> focusing;
    (void)rss_estimate(s.time, s.g, s.p, 2, {-4.0, 31.5}, SegmentSpec{}, 0.1,
                       nullptr, &focusing);
    REQUIRE(static_cast<int>(focusing.size()) == s.p.n_bins);
    for (const auto& T : focusing) {
      const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(8, 8);
      CHECK((T.adjoint() * T - I).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
  SUBCASE("single bin needs no focusing") {
    const Sim s = make_sim({12.0}, 30.0, 17, /*n_bins=*/1);
    std::vector<Eigen::MatrixXcd> focusing;
    const DoaEstimate rss = rss_estimate(s.time, s.g, s.p, 1, {11.0},
                                         SegmentSpec{}, 0.1, nullptr, &focusing);
    REQUIRE(focusing.size() == 1);
    CHECK((focusing[0] - Eigen::MatrixXcd::Identity(8, 8)).norm() < 1e-12);
    // identical to the incoherent average, which has one term
    const DoaEstimate issm = issm_music(s.time, s.g, s.p, 1);
    CHECK(rss.thetas_deg[0] == doctest::Approx(issm.thetas_deg[0]).epsilon(1e-12));
  }
  SUBCASE("initial angle count must match k") {
    const Sim s = make_sim({-5.0, 30.0}, 20.0, 13);
    CHECK_THROWS_AS(rss_estimate(s.time, s.g, s.p, 2, {1.0}), Error);
  }
}
