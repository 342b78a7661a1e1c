#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "delaygp/covariance.hpp"
#include "delaygp/synth.hpp"
#include "test_util.hpp"

using namespace delaygp;

TEST_CASE("sampling is bitwise deterministic in the seed") {
  const ObservationGrid grid = ObservationGrid::uniform(20, 0.0, 200.0);
  const HyperParams theta{1.0, 10.0, 0.01, 10.0};
  const LightCurvePair a = sample_pair(grid, theta, 12345);
  const LightCurvePair b = sample_pair(grid, theta, 12345);
  CHECK(a.y1 == b.y1);
  CHECK(a.y2 == b.y2);
  const LightCurvePair c = sample_pair(grid, theta, 12346);
  CHECK(a.y1 != c.y1);
}

TEST_CASE("tiny noise at zero delay gives near-identical curves") {
  // sigma = 1e-6 is the smallest scale the jitter-free dense Cholesky of
  // the duplicated-block covariance resolves at double precision; below
  // that the factorisation correctly reports non-PD.
  const ObservationGrid grid = ObservationGrid::uniform(50, 0.0, 500.0);
  const HyperParams theta{1.0, 10.0, 1e-6, 0.0};
  const LightCurvePair pair = sample_pair(grid, theta, 77);
  CHECK((pair.y1 - pair.y2).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("single-point moments match the joint covariance") {
  Eigen::VectorXd t(1);
  t << 0.0;
  const ObservationGrid grid{t};
  const HyperParams theta{1.0, 10.0, 0.3, 0.0};
  const int m = 10000;
  double s1 = 0, s11 = 0, s12 = 0, s2 = 0, s22 = 0;
  for (int k = 0; k < m; ++k) {
    const LightCurvePair pair =
        sample_pair(grid, theta, derive_stream_seed(900, k));
    const double a = pair.y1[0], b = pair.y2[0];
    s1 += a;
    s2 += b;
    s11 += a * a;
    s22 += b * b;
    s12 += a * b;
  }
  const double var1 = s11 / m - (s1 / m) * (s1 / m);
  const double var2 = s22 / m - (s2 / m) * (s2 / m);
  const double cov = s12 / m - (s1 / m) * (s2 / m);
  const double a2 = theta.amplitude * theta.amplitude;
  const double s2n = theta.noise * theta.noise;
  CHECK(var1 == doctest::Approx(a2 + s2n).epsilon(0.05));
  CHECK(var2 == doctest::Approx(a2 + s2n).epsilon(0.05));
  const double corr = cov / std::sqrt(var1 * var2);
  CHECK(corr == doctest::Approx(a2 / (a2 + s2n)).epsilon(0.02));
}

TEST_CASE("empirical covariance converges to the analytic joint covariance") {
  const ObservationGrid grid = ObservationGrid::uniform(4, 0.0, 30.0);
  const HyperParams theta{1.0, 8.0, 0.1, 5.0};
  const Eigen::MatrixXd expected = build_joint_covariance(grid, theta).matrix;
  const int n = 2 * grid.n_data();
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
  const int m = 10000;
  for (int k = 0; k < m; ++k) {
    const Eigen::VectorXd y =
        sample_pair(grid, theta, derive_stream_seed(31337, k)).concatenated();
    acc += y * y.transpose();
  }
  acc /= m;
  const double rel = (acc - expected).norm() / expected.norm();
  CHECK(rel < 0.10);
}

TEST_CASE("ensembles") {
  const ObservationGrid grid = ObservationGrid::uniform(10, 0.0, 90.0);
  const HyperParams theta{1.0, 10.0, 0.01, 10.0};

  EnsembleSpec spec{theta, grid, 1, 555};
  const auto single = sample_ensemble(spec);
  REQUIRE(single.size() == 1);
  const LightCurvePair direct =
      sample_pair(grid, theta, derive_stream_seed(555, 0));
  CHECK(single[0].y1 == direct.y1);
  CHECK(single[0].y2 == direct.y2);

  spec.n_datasets = 5;
  const auto a = sample_ensemble(spec);
  spec.base_seed = 556;
  const auto b = sample_ensemble(spec);
  for (const auto& pa : a)
    for (const auto& pb : b) CHECK(pa.y1 != pb.y1);

  spec.n_datasets = 0;
  CHECK_THROWS_AS(sample_ensemble(spec), ConfigError);
}

TEST_CASE("zero noise at zero delay cannot be sampled") {
  const ObservationGrid grid = ObservationGrid::uniform(5, 0.0, 40.0);
  const HyperParams theta{1.0, 10.0, 0.0, 0.0};
  CHECK_THROWS_AS(sample_pair(grid, theta, 1), NumericalError);
}
