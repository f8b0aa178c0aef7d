#include <catch2/catch_amalgamated.hpp>

#include "test_support.hpp"

using namespace gprf;

TEST_CASE("gen_uniform") {
  SECTION("n = 1 basics") {
    SyntheticSpec spec;
    spec.n = 1;
    spec.seed = 3;
    const Dataset data = gen_uniform(spec);
    REQUIRE(data.X_true.rows() == 1);
    REQUIRE(data.X_true.minCoeff() >= 0.0);
    REQUIRE(data.X_true.maxCoeff() <= 1.0);
    REQUIRE(data.Y.cols() == 50);
  }
  SECTION("same seed reproduces the dataset bit for bit") {
    SyntheticSpec spec;
    spec.n = 150;
    spec.seed = 99;
    const Dataset a = gen_uniform(spec);
    const Dataset b = gen_uniform(spec);
    REQUIRE(a.X_true == b.X_true);
    REQUIRE(a.X_obs == b.X_obs);
    REQUIRE(a.Y == b.Y);
    spec.seed = 100;
    const Dataset c = gen_uniform(spec);
    REQUIRE(a.Y != c.Y);
  }
  SECTION("size guard") {
    SyntheticSpec spec;
    spec.n = 30000;
    REQUIRE_THROWS_AS(gen_uniform(spec), SizeGuardError);
  }
  SECTION("marginal variance and observation noise at n = 2000") {
    SyntheticSpec spec;
    spec.n = 2000;
    spec.seed = 12;
    const Dataset data = gen_uniform(spec);
    // pooled over all columns: per-column estimates fluctuate with the
    // field's effective sample size, the pooled estimate is tight
    double pooled = 0.0;
    for (Index j = 0; j < data.Y.cols(); ++j) {
      const auto col = data.Y.col(j);
      pooled += (col.array() - col.mean()).square().sum() /
                static_cast<double>(data.Y.rows() - 1);
    }
    pooled /= static_cast<double>(data.Y.cols());
    REQUIRE(pooled == Catch::Approx(1.01).epsilon(0.10));

    const double mean_offset = mean_location_error(data.X_obs, data.X_true);
    REQUIRE(mean_offset ==
            Catch::Approx(2.0 * std::sqrt(M_PI / 2.0)).epsilon(0.05));
  }
  SECTION("short-range output correlation follows the kernel") {
    SyntheticSpec spec;
    spec.n = 500;
    spec.seed = 21;
    const Dataset data = gen_uniform(spec);
    const double ell = 6.0;
    double corr_sum = 0.0;
    int pairs = 0;
    for (Index p = 0; p < data.X_true.rows() && pairs < 200; ++p)
      for (Index q = p + 1; q < data.X_true.rows() && pairs < 200; ++q) {
        if ((data.X_true.row(p) - data.X_true.row(q)).norm() > ell / 2) continue;
        const auto yp = data.Y.row(p).array() - data.Y.row(p).mean();
        const auto yq = data.Y.row(q).array() - data.Y.row(q).mean();
        corr_sum += (yp * yq).sum() /
                    std::sqrt(yp.square().sum() * yq.square().sum());
        ++pairs;
      }
    REQUIRE(pairs > 10);
    REQUIRE(corr_sum / pairs > 0.5);
  }
}

TEST_CASE("gen_events") {
  SyntheticSpec spec;
  spec.n = 200;
  spec.d = 3;
  spec.num_outputs = 50;
  spec.sigma_obs = 20.0;
  spec.seed = 31;

  SECTION("depths are nonnegative") {
    const Dataset data = gen_events(spec);
    REQUIRE(data.X_true.col(2).minCoeff() >= 0.0);
  }
  SECTION("kernel correlation at 10 lengthscales is negligible") {
    // the model-implied correlation; an empirical estimate over 50 columns
    // has sampling noise ~1/sqrt(50) and cannot certify a 0.01 bound
    const KernelSpec kernel = default_events_kernel();
    Matrix two(2, 3);
    two << 0.0, 0.0, 5.0, 400.0, 0.0, 5.0;
    const Matrix K = cov_matrix(kernel, two, two);
    REQUIRE(std::abs(K(0, 1) / K(0, 0)) < 0.01);
  }
  SECTION("seed determinism") {
    const Dataset a = gen_events(spec);
    const Dataset b = gen_events(spec);
    REQUIRE(a.X_true == b.X_true);
    REQUIRE(a.Y == b.Y);
  }
  SECTION("observation noise has the configured scale") {
    spec.n = 2000;
    spec.num_outputs = 2;  // keep the GP sample cheap
    const Dataset data = gen_events(spec);
    double sq = 0.0;
    for (Index i = 0; i < data.X_obs.rows(); ++i)
      sq += (data.X_obs.row(i) - data.X_true.row(i)).squaredNorm();
    const double per_coord = std::sqrt(sq / (3.0 * data.X_obs.rows()));
    REQUIRE(per_coord == Catch::Approx(20.0).epsilon(0.05));
  }
}
