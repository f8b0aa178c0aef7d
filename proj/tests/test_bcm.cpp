#include <catch2/catch_amalgamated.hpp>

#include "test_support.hpp"

using namespace gprf;
using test_support::random_model;
using test_support::random_points;

TEST_CASE("bcm_predict") {
  SECTION("M = 1 reduces to exact GP prediction") {
    GprfModel model = random_model(81, 20, 1, 0.0);
    Matrix Xs = random_points(82, 3, 2, 2.0 * std::sqrt(20.0));
    const BcmPrediction bcm = bcm_predict(model, Xs);
    const FullGp gp = make_full_gp(model.kernel, model.X, model.Y);
    const Prediction exact = full_predict(gp, Xs);
    REQUIRE((bcm.mean - exact.mean).cwiseAbs().maxCoeff() < 1e-10);
    REQUIRE((bcm.cov - exact.cov).cwiseAbs().maxCoeff() < 1e-10);
  }
  SECTION("far test points revert to the prior") {
    GprfModel model = random_model(83, 30, 3, 1.0);
    Matrix Xs(2, 2);
    Xs << 500.0, 500.0, 503.0, 500.0;
    const BcmPrediction bcm = bcm_predict(model, Xs);
    REQUIRE(bcm.mean.cwiseAbs().maxCoeff() < 1e-6);
    REQUIRE((bcm.cov - cov_matrix(model.kernel, Xs, Xs)).cwiseAbs().maxCoeff() < 1e-6);
  }
  SECTION("combined covariance is symmetric; per-expert results are exposed") {
    GprfModel model = random_model(84, 30, 3, 1.0);
    Matrix Xs = random_points(85, 3, 2, 2.0 * std::sqrt(30.0));
    const BcmPrediction bcm = bcm_predict(model, Xs);
    REQUIRE(bcm.per_expert.size() == 3);
    REQUIRE((bcm.cov - bcm.cov.transpose()).cwiseAbs().maxCoeff() < 1e-10);
  }
  SECTION("degenerate expert posterior is surfaced with diagnostics") {
    GprfModel model = random_model(86, 12, 2, 1.0, 2, 0.0);
    model.kernel.hyperparams.noise_variance = 0.0;
    model.kernel.jitter = 0.0;
    // test point coincides with a training point of expert 0: the noise-free
    // posterior variance collapses to zero there
    Matrix Xs(1, 2);
    Xs << model.X(0, 0), model.X(0, 1);
    REQUIRE_THROWS_AS(bcm_predict(model, Xs), NumericalError);
  }
}

TEST_CASE("BCM equals the extended-field conditional") {
  // n=60, M=3, one test point: the committee combination and the
  // appended-block conditional are two very different code paths.
  for (std::uint64_t seed = 90; seed < 95; ++seed) {
    GprfModel model = random_model(seed, 60, 3, 0.4);
    auto stream = RandomStream::for_stream(seed, 3);
    const int num_test = 1 + static_cast<int>(stream.uniform() * 3);
    Matrix Xs(num_test, 2);
    for (int i = 0; i < num_test; ++i) {
      Xs(i, 0) = stream.uniform(0.0, 2.0 * std::sqrt(60.0));
      Xs(i, 1) = stream.uniform(0.0, 2.0 * std::sqrt(60.0));
    }
    const BcmPrediction bcm = bcm_predict(model, Xs);
    const Prediction cond = gprf_conditional(model, Xs);
    const double mean_scale = std::max(1.0, bcm.mean.cwiseAbs().maxCoeff());
    const double cov_scale = std::max(1.0, bcm.cov.cwiseAbs().maxCoeff());
    REQUIRE((bcm.mean - cond.mean).cwiseAbs().maxCoeff() / mean_scale < 1e-8);
    REQUIRE((bcm.cov - cond.cov).cwiseAbs().maxCoeff() / cov_scale < 1e-8);
  }
}
