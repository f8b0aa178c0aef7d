#include <catch2/catch_amalgamated.hpp>

#include <chrono>

#include "test_support.hpp"

using namespace gprf;
using test_support::central_fd;
using test_support::random_model;
using test_support::rel_err;

namespace {

GprfModel with_edges(GprfModel model, EdgeSet edges) {
  model.edges = std::move(edges);
  return model;
}

double full_loglik_of(const GprfModel& model) {
  const GaussianFactor f =
      factorize(cov_matrix(model.kernel, model.X, model.X, true));
  return mvn_logpdf(f, model.Y);
}

}  // namespace

TEST_CASE("gprf_value degenerate identities") {
  SECTION("single block, no edges, equals the full GP") {
    GprfModel model = random_model(1, 25, 1, 0.0);
    REQUIRE(std::abs(gprf_value(model) - full_loglik_of(model)) < 1e-9);
  }
  SECTION("two blocks with the complete graph equal the full GP") {
    GprfModel model = random_model(2, 30, 2, 0.0);
    model.edges = edges_complete(2);
    const double v = gprf_value(model);
    REQUIRE(std::abs(v - full_loglik_of(model)) <
            1e-9 * std::max(1.0, std::abs(v)));
  }
  SECTION("empty edge set is exactly the sum of local likelihoods") {
    GprfModel model = random_model(3, 40, 5, 0.0);
    double expected = 0.0;
    for (const auto& idx : model.partition.blocks) {
      const Matrix Xb = rows_of(model.X, idx);
      const Matrix Yb = rows_of(model.Y, idx);
      expected += mvn_logpdf(factorize(cov_matrix(model.kernel, Xb, Xb, true)), Yb);
    }
    REQUIRE(gprf_value(model) == expected);  // same terms, same order: exact
  }
}

TEST_CASE("gprf_gradient") {
  SECTION("single block gradient equals the full-GP gradient") {
    GprfModel model = random_model(4, 20, 1, 0.0);
    const ObjectiveReport rep = gprf_gradient(model);
    const FullGp gp = make_full_gp(model.kernel, model.X, model.Y);
    const ObjectiveReport full = full_gradient(gp);
    REQUIRE((rep.grad_X - full.grad_X).cwiseAbs().maxCoeff() < 1e-10);
    REQUIRE((rep.grad_theta - full.grad_theta).cwiseAbs().maxCoeff() < 1e-10);
  }
  SECTION("input gradients match finite differences on a grid-edged model") {
    // n = 40 points in 4 spatial blocks with 8-neighbor edges
    KernelSpec kernel = make_kernel(KernelFamily::SquaredExponentialPlain, 1.0,
                                    {2.5}, 0.1);
    const Matrix X = test_support::random_points(5, 40, 2, 12.0);
    const Partition partition = grid_partition(X, 2, Rect::of(X));
    const EdgeSet edges = edges_grid_neighbors(partition);
    const Matrix Y = test_support::sample_outputs(kernel, X, 3, 6);
    GprfModel model{kernel, partition, edges, X, Y};

    const ObjectiveReport rep = gprf_gradient(model);
    REQUIRE(rep.term_count.nodes == partition.num_blocks());
    REQUIRE(rep.term_count.edges == edges.num_edges());
    auto stream = RandomStream::for_stream(7, 0);
    for (int t = 0; t < 12; ++t) {
      const Index i = static_cast<Index>(stream.uniform() * 40);
      const Index c = static_cast<Index>(stream.uniform() * 2);
      const double fd = central_fd(
          [&](double x) {
            GprfModel m = model;
            m.X(i, c) = x;
            return gprf_value(m);
          },
          X(i, c));
      REQUIRE(rel_err(rep.grad_X(i, c), fd) < 1e-4);
    }
  }
  SECTION("hyperparameter gradients match finite differences") {
    GprfModel model = random_model(8, 30, 3, 0.7);
    const ObjectiveReport rep = gprf_gradient(model);
    const auto& hp = model.kernel.hyperparams;
    const double logs[] = {std::log(hp.signal_variance),
                           std::log(hp.lengthscales[0]),
                           std::log(hp.noise_variance)};
    for (int h = 0; h < 3; ++h) {
      const double fd = central_fd(
          [&](double log_th) {
            GprfModel m = model;
            auto& mh = m.kernel.hyperparams;
            if (h == 0) mh.signal_variance = std::exp(log_th);
            else if (h == 1) mh.lengthscales[0] = std::exp(log_th);
            else mh.noise_variance = std::exp(log_th);
            return gprf_value(m);
          },
          logs[h]);
      REQUIRE(rel_err(rep.grad_theta(h), fd) < 1e-4);
    }
  }
  SECTION("mirror-image configuration gives mirrored gradients") {
    KernelSpec kernel = make_kernel(KernelFamily::SquaredExponentialPlain, 1.0,
                                    {1.5}, 0.05);
    // two blocks reflected through x = 0, identical outputs
    Matrix X(6, 2);
    X << -3.0, 0.0, -2.0, 1.0, -1.5, -0.5, 3.0, 0.0, 2.0, 1.0, 1.5, -0.5;
    Matrix Y(6, 2);
    Y << 0.7, -0.2, -0.3, 0.4, 0.1, 0.9, 0.7, -0.2, -0.3, 0.4, 0.1, 0.9;
    const Partition partition = make_explicit_partition({0, 0, 0, 1, 1, 1});
    GprfModel model{kernel, partition, edges_complete(2), X, Y};
    const ObjectiveReport rep = gprf_gradient(model);
    for (int k = 0; k < 3; ++k) {
      REQUIRE(rep.grad_X(k, 0) == Catch::Approx(-rep.grad_X(k + 3, 0)).margin(1e-10));
      REQUIRE(rep.grad_X(k, 1) == Catch::Approx(rep.grad_X(k + 3, 1)).margin(1e-10));
    }
  }
  SECTION("evaluation is deterministic and worker-count independent") {
    GprfModel model = random_model(9, 60, 5, 0.5);
    const ObjectiveReport a = gprf_gradient(model, 1);
    const ObjectiveReport b = gprf_gradient(model, 1);
    const ObjectiveReport c = gprf_gradient(model, 4);
    REQUIRE(a.value == b.value);
    REQUIRE(a.value == c.value);
    REQUIRE(a.grad_X == b.grad_X);
    REQUIRE(a.grad_X == c.grad_X);
    REQUIRE(a.grad_theta == c.grad_theta);
  }
}

TEST_CASE("local_precision inverts the joint covariance") {
  GprfModel model = random_model(10, 24, 3, 1.0);
  const auto& blocks = model.partition.blocks;
  const Matrix Xi = rows_of(model.X, blocks[0]);
  const Matrix Xj = rows_of(model.X, blocks[1]);
  const LocalPrecision lp = local_precision(model.kernel, Xi, Xj, {0, 1});
  Matrix Xij(Xi.rows() + Xj.rows(), 2);
  Xij << Xi, Xj;
  const Matrix joint = cov_matrix(model.kernel, Xij, Xij, true);
  Matrix Q(joint.rows(), joint.cols());
  Q.topLeftCorner(Xi.rows(), Xi.rows()) = lp.Q11;
  Q.topRightCorner(Xi.rows(), Xj.rows()) = lp.Q12;
  Q.bottomLeftCorner(Xj.rows(), Xi.rows()) = lp.Q12.transpose();
  Q.bottomRightCorner(Xj.rows(), Xj.rows()) = lp.Q22;
  const Matrix eye = joint * Q;
  REQUIRE((eye - Matrix::Identity(eye.rows(), eye.cols())).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("assemble_precision") {
  SECTION("single block: precision is the inverse full covariance") {
    GprfModel model = random_model(11, 18, 1, 0.0);
    const PrecisionAssembly pa = assemble_precision(model);
    const Matrix Kinv =
        factorize(cov_matrix(model.kernel, model.X, model.X, true)).inverse();
    REQUIRE((pa.precision - Kinv).cwiseAbs().maxCoeff() < 1e-8);
    REQUIRE(pa.positive_definite);
  }
  SECTION("two blocks, complete graph: diagonal corrections cancel") {
    GprfModel model = random_model(12, 22, 2, 0.0);
    model.edges = edges_complete(2);
    const PrecisionAssembly pa = assemble_precision(model);
    // full joint precision, permuted to block order
    std::vector<int> order = model.partition.blocks[0];
    order.insert(order.end(), model.partition.blocks[1].begin(),
                 model.partition.blocks[1].end());
    const Matrix Xp = rows_of(model.X, order);
    const Matrix Jfull = factorize(cov_matrix(model.kernel, Xp, Xp, true)).inverse();
    Matrix Jgot(22, 22);
    for (int a = 0; a < 22; ++a)
      for (int b = 0; b < 22; ++b)
        Jgot(a, b) = pa.precision(order[static_cast<size_t>(a)],
                                  order[static_cast<size_t>(b)]);
    REQUIRE((Jgot - Jfull).cwiseAbs().maxCoeff() < 1e-8);
  }
  SECTION("quadratic-form identity against fresh output draws") {
    GprfModel model = random_model(13, 36, 4, 0.6);
    const PrecisionAssembly pa = assemble_precision(model);
    for (std::uint64_t s = 0; s < 10; ++s) {
      GprfModel probe = model;
      probe.Y = test_support::random_normal_matrix(200 + s, 36, 2);
      const double direct = gprf_value(probe);
      const double via_precision =
          -0.5 * (probe.Y.transpose() * pa.precision * probe.Y).trace() +
          static_cast<double>(probe.Y.cols()) * pa.constant;
      REQUIRE(std::abs(via_precision - direct) <=
              1e-8 * std::max(1.0, std::abs(direct)));
    }
  }
}

TEST_CASE("bethe_check") {
  SECTION("true marginals give zero free energy and zero KL terms") {
    GprfModel model = random_model(14, 30, 4, 0.5);
    const BetheReport rep = bethe_check(model);
    REQUIRE(std::abs(rep.free_energy) <= 1e-9);
    REQUIRE(rep.kl_terms.size() ==
            static_cast<size_t>(model.partition.num_blocks() + model.edges.num_edges()));
    for (double kl : rep.kl_terms) REQUIRE(std::abs(kl) <= 1e-10);
  }
  SECTION("perturbed pseudomarginals give positive free energy") {
    GprfModel model = random_model(15, 30, 4, 0.5);
    const BetheReport rep = bethe_check(model, 1.1);
    REQUIRE(rep.free_energy > 0.0);
  }
  SECTION("single block, no edges: one zero KL term") {
    GprfModel model = random_model(16, 12, 1, 0.0);
    const BetheReport rep = bethe_check(model);
    REQUIRE(rep.kl_terms.size() == 1);
    REQUIRE(std::abs(rep.kl_terms[0]) <= 1e-10);
  }
}

TEST_CASE("edge term cost scales linearly in the number of edges") {
  // coarse wall-time check: doubling |E| at most 2.5x the edge-term time
  GprfModel base = random_model(17, 600, 6, 0.0, 10);
  const auto all = edges_complete(6).edges;  // 15 edges
  const EdgeSet e1 = make_edge_set(6, {all.begin(), all.begin() + 7});
  const EdgeSet e2 = make_edge_set(6, {all.begin(), all.begin() + 14});

  auto time_of = [&](const EdgeSet& e) {
    const GprfModel m = with_edges(base, e);
    double best = std::numeric_limits<double>::infinity();
    for (int rep = 0; rep < 5; ++rep) {
      const auto t0 = std::chrono::steady_clock::now();
      gprf_value(m);
      const auto t1 = std::chrono::steady_clock::now();
      best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    return best;
  };
  const double nodes_only = time_of(edges_empty(6));
  const double half = time_of(e1);
  const double full = time_of(e2);
  REQUIRE(full - nodes_only <= 2.5 * std::max(half - nodes_only, 1e-4));
}

TEST_CASE("factorization failure reports the offending term") {
  GprfModel model = random_model(18, 12, 3, 1.0, 2);
  model.X(0, 0) = std::numeric_limits<double>::quiet_NaN();  // degenerate input
  bool threw = false;
  try {
    gprf_value(model);
  } catch (const NumericalError& e) {
    threw = true;
    const std::string what = e.what();
    REQUIRE(what.find("GPRF node term (block 0)") != std::string::npos);
  }
  REQUIRE(threw);
}
