#pragma once

#include <cmath>
#include <cstdint>

#include "gprf/blocks.hpp"
#include "gprf/common.hpp"
#include "gprf/gaussian.hpp"
#include "gprf/kernels.hpp"
#include "gprf/objective.hpp"
#include "gprf/rng.hpp"

namespace gprf {

inline constexpr Index kFullGpSizeGuard = 20000;

// Exact GP on all n points; dense and deliberately size-guarded.
struct FullGp {
  KernelSpec kernel;
  Matrix X;
  Matrix Y;
  GaussianFactor factor;  // over cov_matrix(X, X, add_noise=true)
};

inline FullGp make_full_gp(const KernelSpec& kernel, Matrix X, Matrix Y) {
  if (X.rows() > kFullGpSizeGuard)
    throw SizeGuardError("full GP refused: n = " + std::to_string(X.rows()) +
                         " exceeds the dense guard of " +
                         std::to_string(kFullGpSizeGuard));
  if (X.rows() != Y.rows())
    throw ValidationError("full GP: X and Y row counts differ");
  FullGp gp;
  gp.kernel = kernel;
  gp.factor = factorize(cov_matrix(kernel, X, X, /*add_noise=*/true));
  gp.X = std::move(X);
  gp.Y = std::move(Y);
  return gp;
}

inline double full_loglik(const FullGp& gp) { return mvn_logpdf(gp.factor, gp.Y); }

// Exact marginal-likelihood gradients via the trace identity
// d log p = tr( 1/2 (sum_d a_d a_d' - D K^{-1}) dK ).
inline ObjectiveReport full_gradient(const FullGp& gp) {
  ObjectiveReport report;
  report.value = full_loglik(gp);
  report.term_count = {1, 0};
  const Matrix G = mvn_grad_wrt_cov(gp.factor, gp.Y);
  report.grad_X = Matrix::Zero(gp.X.rows(), gp.X.cols());
  add_input_gradient(gp.kernel, gp.X, G, 1.0, report.grad_X);
  const auto dK = cov_grad_hyper(gp.kernel, gp.X);
  report.grad_theta = Vector::Zero(static_cast<Index>(dK.size()));
  for (size_t h = 0; h < dK.size(); ++h)
    report.grad_theta(static_cast<Index>(h)) = G.cwiseProduct(dK[h]).sum();
  return report;
}

struct Prediction {
  Matrix mean;  // n* x D
  Matrix cov;   // n* x n*, noise-free f*
};

inline Prediction full_predict(const FullGp& gp, const Matrix& Xstar) {
  if (Xstar.cols() != gp.X.cols())
    throw ValidationError("full_predict: test point dimension mismatch");
  const Matrix Ks = cov_matrix(gp.kernel, gp.X, Xstar);    // n x n*
  const Matrix Kss = cov_matrix(gp.kernel, Xstar, Xstar);  // noise-free prior
  const Matrix A = gp.factor.solve(Ks);                    // K_y^{-1} K*
  Prediction pred;
  pred.mean = A.transpose() * gp.Y;
  pred.cov = Kss - Ks.transpose() * A;
  pred.cov = 0.5 * (pred.cov + pred.cov.transpose());
  return pred;
}

struct OuChainFixture {
  FullGp gp;
  Partition partition;
  EdgeSet edges;
};

// 1-D GP with the exponential (OU) kernel on equispaced sorted points.
// Noise-free its precision is tridiagonal, so contiguous blocks with chain
// edges form a block-tree on which the GPRF objective is exact.
inline OuChainFixture ou_chain_fixture(int n, int block_size, double ell,
                                       double sigma_n, int num_outputs = 2,
                                       std::uint64_t seed = 20150) {
  if (n < 1 || block_size < 1 || n % block_size != 0)
    throw ValidationError("ou_chain_fixture: block_size must divide n");
  KernelSpec spec = make_kernel(KernelFamily::OrnsteinUhlenbeck, 1.0, {ell},
                                sigma_n * sigma_n);
  spec.jitter = 1e-10;

  Matrix X(n, 1);
  for (int i = 0; i < n; ++i) X(i, 0) = static_cast<double>(i);

  const GaussianFactor factor = factorize(cov_matrix(spec, X, X, true));
  auto stream = RandomStream::for_stream(seed, 0);
  Matrix Z(n, num_outputs);
  for (Index c = 0; c < Z.cols(); ++c)
    for (Index r = 0; r < Z.rows(); ++r) Z(r, c) = stream.normal();
  Matrix Y = factor.chol * Z;

  OuChainFixture fx;
  std::vector<int> assignment(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) assignment[static_cast<size_t>(i)] = i / block_size;
  fx.partition = make_explicit_partition(std::move(assignment));
  std::vector<std::pair<int, int>> chain;
  for (int b = 0; b + 1 < fx.partition.num_blocks(); ++b) chain.emplace_back(b, b + 1);
  fx.edges = make_edge_set(fx.partition.num_blocks(), std::move(chain));
  fx.gp = make_full_gp(spec, std::move(X), std::move(Y));
  return fx;
}

}  // namespace gprf
