#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gprf/blocks.hpp"
#include "gprf/common.hpp"
#include "gprf/gaussian.hpp"
#include "gprf/kernels.hpp"

namespace gprf {

// A GP random field instance: local GPs on the blocks of a partition,
// coupled by pairwise potentials along the edge set. The surrogate
// log-likelihood is
//   log q(Y) = sum_i (1 - |E_i|) log p(y_i) + sum_{(i,j) in E} log p(y_i, y_j)
// where every p is a marginal of the underlying GP.
struct GprfModel {
  KernelSpec kernel;
  Partition partition;
  EdgeSet edges;
  Matrix X;  // n x d latent inputs
  Matrix Y;  // n x D outputs
};

inline void validate_model(const GprfModel& model) {
  if (model.partition.num_points() != model.X.rows())
    throw ValidationError("model: partition does not cover X");
  if (model.X.rows() != model.Y.rows())
    throw ValidationError("model: X and Y row counts differ");
  if (model.edges.num_blocks != model.partition.num_blocks())
    throw ValidationError("model: edge set block count mismatch");
  validate_kernel(model.kernel, model.X.cols());
}

struct TermCounts {
  int nodes = 0;
  int edges = 0;
};

struct ObjectiveReport {
  double value = 0.0;
  Matrix grad_X;      // n x d
  Vector grad_theta;  // per log-hyperparameter
  TermCounts term_count;
};

inline Matrix rows_of(const Matrix& A, const std::vector<int>& idx) {
  Matrix out(static_cast<Index>(idx.size()), A.cols());
  for (size_t k = 0; k < idx.size(); ++k) out.row(static_cast<Index>(k)) = A.row(idx[k]);
  return out;
}

namespace detail {

struct TermResult {
  double value = 0.0;
  Matrix grad_X;      // local rows
  Vector grad_theta;
};

inline std::vector<int> joined_indices(const Partition& p, int i, int j) {
  std::vector<int> idx = p.blocks[static_cast<size_t>(i)];
  idx.insert(idx.end(), p.blocks[static_cast<size_t>(j)].begin(),
             p.blocks[static_cast<size_t>(j)].end());
  return idx;
}

inline TermResult eval_local_term(const KernelSpec& spec, const Matrix& Xloc,
                                  const Matrix& Yloc, bool with_gradient) {
  TermResult r;
  const Matrix K = cov_matrix(spec, Xloc, Xloc, /*add_noise=*/true);
  const GaussianFactor factor = factorize(K);
  r.value = mvn_logpdf(factor, Yloc);
  if (with_gradient) {
    const Matrix G = mvn_grad_wrt_cov(factor, Yloc);
    r.grad_X = Matrix::Zero(Xloc.rows(), Xloc.cols());
    add_input_gradient(spec, Xloc, G, 1.0, r.grad_X);
    const auto dK = cov_grad_hyper(spec, Xloc);
    r.grad_theta = Vector::Zero(static_cast<Index>(dK.size()));
    for (size_t h = 0; h < dK.size(); ++h)
      r.grad_theta(static_cast<Index>(h)) = G.cwiseProduct(dK[h]).sum();
  }
  return r;
}

}  // namespace detail

// Evaluates the GPRF objective (and optionally its gradients) by fanning the
// |V| + |E| independent local terms over `workers` threads and reducing in a
// fixed canonical order: node terms by ascending block id, then edge terms in
// lexicographic order. Results are bit-identical for any worker count.
inline ObjectiveReport gprf_evaluate(const GprfModel& model, int workers = 1,
                                     bool with_gradient = true) {
  validate_model(model);
  const Partition& part = model.partition;
  const EdgeSet& edges = model.edges;
  const int M = part.num_blocks();
  const int E = edges.num_edges();

  std::vector<detail::TermResult> node_results(static_cast<size_t>(M));
  std::vector<detail::TermResult> edge_results(static_cast<size_t>(E));

  {
    EigenThreadGuard guard(workers > 1 ? 1 : Eigen::nbThreads());
    parallel_for(M + E, workers, [&](int t) {
      try {
        if (t < M) {
          const auto& idx = part.blocks[static_cast<size_t>(t)];
          node_results[static_cast<size_t>(t)] = detail::eval_local_term(
              model.kernel, rows_of(model.X, idx), rows_of(model.Y, idx),
              with_gradient);
        } else {
          const auto& [i, j] = edges.edges[static_cast<size_t>(t - M)];
          const auto idx = detail::joined_indices(part, i, j);
          edge_results[static_cast<size_t>(t - M)] = detail::eval_local_term(
              model.kernel, rows_of(model.X, idx), rows_of(model.Y, idx),
              with_gradient);
        }
      } catch (const NumericalError& err) {
        std::string where =
            t < M ? "node term (block " + std::to_string(t) + ")"
                  : "edge term (" +
                        std::to_string(edges.edges[static_cast<size_t>(t - M)].first) +
                        "," +
                        std::to_string(edges.edges[static_cast<size_t>(t - M)].second) +
                        ")";
        throw NumericalError("GPRF " + where + ": " + err.what());
      }
    });
  }

  ObjectiveReport report;
  report.term_count = {M, E};
  const int H = model.kernel.hyperparams.count();
  if (with_gradient) {
    report.grad_X = Matrix::Zero(model.X.rows(), model.X.cols());
    report.grad_theta = Vector::Zero(H);
  }

  for (int b = 0; b < M; ++b) {
    const double w = 1.0 - static_cast<double>(edges.degree[static_cast<size_t>(b)]);
    const auto& r = node_results[static_cast<size_t>(b)];
    report.value += w * r.value;
    if (with_gradient) {
      const auto& idx = part.blocks[static_cast<size_t>(b)];
      for (size_t k = 0; k < idx.size(); ++k)
        report.grad_X.row(idx[k]) += w * r.grad_X.row(static_cast<Index>(k));
      report.grad_theta += w * r.grad_theta;
    }
  }
  for (int e = 0; e < E; ++e) {
    const auto& r = edge_results[static_cast<size_t>(e)];
    report.value += r.value;
    if (with_gradient) {
      const auto& [i, j] = edges.edges[static_cast<size_t>(e)];
      const auto idx = detail::joined_indices(part, i, j);
      for (size_t k = 0; k < idx.size(); ++k)
        report.grad_X.row(idx[k]) += r.grad_X.row(static_cast<Index>(k));
      report.grad_theta += r.grad_theta;
    }
  }
  return report;
}

inline double gprf_value(const GprfModel& model, int workers = 1) {
  return gprf_evaluate(model, workers, /*with_gradient=*/false).value;
}

inline ObjectiveReport gprf_gradient(const GprfModel& model, int workers = 1) {
  return gprf_evaluate(model, workers, /*with_gradient=*/true);
}

// Inverse of the two-block joint covariance, split into its sub-blocks.
struct LocalPrecision {
  std::pair<int, int> block_pair;
  Matrix Q11, Q12, Q22;
};

inline LocalPrecision local_precision(const KernelSpec& spec, const Matrix& Xi,
                                      const Matrix& Xj,
                                      std::pair<int, int> pair = {0, 1}) {
  Matrix Xij(Xi.rows() + Xj.rows(), Xi.cols());
  Xij << Xi, Xj;
  const Matrix Q = factorize(cov_matrix(spec, Xij, Xij, true)).inverse();
  const Index ni = Xi.rows(), nj = Xj.rows();
  LocalPrecision lp;
  lp.block_pair = pair;
  lp.Q11 = Q.topLeftCorner(ni, ni);
  lp.Q12 = Q.topRightCorner(ni, nj);
  lp.Q22 = Q.bottomRightCorner(nj, nj);
  return lp;
}

// The objective in closed Gaussian form: log q(Y) = -1/2 tr(Y' J Y) + D c.
// J need not be positive definite; callers get a flag, not an error.
struct PrecisionAssembly {
  Matrix precision;  // n x n, in the original point order
  double constant = 0.0;
  bool positive_definite = true;
  double min_pivot = 0.0;  // smallest LDLT pivot, diagnostic
};

inline PrecisionAssembly assemble_precision(const GprfModel& model) {
  validate_model(model);
  const Partition& part = model.partition;
  const int M = part.num_blocks();
  const Index n = model.X.rows();

  PrecisionAssembly out;
  out.precision = Matrix::Zero(n, n);

  auto scatter = [&](const std::vector<int>& rows, const std::vector<int>& cols,
                     const Matrix& block) {
    for (size_t a = 0; a < rows.size(); ++a)
      for (size_t b = 0; b < cols.size(); ++b)
        out.precision(rows[a], cols[b]) += block(static_cast<Index>(a), static_cast<Index>(b));
  };

  // Diagonal seed (1 - |E_i|) K_ii^{-1}; each incident edge later adds its
  // Q11 / Q22, which yields K_ii^{-1} + sum_j (Q11 - K_ii^{-1}).
  for (int b = 0; b < M; ++b) {
    const auto& idx = part.blocks[static_cast<size_t>(b)];
    const Matrix Xb = rows_of(model.X, idx);
    const GaussianFactor f = factorize(cov_matrix(model.kernel, Xb, Xb, true));
    const double w = 1.0 - static_cast<double>(model.edges.degree[static_cast<size_t>(b)]);
    scatter(idx, idx, w * f.inverse());
    out.constant += w * log_normalizer(f);
  }

  for (const auto& [i, j] : model.edges.edges) {
    const auto& idx_i = part.blocks[static_cast<size_t>(i)];
    const auto& idx_j = part.blocks[static_cast<size_t>(j)];
    const auto idx = detail::joined_indices(part, i, j);
    const Matrix Xij = rows_of(model.X, idx);
    const GaussianFactor f = factorize(cov_matrix(model.kernel, Xij, Xij, true));
    const Matrix Q = f.inverse();
    const Index ni = static_cast<Index>(idx_i.size());
    const Index nj = static_cast<Index>(idx_j.size());
    scatter(idx_i, idx_i, Q.topLeftCorner(ni, ni));
    scatter(idx_j, idx_j, Q.bottomRightCorner(nj, nj));
    scatter(idx_i, idx_j, Q.topRightCorner(ni, nj));
    scatter(idx_j, idx_i, Q.bottomLeftCorner(nj, ni));
    out.constant += log_normalizer(f);
  }

  Eigen::LDLT<Matrix> ldlt(out.precision);
  out.min_pivot = ldlt.vectorD().minCoeff();
  out.positive_definite =
      ldlt.info() == Eigen::Success && out.min_pivot > 0.0;
  return out;
}

// Bethe free energy of the GPRF potentials at Gaussian pseudomarginals:
// with b set to the true GP marginals (b_cov_scale = 1) it collapses to
// sum_i KL[b_i || p_i] + sum_(ij) KL[b_ij || p_ij] = 0.
struct BetheReport {
  double free_energy = 0.0;
  std::vector<double> kl_terms;  // nodes in block order, then edges
};

inline BetheReport bethe_check(const GprfModel& model, double b_cov_scale = 1.0) {
  validate_model(model);
  BetheReport report;
  auto kl_of = [&](const std::vector<int>& idx) {
    const Matrix Xloc = rows_of(model.X, idx);
    const Matrix Kp = cov_matrix(model.kernel, Xloc, Xloc, true);
    const GaussianFactor p = factorize(Kp);
    // b is factored from the reconstructed covariance so the two routes stay
    // numerically independent.
    const GaussianFactor b = factorize(b_cov_scale * p.reconstruct());
    return gaussian_kl(b, p);
  };
  for (int i = 0; i < model.partition.num_blocks(); ++i)
    report.kl_terms.push_back(kl_of(model.partition.blocks[static_cast<size_t>(i)]));
  for (const auto& [i, j] : model.edges.edges)
    report.kl_terms.push_back(kl_of(detail::joined_indices(model.partition, i, j)));
  for (double kl : report.kl_terms) report.free_energy += kl;
  return report;
}

}  // namespace gprf
