#pragma once

#include <string>
#include <vector>

#include "gprf/common.hpp"
#include "gprf/full_gp.hpp"
#include "gprf/objective.hpp"

namespace gprf {

// Bayesian Committee Machine prediction: per-block expert posteriors
// combined in precision space,
//   Lambda = (1 - M) K**^{-1} + sum_i Lambda_i,  eta = sum_i Lambda_i mu_i.
// Extending the random field with f* as an extra block wired to every
// training block yields exactly the same predictive density; see
// gprf_conditional below for that second route.
struct BcmPrediction {
  Matrix mean;  // n* x D
  Matrix cov;   // n* x n*
  std::vector<Prediction> per_expert;
};

inline BcmPrediction bcm_predict(const GprfModel& model, const Matrix& Xstar) {
  validate_model(model);
  if (Xstar.rows() == 0) throw ValidationError("bcm_predict: no test points");
  const int M = model.partition.num_blocks();
  const Index t = Xstar.rows();

  BcmPrediction out;
  out.per_expert.reserve(static_cast<size_t>(M));

  const Matrix Kss = cov_matrix(model.kernel, Xstar, Xstar);
  Matrix prior_precision;
  try {
    prior_precision = factorize(Kss).inverse();
  } catch (const NumericalError& err) {
    throw NumericalError(std::string("bcm_predict: prior covariance at the test "
                                     "points is singular: ") + err.what());
  }

  Matrix combined_precision = (1.0 - M) * prior_precision;
  Matrix eta = Matrix::Zero(t, model.Y.cols());
  for (int b = 0; b < M; ++b) {
    const auto& idx = model.partition.blocks[static_cast<size_t>(b)];
    const FullGp expert = make_full_gp(model.kernel, rows_of(model.X, idx),
                                       rows_of(model.Y, idx));
    Prediction pred = full_predict(expert, Xstar);
    Matrix expert_precision;
    try {
      expert_precision = factorize(pred.cov).inverse();
    } catch (const NumericalError& err) {
      throw NumericalError("bcm_predict: expert " + std::to_string(b) +
                           " has a degenerate posterior covariance: " + err.what());
    }
    combined_precision += expert_precision;
    eta += expert_precision * pred.mean;
    out.per_expert.push_back(std::move(pred));
  }
  combined_precision = 0.5 * (combined_precision + combined_precision.transpose());

  Eigen::LLT<Matrix> llt(combined_precision);
  if (llt.info() != Eigen::Success) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(combined_precision);
    throw NumericalError(
        "bcm_predict: combined precision is not positive definite "
        "(min eigenvalue " + std::to_string(eig.eigenvalues().minCoeff()) +
        ", M = " + std::to_string(M) + "); the committee combination is an "
        "approximation and can break down");
  }
  out.cov = llt.solve(Matrix::Identity(t, t));
  out.cov = 0.5 * (out.cov + out.cov.transpose());
  out.mean = llt.solve(eta);
  return out;
}

// The random-field conditional p(f* | y) obtained by appending the test
// points as an extra block with an edge to every training block, assembling
// the approximate precision of the extended field, and completing the
// square. Training blocks keep their observation noise; f* is noise-free.
inline Prediction gprf_conditional(const GprfModel& model, const Matrix& Xstar) {
  validate_model(model);
  if (Xstar.rows() == 0) throw ValidationError("gprf_conditional: no test points");
  const int M = model.partition.num_blocks();
  const Index t = Xstar.rows();

  // Test-block degree is M, so its diagonal seed is (1 - M) K**^{-1}.
  const Matrix Kss = cov_matrix(model.kernel, Xstar, Xstar);
  Matrix J_star = (1.0 - M) * factorize(Kss).inverse();
  Matrix eta = Matrix::Zero(t, model.Y.cols());

  for (int b = 0; b < M; ++b) {
    const auto& idx = model.partition.blocks[static_cast<size_t>(b)];
    const Matrix Xb = rows_of(model.X, idx);
    const Matrix Yb = rows_of(model.Y, idx);
    const Index nb = Xb.rows();

    // Joint covariance of (y_b, f*): noise on the training diagonal only.
    Matrix joint(nb + t, nb + t);
    Matrix Kbb = cov_matrix(model.kernel, Xb, Xb, true);
    const Matrix Kbs = cov_matrix(model.kernel, Xb, Xstar);
    joint.topLeftCorner(nb, nb) = Kbb;
    joint.topRightCorner(nb, t) = Kbs;
    joint.bottomLeftCorner(t, nb) = Kbs.transpose();
    joint.bottomRightCorner(t, t) = Kss;

    const Matrix Q = factorize(joint).inverse();
    J_star += Q.bottomRightCorner(t, t);
    // J_{*,b} y_b enters the linear term with a minus sign.
    eta -= Q.bottomLeftCorner(t, nb) * Yb;
  }
  J_star = 0.5 * (J_star + J_star.transpose());

  Eigen::LLT<Matrix> llt(J_star);
  if (llt.info() != Eigen::Success)
    throw NumericalError("gprf_conditional: conditional precision is not "
                         "positive definite");
  Prediction pred;
  pred.cov = llt.solve(Matrix::Identity(t, t));
  pred.cov = 0.5 * (pred.cov + pred.cov.transpose());
  pred.mean = llt.solve(eta);
  return pred;
}

}  // namespace gprf
