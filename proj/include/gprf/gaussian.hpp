#pragma once

#include <cmath>
#include <string>

#include "gprf/common.hpp"

namespace gprf {

inline constexpr double kLogTwoPi = 1.8378770664093454836;

// Cholesky factor of a covariance matrix plus its log-determinant; the unit
// every Gaussian computation in this library is built on.
struct GaussianFactor {
  Matrix chol;  // lower triangular
  double logdet = 0.0;

  Index dim() const { return chol.rows(); }

  // K^{-1} B via two triangular solves.
  Matrix solve(const Matrix& B) const {
    Matrix out = chol.triangularView<Eigen::Lower>().solve(B);
    chol.transpose().triangularView<Eigen::Upper>().solveInPlace(out);
    return out;
  }

  // L^{-1} B (half solve), so that squaredNorm gives the quadratic form.
  Matrix half_solve(const Matrix& B) const {
    return chol.triangularView<Eigen::Lower>().solve(B);
  }

  Matrix inverse() const {
    Matrix inv = solve(Matrix::Identity(dim(), dim()));
    return 0.5 * (inv + inv.transpose());  // symmetrize roundoff
  }

  Matrix reconstruct() const { return chol * chol.transpose(); }
};

// Cholesky with escalating jitter on failure: 1e-8, 1e-6, 1e-4 times the
// mean diagonal, then give up. PD failures during latent-variable
// optimization usually mean collapsed inputs, which should surface.
inline GaussianFactor factorize(const Matrix& K) {
  if (K.rows() != K.cols()) throw ValidationError("factorize: matrix not square");
  if (!K.allFinite())
    throw NumericalError("factorize: matrix contains non-finite entries");
  const double scale = K.cwiseAbs().maxCoeff();
  if ((K - K.transpose()).cwiseAbs().maxCoeff() > 1e-8 * std::max(scale, 1.0))
    throw ValidationError("factorize: matrix not symmetric");

  const double mean_diag = K.diagonal().mean();
  const double ladder[] = {0.0, 1e-8, 1e-6, 1e-4};
  for (double level : ladder) {
    Matrix trial = K;
    if (level > 0.0) trial.diagonal().array() += level * mean_diag;
    Eigen::LLT<Matrix> llt(trial);
    if (llt.info() == Eigen::Success) {
      GaussianFactor f;
      f.chol = llt.matrixL();
      f.logdet = 2.0 * f.chol.diagonal().array().log().sum();
      return f;
    }
  }
  throw NumericalError(
      "factorize: matrix not positive definite after jitter escalation "
      "(tried 1e-8, 1e-6, 1e-4 of mean diagonal)");
}

// log N(Y | 0, K) summed over the D columns of Y, constants included so
// values are comparable across block structures:
//   -(D/2) log|K| - 1/2 sum_d y_d' K^{-1} y_d - (n D / 2) log 2 pi.
inline double mvn_logpdf(const GaussianFactor& factor, const Matrix& Y) {
  if (Y.rows() != factor.dim())
    throw ValidationError("mvn_logpdf: Y row count does not match factor dim");
  const double D = static_cast<double>(Y.cols());
  const double n = static_cast<double>(factor.dim());
  const double quad = factor.half_solve(Y).squaredNorm();
  return -0.5 * D * factor.logdet - 0.5 * quad - 0.5 * n * D * kLogTwoPi;
}

// G = 1/2 (sum_d a_d a_d' - D K^{-1}) with a_d = K^{-1} y_d, so that for any
// symmetric perturbation dK, d(logpdf) = tr(G dK). Symmetric by construction.
inline Matrix mvn_grad_wrt_cov(const GaussianFactor& factor, const Matrix& Y) {
  if (Y.rows() != factor.dim())
    throw ValidationError("mvn_grad_wrt_cov: Y row count does not match factor dim");
  const double D = static_cast<double>(Y.cols());
  const Matrix alpha = factor.solve(Y);
  Matrix G = alpha * alpha.transpose() - D * factor.inverse();
  return 0.5 * G;
}

// KL(N(0, K_b) || N(0, K_p)) = 1/2 (tr(K_p^{-1} K_b) - n + log|K_p| - log|K_b|).
inline double gaussian_kl(const GaussianFactor& factor_b,
                          const GaussianFactor& factor_p) {
  if (factor_b.dim() != factor_p.dim())
    throw ValidationError("gaussian_kl: dimension mismatch");
  const double n = static_cast<double>(factor_b.dim());
  const double trace = factor_p.solve(factor_b.reconstruct()).trace();
  return 0.5 * (trace - n + factor_p.logdet - factor_b.logdet);
}

// log of the Gaussian normalizer: -1/2 log|K| - (n/2) log 2 pi. The
// y-independent part of mvn_logpdf for one output column.
inline double log_normalizer(const GaussianFactor& factor) {
  return -0.5 * factor.logdet -
         0.5 * static_cast<double>(factor.dim()) * kLogTwoPi;
}

}  // namespace gprf
