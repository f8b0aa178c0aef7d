#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "gprf/common.hpp"

namespace gprf {

enum class KernelFamily {
  SquaredExponentialHalf,   // sf2 * exp(-r^2 / (2 l^2))
  SquaredExponentialPlain,  // sf2 * exp(-(r/l)^2)
  Matern32,                 // sf2 * (1 + sqrt(3) r/l) * exp(-sqrt(3) r/l)
  OrnsteinUhlenbeck,        // sf2 * exp(-r/l); fixture kernel, Markov in 1-D
};

inline const char* kernel_family_name(KernelFamily f) {
  switch (f) {
    case KernelFamily::SquaredExponentialHalf: return "se_half";
    case KernelFamily::SquaredExponentialPlain: return "se_plain";
    case KernelFamily::Matern32: return "matern32";
    case KernelFamily::OrnsteinUhlenbeck: return "ou";
  }
  return "unknown";
}

struct Hyperparams {
  double signal_variance = 1.0;
  std::vector<double> lengthscales = {1.0};  // one entry per coordinate group
  double noise_variance = 0.0;

  // Log-space ordering used by every hyperparameter gradient:
  // [log sf2, log l_0, ..., log l_{G-1}, log sn2].
  int count() const { return 2 + static_cast<int>(lengthscales.size()); }
};

struct KernelSpec {
  KernelFamily family = KernelFamily::SquaredExponentialPlain;
  Hyperparams hyperparams;
  double jitter = 0.0;
  // coord_groups[c] = lengthscale index of coordinate c. Empty means
  // isotropic (all coordinates share lengthscales[0]).
  std::vector<int> coord_groups;

  int group_of(int c) const {
    return coord_groups.empty() ? 0 : coord_groups[static_cast<size_t>(c)];
  }
  int num_groups() const { return static_cast<int>(hyperparams.lengthscales.size()); }
};

inline void validate_kernel(const KernelSpec& spec, Index dim) {
  const auto& hp = spec.hyperparams;
  if (!(hp.signal_variance > 0.0))
    throw ValidationError("invalid hyperparameter: signal_variance must be > 0");
  // noise_variance = 0 is allowed: noise-free fixtures depend on it.
  if (!(hp.noise_variance >= 0.0))
    throw ValidationError("invalid hyperparameter: noise_variance must be >= 0");
  if (hp.lengthscales.empty())
    throw ValidationError("invalid hyperparameter: no lengthscales given");
  for (double l : hp.lengthscales)
    if (!(l > 0.0))
      throw ValidationError("invalid hyperparameter: lengthscales must be > 0");
  if (!(spec.jitter >= 0.0))
    throw ValidationError("invalid hyperparameter: jitter must be >= 0");
  if (spec.coord_groups.empty()) {
    if (hp.lengthscales.size() != 1)
      throw ValidationError(
          "invalid hyperparameter: multiple lengthscales require coord_groups");
  } else {
    if (static_cast<Index>(spec.coord_groups.size()) != dim)
      throw ValidationError("coord_groups size does not match point dimension");
    int max_group = 0;
    for (int g : spec.coord_groups) {
      if (g < 0) throw ValidationError("coord_groups entries must be >= 0");
      max_group = std::max(max_group, g);
    }
    if (max_group + 1 != static_cast<int>(hp.lengthscales.size()))
      throw ValidationError("lengthscale count does not match coord_groups");
  }
}

inline KernelSpec make_kernel(KernelFamily family, double signal_variance,
                              std::vector<double> lengthscales,
                              double noise_variance,
                              std::vector<int> coord_groups = {}) {
  KernelSpec spec;
  spec.family = family;
  spec.hyperparams.signal_variance = signal_variance;
  spec.hyperparams.lengthscales = std::move(lengthscales);
  spec.hyperparams.noise_variance = noise_variance;
  spec.jitter = 1e-8 * signal_variance;
  spec.coord_groups = std::move(coord_groups);
  return spec;
}

namespace detail {

// Profiles are written over u = sum_g (r_g / l_g)^2, the lengthscale-scaled
// squared distance, so anisotropy costs nothing extra.
inline double profile(KernelFamily f, double u) {
  switch (f) {
    case KernelFamily::SquaredExponentialHalf: return std::exp(-0.5 * u);
    case KernelFamily::SquaredExponentialPlain: return std::exp(-u);
    case KernelFamily::Matern32: {
      const double s = std::sqrt(3.0 * u);
      return (1.0 + s) * std::exp(-s);
    }
    case KernelFamily::OrnsteinUhlenbeck: return std::exp(-std::sqrt(u));
  }
  return 0.0;
}

// d profile / d u. Finite at u = 0 for the SE and Matern families; the OU
// derivative is singular there and only ever evaluated off-diagonal.
inline double profile_du(KernelFamily f, double u) {
  switch (f) {
    case KernelFamily::SquaredExponentialHalf: return -0.5 * std::exp(-0.5 * u);
    case KernelFamily::SquaredExponentialPlain: return -std::exp(-u);
    case KernelFamily::Matern32:
      return -1.5 * std::exp(-std::sqrt(3.0 * u));
    case KernelFamily::OrnsteinUhlenbeck: {
      const double s = std::sqrt(u);
      if (s < 1e-14) return 0.0;  // coincident points: no usable direction
      return -0.5 * std::exp(-s) / s;
    }
  }
  return 0.0;
}

// u_pq for one coordinate group only (distances already scaled by 1/l_g).
inline Matrix group_scaled_sq_dist(const KernelSpec& spec, const Matrix& Xa,
                                   const Matrix& Xb, int group) {
  const double l = spec.hyperparams.lengthscales[static_cast<size_t>(group)];
  const double inv_l2 = 1.0 / (l * l);
  Matrix u = Matrix::Zero(Xa.rows(), Xb.rows());
  for (int c = 0; c < Xa.cols(); ++c) {
    if (spec.group_of(c) != group) continue;
    for (Index p = 0; p < Xa.rows(); ++p)
      for (Index q = 0; q < Xb.rows(); ++q) {
        const double diff = Xa(p, c) - Xb(q, c);
        u(p, q) += diff * diff * inv_l2;
      }
  }
  return u;
}

inline Matrix scaled_sq_dist(const KernelSpec& spec, const Matrix& Xa,
                             const Matrix& Xb) {
  Matrix u = Matrix::Zero(Xa.rows(), Xb.rows());
  for (int g = 0; g < spec.num_groups(); ++g)
    u += group_scaled_sq_dist(spec, Xa, Xb, g);
  return u;
}

}  // namespace detail

// k evaluated on all pairs. add_noise adds sn2 + jitter to the diagonal and
// is only valid for self-covariances (Xa and Xb the same point set).
inline Matrix cov_matrix(const KernelSpec& spec, const Matrix& Xa,
                         const Matrix& Xb, bool add_noise = false) {
  if (Xa.cols() != Xb.cols())
    throw ValidationError("cov_matrix: point dimensions differ");
  validate_kernel(spec, Xa.cols());
  if (add_noise) {
    const bool same = Xa.data() == Xb.data() || (Xa.rows() == Xb.rows() && Xa == Xb);
    if (!same)
      throw ValidationError("cov_matrix: add_noise requires a self-covariance");
  }
  const double sf2 = spec.hyperparams.signal_variance;
  Matrix K = detail::scaled_sq_dist(spec, Xa, Xb);
  for (Index p = 0; p < K.rows(); ++p)
    for (Index q = 0; q < K.cols(); ++q)
      K(p, q) = sf2 * detail::profile(spec.family, K(p, q));
  if (add_noise)
    K.diagonal().array() += spec.hyperparams.noise_variance + spec.jitter;
  return K;
}

// dK_y / d(log theta_h) for every hyperparameter, ordered as in Hyperparams.
// The noisy self-covariance is assumed: the noise entry differentiates to
// sn2 * I. Jitter is not a hyperparameter and contributes nothing.
inline std::vector<Matrix> cov_grad_hyper(const KernelSpec& spec,
                                          const Matrix& X) {
  if (X.rows() == 0) throw ValidationError("cov_grad_hyper: empty point set");
  validate_kernel(spec, X.cols());
  const Index n = X.rows();
  const double sf2 = spec.hyperparams.signal_variance;

  std::vector<Matrix> grads;
  grads.reserve(static_cast<size_t>(spec.hyperparams.count()));

  // d/d log sf2 = the noise-free kernel matrix itself.
  Matrix u = detail::scaled_sq_dist(spec, X, X);
  Matrix Kf(n, n);
  Matrix dprof(n, n);
  for (Index p = 0; p < n; ++p)
    for (Index q = 0; q < n; ++q) {
      Kf(p, q) = sf2 * detail::profile(spec.family, u(p, q));
      dprof(p, q) = sf2 * detail::profile_du(spec.family, u(p, q));
    }
  grads.push_back(Kf);

  // d u / d log l_g = -2 u_g, so d K / d log l_g = k'(u) * (-2 u_g).
  for (int g = 0; g < spec.num_groups(); ++g) {
    Matrix ug = detail::group_scaled_sq_dist(spec, X, X, g);
    grads.push_back((dprof.array() * (-2.0 * ug.array())).matrix());
  }

  grads.push_back(spec.hyperparams.noise_variance *
                  Matrix::Identity(n, n));
  return grads;
}

// dK / dx_{i,c}: nonzero only in row i and column i, zero diagonal
// (stationary kernels).
inline Matrix cov_grad_input(const KernelSpec& spec, const Matrix& X, Index i,
                             int c) {
  validate_kernel(spec, X.cols());
  if (i < 0 || i >= X.rows()) throw ValidationError("cov_grad_input: point index out of range");
  if (c < 0 || c >= X.cols()) throw ValidationError("cov_grad_input: coordinate index out of range");
  const Index n = X.rows();
  const double sf2 = spec.hyperparams.signal_variance;
  const double l = spec.hyperparams.lengthscales[static_cast<size_t>(spec.group_of(c))];
  const double inv_l2 = 1.0 / (l * l);

  Matrix G = Matrix::Zero(n, n);
  for (Index q = 0; q < n; ++q) {
    if (q == i) continue;
    double u = 0.0;
    for (int cc = 0; cc < X.cols(); ++cc) {
      const double lg = spec.hyperparams.lengthscales[static_cast<size_t>(spec.group_of(cc))];
      const double diff = X(i, cc) - X(q, cc);
      u += diff * diff / (lg * lg);
    }
    const double dk =
        sf2 * detail::profile_du(spec.family, u) * 2.0 * (X(i, c) - X(q, c)) * inv_l2;
    G(i, q) = dk;
    G(q, i) = dk;
  }
  return G;
}

// Accumulates d(tr(G dK/dx)) over all coordinates at once:
//   out(i, c) += sum_pq G_pq dK_pq/dx_ic.
// G must be symmetric (it always is for log-density gradients). This is the
// vectorized form of contracting cov_grad_input against G for every (i, c).
inline void add_input_gradient(const KernelSpec& spec, const Matrix& X,
                               const Matrix& G, double weight, Matrix& out) {
  const Index n = X.rows();
  const double sf2 = spec.hyperparams.signal_variance;
  Matrix u = detail::scaled_sq_dist(spec, X, X);
  Matrix W(n, n);
  for (Index p = 0; p < n; ++p) {
    for (Index q = 0; q < n; ++q)
      W(p, q) = G(p, q) * sf2 * detail::profile_du(spec.family, u(p, q));
    W(p, p) = 0.0;
  }
  const Vector row_sums = W.rowwise().sum();
  for (int c = 0; c < X.cols(); ++c) {
    const double l = spec.hyperparams.lengthscales[static_cast<size_t>(spec.group_of(c))];
    const double scale = weight * 4.0 / (l * l);
    out.col(c).noalias() +=
        scale * (row_sums.cwiseProduct(X.col(c)) - W * X.col(c));
  }
}

}  // namespace gprf
