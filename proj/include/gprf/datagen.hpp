#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "gprf/common.hpp"
#include "gprf/full_gp.hpp"
#include "gprf/gaussian.hpp"
#include "gprf/kernels.hpp"
#include "gprf/rng.hpp"

namespace gprf {

// Reproducible synthetic problems. Stream layout (see rng.hpp): stream 0
// draws the true inputs, stream 1 the location noise, stream 2 + j output
// column j, so datasets are identical for a given seed regardless of how
// the loops are reordered.
struct SyntheticSpec {
  static KernelSpec unset_kernel() {
    KernelSpec k;
    k.hyperparams.lengthscales.clear();  // empty marks "use generator default"
    return k;
  }

  int n = 1000;
  int d = 2;
  int num_outputs = 50;
  KernelSpec kernel = unset_kernel();
  double sigma_obs = 2.0;
  std::uint64_t seed = 0;

  // Event-cluster geometry (gen_events only), in km.
  int clusters = 0;  // 0 = max(1, n / 200)
  double region_side_km = 300.0;
  double cluster_sigma_km = 30.0;
  double depth_sigma_km = 15.0;
};

struct Dataset {
  Matrix X_true;
  Matrix X_obs;
  Matrix Y;
  SyntheticSpec spec;
  std::string generator;  // "uniform" or "events"
};

inline KernelSpec default_uniform_kernel() {
  return make_kernel(KernelFamily::SquaredExponentialPlain, 1.0, {6.0}, 0.01);
}

inline KernelSpec default_events_kernel() {
  return make_kernel(KernelFamily::Matern32, 1.0, {40.0, 40.0}, 0.01,
                     {0, 0, 1});
}

namespace detail {

inline void guard_dense(int n) {
  if (n > kFullGpSizeGuard)
    throw SizeGuardError("generator refused: n = " + std::to_string(n) +
                         " exceeds the dense sampling guard of " +
                         std::to_string(kFullGpSizeGuard) +
                         " (sparse sampling is out of scope)");
  if (n < 1) throw ValidationError("generator: n must be >= 1");
}

// Y columns are iid N(0, K_y) draws through the dense factor, one RNG
// stream per column.
inline Matrix sample_outputs(const KernelSpec& kernel, const Matrix& X,
                             int num_outputs, std::uint64_t seed) {
  const GaussianFactor factor = factorize(cov_matrix(kernel, X, X, true));
  const Index n = X.rows();
  Matrix Z(n, num_outputs);
  for (Index j = 0; j < Z.cols(); ++j) {
    auto stream = RandomStream::for_stream(seed, 2 + static_cast<std::uint64_t>(j));
    for (Index i = 0; i < n; ++i) Z(i, j) = stream.normal();
  }
  return factor.chol * Z;
}

}  // namespace detail

// Uniform points on the square of side sqrt(n), observed through isotropic
// Gaussian location noise.
inline Dataset gen_uniform(SyntheticSpec spec) {
  detail::guard_dense(spec.n);
  if (spec.d != 2) throw ValidationError("gen_uniform: d must be 2");
  if (spec.kernel.hyperparams.lengthscales.empty())
    spec.kernel = default_uniform_kernel();

  const double side = std::sqrt(static_cast<double>(spec.n));
  Dataset data;
  data.generator = "uniform";

  auto x_stream = RandomStream::for_stream(spec.seed, 0);
  data.X_true.resize(spec.n, 2);
  for (int i = 0; i < spec.n; ++i) {
    data.X_true(i, 0) = x_stream.uniform(0.0, side);
    data.X_true(i, 1) = x_stream.uniform(0.0, side);
  }

  data.Y = detail::sample_outputs(spec.kernel, data.X_true, spec.num_outputs,
                                  spec.seed);

  auto noise_stream = RandomStream::for_stream(spec.seed, 1);
  data.X_obs = data.X_true;
  for (int i = 0; i < spec.n; ++i)
    for (int c = 0; c < 2; ++c)
      data.X_obs(i, c) += spec.sigma_obs * noise_stream.normal();

  data.spec = spec;
  return data;
}

// Clustered event locations (planar km coordinates plus nonnegative depth)
// with Matern-3/2 outputs; a stand-in for real catalog geometry, which is
// not bundled. Import external catalogs through the dataset CSV format.
inline Dataset gen_events(SyntheticSpec spec) {
  detail::guard_dense(spec.n);
  if (spec.d != 3) throw ValidationError("gen_events: d must be 3");
  if (spec.kernel.hyperparams.lengthscales.empty())
    spec.kernel = default_events_kernel();
  if (spec.kernel.hyperparams.lengthscales.size() != 2)
    throw ValidationError("gen_events: kernel needs {surface, depth} lengthscales");
  const int clusters = spec.clusters > 0 ? spec.clusters
                                         : std::max(1, spec.n / 200);

  Dataset data;
  data.generator = "events";

  auto x_stream = RandomStream::for_stream(spec.seed, 0);
  Matrix centers(clusters, 2);
  for (int k = 0; k < clusters; ++k) {
    centers(k, 0) = x_stream.uniform(0.0, spec.region_side_km);
    centers(k, 1) = x_stream.uniform(0.0, spec.region_side_km);
  }
  data.X_true.resize(spec.n, 3);
  for (int i = 0; i < spec.n; ++i) {
    const int k = static_cast<int>(x_stream.uniform() * clusters) % clusters;
    data.X_true(i, 0) = centers(k, 0) + spec.cluster_sigma_km * x_stream.normal();
    data.X_true(i, 1) = centers(k, 1) + spec.cluster_sigma_km * x_stream.normal();
    // reflect at the surface so depths stay nonnegative
    data.X_true(i, 2) = std::abs(spec.depth_sigma_km * x_stream.normal());
  }

  data.Y = detail::sample_outputs(spec.kernel, data.X_true, spec.num_outputs,
                                  spec.seed);

  auto noise_stream = RandomStream::for_stream(spec.seed, 1);
  data.X_obs = data.X_true;
  for (int i = 0; i < spec.n; ++i)
    for (int c = 0; c < 3; ++c)
      data.X_obs(i, c) += spec.sigma_obs * noise_stream.normal();

  data.spec = spec;
  return data;
}

}  // namespace gprf
