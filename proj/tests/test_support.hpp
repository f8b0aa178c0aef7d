#pragma once

// Shared fixtures and oracles for the test suite. Everything here stays
// independent of the library code paths it is used to check: finite
// differences, explicit dense inverses, and brute-force enumerations only.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "gprf/gprf.hpp"

namespace test_support {

using namespace gprf;

inline double rel_err(double actual, double expected) {
  return std::abs(actual - expected) /
         std::max({1.0, std::abs(actual), std::abs(expected)});
}

inline Matrix random_points(std::uint64_t seed, int n, int d, double side) {
  auto stream = RandomStream::for_stream(seed, 100);
  Matrix X(n, d);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < d; ++c) X(i, c) = stream.uniform(0.0, side);
  return X;
}

inline Matrix random_normal_matrix(std::uint64_t seed, int rows, int cols) {
  auto stream = RandomStream::for_stream(seed, 101);
  Matrix Z(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int c = 0; c < cols; ++c) Z(i, c) = stream.normal();
  return Z;
}

// GP draw through an explicitly built factor; used as model output data.
inline Matrix sample_outputs(const KernelSpec& kernel, const Matrix& X, int D,
                             std::uint64_t seed) {
  const GaussianFactor f = factorize(cov_matrix(kernel, X, X, true));
  return f.chol * random_normal_matrix(seed, static_cast<int>(X.rows()), D);
}

// Random instance: uniform points, round-robin blocks, Bernoulli edges.
inline GprfModel random_model(std::uint64_t seed, int n, int M,
                              double edge_prob = 0.5, int D = 3,
                              double noise_variance = 0.1) {
  auto stream = RandomStream::for_stream(seed, 102);
  KernelSpec kernel = make_kernel(KernelFamily::SquaredExponentialPlain, 1.0,
                                  {3.0}, noise_variance);
  const double side = 2.0 * std::sqrt(static_cast<double>(n));
  Matrix X(n, 2);
  for (int i = 0; i < n; ++i) {
    X(i, 0) = stream.uniform(0.0, side);
    X(i, 1) = stream.uniform(0.0, side);
  }
  std::vector<int> assignment(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) assignment[static_cast<size_t>(i)] = i % M;
  Partition partition = make_explicit_partition(std::move(assignment));
  std::vector<std::pair<int, int>> pool;
  for (int i = 0; i < M; ++i)
    for (int j = i + 1; j < M; ++j)
      if (stream.uniform() < edge_prob) pool.emplace_back(i, j);
  EdgeSet edges = make_edge_set(M, std::move(pool));
  Matrix Y = sample_outputs(kernel, X, D, seed ^ 0xABCDULL);
  return GprfModel{kernel, partition, edges, X, Y};
}

// Central finite difference of a scalar function of one scalar.
template <class F>
double central_fd(F&& f, double x0, double h = 1e-5) {
  return (f(x0 + h) - f(x0 - h)) / (2.0 * h);
}

}  // namespace test_support
