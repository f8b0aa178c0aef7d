#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace gprf {

// Datasets must be reproducible bit-for-bit across platforms and
// implementations, so nothing here goes through std::*_distribution
// (whose outputs are implementation-defined). Uniforms are the top 53
// bits of mt19937_64 output, normals come from the basic Box-Muller
// transform. Identified in dataset sidecars as kGeneratorId.

inline constexpr const char* kGeneratorId = "mt19937_64/boxmuller-v1";

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Stream k of a seeded generator family. Streams: 0 = inputs X,
// 1 = observation noise, 2 + j = output column j.
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed + stream * 0x9E3779B97F4A7C15ULL);
}

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  static RandomStream for_stream(std::uint64_t seed, std::uint64_t stream) {
    return RandomStream(stream_seed(seed, stream));
  }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; consumes exactly two uniforms.
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace gprf
