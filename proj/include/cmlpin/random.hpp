#pragma once

#include <cstdint>
#include <random>

#include "cmlpin/linalg.hpp"

namespace cmlpin {

/// SplitMix64 finalizer; used to derive independent stream seeds from a
/// (seed, stream index) pair.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632BE59BD9B4E019ULL));
}

/// Portable Gaussian stream.
///
/// std::mt19937_64 has a fully specified output sequence; the standard
/// normal distributions do not, so normals are drawn with an explicit
/// Box-Muller transform on 53-bit uniforms. Identical seeds give identical
/// draws on every conforming platform.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed, std::uint64_t stream = 0) : engine_(stream_seed(seed, stream)) {}

  double uniform() {
    // (0, 1]: never zero, so log() below is finite.
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
  }

  double normal();

  /// Standard normal vector of length n.
  Vector normal_vector(Eigen::Index n);

  /// Zero-mean Gaussian with covariance factor * factor^T.
  Vector gaussian(const Matrix& factor) { return factor * normal_vector(factor.cols()); }

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace cmlpin
