#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace haprtr {

/// Generator used everywhere in the library. mt19937_64 has a fully
/// specified output sequence, so a seed identifies a stream exactly.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer. A bijection on 64-bit integers.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Independent substreams drawn from one trial seed.
enum class Stream : std::uint64_t {
  Haplotype = 1,
  ReadSigns = 2,
  Mask = 3,
  Flips = 4,
  SolverInit = 5,
  BaselineInit = 6,
};

/// Stream-splitting rule: the substream for (seed, stream, index) is seeded
/// with mix64(mix64(seed) ^ mix64(stream * 2^32 + index)).
inline Rng substream(std::uint64_t seed, Stream stream,
                     std::uint64_t index = 0) {
  const auto tag = (static_cast<std::uint64_t>(stream) << 32) + index;
  return Rng(mix64(mix64(seed) ^ mix64(tag)));
}

/// Uniform sample on S^{n-1}: a normalized isotropic Gaussian.
inline Eigen::VectorXd random_unit_coords(Eigen::Index n, Rng &rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd v(n);
  do {
    for (Eigen::Index j = 0; j < n; ++j)
      v[j] = normal(rng);
  } while (v.norm() == 0.0);
  return v / v.norm();
}

} // namespace haprtr
