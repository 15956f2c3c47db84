#pragma once

#include <cstdint>
#include <random>

namespace psrl {

using Rng = std::mt19937_64;

// Independent stream for (master seed, stream index); splitmix64 mixing.
Rng derive_stream(std::uint64_t master_seed, std::uint64_t stream);

// Uniform double in [0, 1) from the top 53 bits of one engine draw.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n); n must be positive.
std::size_t uniform_index(Rng& rng, std::size_t n);

inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

}  // namespace psrl
