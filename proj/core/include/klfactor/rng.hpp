#pragma once

// rng.hpp — seedable, portable random number generation.
//
// All sampling in this library draws from SubstreamRng, a counter-based
// generator built on the SplitMix64 sequence with Gaussian variates produced
// by the Box-Muller transform. The algorithm is fixed so that outputs are
// reproducible for a given (seed, stream) pair independent of platform,
// scheduling, or call interleaving. Stream j of a Monte-Carlo run (path j,
// draw j) uses SubstreamRng(seed, j), so paths can be generated in any order.

#include <cstdint>

namespace klfactor {

class SubstreamRng {
 public:
  SubstreamRng(std::uint64_t seed, std::uint64_t stream)
      : state_(mix(seed + 0x9E3779B97F4A7C15ULL) ^
               mix(stream * 0xDA942042E4DD58B5ULL + 0x2545F4914F6CDD1DULL)) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  // Uniform on [0, 1), 53 bits of resolution.
  double next_uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; generates pairs, caches the second.
  double next_normal();

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace klfactor
