#pragma once

#include <cstdint>

namespace oddchern {

// Counter-based splittable random source. Every draw is a pure function of
// (key, stream, counter), so disorder realizations and Monte Carlo chains are
// reproducible independent of evaluation order and thread scheduling.
struct SplitRng {
  std::uint64_t key = 0;

  static std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  static SplitRng keyed(std::uint64_t master_seed, std::uint64_t realization) {
    return SplitRng{mix64(mix64(master_seed) ^ (0x5851f42d4c957f2dull * (realization + 1)))};
  }

  std::uint64_t bits(std::uint64_t stream, std::uint64_t counter) const {
    return mix64(key ^ mix64(stream ^ mix64(counter + 0x632be59bd9b4e019ull)));
  }

  // Uniform in [0,1), 53-bit resolution.
  double uniform(std::uint64_t stream, std::uint64_t counter) const {
    return static_cast<double>(bits(stream, counter) >> 11) * 0x1.0p-53;
  }

  // Uniform in [-1/2, 1/2).
  double symmetric(std::uint64_t stream, std::uint64_t counter) const {
    return uniform(stream, counter) - 0.5;
  }
};

// Sequential view over one stream of a SplitRng, for Monte Carlo style draws.
struct RngStream {
  SplitRng rng;
  std::uint64_t stream = 0;
  std::uint64_t counter = 0;

  double uniform() { return rng.uniform(stream, counter++); }
};

}  // namespace oddchern
