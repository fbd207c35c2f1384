#pragma once

#include <cstdint>

namespace diot {

// Counter-free splittable PRNG (xoshiro256** seeded through splitmix64).
//
// Every probabilistic operation in this project consumes explicit samples
// from an Rng handed to it by the caller; there is no hidden global state.
// Substreams are derived from the original seed and a pair of stream ids,
// so (seed, run, round) always yields the same stream regardless of how
// many draws the parent generator has made.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Derives an independent substream from the *seed*, not the current state.
  Rng split(std::uint64_t id_a, std::uint64_t id_b = 0) const;

  std::uint64_t next_u64();

  // Uniform in [0, 1) with 53 bits of mantissa.
  double uniform();

  // Single fair bit.
  int bit();

  // Uniform integer in [0, n). n must be > 0.
  std::uint32_t index(std::uint32_t n);

  // n-bit value, n <= 32.
  std::uint32_t bits(int n);

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t s_[4];
};

}  // namespace diot
