#include "diot/rng.hpp"

namespace diot {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(std::uint64_t seed) : seed_(seed) {
  std::uint64_t sm = seed;
  for (auto& w : s_) w = splitmix64(sm);
}

Rng Rng::split(std::uint64_t id_a, std::uint64_t id_b) const {
  // Mix the ids into the seed with two splitmix rounds each; the child seed
  // depends only on (seed_, id_a, id_b).
  std::uint64_t x = seed_;
  std::uint64_t h = splitmix64(x);
  x ^= id_a * 0x9e3779b97f4a7c15ULL;
  h ^= splitmix64(x);
  x ^= rotl(id_b, 32) + 0xd1b54a32d192ed03ULL;
  h ^= splitmix64(x);
  return Rng(h);
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

int Rng::bit() { return static_cast<int>(next_u64() >> 63); }

std::uint32_t Rng::index(std::uint32_t n) {
  // Rejection sampling on the top bits keeps the draw unbiased.
  const std::uint64_t limit = (~0ULL / n) * n;
  std::uint64_t v;
  do {
    v = next_u64();
  } while (v >= limit);
  return static_cast<std::uint32_t>(v % n);
}

std::uint32_t Rng::bits(int n) {
  if (n == 0) return 0;
  return static_cast<std::uint32_t>(next_u64() >> (64 - n));
}

}  // namespace diot
