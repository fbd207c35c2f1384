#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "diot/bits.hpp"
#include "diot/rng.hpp"

namespace diot::hashing {

// Two-universal linear hash from n-bit strings to l-bit strings. The
// descriptor is an n x l random binary matrix; inputs shorter than n bits
// are zero-padded on the right before applying it.
class HashFunction {
 public:
  HashFunction() = default;
  HashFunction(int input_bits, int output_bits, std::vector<std::uint8_t> matrix);

  int input_bits() const { return n_; }
  int output_bits() const { return l_; }

  // Bit at row r (input position), column c (output position).
  int matrix_bit(int r, int c) const { return matrix_[static_cast<std::size_t>(r * l_ + c)]; }

  BitString apply(const BitString& x) const;  // throws if |x| > n

  // Row-major bit packing, hex-encoded with the dimensions up front.
  std::string serialize() const;
  static HashFunction deserialize(const std::string& s);

  bool operator==(const HashFunction& other) const = default;

 private:
  int n_ = 0;
  int l_ = 0;
  std::vector<std::uint8_t> matrix_;  // n*l entries in {0,1}, row-major
};

// Uniform member of the family; deterministic given the rng state.
HashFunction sample_hash(int n, int l, Rng& rng);

// Enumeration support for the exhaustive suites: the k-th of the 2^(n*l)
// descriptors.
HashFunction hash_from_index(int n, int l, std::uint64_t k);

bool is_full_rank(const HashFunction& f);

}  // namespace diot::hashing
