#include "diot/hashing.hpp"

#include <stdexcept>

namespace diot::hashing {

HashFunction::HashFunction(int input_bits, int output_bits, std::vector<std::uint8_t> matrix)
    : n_(input_bits), l_(output_bits), matrix_(std::move(matrix)) {
  if (l_ < 1 || l_ > n_) throw std::invalid_argument("HashFunction: need 1 <= l <= n");
  if (matrix_.size() != static_cast<std::size_t>(n_) * static_cast<std::size_t>(l_))
    throw std::invalid_argument("HashFunction: descriptor size mismatch");
}

BitString HashFunction::apply(const BitString& x) const {
  if (static_cast<int>(x.size()) > n_)
    throw std::invalid_argument("HashFunction::apply: input longer than n");
  BitString out(static_cast<std::size_t>(l_), 0);
  // Zero padding on the right means rows past |x| never contribute.
  for (std::size_t r = 0; r < x.size(); ++r) {
    if (!(x[r] & 1)) continue;
    for (int c = 0; c < l_; ++c) out[static_cast<std::size_t>(c)] ^= matrix_[r * static_cast<std::size_t>(l_) + static_cast<std::size_t>(c)];
  }
  return out;
}

std::string HashFunction::serialize() const {
  return std::to_string(n_) + "x" + std::to_string(l_) + ";" +
         bits::to_hex(BitString(matrix_.begin(), matrix_.end()));
}

HashFunction HashFunction::deserialize(const std::string& s) {
  const auto xpos = s.find('x');
  const auto semi = s.find(';');
  if (xpos == std::string::npos || semi == std::string::npos || xpos > semi)
    throw std::invalid_argument("HashFunction: bad serialized form");
  const int n = std::stoi(s.substr(0, xpos));
  const int l = std::stoi(s.substr(xpos + 1, semi - xpos - 1));
  BitString m = bits::from_hex(s.substr(semi + 1));
  if (m.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(l))
    throw std::invalid_argument("HashFunction: descriptor size mismatch");
  return HashFunction(n, l, std::vector<std::uint8_t>(m.begin(), m.end()));
}

HashFunction sample_hash(int n, int l, Rng& rng) {
  if (l < 1 || l > n) throw std::invalid_argument("sample_hash: need 1 <= l <= n");
  std::vector<std::uint8_t> m(static_cast<std::size_t>(n) * static_cast<std::size_t>(l));
  for (auto& b : m) b = static_cast<std::uint8_t>(rng.bit());
  return HashFunction(n, l, std::move(m));
}

HashFunction hash_from_index(int n, int l, std::uint64_t k) {
  const std::size_t count = static_cast<std::size_t>(n) * static_cast<std::size_t>(l);
  if (count > 63) throw std::invalid_argument("hash_from_index: family too large to enumerate");
  std::vector<std::uint8_t> m(count);
  for (std::size_t i = 0; i < count; ++i) m[i] = static_cast<std::uint8_t>((k >> i) & 1);
  return HashFunction(n, l, std::move(m));
}

bool is_full_rank(const HashFunction& f) {
  // Column space over GF(2); full rank means rank == l. Only needed for the
  // small exhaustive suites, hence the 64-row limit.
  const int n = f.input_bits(), l = f.output_bits();
  if (n > 64) throw std::invalid_argument("is_full_rank: descriptor too tall");
  std::uint64_t basis[64] = {};
  int rank = 0;
  for (int c = 0; c < l; ++c) {
    std::uint64_t v = 0;
    for (int r = 0; r < n; ++r)
      if (f.matrix_bit(r, c)) v |= std::uint64_t{1} << r;
    for (int b = 63; b >= 0 && v; --b) {
      if (!((v >> b) & 1)) continue;
      if (!basis[b]) {
        basis[b] = v;
        ++rank;
        v = 0;
      } else {
        v ^= basis[b];
      }
    }
  }
  return rank == l;
}

}  // namespace diot::hashing
