#include "diot/bits.hpp"

#include <bit>
#include <stdexcept>

namespace diot::bits {

BitString from_value(std::uint32_t value, int width) {
  BitString out(static_cast<std::size_t>(width));
  for (int i = 0; i < width; ++i)
    out[static_cast<std::size_t>(i)] =
        static_cast<std::uint8_t>((value >> (width - 1 - i)) & 1u);
  return out;
}

std::uint32_t to_value(const BitString& b) {
  if (b.size() > 32) throw std::invalid_argument("bit string too long for to_value");
  std::uint32_t v = 0;
  for (std::uint8_t bit : b) v = (v << 1) | (bit & 1u);
  return v;
}

BitString xored(const BitString& a, const BitString& b) {
  if (a.size() != b.size()) throw std::invalid_argument("xored: length mismatch");
  BitString out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = (a[i] ^ b[i]) & 1u;
  return out;
}

int parity(const BitString& a) {
  int p = 0;
  for (std::uint8_t bit : a) p ^= (bit & 1);
  return p;
}

int dot(std::uint32_t a, std::uint32_t b) { return std::popcount(a & b) & 1; }

std::string to_hex(const BitString& b) {
  static const char* digits = "0123456789abcdef";
  std::string out = std::to_string(b.size());
  out += ':';
  std::uint8_t nibble = 0;
  int filled = 0;
  // Pad on the left so the final nibble boundary lands on the string end.
  int lead = static_cast<int>((4 - b.size() % 4) % 4);
  for (int i = 0; i < lead; ++i) {
    nibble = static_cast<std::uint8_t>(nibble << 1);
    ++filled;
  }
  for (std::uint8_t bit : b) {
    nibble = static_cast<std::uint8_t>((nibble << 1) | (bit & 1u));
    if (++filled == 4) {
      out += digits[nibble];
      nibble = 0;
      filled = 0;
    }
  }
  return out;
}

BitString from_hex(const std::string& s) {
  auto colon = s.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("from_hex: missing length prefix");
  std::size_t len = 0;
  try {
    len = static_cast<std::size_t>(std::stoull(s.substr(0, colon)));
  } catch (...) {
    throw std::invalid_argument("from_hex: bad length prefix");
  }
  const std::string hex = s.substr(colon + 1);
  if (hex.size() != (len + 3) / 4)
    throw std::invalid_argument("from_hex: length prefix does not match digit count");
  std::vector<std::uint8_t> all;
  all.reserve(hex.size() * 4);
  for (char c : hex) {
    int v;
    if (c >= '0' && c <= '9') v = c - '0';
    else if (c >= 'a' && c <= 'f') v = c - 'a' + 10;
    else if (c >= 'A' && c <= 'F') v = c - 'A' + 10;
    else throw std::invalid_argument("from_hex: bad hex digit");
    for (int i = 3; i >= 0; --i) all.push_back(static_cast<std::uint8_t>((v >> i) & 1));
  }
  const std::size_t lead = all.size() - len;
  for (std::size_t i = 0; i < lead; ++i)
    if (all[i] != 0) throw std::invalid_argument("from_hex: nonzero padding bits");
  return BitString(all.begin() + static_cast<std::ptrdiff_t>(lead), all.end());
}

std::string bytes_to_hex(const std::vector<std::uint8_t>& bytes) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    out += digits[b >> 4];
    out += digits[b & 0xf];
  }
  return out;
}

std::vector<std::uint8_t> bytes_from_hex(const std::string& s) {
  if (s.size() % 2) throw std::invalid_argument("bytes_from_hex: odd digit count");
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw std::invalid_argument("bytes_from_hex: bad hex digit");
  };
  std::vector<std::uint8_t> out(s.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = static_cast<std::uint8_t>((nibble(s[2 * i]) << 4) | nibble(s[2 * i + 1]));
  return out;
}

}  // namespace diot::bits
