#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace diot {

// Bit strings are vectors of 0/1 bytes, most significant / leftmost bit first.
// Protocol strings live here; small fixed-width values (ENTCF domain points)
// are plain integers instead.
using BitString = std::vector<std::uint8_t>;

namespace bits {

BitString from_value(std::uint32_t value, int width);
std::uint32_t to_value(const BitString& b);  // requires size() <= 32

BitString xored(const BitString& a, const BitString& b);  // equal lengths
int parity(const BitString& a);

// Inner product of two width-bit values over GF(2).
int dot(std::uint32_t a, std::uint32_t b);

// Hex encoding with explicit bit length, e.g. "5:1a" for the 5-bit string
// 11010. Round-trips bit-exactly; used in transcripts and reports.
std::string to_hex(const BitString& b);
BitString from_hex(const std::string& s);  // throws std::invalid_argument

// Plain byte hex for binary blobs (key material).
std::string bytes_to_hex(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> bytes_from_hex(const std::string& s);

}  // namespace bits
}  // namespace diot
