#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace redlab {

// Fixed-width bit vector. Bit 0 is the leftmost character of the string form
// and the most significant bit of the integer form, so "0110" == from_uint(6, 4)
// and lexicographic order on strings matches numeric order.
class BitString {
 public:
  BitString() = default;
  explicit BitString(std::size_t width, bool fill = false);
  explicit BitString(std::vector<std::uint8_t> bits);

  static BitString parse(std::string_view text);
  static BitString from_uint(std::uint64_t value, std::size_t width);
  static BitString concat(const BitString& a, const BitString& b);

  std::size_t width() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }

  bool operator[](std::size_t i) const { return bits_[i] != 0; }
  bool get(std::size_t i) const;
  void set(std::size_t i, bool value);
  void flip(std::size_t i);

  std::span<const std::uint8_t> bits() const { return bits_; }
  std::uint64_t to_uint() const;
  std::string str() const;

  BitString slice(std::size_t offset, std::size_t count) const;
  std::size_t popcount() const;
  std::size_t hamming(const BitString& other) const;

  friend bool operator==(const BitString&, const BitString&) = default;
  friend auto operator<=>(const BitString&, const BitString&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

// Bits of `value` as a width-`width` big-endian word, bit 0 first.
inline bool uint_bit(std::uint64_t value, std::size_t width, std::size_t i) {
  return ((value >> (width - 1 - i)) & 1u) != 0;
}

}  // namespace redlab
