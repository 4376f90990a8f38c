#include "redlab/bitstring.hpp"

#include "redlab/error.hpp"

namespace redlab {

BitString::BitString(std::size_t width, bool fill) : bits_(width, fill ? 1 : 0) {}

BitString::BitString(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (auto& b : bits_) {
    if (b > 1) throw InvalidAssignment("bit value out of range");
  }
}

BitString BitString::parse(std::string_view text) {
  std::vector<std::uint8_t> bits;
  bits.reserve(text.size());
  for (char c : text) {
    if (c == '0' || c == '1') {
      bits.push_back(static_cast<std::uint8_t>(c - '0'));
    } else {
      throw ParseError("bad bit character '" + std::string(1, c) + "'");
    }
  }
  return BitString(std::move(bits));
}

BitString BitString::from_uint(std::uint64_t value, std::size_t width) {
  if (width > 64) throw InvalidAssignment("from_uint width exceeds 64");
  BitString out(width);
  for (std::size_t i = 0; i < width; ++i) out.bits_[i] = uint_bit(value, width, i);
  return out;
}

BitString BitString::concat(const BitString& a, const BitString& b) {
  std::vector<std::uint8_t> bits(a.bits_);
  bits.insert(bits.end(), b.bits_.begin(), b.bits_.end());
  BitString out;
  out.bits_ = std::move(bits);
  return out;
}

bool BitString::get(std::size_t i) const {
  if (i >= bits_.size()) throw InvalidAssignment("bit index out of range");
  return bits_[i] != 0;
}

void BitString::set(std::size_t i, bool value) {
  if (i >= bits_.size()) throw InvalidAssignment("bit index out of range");
  bits_[i] = value ? 1 : 0;
}

void BitString::flip(std::size_t i) { set(i, !get(i)); }

std::uint64_t BitString::to_uint() const {
  if (bits_.size() > 64) throw InvalidAssignment("to_uint width exceeds 64");
  std::uint64_t v = 0;
  for (auto b : bits_) v = (v << 1) | b;
  return v;
}

std::string BitString::str() const {
  std::string s;
  s.reserve(bits_.size());
  for (auto b : bits_) s.push_back(static_cast<char>('0' + b));
  return s;
}

BitString BitString::slice(std::size_t offset, std::size_t count) const {
  if (offset + count > bits_.size()) throw InvalidAssignment("slice out of range");
  BitString out;
  out.bits_.assign(bits_.begin() + static_cast<std::ptrdiff_t>(offset),
                   bits_.begin() + static_cast<std::ptrdiff_t>(offset + count));
  return out;
}

std::size_t BitString::popcount() const {
  std::size_t c = 0;
  for (auto b : bits_) c += b;
  return c;
}

std::size_t BitString::hamming(const BitString& other) const {
  if (other.width() != width()) throw InvalidAssignment("hamming width mismatch");
  std::size_t d = 0;
  for (std::size_t i = 0; i < bits_.size(); ++i) d += bits_[i] != other.bits_[i];
  return d;
}

}  // namespace redlab
