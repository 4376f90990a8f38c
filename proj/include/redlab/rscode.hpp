#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "redlab/bitstring.hpp"

namespace redlab {

// Element of GF(2^m), 2 <= m <= 8, in polynomial basis: bit t of `value` is
// the coefficient of x^t.
struct GfElement {
  std::uint32_t value = 0;
  unsigned degree = 4;

  friend bool operator==(const GfElement&, const GfElement&) = default;
};

// Reduction polynomial for GF(2^m), including the x^m term
// (m = 4: x^4 + x + 1 = 0x13).
std::uint32_t gf_modulus(unsigned degree);

GfElement gf_element(std::uint32_t value, unsigned degree);
GfElement gf_add(GfElement a, GfElement b);
GfElement gf_mul(GfElement a, GfElement b);
GfElement gf_pow(GfElement a, std::uint64_t e);
GfElement gf_inv(GfElement a);

// RS(3k, k): the message is the coefficient list of a polynomial of degree
// < k (symbol i multiplies x^i), evaluated at the field elements 0 .. 3k-1.
struct RsCodeword {
  std::vector<GfElement> symbols;
  std::size_t message_len = 0;
  unsigned degree = 4;
};

RsCodeword rs_encode(std::span<const GfElement> message);

// 3k*m bits: symbol j occupies bits [j*m, (j+1)*m), least significant bit
// first.
BitString codeword_bits(const RsCodeword& codeword);

// Message with label k in [0, q^len): symbol i is base-q digit i of k,
// least significant digit first.
std::vector<GfElement> rs_message(std::uint64_t label, std::size_t len, unsigned degree);

std::size_t symbol_distance(const RsCodeword& a, const RsCodeword& b);

}  // namespace redlab
