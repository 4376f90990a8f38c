#include "redlab/rscode.hpp"

#include <string>

#include "redlab/error.hpp"

namespace redlab {

std::uint32_t gf_modulus(unsigned degree) {
  switch (degree) {
    case 2: return 0x7;    // x^2 + x + 1
    case 3: return 0xB;    // x^3 + x + 1
    case 4: return 0x13;   // x^4 + x + 1
    case 5: return 0x25;   // x^5 + x^2 + 1
    case 6: return 0x43;   // x^6 + x + 1
    case 7: return 0x83;   // x^7 + x + 1
    case 8: return 0x11D;  // x^8 + x^4 + x^3 + x^2 + 1
    default: throw FieldMismatch("unsupported field degree " + std::to_string(degree) + " (expected 2..8)");
  }
}

GfElement gf_element(std::uint32_t value, unsigned degree) {
  gf_modulus(degree);
  if (value >> degree) {
    throw FieldMismatch("value " + std::to_string(value) + " outside GF(2^" + std::to_string(degree) + ")");
  }
  return {value, degree};
}

namespace {

void same_field(GfElement a, GfElement b) {
  if (a.degree != b.degree) {
    throw FieldMismatch("GF(2^" + std::to_string(a.degree) + ") vs GF(2^" + std::to_string(b.degree) + ")");
  }
}

}  // namespace

GfElement gf_add(GfElement a, GfElement b) {
  same_field(a, b);
  return {a.value ^ b.value, a.degree};
}

GfElement gf_mul(GfElement a, GfElement b) {
  same_field(a, b);
  const std::uint32_t mod = gf_modulus(a.degree);
  const std::uint32_t top = 1u << a.degree;
  std::uint32_t x = a.value;
  std::uint32_t acc = 0;
  for (std::uint32_t y = b.value; y != 0; y >>= 1) {
    if (y & 1u) acc ^= x;
    x <<= 1;
    if (x & top) x ^= mod;
  }
  return {acc, a.degree};
}

GfElement gf_pow(GfElement a, std::uint64_t e) {
  GfElement result{1, a.degree};
  for (; e != 0; e >>= 1) {
    if (e & 1u) result = gf_mul(result, a);
    a = gf_mul(a, a);
  }
  return result;
}

GfElement gf_inv(GfElement a) {
  if (a.value == 0) throw InvalidAssignment("zero has no inverse");
  return gf_pow(a, (std::uint64_t{1} << a.degree) - 2);
}

RsCodeword rs_encode(std::span<const GfElement> message) {
  if (message.empty()) throw InvalidAssignment("rs_encode: empty message");
  const unsigned m = message[0].degree;
  for (const auto& s : message) same_field(s, message[0]);
  const std::size_t k = message.size();
  if (3 * k > (std::size_t{1} << m)) {
    throw TooManyPoints("RS(" + std::to_string(3 * k) + ", " + std::to_string(k) + ") needs " +
                        std::to_string(3 * k) + " points but GF(2^" + std::to_string(m) + ") has " +
                        std::to_string(1u << m));
  }
  RsCodeword cw;
  cw.message_len = k;
  cw.degree = m;
  for (std::size_t j = 0; j < 3 * k; ++j) {
    const GfElement point{static_cast<std::uint32_t>(j), m};
    GfElement acc{0, m};
    for (std::size_t i = k; i-- > 0;) acc = gf_add(gf_mul(acc, point), message[i]);
    cw.symbols.push_back(acc);
  }
  return cw;
}

BitString codeword_bits(const RsCodeword& codeword) {
  const unsigned m = codeword.degree;
  BitString out(codeword.symbols.size() * m);
  for (std::size_t j = 0; j < codeword.symbols.size(); ++j) {
    for (unsigned t = 0; t < m; ++t) out.set(j * m + t, (codeword.symbols[j].value >> t) & 1u);
  }
  return out;
}

std::vector<GfElement> rs_message(std::uint64_t label, std::size_t len, unsigned degree) {
  gf_modulus(degree);
  if (len * degree < 64 && (label >> (len * degree)) != 0) {
    throw InvalidAssignment("message label " + std::to_string(label) + " out of range");
  }
  std::vector<GfElement> msg;
  const std::uint64_t mask = (std::uint64_t{1} << degree) - 1;
  for (std::size_t i = 0; i < len; ++i) {
    msg.push_back({static_cast<std::uint32_t>((label >> (i * degree)) & mask), degree});
  }
  return msg;
}

std::size_t symbol_distance(const RsCodeword& a, const RsCodeword& b) {
  if (a.symbols.size() != b.symbols.size()) throw InvalidAssignment("codeword lengths differ");
  std::size_t d = 0;
  for (std::size_t j = 0; j < a.symbols.size(); ++j) d += a.symbols[j].value != b.symbols[j].value;
  return d;
}

}  // namespace redlab
