#pragma once

#include <cstdint>
#include <random>

namespace redlab {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; derives independent stream seeds from (base, salt).
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t salt = 0) {
  std::uint64_t z = base ^ (salt * 0x9e3779b97f4a7c15ULL);
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// The std distributions are implementation-defined; these are not, so reports
// reproduce across standard libraries.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  if (bound <= 1) return 0;
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return v % bound;
}

inline bool coin(Rng& rng) { return (rng() >> 63) != 0; }

inline double uniform_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace redlab
