#pragma once

#include <cstdint>
#include <utility>

#include "redlab/circuit.hpp"
#include "redlab/targets.hpp"

namespace redlab {

// A program r -> (x, y). Input group "r" holds scramble_width bits that are
// mapped to x, followed by aux_width bits of label-flip randomness. Outputs
// are the n bits of x followed by the label y.
struct Sampler {
  Circuit program;
  std::size_t n = 0;
  std::size_t scramble_width = 0;
  std::size_t aux_width = 0;
  double declared_epsilon = 0;

  std::size_t random_width() const { return scramble_width + aux_width; }
  std::pair<BitString, bool> run(const BitString& r) const;
};

// Wraps an arbitrary program with the sampler layout (scramble_width = width
// of "r", no auxiliary bits) after checking the group and output widths.
Sampler sampler_from_circuit(Circuit program, std::size_t n, double declared_epsilon = 0);

// Feistel network on n >= 2 bits, input group "in", n outputs. The word is
// split into halves L = bits [0, n/2) and R = the rest; rounds alternate
// L ^= F(R) and R ^= F(L), each F bit being (a AND b) XOR c over random bits
// of the other half. Every round is invertible whatever F is.
Circuit feistel_scramble(std::size_t n, std::size_t rounds, std::uint64_t seed);
Circuit identity_scramble(std::size_t n);

// True iff the single-group circuit permutes {0,1}^n (n <= 24).
bool is_bijective(const Circuit& scramble);

// r -> (scramble(r), f(scramble(r))). Throws NotBijective for scrambles that
// are not permutations (checked for n <= 20).
Sampler build_exact_sampler(const TargetFunction& f, const Circuit& scramble);

// As the exact sampler, with aux_width extra random bits a: the label is
// flipped iff (a XOR h(r)) < floor(eps * 2^aux_width), h a seed-dependent
// linear map of the scramble bits. For every r the flip probability over a is
// exactly floor(eps * 2^aux) / 2^aux <= eps, and so is the TV distance.
Sampler build_approx_sampler(const TargetFunction& f, const Circuit& scramble, double eps, std::uint64_t seed,
                             std::size_t aux_width = 12);

// Exact flip probability realised by build_approx_sampler.
double realised_flip_probability(double eps, std::size_t aux_width);

// 1/2 sum |p - q| over {0,1}^n x {0,1}, p the sampler's output law over
// uniform r and q the law of (x, f(x)) for x ~ dist. r width <= 24.
double tv_distance_exact(const Sampler& s, const TargetFunction& f, const InputDistribution& dist);

}  // namespace redlab
