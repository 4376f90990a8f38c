#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "redlab/error.hpp"
#include "redlab/samplers.hpp"

using namespace redlab;

TEST(Scramble, FeistelIsAPermutation) {
  for (std::size_t n : {2u, 5u, 8u}) {
    const auto s = feistel_scramble(n, 4, n);
    EXPECT_TRUE(is_bijective(s));
    std::set<BitString> images;
    for (std::uint64_t v = 0; v < (1u << n); ++v) images.insert(eval(s, {{"in", BitString::from_uint(v, n)}}));
    EXPECT_EQ(images.size(), std::size_t{1} << n);
  }
  EXPECT_TRUE(is_bijective(identity_scramble(6)));
  EXPECT_THROW(feistel_scramble(1, 4, 0), InvalidAssignment);
}

TEST(Scramble, FeistelIsNotTheIdentity) {
  const auto s = feistel_scramble(10, 4, 3);
  std::size_t fixed = 0;
  for (std::uint64_t v = 0; v < 1024; ++v) fixed += eval(s, {{"in", BitString::from_uint(v, 10)}}).to_uint() == v;
  EXPECT_LT(fixed, 64u);
}

TEST(ExactSampler, IdentityScramble) {
  const auto f = make_classical_standin(1, 6);
  const auto s = build_exact_sampler(f, identity_scramble(6));
  for (std::uint64_t v = 0; v < 64; ++v) {
    const auto r = BitString::from_uint(v, 6);
    const auto [x, y] = s.run(r);
    EXPECT_EQ(x, r);
    EXPECT_EQ(y, f(r));
  }
}

TEST(ExactSampler, FeistelMarginalUniformAndLabelsCorrect) {
  const auto f = make_classical_standin(2, 10);
  const auto s = build_exact_sampler(f, feistel_scramble(10, 4, 9));
  std::vector<int> hits(1024);
  for (std::uint64_t v = 0; v < 1024; ++v) {
    const auto [x, y] = s.run(BitString::from_uint(v, 10));
    ++hits[x.to_uint()];
    ASSERT_EQ(y, f(x));
  }
  for (int h : hits) EXPECT_EQ(h, 1);
  EXPECT_EQ(tv_distance_exact(s, f, InputDistribution::uniform(10)), 0.0);
}

TEST(ExactSampler, RejectsNonBijectiveScramble) {
  CircuitBuilder b;
  auto in = b.add_input("in", 4);
  b.add_outputs(std::vector<Wire>{in[0], in[0], in[2], in[3]});
  EXPECT_THROW(build_exact_sampler(make_classical_standin(1, 4), std::move(b).build()), NotBijective);
  EXPECT_THROW(build_exact_sampler(make_classical_standin(1, 4), identity_scramble(5)), NotBijective);
}

TEST(ApproxSampler, ZeroEpsIsExact) {
  const auto f = make_classical_standin(3, 8);
  const auto sc = feistel_scramble(8, 4, 1);
  const auto a = build_approx_sampler(f, sc, 0.0, 5);
  const auto e = build_exact_sampler(f, sc);
  EXPECT_EQ(a.aux_width, 0u);
  for (std::uint64_t v = 0; v < 256; ++v) {
    const auto r = BitString::from_uint(v, 8);
    EXPECT_EQ(a.run(r), e.run(r));
  }
}

TEST(ApproxSampler, FlipRatePerRandomStringMatchesClosedForm) {
  // For each scramble input, count flipped labels over every aux value.
  const auto f = make_classical_standin(3, 8);
  const auto s = build_approx_sampler(f, feistel_scramble(8, 4, 1), 0.05, 17);
  ASSERT_EQ(s.aux_width, 12u);
  const double want = std::floor(0.05 * 4096) / 4096;
  EXPECT_EQ(realised_flip_probability(0.05, 12), want);
  for (std::uint64_t v : {0u, 1u, 77u, 255u}) {
    std::size_t flips = 0;
    for (std::uint64_t a = 0; a < 4096; ++a) {
      const auto r = BitString::concat(BitString::from_uint(v, 8), BitString::from_uint(a, 12));
      const auto [x, y] = s.run(r);
      flips += y != f(x);
    }
    EXPECT_EQ(static_cast<double>(flips) / 4096, want);
  }
}

TEST(TvDistance, ApproxSamplersMatchRealisedFlipRate) {
  const auto f = make_classical_standin(4, 8);
  const auto sc = feistel_scramble(8, 4, 2);
  const auto u = InputDistribution::uniform(8);
  for (double eps : {0.05, 0.1, 0.25, 0.5}) {
    const double tv = tv_distance_exact(build_approx_sampler(f, sc, eps, 3), f, u);
    EXPECT_DOUBLE_EQ(tv, realised_flip_probability(eps, 12));
    EXPECT_LE(tv, eps + 1e-12);
    EXPECT_LE(eps - tv, std::ldexp(1.0, -12));
  }
}

TEST(TvDistance, ConstantOutputSampler) {
  const auto f = make_classical_standin(5, 4);
  CircuitBuilder b;
  b.add_input("r", 4);
  const Wire zero = b.constant(false);
  const Wire y = b.constant(f.value(0));
  b.add_outputs(std::vector<Wire>{zero, zero, zero, zero, y});
  const auto s = sampler_from_circuit(std::move(b).build(), 4);
  EXPECT_DOUBLE_EQ(tv_distance_exact(s, f, InputDistribution::uniform(4)), 1 - 1.0 / 16);
}

TEST(TvDistance, PromiseSupport) {
  // Exact sampler against a target law on half of the inputs: the sampler
  // puts 1/2 of its mass off-support and 1/2 spread where the target has 1.
  const auto f = make_classical_standin(6, 4);
  const auto s = build_exact_sampler(f, identity_scramble(4));
  const auto d = InputDistribution::over(4, {0, 1, 2, 3, 4, 5, 6, 7});
  EXPECT_DOUBLE_EQ(tv_distance_exact(s, f, d), 0.5);
}

TEST(TvDistance, TooLarge) {
  const auto f = make_classical_standin(7, 16);
  const auto s = build_approx_sampler(f, identity_scramble(16), 0.1, 1);
  EXPECT_THROW(tv_distance_exact(s, f, InputDistribution::uniform(16)), TooLarge);
}
