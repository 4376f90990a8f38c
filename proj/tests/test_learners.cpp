#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "redlab/cnf.hpp"
#include "redlab/error.hpp"
#include "redlab/learners.hpp"
#include "redlab/oracle.hpp"
#include "redlab/rscode.hpp"

using namespace redlab;

namespace {

// Dataset number `code` in the B-sample universe over n-bit inputs, sample l
// taking bits [l(n+1), (l+1)(n+1)) of code, x first then y.
Dataset dataset_from_code(std::uint64_t code, std::size_t B, std::size_t n) {
  Dataset t;
  t.n = n;
  for (std::size_t l = 0; l < B; ++l) {
    const std::uint64_t s = (code >> ((B - 1 - l) * (n + 1))) & ((std::uint64_t{1} << (n + 1)) - 1);
    t.samples.push_back({s >> 1, (s & 1u) != 0});
  }
  return t;
}

bool consistent(const ConceptClass& cls, std::uint64_t alpha, const Dataset& t) {
  return std::all_of(t.samples.begin(), t.samples.end(),
                     [&](const Sample& s) { return cls.eval(alpha, s.x) == s.y; });
}

bool any_consistent(const ConceptClass& cls, const Dataset& t) {
  for (std::uint64_t a = 0; a < cls.concept_count(); ++a) {
    if (consistent(cls, a, t)) return true;
  }
  return false;
}

bool agrees_somewhere(const ConceptClass& cls, const BitString& alpha, const Dataset& t) {
  return std::any_of(t.samples.begin(), t.samples.end(),
                     [&](const Sample& s) { return cls.eval(alpha.to_uint(), s.x) == s.y; });
}

std::vector<std::uint64_t> random_inputs(Rng& rng, std::size_t count, std::size_t n) {
  std::vector<std::uint64_t> xs;
  for (std::size_t i = 0; i < count; ++i) xs.push_back(uniform_below(rng, std::uint64_t{1} << n));
  return xs;
}

LearnerConfig with_r(const BitString& r) {
  LearnerConfig cfg;
  cfg.r = r;
  return cfg;
}

}  // namespace

TEST(Dataset, EncodingRoundTrips) {
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    Dataset t;
    t.n = 1 + uniform_below(rng, 10);
    for (std::size_t l = 0, B = 1 + uniform_below(rng, 8); l < B; ++l) {
      t.samples.push_back({uniform_below(rng, std::uint64_t{1} << t.n), coin(rng)});
    }
    const BitString bits = t.encode();
    ASSERT_EQ(bits.width(), t.size() * (t.n + 1));
    EXPECT_EQ(bits.slice(t.n, 1)[0], t.samples[0].y);
    EXPECT_EQ(Dataset::decode(bits, t.n), t);
    std::stringstream io;
    write_dataset(io, t);
    EXPECT_EQ(read_dataset(io), t);
  }
  EXPECT_THROW(Dataset::decode(BitString(7), 3), InvalidAssignment);
}

TEST(Dataset, FileFormat) {
  std::istringstream in("# header\n0110 1\n\n1111 0  # trailing\n");
  const Dataset t = read_dataset(in);
  EXPECT_EQ(t.n, 4u);
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t.samples[0], (Sample{6, true}));
  EXPECT_EQ(t.samples[1], (Sample{15, false}));
  std::ostringstream out;
  write_dataset(out, t);
  EXPECT_EQ(out.str(), "0110 1\n1111 0\n");
  std::istringstream bad_label("0110 2\n"), bad_width("0110 1\n011 0\n"), extra("01 1 1\n");
  EXPECT_THROW(read_dataset(bad_label), ParseError);
  EXPECT_THROW(read_dataset(bad_width), ParseError);
  EXPECT_THROW(read_dataset(extra), ParseError);
}

TEST(Dataset, WithPrependsSample) {
  Dataset t{3, {{1, true}}};
  const Dataset u = t.with({5, false});
  ASSERT_EQ(u.size(), 2u);
  EXPECT_EQ(u.samples[0], (Sample{5, false}));
  EXPECT_EQ(u.samples[1], (Sample{1, true}));
  EXPECT_EQ(t.size(), 1u);
}

TEST(XorLearner, RecoversMaskFromFullRankData) {
  const auto f = make_classical_standin(3, 8);
  const auto cls = ConceptClass::xor_mask(f);
  const XorMaskLearner learner(cls);
  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const std::uint64_t alpha = uniform_below(rng, 256);
    // Unit vectors guarantee rank 8; extra random rows on top.
    std::vector<std::uint64_t> xs = random_inputs(rng, 6, 8);
    for (std::size_t i = 0; i < 8; ++i) xs.push_back(std::uint64_t{1} << i);
    std::shuffle(xs.begin(), xs.end(), rng);
    const auto v = learner.learn(label_dataset(cls, alpha, xs), {});
    ASSERT_TRUE(v.valid);
    EXPECT_EQ(v.alpha, BitString::from_uint(alpha, 8));
  }
}

TEST(XorLearner, InvalidExactlyWhenNoMaskIsConsistent) {
  for (std::size_t n : {3u, 6u, 8u}) {
    const auto f = make_classical_standin(n, n);
    const auto cls = ConceptClass::xor_mask(f);
    Rng rng(n);
    int invalid = 0;
    for (int trial = 0; trial < 300; ++trial) {
      Dataset t = label_dataset(cls, uniform_below(rng, cls.concept_count()),
                                random_inputs(rng, 1 + uniform_below(rng, n + 3), n));
      if (coin(rng)) t.samples[uniform_below(rng, t.size())].y ^= true;
      const auto v = xor_mask_learn(t, {}, f);
      ASSERT_EQ(v.valid, any_consistent(cls, t));
      if (v.valid) {
        EXPECT_TRUE(consistent(cls, v.alpha.to_uint(), t));
      } else {
        ++invalid;
      }
    }
    EXPECT_GT(invalid, 30);
  }
}

TEST(XorLearner, FreeVariablesDefaultToZero) {
  const auto f = make_classical_standin(4, 6);
  const auto cls = ConceptClass::xor_mask(f);
  Dataset zeros{6, {{0, f.value(0)}, {0, f.value(0)}}};
  EXPECT_EQ(xor_mask_learn(zeros, {}, f), LearnerVerdict::identified(BitString(6)));
  EXPECT_EQ(xor_mask_learn(Dataset{6, {}}, {}, f), LearnerVerdict::identified(BitString(6)));
  zeros.samples[1].y ^= true;
  EXPECT_FALSE(xor_mask_learn(zeros, {}, f).valid);
  // One constraint on bit 0 leaves bits 1..5 free; r fills them.
  const Dataset one{6, {{0b100000, !f.value(0b100000)}}};
  EXPECT_EQ(xor_mask_learn(one, {}, f).alpha, BitString::parse("100000"));
  EXPECT_EQ(xor_mask_learn(one, with_r(BitString::parse("011111")), f).alpha, BitString::parse("111111"));
}

TEST(BitIndexLearner, RecoversAlphaFromCoveringData) {
  const auto cls = ConceptClass::bit_index(8, 8);
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const std::uint64_t alpha = uniform_below(rng, 256);
    std::vector<std::uint64_t> xs = random_inputs(rng, 10, 8);
    for (std::uint64_t i = 0; i < 8; ++i) xs.push_back((i << 5) | uniform_below(rng, 32));
    const auto t = label_dataset(cls, alpha, xs);
    for (auto mode : {BitIndexMode::Majority, BitIndexMode::Strict}) {
      EXPECT_EQ(bit_index_learn(t, {}, 8, mode), LearnerVerdict::identified(BitString::from_uint(alpha, 8)));
    }
  }
}

TEST(BitIndexLearner, OutOfRangePositiveIsInvalid) {
  // n = 4, m = 5: three index bits, prefixes 5..7 lie beyond m.
  const Dataset ok{4, {{0b1010, false}, {0b0000, true}}};
  EXPECT_EQ(bit_index_learn(ok, {}, 5), LearnerVerdict::identified(BitString::parse("10000")));
  const Dataset bad{4, {{0b1010, true}, {0b0000, true}}};
  EXPECT_FALSE(bit_index_learn(bad, {}, 5).valid);
  EXPECT_FALSE(bit_index_learn(bad, {}, 5, BitIndexMode::Strict).valid);
}

TEST(BitIndexLearner, TiesAndUnseenIndices) {
  const Dataset t{3, {{0b000, true}, {0b001, false}, {0b010, true}}};  // m = 4, two index bits
  EXPECT_EQ(bit_index_learn(t, {}, 4).alpha, BitString::parse("0100"));
  EXPECT_EQ(bit_index_learn(t, with_r(BitString::parse("1111")), 4).alpha, BitString::parse("0111"));
  EXPECT_FALSE(bit_index_learn(t, {}, 4, BitIndexMode::Strict).valid);
}

TEST(BitIndexLearner, NoisyLabelsRecoveredWithinOneBit) {
  const auto cls = ConceptClass::bit_index(8, 8);
  Rng rng(7);
  int good = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::uint64_t alpha = uniform_below(rng, 256);
    std::vector<std::uint64_t> xs;
    for (std::uint64_t i = 0; i < 8; ++i) {
      for (int k = 0; k < 5; ++k) xs.push_back((i << 5) | uniform_below(rng, 32));
    }
    Dataset t = label_dataset(cls, alpha, xs);
    for (auto& s : t.samples) {
      if (uniform_below(rng, 10) == 0) s.y = !s.y;
    }
    const auto v = bit_index_learn(t, {}, 8);
    ASSERT_TRUE(v.valid);
    good += v.alpha.hamming(BitString::from_uint(alpha, 8)) <= 1;
  }
  EXPECT_GE(good, 95);
}

TEST(RsLearner, ExactRecoveryWithEveryBlockSampled) {
  const auto cls = ConceptClass::rs_block(2, 3);  // n = 6, 18 blocks, 64 messages
  const RsLearner learner(cls);
  Rng rng(8);
  for (std::uint64_t k = 0; k < cls.concept_count(); ++k) {
    std::vector<std::uint64_t> xs;
    for (std::size_t j = 0; j < cls.blocks().blocks; ++j) {
      const std::uint64_t lo = j * cls.blocks().size();
      const std::uint64_t hi = j + 1 == cls.blocks().blocks ? 64 : lo + cls.blocks().size();
      xs.push_back(lo + uniform_below(rng, hi - lo));
    }
    EXPECT_EQ(learner.learn(label_dataset(cls, k, xs), {}), LearnerVerdict::identified(BitString::from_uint(k, 6)));
  }
}

TEST(RsLearner, MissingBlocksDecodeNearby) {
  // Blocks of up to |k| = 2 symbols go unsampled; every other block gets one
  // sample. Checked against a scan of all codewords consistent with T.
  const auto cls = ConceptClass::rs_block(2, 3);
  Rng rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const std::uint64_t k = uniform_below(rng, 64);
    const std::uint64_t skip_a = uniform_below(rng, 6), skip_b = uniform_below(rng, 6);
    std::vector<std::uint64_t> xs;
    for (std::size_t j = 0; j < 18; ++j) {
      if (j / 3 == skip_a || j / 3 == skip_b) continue;
      xs.push_back(j * cls.blocks().size() + uniform_below(rng, cls.blocks().size()));
    }
    const auto t = label_dataset(cls, k, xs);
    const auto v = rs_learn(t, {}, cls);
    ASSERT_TRUE(v.valid);
    EXPECT_TRUE(consistent(cls, v.alpha.to_uint(), t));
    const auto truth = rs_encode(rs_message(k, 2, 3));
    EXPECT_LE(symbol_distance(truth, rs_encode(rs_message(v.alpha.to_uint(), 2, 3))), 2u);
    std::uint64_t first_consistent = 64;
    for (std::uint64_t c = 0; c < 64 && first_consistent == 64; ++c) {
      if (consistent(cls, c, t)) first_consistent = c;
    }
    EXPECT_EQ(v.alpha.to_uint(), first_consistent);
  }
}

TEST(RsLearner, SparseDataStaysConsistent) {
  const auto cls = ConceptClass::rs_block(2, 3);
  Rng rng(19);
  for (int trial = 0; trial < 200; ++trial) {
    const auto t = label_dataset(cls, uniform_below(rng, 64), random_inputs(rng, 1 + uniform_below(rng, 12), 6));
    const auto v = rs_learn(t, {}, cls);
    ASSERT_TRUE(v.valid);
    EXPECT_TRUE(consistent(cls, v.alpha.to_uint(), t));
  }
}

TEST(RsLearner, FlippedDataNeverTotallyIncorrect) {
  const auto cls = ConceptClass::rs_block(2, 3);
  Rng rng(10);
  for (int trial = 0; trial < 200; ++trial) {
    Dataset t = label_dataset(cls, uniform_below(rng, 64), random_inputs(rng, 1 + uniform_below(rng, 30), 6));
    for (auto& s : t.samples) s.y = !s.y;
    const auto v = rs_learn(t, {}, cls);
    if (v.valid) {
      EXPECT_TRUE(agrees_somewhere(cls, v.alpha, t));
    }
  }
  EXPECT_THROW(rs_learn(Dataset{5, {}}, {}, cls), InvalidAssignment);
}

TEST(SingletonLearner, AcceptsOnlyTheTarget) {
  const auto f = make_classical_standin(11, 5);
  const SingletonLearner learner(ConceptClass::singleton(f));
  Dataset t{5, {}};
  for (std::uint64_t x = 0; x < 32; x += 3) t.samples.push_back({x, f.value(x)});
  EXPECT_EQ(learner.learn(t, {}), LearnerVerdict::identified(BitString(1)));
  t.samples[2].y = !t.samples[2].y;
  EXPECT_FALSE(learner.learn(t, {}).valid);
}

// Every (T, r) with B = 4 samples over n = 4 bits and |r| = 4.
TEST(ApproximateCorrect, NeverTotallyIncorrect) {
  constexpr std::size_t B = 4, n = 4;
  const auto f = make_classical_standin(12, n);
  const XorMaskLearner xor_l(ConceptClass::xor_mask(f));
  const BitIndexLearner maj(ConceptClass::bit_index(n, 4), BitIndexMode::Majority);
  const BitIndexLearner strict(ConceptClass::bit_index(n, 3), BitIndexMode::Strict);
  const RsLearner rs(ConceptClass::rs_block(1, 4));
  const std::vector<const Identifier*> learners{&xor_l, &maj, &strict, &rs};
  std::uint64_t checked = 0;
  for (std::uint64_t code = 0; code < (std::uint64_t{1} << (B * (n + 1))); ++code) {
    const Dataset t = dataset_from_code(code, B, n);
    for (const Identifier* l : learners) {
      const std::uint64_t seeds = std::uint64_t{1} << l->seed_width();
      for (std::uint64_t r = 0; r < seeds; ++r) {
        const auto v = l->learn(t, with_r(BitString::from_uint(r, l->seed_width())));
        if (v.valid && !agrees_somewhere(l->concept_class(), v.alpha, t)) {
          FAIL() << l->name() << " totally incorrect on T=" << t.encode().str() << " r=" << r;
        }
        ++checked;
      }
    }
  }
  EXPECT_EQ(checked, (std::uint64_t{1} << 20) * (16 + 16 + 8 + 1));
}

TEST(ApproximateCorrect, SomeSeedIsClose) {
  constexpr std::size_t B = 4, n = 4;
  const auto f = make_classical_standin(13, n);
  const XorMaskLearner xor_l(ConceptClass::xor_mask(f));
  const BitIndexLearner maj(ConceptClass::bit_index(n, 4), BitIndexMode::Majority);
  for (const Identifier* l : std::vector<const Identifier*>{&xor_l, &maj}) {
    const auto& cls = l->concept_class();
    std::vector<std::vector<std::uint8_t>> tables;
    for (std::uint64_t a = 0; a < cls.concept_count(); ++a) tables.push_back(cls.truth_table(a));
    auto dist = [&](std::uint64_t a, std::uint64_t b) {
      std::size_t d = 0;
      for (std::size_t x = 0; x < 16; ++x) d += tables[a][x] != tables[b][x];
      return d / 16.0;
    };
    for (std::uint64_t truth = 0; truth < cls.concept_count(); ++truth) {
      for (std::uint64_t xs = 0; xs < (std::uint64_t{1} << (B * n)); ++xs) {
        std::vector<std::uint64_t> x;
        for (std::size_t s = 0; s < B; ++s) x.push_back((xs >> (s * n)) & 15u);
        const Dataset t = label_dataset(cls, truth, x);
        double best = 1;
        for (std::uint64_t r = 0; r < (std::uint64_t{1} << l->seed_width()) && best > 1.0 / 3; ++r) {
          const auto v = l->learn(t, with_r(BitString::from_uint(r, l->seed_width())));
          ASSERT_TRUE(v.valid);
          best = std::min(best, dist(v.alpha.to_uint(), truth));
        }
        ASSERT_LE(best, 1.0 / 3) << l->name() << " truth=" << truth << " xs=" << xs;
      }
    }
  }
}

TEST(PacContract, SampleSizeForBitIndexAndXor) {
  // Smallest B from a grid reaching pac_distance <= eps in >= 1 - delta of
  // the trials, with uniform samples and zero seed.
  constexpr double eps = 0.1, delta = 0.1;
  constexpr int trials = 200;
  const auto f = make_classical_standin(14, 8);
  const XorMaskLearner xor_l(ConceptClass::xor_mask(f));
  const BitIndexLearner maj(ConceptClass::bit_index(8, 8), BitIndexMode::Majority);
  const auto uniform = InputDistribution::uniform(8);
  for (const Identifier* l : std::vector<const Identifier*>{&xor_l, &maj}) {
    const auto& cls = l->concept_class();
    Rng rng(15);
    std::size_t b0 = 0;
    for (std::size_t B = 2; B <= 64 && b0 == 0; B += 2) {
      int ok = 0;
      for (int trial = 0; trial < trials; ++trial) {
        const std::uint64_t truth = uniform_below(rng, cls.concept_count());
        const auto v = l->learn(label_dataset(cls, truth, random_inputs(rng, B, 8)), {});
        ASSERT_TRUE(v.valid);
        ok += pac_distance(cls.member(v.alpha), cls.member(BitString::from_uint(truth, cls.m())), uniform) <= eps;
      }
      if (ok >= (1 - delta) * trials) b0 = B;
    }
    ::testing::Test::RecordProperty(l->name() + "_B0", static_cast<int>(b0));
    EXPECT_GT(b0, 0u) << l->name();
    EXPECT_LE(b0, 32u) << l->name();
  }
}

TEST(LearnerCircuit, MatchesDirectLearnerOnAllSmallDatasets) {
  constexpr std::size_t B = 3, n = 4;
  for (std::size_t m : {4u, 3u}) {
    for (auto mode : {BitIndexMode::Majority, BitIndexMode::Strict}) {
      const BitIndexLearner learner(ConceptClass::bit_index(n, m), mode);
      const Circuit c = learner_as_circuit(learner, B);
      ASSERT_EQ(c.output_width(), m + 1);
      std::uint64_t mismatches = 0, total = 0;
      sweep_inputs(c, [&](std::uint64_t base, std::span<const std::uint64_t> out, unsigned lanes) {
        for (unsigned lane = 0; lane < lanes; ++lane) {
          const std::uint64_t in = base + lane;
          const Dataset t = dataset_from_code(in >> m, B, n);
          const auto v = learner.learn(t, with_r(BitString::from_uint(in & ((1u << m) - 1), m)));
          const bool valid = (out[m] >> lane) & 1u;
          bool same = valid == v.valid;
          for (std::size_t i = 0; i < m && same && valid; ++i) same = ((out[i] >> lane) & 1u) == v.alpha[i];
          mismatches += !same;
          ++total;
        }
      });
      EXPECT_EQ(total, std::uint64_t{1} << (B * (n + 1) + m));
      EXPECT_EQ(mismatches, 0u) << "m=" << m;
    }
  }
}

TEST(LearnerCircuit, MatchesDirectLearnerOnRandomDatasets) {
  constexpr std::size_t B = 6, n = 8, m = 8;
  const BitIndexLearner learner(ConceptClass::bit_index(n, m), BitIndexMode::Majority);
  const Circuit c = learner_as_circuit(learner, B);
  Rng rng(16);
  for (int trial = 0; trial < 10000; ++trial) {
    Dataset t{n, {}};
    for (std::size_t l = 0; l < B; ++l) t.samples.push_back({uniform_below(rng, 256), coin(rng)});
    const BitString r = BitString::from_uint(uniform_below(rng, 256), m);
    const BitString out = eval(c, {{"T", t.encode()}, {"r", r}});
    const auto v = learner.learn(t, with_r(r));
    ASSERT_EQ(out[m], v.valid);
    if (v.valid) {
      ASSERT_EQ(out.slice(0, m), v.alpha);
    }
  }
}

TEST(LearnerCircuit, SingleSampleSetsAtMostOneBit) {
  const BitIndexLearner learner(ConceptClass::bit_index(6, 8), BitIndexMode::Majority);
  const Circuit c = learner_as_circuit(learner, 1);
  for (std::uint64_t s = 0; s < 128; ++s) {
    const BitString out = eval(c, {{"T", BitString::from_uint(s, 7)}, {"r", BitString(8)}});
    EXPECT_LE(out.slice(0, 8).popcount(), 1u);
  }
}

TEST(LearnerCircuit, SatRoundTrip) {
  constexpr std::size_t B = 5, n = 6, m = 6;
  const BitIndexLearner learner(ConceptClass::bit_index(n, m), BitIndexMode::Majority);
  const Circuit c = learner_as_circuit(learner, B);
  Oracle oracle;
  Rng rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    BitString target = BitString::from_uint(uniform_below(rng, 64), m);
    const CnfFormula f = to_cnf(c, pin_prefix(BitString::concat(target, BitString(1, true)), m + 1));
    const auto verdict = oracle.decide(f);
    ASSERT_TRUE(verdict.sat());
    const Dataset t = Dataset::decode(project(*verdict.model, f.input_var_map.at("T")), n);
    const BitString r = project(*verdict.model, f.input_var_map.at("r"));
    EXPECT_EQ(learner.learn(t, with_r(r)), LearnerVerdict::identified(target));
  }
}

TEST(LearnerCircuit, UnsupportedAndOversized) {
  const auto f = make_classical_standin(18, 4);
  EXPECT_THROW(learner_as_circuit(XorMaskLearner(ConceptClass::xor_mask(f)), 3), Unsupported);
  const BitIndexLearner big(ConceptClass::bit_index(10, 8), BitIndexMode::Majority);
  EXPECT_NO_THROW(learner_as_circuit(big, 8));
  EXPECT_THROW(learner_as_circuit(big, 9), TooLarge);
}
