#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "redlab/circuit.hpp"
#include "redlab/cnf.hpp"
#include "redlab/error.hpp"
#include "redlab/oracle.hpp"
#include "support.hpp"

using namespace redlab;
using redlab::testing::brute_force_preimage;
using redlab::testing::interpret;
using redlab::testing::random_circuit;

namespace {

Circuit identity(std::size_t width) {
  CircuitBuilder b;
  auto in = b.add_input("x", width);
  b.add_outputs(in);
  return std::move(b).build();
}

}  // namespace

TEST(BitString, StringAndIntegerForms) {
  const auto b = BitString::parse("0110");
  EXPECT_EQ(b, BitString::from_uint(6, 4));
  EXPECT_EQ(b.to_uint(), 6u);
  EXPECT_EQ(b.str(), "0110");
  EXPECT_TRUE(b[1]);
  EXPECT_FALSE(b[0]);
  EXPECT_EQ(BitString::concat(b, BitString::parse("1")).str(), "01101");
  EXPECT_EQ(b.hamming(BitString::parse("1111")), 2u);
  EXPECT_THROW(BitString::parse("01x"), ParseError);
}

TEST(Eval, IdentityCircuit) {
  auto c = identity(4);
  EXPECT_EQ(eval(c, {{"x", BitString::parse("1010")}}).str(), "1010");
}

TEST(Eval, XorOfEqualBitsIsZero) {
  CircuitBuilder b;
  auto a = b.add_input("a", 1);
  auto c = b.add_input("b", 1);
  b.add_output(b.xor_(a[0], c[0]));
  auto circ = std::move(b).build();
  EXPECT_EQ(eval(circ, {{"a", BitString::parse("1")}, {"b", BitString::parse("1")}}).str(), "0");
}

TEST(Eval, WidthMismatchIsRejected) {
  auto c = identity(4);
  EXPECT_THROW(eval(c, {{"x", BitString::parse("101")}}), InvalidAssignment);
  EXPECT_THROW(eval(c, {}), InvalidAssignment);
  EXPECT_THROW(eval(c, {{"x", BitString::parse("1010")}, {"y", BitString::parse("1")}}), InvalidAssignment);
}

TEST(Eval, RandomCircuitsMatchIndependentInterpreter) {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    auto rc = random_circuit(rng, {8}, 50, 4);
    auto c = redlab::testing::build(rc);
    for (std::uint64_t x = 0; x < 256; ++x) {
      const auto in = BitString::from_uint(x, 8);
      ASSERT_EQ(eval(c, {{"g0", in}}), interpret(rc, x)) << "trial " << trial << " x " << x;
    }
  }
}

TEST(Eval, WordParallelMatchesScalar) {
  Rng rng(12);
  auto rc = random_circuit(rng, {6}, 40, 3);
  auto c = redlab::testing::build(rc);
  std::vector<std::uint64_t> words(6, 0);
  for (std::uint64_t lane = 0; lane < 64; ++lane) {
    for (std::size_t i = 0; i < 6; ++i) words[i] |= static_cast<std::uint64_t>(uint_bit(lane, 6, i)) << lane;
  }
  const auto out = c.eval_words(words);
  for (std::uint64_t lane = 0; lane < 64; ++lane) {
    const auto expect = interpret(rc, lane);
    for (std::size_t o = 0; o < 3; ++o) EXPECT_EQ(((out[o] >> lane) & 1u) != 0, expect[o]);
  }
}

TEST(Builder, DerivedGatesMatchArithmetic) {
  CircuitBuilder b;
  auto a = b.add_input("a", 5);
  auto c = b.add_input("c", 3);
  auto pc = b.popcount(a);
  std::vector<Wire> a_le(a.rbegin(), a.rend());
  std::vector<Wire> c_le(c.rbegin(), c.rend());
  b.add_output(b.greater(a_le, c_le));
  b.add_output(b.less_than_const(a, 19));
  b.add_outputs(pc);
  auto circ = std::move(b).build();
  for (std::uint64_t x = 0; x < 32; ++x) {
    for (std::uint64_t y = 0; y < 8; ++y) {
      auto out = eval(circ, {{"a", BitString::from_uint(x, 5)}, {"c", BitString::from_uint(y, 3)}});
      EXPECT_EQ(out[0], x > y);
      EXPECT_EQ(out[1], x < 19);
      std::uint64_t count = 0;
      for (std::size_t i = 0; i < pc.size(); ++i) count |= static_cast<std::uint64_t>(out[2 + i]) << i;
      EXPECT_EQ(count, static_cast<std::uint64_t>(__builtin_popcountll(x)));
    }
  }
}

TEST(FixInputs, FixingEverythingLeavesAConstant) {
  auto c = identity(3);
  auto fixed = fix_inputs(c, "x", BitString::parse("101"));
  EXPECT_TRUE(fixed.groups().empty());
  EXPECT_EQ(eval(fixed, {}).str(), "101");
}

TEST(FixInputs, PrefixLeavesRemainingBits) {
  auto c = identity(2);
  auto fixed = fix_inputs(c, "x", BitString::parse("1"));
  ASSERT_EQ(fixed.groups().size(), 1u);
  EXPECT_EQ(fixed.group("x").width, 1u);
  EXPECT_EQ(eval(fixed, {{"x", BitString::parse("0")}}).str(), "10");
  EXPECT_THROW(fix_inputs(c, "nope", BitString::parse("1")), InvalidAssignment);
  EXPECT_THROW(fix_inputs(c, "x", BitString::parse("101")), InvalidAssignment);
}

TEST(FixInputs, CommutesWithConcatenatedEval) {
  Rng rng(13);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t wa = 1 + uniform_below(rng, 5);
    const std::size_t wb = 1 + uniform_below(rng, 5);
    auto rc = random_circuit(rng, {wa, wb}, 30, 3);
    auto c = redlab::testing::build(rc);
    const std::size_t k = uniform_below(rng, wa + 1);
    const auto a = BitString::from_uint(rng(), wa);
    const auto bb = BitString::from_uint(rng(), wb);
    auto fixed = fix_inputs(c, "g0", a.slice(0, k));
    InputAssignment asg{{"g1", bb}};
    if (k < wa) asg["g0"] = a.slice(k, wa - k);
    ASSERT_EQ(eval(fixed, asg), eval(c, {{"g0", a}, {"g1", bb}}));
  }
}

TEST(ToCnf, AndPinnedHighForcesBothInputs) {
  CircuitBuilder b;
  auto x = b.add_input("x", 2);
  b.add_output(b.and_(x[0], x[1]));
  auto c = std::move(b).build();
  auto f = to_cnf(c, {true});
  Oracle oracle;
  auto sols = enumerate_blocking(f, f.input_var_map.at("x"), oracle, 10);
  ASSERT_EQ(sols.size(), 1u);
  EXPECT_EQ(sols[0].str(), "11");
}

TEST(ToCnf, IdentityPinnedLowIsAUnitClause) {
  auto c = identity(1);
  auto f = to_cnf(c, {false});
  EXPECT_EQ(f.variable_count, 1);
  ASSERT_EQ(f.clauses.size(), 1u);
  EXPECT_EQ(f.clauses[0], Clause({-1}));
}

TEST(ToCnf, SolutionCountsMatchPreimagesOnEightInputs) {
  Rng rng(14);
  Oracle oracle;
  for (int trial = 0; trial < 60; ++trial) {
    auto rc = random_circuit(rng, {8}, 40, 1 + uniform_below(rng, 3));
    auto c = redlab::testing::build(rc);
    const auto target = interpret(rc, uniform_below(rng, 256));
    auto f = to_cnf(c, pin_prefix(target, c.output_width()));
    const auto count = count_models(f, f.input_var_map.at("g0"), oracle);
    EXPECT_EQ(count, brute_force_preimage(rc, target).size()) << "trial " << trial;
  }
}

TEST(ToCnf, ProjectedSolutionsEqualPreimagesUpTo20Inputs) {
  Rng rng(15);
  Oracle oracle;
  for (int trial = 0; trial < 6; ++trial) {
    const std::size_t n = 14 + 2 * static_cast<std::size_t>(trial % 4);  // up to 20
    auto rc = random_circuit(rng, {n}, 3 * n, 8 + uniform_below(rng, 4));
    auto c = redlab::testing::build(rc);
    const auto target = interpret(rc, rng() & ((std::uint64_t{1} << n) - 1));
    auto f = to_cnf(c, pin_prefix(target, c.output_width()));
    auto sols = enumerate_projected(f, f.input_var_map.at("g0"), oracle);
    std::set<BitString> got(sols.begin(), sols.end());
    EXPECT_EQ(got.size(), sols.size());
    EXPECT_EQ(got, brute_force_preimage(rc, target)) << "n = " << n;
  }
}

TEST(Dimacs, ExportIsByteExactAndRoundTrips) {
  CnfFormula f;
  f.variable_count = 3;
  f.clauses = {{1, -2}, {3}, {-1, 2, -3}};
  const std::string text = to_dimacs(f);
  EXPECT_EQ(text, "p cnf 3 3\n1 -2 0\n3 0\n-1 2 -3 0\n");
  std::istringstream in("c comment\n" + text);
  auto g = parse_dimacs(in);
  EXPECT_EQ(g.variable_count, 3);
  EXPECT_EQ(g.clauses, f.clauses);
  std::istringstream bad("p cnf 2 1\n1 5 0\n");
  EXPECT_THROW(parse_dimacs(bad), ParseError);
}

TEST(Dimacs, FalseFormulaIsExplicit) {
  auto f = CnfFormula::make_false();
  EXPECT_TRUE(f.is_false());
  EXPECT_FALSE(to_cnf(identity(2)).is_false());
}
