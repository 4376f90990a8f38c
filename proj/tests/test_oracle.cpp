#include <gtest/gtest.h>

#include <set>

#include "redlab/error.hpp"
#include "redlab/oracle.hpp"
#include "redlab/sat_solver.hpp"
#include "support.hpp"

using namespace redlab;

namespace {

CnfFormula random_3cnf(Rng& rng, int vars, std::size_t clauses) {
  CnfFormula f;
  f.variable_count = vars;
  for (std::size_t c = 0; c < clauses; ++c) {
    Clause cl;
    for (int k = 0; k < 3; ++k) {
      const int v = 1 + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(vars)));
      cl.push_back(coin(rng) ? v : -v);
    }
    f.clauses.push_back(cl);
  }
  return f;
}

// Truth-table satisfiability for <= 20 variables.
std::uint64_t brute_force_count(const CnfFormula& f) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> masks;
  for (const auto& c : f.clauses) {
    std::uint32_t pos = 0;
    std::uint32_t neg = 0;
    for (int lit : c) (lit > 0 ? pos : neg) |= 1u << (std::abs(lit) - 1);
    masks.emplace_back(pos, neg);
  }
  std::uint64_t count = 0;
  for (std::uint32_t a = 0; a < (1u << f.variable_count); ++a) {
    bool ok = true;
    for (auto [pos, neg] : masks) {
      if (((a & pos) | (~a & neg)) == 0) {
        ok = false;
        break;
      }
    }
    count += ok;
  }
  return count;
}

std::vector<int> all_vars(int n) {
  std::vector<int> v;
  for (int i = 1; i <= n; ++i) v.push_back(i);
  return v;
}

// A 12-bit random input through a random circuit with a 5-bit output word.
struct PrefixCase {
  redlab::testing::RandomCircuit rc;
  Circuit sampler;
};

PrefixCase make_sampler(Rng& rng) {
  auto rc = redlab::testing::random_circuit(rng, {12}, 60, 5);
  CircuitBuilder b;
  auto r = b.add_input("r", 12);
  b.add_outputs(b.inline_circuit(redlab::testing::build(rc), {{"g0", r}}));
  return {rc, std::move(b).build()};
}

}  // namespace

TEST(Decide, EmptyFormulaIsSat) {
  Oracle o;
  CnfFormula f;
  f.variable_count = 3;
  auto v = o.decide(f);
  EXPECT_TRUE(v.sat());
  EXPECT_TRUE(v.model.has_value());
}

TEST(Decide, ContradictionIsUnsat) {
  Oracle o;
  CnfFormula f;
  f.variable_count = 1;
  f.clauses = {{1}, {-1}};
  auto v = o.decide(f);
  EXPECT_FALSE(v.sat());
  EXPECT_FALSE(v.model.has_value());
  EXPECT_FALSE(o.decide(CnfFormula::make_false()).sat());
}

TEST(Decide, AgreesWithTruthTablesOnRandom16VarFormulas) {
  Rng rng(21);
  Oracle o;
  int sat = 0;
  for (int trial = 0; trial < 200; ++trial) {
    auto f = random_3cnf(rng, 16, 60 + uniform_below(rng, 20));
    const bool expect = brute_force_count(f) > 0;
    auto v = o.decide(f);
    ASSERT_EQ(v.sat(), expect) << "trial " << trial;
    if (v.sat()) {
      EXPECT_TRUE(satisfies(f, *v.model));
      ++sat;
    }
  }
  // The clause ratio straddles the threshold, so both verdicts occur.
  EXPECT_GT(sat, 20);
  EXPECT_LT(sat, 180);
  EXPECT_EQ(o.stats().queries, 200u);
}

TEST(Decide, IsDeterministic) {
  Rng rng(22);
  auto f = random_3cnf(rng, 40, 150);
  Oracle a;
  Oracle b;
  auto va = a.decide(f);
  auto vb = b.decide(f);
  EXPECT_EQ(va.sat(), vb.sat());
  EXPECT_EQ(va.model, vb.model);
  EXPECT_EQ(a.stats().cumulative_conflicts, b.stats().cumulative_conflicts);
}

TEST(Solver, HardInstancesStayCorrect) {
  // Pigeonhole 7 -> 6 is unsatisfiable and needs real conflict learning.
  CnfFormula f;
  const int pigeons = 7;
  const int holes = 6;
  auto var = [&](int p, int h) { return p * holes + h + 1; };
  f.variable_count = pigeons * holes;
  for (int p = 0; p < pigeons; ++p) {
    Clause c;
    for (int h = 0; h < holes; ++h) c.push_back(var(p, h));
    f.clauses.push_back(c);
  }
  for (int h = 0; h < holes; ++h) {
    for (int p = 0; p < pigeons; ++p) {
      for (int q = p + 1; q < pigeons; ++q) f.clauses.push_back({-var(p, h), -var(q, h)});
    }
  }
  Oracle o;
  EXPECT_FALSE(o.decide(f).sat());
  EXPECT_GT(o.stats().cumulative_conflicts, 100u);
}

TEST(Solver, AssumptionsDoNotPoisonLaterQueries) {
  CdclSolver s;
  s.add_clause({1, 2});
  s.add_clause({-1, 3});
  const int a1[] = {-2, -3};
  EXPECT_EQ(s.solve(a1), CdclSolver::Result::Unsat);
  EXPECT_EQ(s.solve(), CdclSolver::Result::Sat);
  const int a2[] = {-2};
  ASSERT_EQ(s.solve(a2), CdclSolver::Result::Sat);
  EXPECT_TRUE(s.model_value(1));
  EXPECT_TRUE(s.model_value(3));
}

TEST(PrefixExtends, EmptyPrefixInImageIsTrue) {
  Rng rng(23);
  Oracle o;
  auto pc = make_sampler(rng);
  const auto x = eval(pc.sampler, {{"r", BitString::from_uint(1234, 12)}});
  EXPECT_TRUE(prefix_extends(pc.sampler, x, BitString(), o));
}

TEST(PrefixExtends, FullPrefixWithWrongImageIsFalse) {
  Rng rng(24);
  Oracle o;
  auto pc = make_sampler(rng);
  const auto r = BitString::from_uint(77, 12);
  auto x = eval(pc.sampler, {{"r", r}});
  EXPECT_TRUE(prefix_extends(pc.sampler, x, r, o));
  x.flip(0);
  EXPECT_FALSE(prefix_extends(pc.sampler, x, r, o));
}

TEST(PrefixExtends, AgreesWithSuffixEnumerationOnAllPrefixes) {
  Rng rng(25);
  Oracle o;
  for (int c = 0; c < 20; ++c) {
    auto pc = make_sampler(rng);
    const auto u_full = BitString::from_uint(rng(), 12);
    // Half the targets come from the image, half are arbitrary.
    const auto x = c % 2 ? eval(pc.sampler, {{"r", BitString::from_uint(rng(), 12)}}) : BitString::from_uint(rng(), 5);
    bool previous = true;
    for (std::size_t len = 0; len <= 12; ++len) {
      const auto u = u_full.slice(0, len);
      bool expect = false;
      const std::size_t rest = 12 - len;
      for (std::uint64_t v = 0; v < (std::uint64_t{1} << rest) && !expect; ++v) {
        const std::uint64_t r = (len ? (u.to_uint() << rest) : 0) | v;
        expect = redlab::testing::interpret(pc.rc, r) == x;
      }
      const bool got = prefix_extends(pc.sampler, x, u, o);
      ASSERT_EQ(got, expect) << "case " << c << " prefix length " << len;
      // Extendable prefixes are closed under taking prefixes.
      if (got) {
        EXPECT_TRUE(previous);
      }
      previous = got;
    }
  }
}

TEST(CountModels, FalseFormulaHasNoModels) {
  Oracle o;
  const int vars[] = {};
  EXPECT_EQ(count_models(CnfFormula::make_false(), std::span<const int>(vars, 0), o), 0u);
}

TEST(CountModels, UnconstrainedVariablesCountFully) {
  Oracle o;
  for (int k = 1; k <= 10; ++k) {
    CnfFormula f;
    f.variable_count = k;
    EXPECT_EQ(count_models(f, all_vars(k), o), std::uint64_t{1} << k);
  }
}

TEST(CountModels, RejectsOversizedProjection) {
  Oracle o;
  CnfFormula f;
  f.variable_count = 25;
  EXPECT_THROW(count_models(f, all_vars(25), o), TooLarge);
}

TEST(CountModels, MatchesBlockingClauseEnumeration) {
  Rng rng(26);
  Oracle o;
  for (int trial = 0; trial < 40; ++trial) {
    auto f = random_3cnf(rng, 14, 30 + uniform_below(rng, 30));
    std::vector<int> proj;
    for (int v = 1; v <= 14; ++v) {
      if (coin(rng)) proj.push_back(v);
    }
    const auto count = count_models(f, proj, o);
    auto listed = enumerate_blocking(f, proj, o, ~std::uint64_t{0});
    std::set<BitString> distinct(listed.begin(), listed.end());
    EXPECT_EQ(distinct.size(), listed.size());
    EXPECT_EQ(count, listed.size()) << "trial " << trial;
    if (proj.size() == 14) {
      EXPECT_EQ(count, brute_force_count(f));
    }
  }
}

TEST(Backend, ConfigParsing) {
  EXPECT_EQ(BackendConfig::parse("builtin").kind, BackendKind::Builtin);
  auto ext = BackendConfig::parse("dimacs:/opt/solver");
  EXPECT_EQ(ext.kind, BackendKind::External);
  EXPECT_EQ(ext.solver_path, "/opt/solver");
  EXPECT_EQ(ext.describe(), "dimacs:/opt/solver");
  EXPECT_THROW(BackendConfig::parse("minisat"), ConfigError);
}

TEST(Backend, MissingExternalSolverIsReported) {
  Oracle o(BackendConfig::parse("dimacs:/nonexistent/solver"));
  CnfFormula f;
  f.variable_count = 1;
  f.clauses = {{1}};
  EXPECT_THROW(o.decide(f), BackendUnavailable);
}

TEST(Backend, ExternalSolverAgreesWithBuiltin) {
  Rng rng(27);
  Oracle builtin;
  Oracle external(BackendConfig::parse(std::string("dimacs:") + REDLAB_SAT_BINARY));
  EXPECT_EQ(external.stats().backend, BackendKind::External);
  for (int trial = 0; trial < 30; ++trial) {
    auto f = random_3cnf(rng, 16, 60 + uniform_below(rng, 20));
    auto a = builtin.decide(f);
    auto b = external.decide(f);
    ASSERT_EQ(a.sat(), b.sat());
    if (b.sat()) {
      EXPECT_TRUE(satisfies(f, *b.model));
    }
  }
  auto f = random_3cnf(rng, 10, 20);
  std::vector<int> proj{1, 2, 3, 4, 5, 6};
  EXPECT_EQ(count_models(f, proj, builtin), count_models(f, proj, external));
}
