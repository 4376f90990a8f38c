#include "redlab/harness.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <variant>

#include <boost/math/distributions/chi_squared.hpp>

#include "redlab/concepts.hpp"
#include "redlab/error.hpp"
#include "redlab/learners.hpp"
#include "redlab/reductions.hpp"
#include "redlab/rscode.hpp"
#include "redlab/samplers.hpp"
#include "redlab/targets.hpp"
#include "redlab/witness.hpp"

namespace redlab {

namespace {

using json = nlohmann::json;

using Slot = std::variant<std::optional<std::size_t> ExperimentConfig::*, std::optional<double> ExperimentConfig::*,
                          std::optional<std::string> ExperimentConfig::*>;

const std::map<std::string, Slot>& slots() {
  static const std::map<std::string, Slot> table = {
      {"n", &ExperimentConfig::n},
      {"m", &ExperimentConfig::m},
      {"B", &ExperimentConfig::B},
      {"votes", &ExperimentConfig::votes},
      {"trials", &ExperimentConfig::trials},
      {"draws", &ExperimentConfig::draws},
      {"instances", &ExperimentConfig::instances},
      {"rounds", &ExperimentConfig::rounds},
      {"aux", &ExperimentConfig::aux},
      {"degree", &ExperimentConfig::degree},
      {"k", &ExperimentConfig::k},
      {"samples", &ExperimentConfig::samples},
      {"width", &ExperimentConfig::width},
      {"min_support", &ExperimentConfig::min_support},
      {"max_support", &ExperimentConfig::max_support},
      {"bit_bound", &ExperimentConfig::bit_bound},
      {"beta", &ExperimentConfig::beta},
      {"eps", &ExperimentConfig::eps},
      {"eps_prime", &ExperimentConfig::eps_prime},
      {"delta", &ExperimentConfig::delta},
      {"c", &ExperimentConfig::c},
      {"class", &ExperimentConfig::class_kind},
      {"target", &ExperimentConfig::target},
      {"learner", &ExperimentConfig::learner},
      {"alpha", &ExperimentConfig::alpha},
  };
  return table;
}

const std::map<std::string, std::vector<std::string>>& field_lists() {
  static const std::map<std::string, std::vector<std::string>> table = {
      {"verify-class", {"class", "n", "m", "c", "target", "degree", "k"}},
      {"rs-props", {"degree", "k", "bit_bound"}},
      {"invert-exact-rg", {"n", "rounds", "target"}},
      {"invert-approx-rg", {"n", "rounds", "target", "eps", "votes", "trials", "aux"}},
      {"ident-reduce", {"n", "m", "eps", "eps_prime", "delta", "B", "draws", "learner", "alpha"}},
      {"advice-eval", {"n", "m", "B", "target", "alpha"}},
      {"approx-verif", {"n", "m", "B", "beta", "eps", "samples"}},
      {"m-alpha", {"n", "m", "B", "beta", "trials", "alpha"}},
      {"witness-uniformity", {"instances", "draws", "width", "min_support", "max_support"}},
  };
  return table;
}

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
  throw ConfigError("field '" + field + "': " + what);
}

std::uint64_t parse_count(const std::string& field, const std::string& text) {
  std::uint64_t v = 0;
  const auto* end = text.data() + text.size();
  const auto [p, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || p != end) field_error(field, "expected a non-negative integer, got '" + text + "'");
  return v;
}

double parse_real(const std::string& field, const std::string& text) {
  double v = 0;
  const auto* end = text.data() + text.size();
  const auto [p, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || p != end || !std::isfinite(v)) {
    field_error(field, "expected a number, got '" + text + "'");
  }
  return v;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::size_t line_of(const std::string& text, std::size_t byte) {
  const auto upto = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n'));
}

// ---- shared pieces ----

TargetFunction make_target(const std::string& kind, std::size_t n, std::uint64_t seed) {
  if (kind == "standin") return make_classical_standin(mix_seed(seed, 0x7a), n);
  std::vector<std::uint8_t> table(std::size_t{1} << n);
  for (std::size_t x = 0; x < table.size(); ++x) table[x] = static_cast<std::uint8_t>(std::popcount(x) & 1);
  return TargetFunction::from_table(n, std::move(table));
}

BitString resolve_alpha(const ExperimentConfig& cfg, std::size_t m) {
  if (cfg.alpha) return BitString::parse(*cfg.alpha);
  Rng rng(mix_seed(cfg.seed, 0xa1));
  BitString a(m);
  for (std::size_t i = 0; i < m; ++i) a.set(i, coin(rng));
  return a;
}

json oracle_json(const OracleStats& s) {
  return {{"queries", s.queries}, {"conflicts", s.cumulative_conflicts}};
}

json heur_json(const HeuristicErrorReport& r) {
  return {{"fraction_bad", r.fraction_bad},
          {"ci_halfwidth", r.ci_halfwidth},
          {"threshold", r.threshold},
          {"trials_per_x", r.trials_per_x},
          {"inputs", r.per_x.size()},
          {"exhaustive", r.exhaustive},
          {"mean_success", r.mean_success},
          {"min_success", r.min_success},
          {"evaluations", r.evaluations},
          {"wrong", r.wrong},
          {"abstained", r.abstained},
          {"abstention_rate", r.evaluations ? static_cast<double>(r.abstained) / static_cast<double>(r.evaluations) : 0.0},
          {"abstain_causes", r.abstain_causes},
          {"oracle", oracle_json(r.oracle)}};
}

CsvTable per_x_csv(const HeuristicErrorReport& r, std::size_t n) {
  CsvTable t;
  t.header = {"x", "truth", "trials", "correct", "wrong", "abstained", "no_preimage", "no_witness", "ambiguous",
              "success"};
  for (const auto& p : r.per_x) {
    t.rows.push_back({BitString::from_uint(p.x, n).str(), std::to_string(p.truth), std::to_string(p.trials),
                      std::to_string(p.correct), std::to_string(p.wrong), std::to_string(p.abstained),
                      std::to_string(p.no_preimage), std::to_string(p.no_witness), std::to_string(p.ambiguous),
                      fmt(p.success())});
  }
  return t;
}

HeurOptions heur_options(const ExperimentConfig& cfg) {
  HeurOptions o;
  o.jobs = cfg.jobs;
  o.seed = cfg.seed;
  o.backend = cfg.solver;
  return o;
}

void cap(const std::string& field, std::uint64_t value, std::uint64_t lo, std::uint64_t hi) {
  if (value < lo || value > hi) {
    field_error(field, "must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "], got " +
                           std::to_string(value));
  }
}

// ---- experiments ----

void run_verify_class(const ExperimentConfig& cfg, ReductionReport& rep) {
  const std::string kind = cfg.class_kind.value_or("xor");
  if (kind == "xor") {
    const std::size_t n = cfg.n.value_or(8);
    cap("n", n, 1, 10);
    const std::string target = cfg.target.value_or("standin");
    const double c = cfg.c.value_or(0.5);
    rep.params = {{"class", kind}, {"n", n}, {"target", target}, {"c", c}};
    const auto r = verify_c_distinct(ConceptClass::xor_mask(make_target(target, n, cfg.seed)), c);
    rep.metrics = {{"min_fraction", r.min_fraction}, {"min_disagreements", r.min_disagreements},
                   {"support", r.support},           {"pairs", r.pairs},
                   {"argmin", {r.argmin_a, r.argmin_b}}};
    rep.bound = {{"min_fraction_at_least", c}};
    rep.pass = r.pass;
  } else if (kind == "bit_index") {
    const std::size_t n = cfg.n.value_or(8), m = cfg.m.value_or(8);
    cap("m", m, 1, 8);
    cap("n", n, index_bits(m), 12);
    const double c = cfg.c.value_or(0.5);
    rep.params = {{"class", kind}, {"n", n}, {"m", m}, {"c", c}};
    const auto cls = ConceptClass::bit_index(n, m);
    const auto r = verify_avg_smooth(cls, c);
    // E|f1 - f2| = hamming / 2^l and d = hamming / m, so the ratio is m / 2^l
    // for every pair; count the pairs where the integer identity fails.
    const std::size_t l = index_bits(m);
    std::vector<std::vector<std::uint8_t>> tables;
    for (std::uint64_t a = 0; a < cls.concept_count(); ++a) tables.push_back(cls.truth_table(a));
    std::uint64_t violations = 0;
    for (std::uint64_t a = 0; a < tables.size(); ++a) {
      for (std::uint64_t b = a + 1; b < tables.size(); ++b) {
        std::uint64_t dis = 0;
        for (std::size_t x = 0; x < tables[a].size(); ++x) dis += tables[a][x] != tables[b][x];
        const auto ham = static_cast<std::uint64_t>(std::popcount(a ^ b));
        violations += (dis << l) != (ham << n);
      }
    }
    rep.metrics = {{"min_ratio", r.min_ratio},
                   {"min_ratio_exact", std::to_string(r.min_ratio_num) + "/" + std::to_string(r.min_ratio_den)},
                   {"expected_ratio", static_cast<double>(m) / std::ldexp(1.0, static_cast<int>(l))},
                   {"identity_violations", violations},
                   {"pairs", r.pairs},
                   {"argmin", {r.argmin_a, r.argmin_b}}};
    rep.bound = {{"min_ratio_at_least", c}, {"identity_violations", 0}};
    rep.pass = r.pass && violations == 0;
  } else if (kind == "rs_block") {
    const std::size_t degree = cfg.degree.value_or(4), k = cfg.k.value_or(2);
    cap("degree", degree, 2, 8);
    cap("k", k, 1, 12 / degree);
    if (cfg.n && *cfg.n != k * degree) field_error("n", "rs_block fixes n = k * degree = " + std::to_string(k * degree));
    const double c = cfg.c.value_or(1.0 / 3);
    rep.params = {{"class", kind}, {"n", k * degree}, {"degree", degree}, {"k", k}, {"c", c}};
    const auto r = verify_c_distinct(ConceptClass::rs_block(k, static_cast<unsigned>(degree)), c);
    rep.metrics = {{"min_fraction", r.min_fraction}, {"min_disagreements", r.min_disagreements},
                   {"support", r.support},           {"pairs", r.pairs},
                   {"argmin", {r.argmin_a, r.argmin_b}}};
    rep.bound = {{"min_fraction_at_least", c}};
    rep.pass = r.pass;
  } else {
    field_error("class", "expected xor, bit_index or rs_block, got '" + kind + "'");
  }
}

void run_rs_props(const ExperimentConfig& cfg, ReductionReport& rep) {
  const std::size_t degree = cfg.degree.value_or(4), k = cfg.k.value_or(2);
  cap("degree", degree, 2, 8);
  cap("k", k, 1, 12 / degree);
  const std::size_t bit_bound = cfg.bit_bound.value_or(8);
  rep.params = {{"degree", degree}, {"k", k}, {"bit_bound", bit_bound}};
  const std::uint64_t count = std::uint64_t{1} << (degree * k);
  std::vector<RsCodeword> words;
  std::vector<BitString> bits;
  for (std::uint64_t label = 0; label < count; ++label) {
    words.push_back(rs_encode(rs_message(label, k, static_cast<unsigned>(degree))));
    bits.push_back(codeword_bits(words.back()));
  }
  std::size_t min_sym = words[0].symbols.size(), min_bit = bits[0].width();
  std::pair<std::uint64_t, std::uint64_t> arg_sym{0, 0}, arg_bit{0, 0};
  for (std::uint64_t a = 0; a < count; ++a) {
    for (std::uint64_t b = a + 1; b < count; ++b) {
      const auto s = symbol_distance(words[a], words[b]);
      const auto h = bits[a].hamming(bits[b]);
      if (s < min_sym) min_sym = s, arg_sym = {a, b};
      if (h < min_bit) min_bit = h, arg_bit = {a, b};
    }
  }
  const auto block = verify_c_distinct(ConceptClass::rs_block(k, static_cast<unsigned>(degree)), 1.0 / 3);
  const bool sym_ok = min_sym >= 2 * k + 1, bit_ok = min_bit >= bit_bound, block_ok = block.pass;
  rep.metrics = {{"codewords", count},
                 {"min_symbol_distance", min_sym},
                 {"min_symbol_argmin", {arg_sym.first, arg_sym.second}},
                 {"min_bit_distance", min_bit},
                 {"min_bit_argmin", {arg_bit.first, arg_bit.second}},
                 {"rs_block_n", k * degree},
                 {"rs_block_min_fraction", block.min_fraction},
                 {"rs_block_argmin", {block.argmin_a, block.argmin_b}},
                 {"checks", {{"symbol_distance", sym_ok}, {"bit_distance", bit_ok}, {"rs_block", block_ok}}}};
  rep.bound = {{"min_symbol_distance_at_least", 2 * k + 1},
               {"min_bit_distance_at_least", bit_bound},
               {"rs_block_min_fraction_at_least", 1.0 / 3}};
  rep.pass = sym_ok && bit_ok && block_ok;
}

void run_invert_exact_rg(const ExperimentConfig& cfg, ReductionReport& rep) {
  const std::size_t n = cfg.n.value_or(10), rounds = cfg.rounds.value_or(4);
  cap("n", n, 2, 14);
  const std::string target = cfg.target.value_or("standin");
  rep.params = {{"n", n}, {"rounds", rounds}, {"target", target}, {"solver", cfg.solver.describe()}};
  const auto f = make_target(target, n, cfg.seed);
  const auto sampler = build_exact_sampler(f, feistel_scramble(n, rounds, mix_seed(cfg.seed, 0x5c)));
  const auto ev = eval_via_exact_rg(sampler);
  auto opt = heur_options(cfg);
  opt.bound = 0;
  const auto r = estimate_heur_error(*ev, as_concept(f), InputDistribution::uniform(n), opt);
  const std::uint64_t query_cap = (std::uint64_t{1} << n) * sampler.random_width();
  rep.metrics = heur_json(r);
  rep.metrics["disagreements"] = r.wrong;
  rep.metrics["query_cap"] = query_cap;
  rep.bound = {{"disagreements", 0}, {"abstained", 0}, {"queries_at_most", query_cap}};
  rep.pass = r.wrong == 0 && r.abstained == 0 && r.oracle.queries <= query_cap;
  rep.csv = per_x_csv(r, n);
}

void run_invert_approx_rg(const ExperimentConfig& cfg, ReductionReport& rep) {
  const std::size_t n = cfg.n.value_or(8), rounds = cfg.rounds.value_or(4), votes = cfg.votes.value_or(9),
                    trials = cfg.trials.value_or(30), aux = cfg.aux.value_or(12);
  const double eps = cfg.eps.value_or(0.05);
  cap("n", n, 2, 12);
  cap("aux", aux, 1, 24 - n);
  const std::string target = cfg.target.value_or("standin");
  rep.params = {{"n", n},       {"rounds", rounds}, {"target", target}, {"eps", eps},
                {"votes", votes}, {"trials", trials}, {"aux", aux},      {"solver", cfg.solver.describe()}};
  const auto f = make_target(target, n, cfg.seed);
  const auto sampler = build_approx_sampler(f, feistel_scramble(n, rounds, mix_seed(cfg.seed, 0x5c)), eps,
                                            mix_seed(cfg.seed, 0x5d), aux);
  const auto ev = eval_via_approx_rg(sampler, votes);
  auto opt = heur_options(cfg);
  opt.trials_per_x = trials;
  opt.bound = 6 * eps;
  const auto r = estimate_heur_error(*ev, as_concept(f), InputDistribution::uniform(n), opt);
  const auto exact = approx_rg_success_exact(sampler, f, votes);
  std::size_t predicted_bad = 0;
  double predicted_sum = 0;
  for (double s : exact) {
    const double v = std::isnan(s) ? 0.5 : s;
    predicted_bad += v < 2.0 / 3 - 1e-12;
    predicted_sum += v;
  }
  rep.metrics = heur_json(r);
  rep.metrics["flip_probability"] = realised_flip_probability(eps, aux);
  rep.metrics["sampler_tv"] = tv_distance_exact(sampler, f, InputDistribution::uniform(n));
  rep.metrics["predicted_fraction_bad"] = static_cast<double>(predicted_bad) / static_cast<double>(exact.size());
  rep.metrics["predicted_mean_success"] = predicted_sum / static_cast<double>(exact.size());
  rep.bound = {{"fraction_bad_at_most", 6 * eps}};
  rep.pass = r.fraction_bad <= 6 * eps;
  rep.csv = per_x_csv(r, n);
}

std::shared_ptr<const Identifier> bit_index_learner(std::size_t n, std::size_t m, const std::string& mode) {
  if (mode != "strict" && mode != "majority") field_error("learner", "expected strict or majority, got '" + mode + "'");
  return std::make_shared<BitIndexLearner>(ConceptClass::bit_index(n, m),
                                           mode == "strict" ? BitIndexMode::Strict : BitIndexMode::Majority);
}

// Mass of inputs whose label a dataset from the pool pins, averaged over the pool.
double pool_validity(const Identifier& learner, const std::vector<std::optional<Dataset>>& pool) {
  const std::size_t n = learner.concept_class().n();
  double sum = 0;
  for (const auto& t : pool) {
    if (!t) continue;
    std::size_t pinned = 0;
    for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x) {
      pinned += try_check_consistency(learner, x, LearnerConfig{}, *t).has_value();
    }
    sum += static_cast<double>(pinned) / std::ldexp(1.0, static_cast<int>(n));
  }
  return pool.empty() ? 0 : sum / static_cast<double>(pool.size());
}

void run_ident_reduce(const ExperimentConfig& cfg, ReductionReport& rep) {
  const std::size_t n = cfg.n.value_or(8), m = cfg.m.value_or(8);
  cap("m", m, 1, 16);
  cap("n", n, index_bits(m), 12);
  const std::size_t l = index_bits(m);
  const double block_mass = std::ldexp(1.0, -static_cast<int>(l));
  const double eps_prime = cfg.eps_prime.value_or(0.1);
  const double eps = cfg.eps.value_or(block_mass);
  const double delta = cfg.delta.value_or(0);
  auto b_for = [&](double e) {
    return static_cast<std::size_t>(std::ceil((std::log(3.0) + 2 * delta) / e - 1e-9));
  };
  const std::size_t B = cfg.B.value_or(b_for(eps));
  const std::size_t draws = cfg.draws.value_or(2000);
  cap("B", B, 1, 30 - m);
  const std::string mode = cfg.learner.value_or("strict");
  const auto learner = bit_index_learner(n, m, mode);
  const BitString alpha = resolve_alpha(cfg, m);
  if (alpha.width() != m) field_error("alpha", "expected " + std::to_string(m) + " bits");
  rep.params = {{"n", n},         {"m", m},     {"eps", eps},     {"eps_prime", eps_prime},
                {"delta", delta}, {"B", B},     {"draws", draws}, {"learner", mode},
                {"alpha", alpha.str()}, {"solver", cfg.solver.describe()}};

  Oracle oracle(cfg.solver);
  const auto ev = eval_via_verifiable_ident(learner, alpha, B, draws, mix_seed(cfg.seed, 0x1d), oracle);
  auto opt = heur_options(cfg);
  opt.trials_per_x = draws;
  opt.bound = eps_prime + 0.05;
  const auto truth = learner->concept_class().member(alpha);
  const auto r = estimate_heur_error(*ev, truth, InputDistribution::uniform(n), opt);
  const double validity = r.evaluations ? 1 - static_cast<double>(r.abstained) / static_cast<double>(r.evaluations) : 0;
  const double predicted = 1 - std::pow(1 - eps, static_cast<double>(B));

  json variants = json::array();
  for (const double e : {eps_prime, eps_prime / 2}) {
    const std::size_t vb = b_for(e);
    if (vb + m > 30) continue;
    const std::size_t vd = std::max<std::size_t>(1, draws / 4);
    const VerifiableIdentEvaluator vev(learner, alpha, vb, vd, mix_seed(cfg.seed, 0x1e + vb), oracle);
    variants.push_back({{"eps", e},
                        {"B", vb},
                        {"draws", vd},
                        {"validity", pool_validity(*learner, vev.pool())},
                        {"predicted_validity", 1 - std::pow(1 - e, static_cast<double>(vb))},
                        {"predicted_validity_block_mass", 1 - std::pow(1 - block_mass, static_cast<double>(vb))}});
  }
  const std::size_t b_paper = static_cast<std::size_t>(std::ceil(std::log(3.0) / (2 * eps) - 1e-9));

  rep.metrics = heur_json(r);
  rep.metrics["validity_rate"] = validity;
  rep.metrics["predicted_validity"] = predicted;
  rep.metrics["pool"] = {{"draws", ev->pool_stats().draws},
                         {"labelled_by_alpha", ev->pool_stats().labelled_by_alpha},
                         {"no_witness", ev->pool_stats().no_witness}};
  rep.metrics["B_tight"] = ident_sample_size_tight(eps);
  rep.metrics["B_half_eps"] = b_paper;
  rep.metrics["predicted_validity_B_half_eps"] = 1 - std::pow(1 - eps, static_cast<double>(b_paper));
  rep.metrics["variants"] = variants;
  rep.bound = {{"fraction_bad_at_most", eps_prime + 0.05}, {"validity_tolerance", 0.05}};
  rep.pass = r.fraction_bad <= eps_prime + 0.05 && std::abs(validity - predicted) <= 0.05;
  rep.csv = per_x_csv(r, n);
}

void run_advice_eval(const ExperimentConfig& cfg, ReductionReport& rep) {
  const std::size_t n = cfg.n.value_or(8), m = cfg.m.value_or(8), B = cfg.B.value_or(8);
  cap("n", n, 1, 16);
  cap("m", m, 1, std::size_t{1} << std::min<std::size_t>(n, 12));
  if (index_bits(m) > n) field_error("m", "needs ceil(log2 m) <= n");
  cap("B", B, 1, 1u << 16);
  const std::string target = cfg.target.value_or("standin");
  const BitString alpha = resolve_alpha(cfg, m);
  if (alpha.width() != m) field_error("alpha", "expected " + std::to_string(m) + " bits");
  rep.params = {{"n", n}, {"m", m}, {"B", B}, {"target", target}, {"alpha", alpha.str()}};
  Rng rng(mix_seed(cfg.seed, 0xad));
  rep.metrics = json::object();
  rep.pass = true;

  auto run = [&](const std::string& name, const Identifier& learner, const Dataset& advice, const Concept& truth) {
    const auto ev = function_evaluator(
        n, "advice(" + learner.name() + ")",
        [&](std::uint64_t x, Rng&) { return advice_evaluator(learner, advice, x); }, true);
    const auto r = estimate_heur_error(*ev, truth, InputDistribution::uniform(n), heur_options(cfg));
    std::size_t exact = 0;
    for (const auto& p : r.per_x) exact += p.correct == p.trials;
    const double frac = static_cast<double>(exact) / static_cast<double>(r.per_x.size());
    rep.metrics[name] = {{"learner", learner.name()},
                         {"advice_size", advice.size()},
                         {"exact_fraction", frac},
                         {"wrong", r.wrong},
                         {"abstained", r.abstained}};
    rep.pass = rep.pass && frac == 1.0;
    for (auto row : per_x_csv(r, n).rows) {
      row.insert(row.begin(), name);
      rep.csv.rows.push_back(std::move(row));
    }
  };
  rep.csv.header = per_x_csv({}, n).header;
  rep.csv.header.insert(rep.csv.header.begin(), "mode");

  // Singleton: B - 1 random labelled samples.
  const auto f = make_target(target, n, cfg.seed);
  const SingletonLearner single(ConceptClass::singleton(f));
  Dataset s_adv{n, {}};
  for (std::size_t i = 0; i + 1 < B; ++i) {
    const auto x = uniform_below(rng, std::uint64_t{1} << n);
    s_adv.samples.push_back({x, f.value(x)});
  }
  run("singleton", single, s_adv, as_concept(f));

  // Bit index: one labelled input per in-range index.
  const auto cls = ConceptClass::bit_index(n, m);
  const BitIndexLearner strict(cls, BitIndexMode::Strict);
  const std::size_t l = index_bits(m);
  Dataset b_adv{n, {}};
  for (std::uint64_t i = 0; i < m; ++i) {
    const auto x = (i << (n - l)) | uniform_below(rng, std::uint64_t{1} << (n - l));
    b_adv.samples.push_back({x, cls.eval(alpha.to_uint(), x)});
  }
  run("bit_index", strict, b_adv, cls.member(alpha));
  rep.bound = {{"exact_fraction", 1.0}};
}

void run_approx_verif(const ExperimentConfig& cfg, ReductionReport& rep) {
  const std::size_t n = cfg.n.value_or(6), m = cfg.m.value_or(6), B = cfg.B.value_or(6),
                    samples = cfg.samples.value_or(10000);
  const double beta = cfg.beta.value_or(6);
  const double flip = cfg.eps.value_or(1.0 / beta);
  cap("m", m, 1, 12);
  cap("n", n, index_bits(m), 16);
  cap("B", B, 1, 16);
  rep.params = {{"n", n}, {"m", m}, {"B", B}, {"beta", beta}, {"eps", flip}, {"samples", samples}};
  const auto cls = ConceptClass::bit_index(n, m);
  const auto wrapper = make_approx_verifiable(std::make_shared<BitIndexLearner>(cls, BitIndexMode::Majority), beta);
  Rng rng(mix_seed(cfg.seed, 0xaf));
  std::uint64_t proposals = 0, accepted = 0, violations = 0, below_subset = 0, max_mislabels = 0, off_target = 0;
  const std::uint64_t proposal_cap = std::max<std::uint64_t>(samples, 1) * 1000;
  std::map<std::uint64_t, std::uint64_t> histogram;
  while (accepted < samples && proposals < proposal_cap) {
    ++proposals;
    BitString alpha(m);
    for (std::size_t i = 0; i < m; ++i) alpha.set(i, coin(rng));
    Dataset t{n, {}};
    for (std::size_t j = 0; j < B; ++j) {
      const auto x = uniform_below(rng, std::uint64_t{1} << n);
      t.samples.push_back({x, cls.eval(alpha, BitString::from_uint(x, n)) != (uniform_unit(rng) < flip)});
    }
    LearnerConfig lc;
    lc.r = BitString(m);
    for (std::size_t i = 0; i < m; ++i) lc.r.set(i, coin(rng));
    const auto v = wrapper->learn(t, lc);
    if (!v.valid) continue;
    ++accepted;
    const auto bad = mislabel_count(cls, v.alpha, t);
    ++histogram[bad];
    max_mislabels = std::max<std::uint64_t>(max_mislabels, bad);
    violations += static_cast<double>(bad) * beta > static_cast<double>(B);
    below_subset += bad < wrapper->subset_size(B);
    off_target += v.alpha != alpha;
  }
  json hist = json::object();
  for (auto [k, c] : histogram) hist[std::to_string(k)] = c;
  rep.metrics = {{"accepted", accepted},
                 {"proposals", proposals},
                 {"acceptance_rate", proposals ? static_cast<double>(accepted) / static_cast<double>(proposals) : 0.0},
                 {"violations", violations},
                 {"max_mislabels", max_mislabels},
                 {"max_mislabel_fraction", static_cast<double>(max_mislabels) / static_cast<double>(B)},
                 {"subset_size", wrapper->subset_size(B)},
                 {"below_subset_size", below_subset},
                 {"verdict_differs_from_generator", off_target},
                 {"mislabel_histogram", hist}};
  rep.bound = {{"violations", 0}, {"mislabel_fraction_at_most", 1 / beta}, {"accepted_at_least", samples}};
  rep.pass = violations == 0 && accepted >= samples;
}

void run_m_alpha(const ExperimentConfig& cfg, ReductionReport& rep) {
  const std::size_t n = cfg.n.value_or(6), m = cfg.m.value_or(6), B = cfg.B.value_or(6),
                    trials = cfg.trials.value_or(160);
  const double beta = cfg.beta.value_or(6);
  cap("m", m, 1, 12);
  cap("n", n, index_bits(m), 12);
  cap("B", B, 1, 16);
  const BitString alpha = resolve_alpha(cfg, m);
  if (alpha.width() != m) field_error("alpha", "expected " + std::to_string(m) + " bits");
  rep.params = {{"n", n}, {"m", m}, {"B", B}, {"beta", beta}, {"trials", trials}, {"alpha", alpha.str()}};
  const auto cls = ConceptClass::bit_index(n, m);
  const auto wrapper = make_approx_verifiable(std::make_shared<BitIndexLearner>(cls, BitIndexMode::Majority), beta);
  const auto sampler = std::make_shared<MAlphaSampler>(wrapper, alpha, B);
  const auto ev = m_alpha_evaluator(sampler, n);
  auto opt = heur_options(cfg);
  opt.trials_per_x = trials;
  opt.threshold = 3.0 / 5;
  opt.bound = 5 / (2 * beta);
  const auto r = estimate_heur_error(*ev, cls.member(alpha), InputDistribution::uniform(n), opt);
  rep.metrics = heur_json(r);
  rep.metrics["sampler_mode"] = sampler->mode() == MAlphaMode::Reject ? "reject" : "enumerate";
  rep.metrics["bound_rederived"] = 5 / (2 * beta);
  rep.metrics["bound_stated"] = 5 / (6 * beta);
  rep.metrics["within_stated_bound"] = r.fraction_bad <= 5 / (6 * beta);
  rep.bound = {{"fraction_bad_at_most", 5 / (2 * beta)}, {"threshold", 3.0 / 5}};
  rep.pass = r.fraction_bad <= 5 / (2 * beta);
  rep.csv = per_x_csv(r, n);
}

// Random straight-line program on `width` inputs (group "w"), biased towards
// recent nodes so the outputs depend on many inputs.
Circuit random_program(Rng& rng, std::size_t width, std::size_t gates, std::size_t outputs) {
  CircuitBuilder b;
  std::vector<Wire> node = b.add_input("w", width);
  for (std::size_t g = 0; g < gates; ++g) {
    const auto count = node.size();
    auto pick = [&]() {
      if (count > 8 && coin(rng)) return node[count - 1 - uniform_below(rng, 8)];
      return node[uniform_below(rng, count)];
    };
    const auto r = uniform_below(rng, 20);
    if (r < 3) {
      node.push_back(b.not_(pick()));
    } else {
      const Wire a = pick(), c = pick();
      node.push_back(r < 9 ? b.and_(a, c) : r < 15 ? b.or_(a, c) : b.xor_(a, c));
    }
  }
  for (std::size_t o = 0; o < outputs; ++o) b.add_output(node[node.size() - 1 - uniform_below(rng, 6)]);
  return std::move(b).build();
}

struct UniformityResult {
  std::size_t support = 0, hash_rows = 0;
  bool exact_mode = false;
  double tv = 0, chi2 = 0, p_value = 0;
  std::uint64_t invalid = 0, rounds = 0, overflows = 0;
};

void run_witness_uniformity(const ExperimentConfig& cfg, ReductionReport& rep) {
  const std::size_t instances = cfg.instances.value_or(20), draws = cfg.draws.value_or(100000),
                    width = cfg.width.value_or(12), lo = cfg.min_support.value_or(128),
                    hi = cfg.max_support.value_or(512);
  cap("width", width, 4, 20);
  cap("max_support", hi, 2, std::min<std::uint64_t>(4096, std::uint64_t{1} << width));
  cap("min_support", lo, 1, hi);
  cap("instances", instances, 1, 1000);
  cap("draws", draws, 1, 100000000);
  rep.params = {{"instances", instances}, {"draws", draws},         {"width", width},
                {"min_support", lo},      {"max_support", hi},      {"solver", cfg.solver.describe()}};
  std::vector<UniformityResult> results(instances);
  const auto stats = parallel_for(instances, cfg.jobs, cfg.solver, [&](std::size_t i, Oracle& oracle) {
    Rng rng(mix_seed(cfg.seed, 0x7700 + i));
    Circuit program;
    BitString x;
    std::vector<std::uint8_t> member(std::size_t{1} << width);
    std::size_t support = 0;
    for (std::size_t attempt = 0;; ++attempt) {
      if (attempt == 100000) throw SamplerStall("no relation with the requested support size");
      const std::size_t outputs = 2 + uniform_below(rng, 5);
      program = random_program(rng, width, 3 * width, outputs);
      const auto w0 = uniform_below(rng, std::uint64_t{1} << width);
      std::vector<std::uint8_t> flat(width);
      for (std::size_t j = 0; j < width; ++j) flat[j] = uint_bit(w0, width, j);
      x = program.eval_flat(flat);
      const auto target = x.to_uint();
      support = 0;
      sweep_inputs(program, [&](std::uint64_t base, std::span<const std::uint64_t> out, unsigned lanes) {
        for (unsigned lane = 0; lane < lanes; ++lane) {
          std::uint64_t y = 0;
          for (std::size_t j = 0; j < outputs; ++j) y = (y << 1) | ((out[j] >> lane) & 1u);
          member[base + lane] = y == target;
          support += y == target;
        }
      });
      if (support >= lo && support <= hi) break;
    }
    WitnessGenerator gen(preimage_relation(program, "w", x), oracle, mix_seed(cfg.seed, i));
    std::vector<std::uint32_t> hist(member.size());
    UniformityResult& res = results[i];
    for (std::size_t d = 0; d < draws; ++d) {
      const auto w = gen.next().to_uint();
      ++hist[w];
      res.invalid += member[w] == 0;
    }
    const double N = static_cast<double>(draws), p = 1.0 / static_cast<double>(support);
    for (std::size_t w = 0; w < member.size(); ++w) {
      const double q = static_cast<double>(hist[w]) / N;
      res.tv += std::abs(q - (member[w] ? p : 0.0));
      if (member[w]) res.chi2 += (static_cast<double>(hist[w]) - N * p) * (static_cast<double>(hist[w]) - N * p) / (N * p);
    }
    res.tv /= 2;
    res.p_value = support > 1 ? boost::math::cdf(boost::math::complement(
                                    boost::math::chi_squared(static_cast<double>(support - 1)), res.chi2))
                              : 1.0;
    res.support = support;
    res.exact_mode = gen.exact_mode();
    res.hash_rows = gen.hash_rows();
    res.rounds = gen.rounds();
    res.overflows = gen.overflows();
  });
  double max_tv = 0, sum_tv = 0, min_p = 1;
  std::uint64_t invalid = 0;
  std::size_t max_support = 0;
  json per = json::array();
  rep.csv.header = {"instance", "support", "exact_mode", "hash_rows", "rounds", "overflows", "invalid", "tv",
                    "chi2", "p_value"};
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    max_tv = std::max(max_tv, r.tv);
    sum_tv += r.tv;
    min_p = std::min(min_p, r.p_value);
    invalid += r.invalid;
    max_support = std::max(max_support, r.support);
    per.push_back({{"support", r.support}, {"tv", r.tv}, {"p_value", r.p_value}, {"hash_rows", r.hash_rows}});
    rep.csv.rows.push_back({std::to_string(i), std::to_string(r.support), std::to_string(r.exact_mode),
                            std::to_string(r.hash_rows), std::to_string(r.rounds), std::to_string(r.overflows),
                            std::to_string(r.invalid), fmt(r.tv), fmt(r.chi2), fmt(r.p_value)});
  }
  rep.metrics = {{"max_tv", max_tv},
                 {"mean_tv", sum_tv / static_cast<double>(results.size())},
                 {"min_p_value", min_p},
                 {"invalid_samples", invalid},
                 {"max_support", max_support},
                 {"instances", per},
                 {"oracle", oracle_json(stats)}};
  rep.bound = {{"max_tv_at_most", 0.1}, {"invalid_samples", 0}, {"support_at_most", 4096}};
  rep.pass = max_tv <= 0.1 && invalid == 0 && max_support <= 4096;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"verify-class",     "rs-props",     "invert-exact-rg",
                                                 "invert-approx-rg", "ident-reduce", "advice-eval",
                                                 "approx-verif",     "m-alpha",      "witness-uniformity"};
  return names;
}

const std::vector<std::string>& experiment_fields(const std::string& experiment) {
  const auto it = field_lists().find(experiment);
  if (it == field_lists().end()) throw ConfigError("field 'experiment': unknown experiment '" + experiment + "'");
  return it->second;
}

void set_field(ExperimentConfig& config, const std::string& field, const std::string& value) {
  if (field == "experiment") {
    experiment_fields(value);
    config.experiment = value;
  } else if (field == "seed") {
    config.seed = parse_count(field, value);
  } else if (field == "jobs") {
    const auto j = parse_count(field, value);
    if (j < 1 || j > 256) field_error(field, "must be in [1, 256]");
    config.jobs = static_cast<unsigned>(j);
  } else if (field == "solver") {
    try {
      config.solver = BackendConfig::parse(value);
    } catch (const ConfigError& e) {
      field_error(field, e.what());
    }
  } else if (field == "output") {
    config.output = value;
  } else if (field == "csv") {
    config.csv = value;
  } else {
    const auto it = slots().find(field);
    if (it == slots().end()) throw ConfigError("unknown field '" + field + "'");
    std::visit(
        [&](auto member) {
          using T = typename std::remove_reference_t<decltype(config.*member)>::value_type;
          if constexpr (std::is_same_v<T, std::size_t>) {
            config.*member = static_cast<std::size_t>(parse_count(field, value));
          } else if constexpr (std::is_same_v<T, double>) {
            config.*member = parse_real(field, value);
          } else {
            config.*member = value;
          }
        },
        it->second);
  }
}

void merge_json(ExperimentConfig& config, const json& object, const std::vector<std::string>& keep) {
  if (!object.is_object()) throw ConfigError("config: expected a JSON object");
  for (const auto& [key, value] : object.items()) {
    if (std::find(keep.begin(), keep.end(), key) != keep.end()) continue;
    std::string text;
    if (value.is_string()) {
      text = value.get<std::string>();
    } else if (value.is_number()) {
      text = value.dump();
    } else {
      field_error(key, "expected a number or a string");
    }
    set_field(config, key, text);
  }
}

void merge_json_file(ExperimentConfig& config, const std::string& path, const std::vector<std::string>& keep) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  json object;
  try {
    object = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ":" + std::to_string(line_of(text, e.byte == 0 ? 0 : e.byte - 1)) + ": " + e.what());
  }
  try {
    merge_json(config, object, keep);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void validate(const ExperimentConfig& config) {
  const auto& allowed = experiment_fields(config.experiment);
  for (const auto& [name, slot] : slots()) {
    const bool set = std::visit([&](auto member) { return (config.*member).has_value(); }, slot);
    if (set && std::find(allowed.begin(), allowed.end(), name) == allowed.end()) {
      field_error(name, "not used by experiment '" + config.experiment + "'");
    }
  }
  auto positive = [](const char* name, const std::optional<std::size_t>& v) {
    if (v && *v == 0) field_error(name, "must be at least 1");
  };
  positive("n", config.n);
  positive("m", config.m);
  positive("B", config.B);
  positive("trials", config.trials);
  positive("draws", config.draws);
  positive("instances", config.instances);
  positive("samples", config.samples);
  positive("degree", config.degree);
  positive("k", config.k);
  if (config.votes && (*config.votes == 0 || *config.votes % 2 == 0)) field_error("votes", "must be odd");
  if (config.beta && *config.beta < 1) field_error("beta", "must be >= 1");
  auto unit = [](const char* name, const std::optional<double>& v) {
    if (v && !(*v > 0 && *v < 1)) field_error(name, "must be in (0, 1)");
  };
  unit("eps", config.eps);
  unit("eps_prime", config.eps_prime);
  if (config.delta && !(*config.delta >= 0 && *config.delta < 1)) field_error("delta", "must be in [0, 1)");
  if (config.c && !(*config.c >= 0 && *config.c <= 1)) field_error("c", "must be in [0, 1]");
  if (config.class_kind && *config.class_kind != "xor" && *config.class_kind != "bit_index" &&
      *config.class_kind != "rs_block") {
    field_error("class", "expected xor, bit_index or rs_block");
  }
  if (config.target && *config.target != "standin" && *config.target != "parity") {
    field_error("target", "expected standin or parity");
  }
  if (config.learner && *config.learner != "strict" && *config.learner != "majority") {
    field_error("learner", "expected strict or majority");
  }
  if (config.alpha) {
    try {
      BitString::parse(*config.alpha);
    } catch (const std::exception&) {
      field_error("alpha", "expected a bit string");
    }
  }
}

ReductionReport run_experiment(const ExperimentConfig& config) {
  validate(config);
  const auto start = std::chrono::steady_clock::now();
  ReductionReport rep;
  rep.experiment = config.experiment;
  rep.seed = config.seed;
  const std::string& e = config.experiment;
  if (e == "verify-class") {
    run_verify_class(config, rep);
  } else if (e == "rs-props") {
    run_rs_props(config, rep);
  } else if (e == "invert-exact-rg") {
    run_invert_exact_rg(config, rep);
  } else if (e == "invert-approx-rg") {
    run_invert_approx_rg(config, rep);
  } else if (e == "ident-reduce") {
    run_ident_reduce(config, rep);
  } else if (e == "advice-eval") {
    run_advice_eval(config, rep);
  } else if (e == "approx-verif") {
    run_approx_verif(config, rep);
  } else if (e == "m-alpha") {
    run_m_alpha(config, rep);
  } else {
    run_witness_uniformity(config, rep);
  }
  rep.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

json to_json(const ReductionReport& report, bool with_wall_time) {
  json j = {{"experiment", report.experiment}, {"params", report.params}, {"seed", report.seed},
            {"metrics", report.metrics},       {"bound", report.bound},   {"pass", report.pass}};
  if (with_wall_time) j["wall_time_ms"] = report.wall_time_ms;
  return j;
}

void write_csv(std::ostream& out, const CsvTable& table) {
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  if (table.header.empty()) return;
  line(table.header);
  for (const auto& row : table.rows) line(row);
}

void write_outputs(const ExperimentConfig& config, const ReductionReport& report) {
  if (config.output) {
    std::ofstream out(*config.output);
    if (!out) throw ConfigError("field 'output': cannot write " + *config.output);
    out << to_json(report).dump(2) << '\n';
  }
  if (config.csv) {
    std::ofstream out(*config.csv);
    if (!out) throw ConfigError("field 'csv': cannot write " + *config.csv);
    write_csv(out, report.csv);
  }
}

}  // namespace redlab
