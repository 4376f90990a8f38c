#include "redlab/reductions.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "redlab/cnf.hpp"
#include "redlab/error.hpp"

namespace redlab {

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::Zero: return "0";
    case Outcome::One: return "1";
    case Outcome::NoPreimage: return "no_preimage";
    case Outcome::NoWitness: return "no_witness";
    case Outcome::Ambiguous: return "ambiguous";
  }
  return "?";
}

namespace {

OracleStats stats_since(const OracleStats& now, const OracleStats& before) {
  OracleStats d = now;
  d.queries -= before.queries;
  d.cumulative_conflicts -= before.cumulative_conflicts;
  return d;
}

class FunctionEvaluator final : public EvaluatorUnderTest {
 public:
  FunctionEvaluator(std::size_t n, std::string provenance, std::function<Outcome(std::uint64_t, Rng&)> fn,
                    bool deterministic)
      : n_(n), provenance_(std::move(provenance)), fn_(std::move(fn)), deterministic_(deterministic) {}

  std::size_t n() const override { return n_; }
  std::string provenance() const override { return provenance_; }
  bool deterministic() const override { return deterministic_; }
  std::vector<Outcome> evaluate(std::uint64_t x, std::size_t trials, std::uint64_t seed, Oracle&) const override {
    Rng rng(seed);
    std::vector<Outcome> out;
    for (std::size_t t = 0; t < trials; ++t) out.push_back(fn_(x, rng));
    return out;
  }

 private:
  std::size_t n_;
  std::string provenance_;
  std::function<Outcome(std::uint64_t, Rng&)> fn_;
  bool deterministic_;
};

}  // namespace

std::unique_ptr<EvaluatorUnderTest> function_evaluator(std::size_t n, std::string provenance,
                                                       std::function<Outcome(std::uint64_t x, Rng& rng)> fn,
                                                       bool deterministic) {
  return std::make_unique<FunctionEvaluator>(n, std::move(provenance), std::move(fn), deterministic);
}

BitString prefix_search(const Sampler& sampler, const BitString& x, Oracle& oracle) {
  if (x.width() != sampler.n) throw InvalidAssignment("prefix_search: x has the wrong width");
  const CnfFormula f = to_cnf(sampler.program, pin_prefix(x, sampler.program.output_width()));
  const auto& r_vars = f.input_var_map.at("r");
  BitString u(r_vars.size());
  if (!f.is_false()) {
    auto session = oracle.session(f);
    std::vector<int> assumed;
    for (std::size_t i = 0; i < r_vars.size(); ++i) {
      assumed.push_back(r_vars[i]);
      if (session->solve(assumed).sat()) {
        u.set(i, true);
      } else {
        assumed.back() = -r_vars[i];
      }
    }
  }
  if (sampler.run(u).first != x) throw NoPreimage("x = " + x.str() + " is outside the sampler's image");
  return u;
}

namespace {

class ExactRgEvaluator final : public EvaluatorUnderTest {
 public:
  explicit ExactRgEvaluator(Sampler s) : s_(std::move(s)) {}

  std::size_t n() const override { return s_.n; }
  std::string provenance() const override { return "exact_rg"; }
  bool deterministic() const override { return true; }
  std::vector<Outcome> evaluate(std::uint64_t x, std::size_t trials, std::uint64_t, Oracle& oracle) const override {
    Outcome o;
    try {
      o = label_outcome(s_.run(prefix_search(s_, BitString::from_uint(x, s_.n), oracle)).second);
    } catch (const NoPreimage&) {
      o = Outcome::NoPreimage;
    }
    return std::vector<Outcome>(trials, o);
  }

 private:
  Sampler s_;
};

class ApproxRgEvaluator final : public EvaluatorUnderTest {
 public:
  ApproxRgEvaluator(Sampler s, std::size_t votes, WitnessOptions options)
      : s_(std::move(s)), votes_(votes), options_(options) {
    if (votes_ == 0 || votes_ % 2 == 0) throw InvalidAssignment("votes must be odd");
  }

  std::size_t n() const override { return s_.n; }
  std::string provenance() const override { return "approx_rg(votes=" + std::to_string(votes_) + ")"; }
  std::vector<Outcome> evaluate(std::uint64_t x, std::size_t trials, std::uint64_t seed,
                                Oracle& oracle) const override {
    const auto rel = preimage_relation(s_.program, "r", BitString::from_uint(x, s_.n));
    std::vector<Outcome> out;
    std::unique_ptr<WitnessGenerator> gen;
    try {
      gen = std::make_unique<WitnessGenerator>(rel, oracle, seed, options_);
    } catch (const NoWitness&) {
      Rng rng(mix_seed(seed, 1));
      for (std::size_t t = 0; t < trials; ++t) out.push_back(label_outcome(coin(rng)));
      return out;
    }
    for (std::size_t t = 0; t < trials; ++t) {
      std::size_t ones = 0;
      for (std::size_t v = 0; v < votes_; ++v) ones += s_.run(gen->next()).second;
      out.push_back(label_outcome(2 * ones > votes_));
    }
    return out;
  }

 private:
  Sampler s_;
  std::size_t votes_;
  WitnessOptions options_;
};

double binomial_at_most(std::size_t trials, std::size_t k, double p) {
  double sum = 0, c = 1;
  for (std::size_t i = 0; i <= k; ++i) {
    if (i > 0) c = c * static_cast<double>(trials - i + 1) / static_cast<double>(i);
    sum += c * std::pow(p, static_cast<double>(i)) * std::pow(1 - p, static_cast<double>(trials - i));
  }
  return sum;
}

}  // namespace

std::unique_ptr<EvaluatorUnderTest> eval_via_exact_rg(const Sampler& sampler) {
  return std::make_unique<ExactRgEvaluator>(sampler);
}

std::unique_ptr<EvaluatorUnderTest> eval_via_approx_rg(const Sampler& sampler, std::size_t votes,
                                                       WitnessOptions options) {
  return std::make_unique<ApproxRgEvaluator>(sampler, votes, options);
}

std::vector<double> approx_rg_success_exact(const Sampler& sampler, const TargetFunction& f, std::size_t votes) {
  if (sampler.random_width() > 24) throw TooLarge("sampler randomness exceeds 24 bits");
  const std::size_t n = sampler.n;
  std::vector<std::uint64_t> total(std::size_t{1} << n), wrong(std::size_t{1} << n);
  sweep_inputs(sampler.program, [&](std::uint64_t, std::span<const std::uint64_t> out, unsigned lanes) {
    for (unsigned lane = 0; lane < lanes; ++lane) {
      std::uint64_t x = 0;
      for (std::size_t j = 0; j < n; ++j) x = (x << 1) | ((out[j] >> lane) & 1u);
      ++total[x];
      wrong[x] += (((out[n] >> lane) & 1u) != 0) != f.value(x);
    }
  });
  std::vector<double> success(total.size());
  for (std::size_t x = 0; x < total.size(); ++x) {
    success[x] = total[x] == 0 ? std::numeric_limits<double>::quiet_NaN()
                               : binomial_at_most(votes, (votes - 1) / 2,
                                                  static_cast<double>(wrong[x]) / static_cast<double>(total[x]));
  }
  return success;
}

RelationInstance identifier_relation(const Identifier& learner, const BitString& alpha,
                                     const std::vector<std::uint64_t>& xs) {
  const ConceptClass& cls = learner.concept_class();
  const std::size_t n = cls.n(), m = cls.m(), B = xs.size(), w = learner.seed_width();
  if (alpha.width() != m) throw InvalidAssignment("alpha width does not match the class");
  const auto* bil = dynamic_cast<const BitIndexLearner*>(&learner);
  if (bil == nullptr) throw Unsupported("no circuit form for learner " + learner.name());
  if (B == 0) throw InvalidAssignment("identifier relation needs at least one input");
  CircuitBuilder b;
  const auto inst = b.add_input("instance", m);
  const auto wit = b.add_input("witness", B + w);
  std::vector<Wire> t;
  for (std::size_t l = 0; l < B; ++l) {
    for (std::size_t i = 0; i < n; ++i) t.push_back(b.constant(uint_bit(xs[l], n, i)));
    t.push_back(wit[l]);
  }
  const std::vector<Wire> r(wit.begin() + static_cast<std::ptrdiff_t>(B), wit.end());
  const auto out = emit_learner_logic(b, *bil, t, r);
  const std::vector<Wire> got(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(m));
  b.add_output(b.and_(b.equal(got, inst), out[m]));
  return {std::move(b).build(), alpha};
}

namespace {

Dataset labelled(std::size_t n, const std::vector<std::uint64_t>& xs, const BitString& y) {
  Dataset t;
  t.n = n;
  for (std::size_t l = 0; l < xs.size(); ++l) t.samples.push_back({xs[l], y[l]});
  return t;
}

LearnerConfig seeded(const BitString& r) {
  LearnerConfig cfg;
  cfg.r = r;
  return cfg;
}

}  // namespace

std::vector<Inversion> enumerate_inversions(const Identifier& learner, const BitString& alpha,
                                            const std::vector<std::uint64_t>& xs) {
  const std::size_t B = xs.size(), w = learner.seed_width(), n = learner.concept_class().n();
  if (B + w > 20) throw TooLarge("inversion space exceeds 2^20");
  const LearnerVerdict want = LearnerVerdict::identified(alpha);
  std::vector<Inversion> out;
  for (std::uint64_t y = 0; y < (std::uint64_t{1} << B); ++y) {
    const BitString labels = BitString::from_uint(y, B);
    const Dataset t = labelled(n, xs, labels);
    for (std::uint64_t r = 0; r < (std::uint64_t{1} << w); ++r) {
      const BitString rb = BitString::from_uint(r, w);
      if (learner.learn(t, seeded(rb)) == want) out.push_back({labels, rb});
    }
  }
  return out;
}

IdentifierInverter::IdentifierInverter(const Identifier& learner, const BitString& alpha,
                                       std::vector<std::uint64_t> xs, Oracle& oracle, std::uint64_t seed,
                                       InversionMode mode)
    : b_(xs.size()), mode_(mode), rng_(mix_seed(seed, 2)) {
  if (mode_ != InversionMode::BruteForce) {
    try {
      const auto rel = identifier_relation(learner, alpha, xs);
      mode_ = InversionMode::Sat;
      gen_ = std::make_unique<WitnessGenerator>(rel, oracle, seed);
      return;
    } catch (const Unsupported&) {
      if (mode_ == InversionMode::Sat) throw;
    }
    mode_ = InversionMode::BruteForce;
  }
  all_ = enumerate_inversions(learner, alpha, xs);
  if (all_.empty()) throw NoWitness("no labelling of X is identified as alpha = " + alpha.str());
}

Inversion IdentifierInverter::next() {
  if (gen_) {
    const BitString w = gen_->next();
    return {w.slice(0, b_), w.slice(b_, w.width() - b_)};
  }
  return all_[uniform_below(rng_, all_.size())];
}

Inversion invert_identifier(const Identifier& learner, const BitString& alpha, const std::vector<std::uint64_t>& xs,
                            Oracle& oracle, std::uint64_t seed, InversionMode mode) {
  IdentifierInverter inv(learner, alpha, xs, oracle, seed, mode);
  return inv.next();
}

std::optional<bool> try_check_consistency(const Identifier& learner, std::uint64_t x, const LearnerConfig& cfg,
                                          const Dataset& t) {
  LearnerConfig r0 = cfg;
  r0.r = BitString(learner.seed_width());
  const bool v0 = learner.learn(t.with({x, false}), r0).valid;
  const bool v1 = learner.learn(t.with({x, true}), r0).valid;
  if (v0 == v1) return std::nullopt;
  return v1;
}

bool check_consistency(const Identifier& learner, std::uint64_t x, const LearnerConfig& cfg, const Dataset& t) {
  const auto y = try_check_consistency(learner, x, cfg, t);
  if (!y) throw Ambiguous("both or neither label of x keep the dataset valid");
  return *y;
}

Outcome advice_evaluator(const Identifier& learner, const Dataset& advice, std::uint64_t x) {
  const auto y = try_check_consistency(learner, x, {}, advice);
  return y ? label_outcome(*y) : Outcome::Ambiguous;
}

VerifiableIdentEvaluator::VerifiableIdentEvaluator(std::shared_ptr<const Identifier> learner, BitString alpha,
                                                   std::size_t B, std::size_t draws, std::uint64_t seed,
                                                   Oracle& oracle, InversionMode mode)
    : learner_(std::move(learner)), alpha_(std::move(alpha)) {
  const ConceptClass& cls = learner_->concept_class();
  const std::size_t n = cls.n();
  const OracleStats before = oracle.stats();
  Rng rng(mix_seed(seed));
  for (std::size_t d = 0; d < draws; ++d) {
    std::vector<std::uint64_t> xs;
    for (std::size_t l = 0; l < B; ++l) xs.push_back(uniform_below(rng, std::uint64_t{1} << n));
    ++stats_.draws;
    try {
      const Inversion inv = invert_identifier(*learner_, alpha_, xs, oracle, mix_seed(seed, d + 1), mode);
      Dataset t = labelled(n, xs, inv.labels);
      bool by_alpha = true;
      for (const auto& s : t.samples) by_alpha = by_alpha && cls.eval(alpha_.to_uint(), s.x) == s.y;
      stats_.labelled_by_alpha += by_alpha;
      pool_.push_back(std::move(t));
    } catch (const NoWitness&) {
      ++stats_.no_witness;
      pool_.push_back(std::nullopt);
    }
  }
  stats_.oracle = stats_since(oracle.stats(), before);
}

std::vector<Outcome> VerifiableIdentEvaluator::evaluate(std::uint64_t x, std::size_t trials, std::uint64_t,
                                                        Oracle&) const {
  if (trials > pool_.size()) throw InvalidAssignment("more trials than pre-drawn datasets");
  std::vector<Outcome> out;
  for (std::size_t t = 0; t < trials; ++t) {
    if (!pool_[t]) {
      out.push_back(Outcome::NoWitness);
      continue;
    }
    const auto y = try_check_consistency(*learner_, x, {}, *pool_[t]);
    out.push_back(y ? label_outcome(*y) : Outcome::Ambiguous);
  }
  return out;
}

std::unique_ptr<VerifiableIdentEvaluator> eval_via_verifiable_ident(std::shared_ptr<const Identifier> learner,
                                                                    const BitString& alpha, std::size_t B,
                                                                    std::size_t draws, std::uint64_t seed,
                                                                    Oracle& oracle) {
  return std::make_unique<VerifiableIdentEvaluator>(std::move(learner), alpha, B, draws, seed, oracle);
}

std::size_t ident_sample_size(double eps) {
  if (!(eps > 0 && eps < 1)) throw InvalidAssignment("eps must lie in (0, 1)");
  return static_cast<std::size_t>(std::ceil(std::log(3.0) / eps - 1e-12));
}

std::size_t ident_sample_size_tight(double eps) {
  if (!(eps > 0 && eps < 1)) throw InvalidAssignment("eps must lie in (0, 1)");
  return static_cast<std::size_t>(std::ceil(std::log(3.0) / -std::log1p(-eps) - 1e-12));
}

ApproxVerifiableLearner::ApproxVerifiableLearner(std::shared_ptr<const Identifier> base, double beta, VerifyGate gate)
    : base_(std::move(base)), beta_(beta), gate_(gate) {
  if (!(beta_ >= 1)) throw InvalidAssignment("beta must be at least 1");
}

std::string ApproxVerifiableLearner::name() const {
  return "approx_verifiable(" + base_->name() + (gate_ == VerifyGate::Exact ? ",exact)" : ",smooth)");
}

std::size_t ApproxVerifiableLearner::subset_size(std::size_t t_size) const {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(static_cast<double>(t_size) / beta_)));
}

bool ApproxVerifiableLearner::flipped_subset_hit(const Dataset& t, const BitString& alpha) const {
  const std::size_t total = t.size(), s = subset_size(total), w = base_->seed_width();
  if (s > total) return false;
  double subsets = 1;
  for (std::size_t i = 0; i < s; ++i) subsets = subsets * static_cast<double>(total - i) / static_cast<double>(i + 1);
  if (subsets * std::ldexp(1.0, static_cast<int>(w)) > std::ldexp(1.0, 22)) {
    throw TooLarge("flipped-subset scan exceeds 2^22 learner runs");
  }
  const std::size_t m = alpha.width();
  std::vector<std::size_t> pick(s);
  for (std::size_t i = 0; i < s; ++i) pick[i] = i;
  Dataset sub;
  sub.n = t.n;
  sub.samples.resize(s);
  while (true) {
    for (std::size_t i = 0; i < s; ++i) sub.samples[i] = {t.samples[pick[i]].x, !t.samples[pick[i]].y};
    for (std::uint64_t r = 0; r < (std::uint64_t{1} << w); ++r) {
      const auto v = base_->learn(sub, seeded(BitString::from_uint(r, w)));
      if (!v.valid) continue;
      if (gate_ == VerifyGate::Exact ? v.alpha == alpha : 3 * v.alpha.hamming(alpha) <= m) return true;
    }
    std::size_t i = s;
    while (i > 0 && pick[i - 1] == total - s + i - 1) --i;
    if (i == 0) return false;
    ++pick[i - 1];
    for (std::size_t j = i; j < s; ++j) pick[j] = pick[j - 1] + 1;
  }
}

LearnerVerdict ApproxVerifiableLearner::learn(const Dataset& t, const LearnerConfig& cfg) const {
  LearnerVerdict v = base_->learn(t, cfg);
  if (!v.valid || flipped_subset_hit(t, v.alpha)) return LearnerVerdict::invalid();
  return v;
}

bool ApproxVerifiableLearner::accepts(const Dataset& t, const BitString& alpha) const {
  // The subset scan does not depend on the seed, so one base hit decides.
  const std::size_t w = base_->seed_width();
  for (std::uint64_t r = 0; r < (std::uint64_t{1} << w); ++r) {
    const auto v = base_->learn(t, seeded(BitString::from_uint(r, w)));
    if (v.valid && v.alpha == alpha) return !flipped_subset_hit(t, alpha);
  }
  return false;
}

std::shared_ptr<ApproxVerifiableLearner> make_approx_verifiable(std::shared_ptr<const Identifier> learner,
                                                                double beta, VerifyGate gate) {
  return std::make_shared<ApproxVerifiableLearner>(std::move(learner), beta, gate);
}

std::size_t mislabel_count(const ConceptClass& cls, const BitString& alpha, const Dataset& t) {
  std::size_t bad = 0;
  for (const auto& s : t.samples) bad += cls.eval(alpha.to_uint(), s.x) != s.y;
  return bad;
}

MAlphaSampler::MAlphaSampler(std::shared_ptr<const ApproxVerifiableLearner> learner, BitString alpha, std::size_t B,
                             MAlphaMode mode, std::uint64_t max_proposals)
    : learner_(std::move(learner)), alpha_(std::move(alpha)), b_(B), mode_(mode), max_proposals_(max_proposals) {
  if (b_ == 0) throw InvalidAssignment("B must be at least 1");
  const double universe_bits = static_cast<double>(b_ * (learner_->concept_class().n() + 1));
  if (mode_ == MAlphaMode::Auto) mode_ = universe_bits <= 16 ? MAlphaMode::Enumerate : MAlphaMode::Reject;
  if (mode_ == MAlphaMode::Enumerate && universe_bits > 20) throw TooLarge("dataset universe exceeds 2^20");
}

const std::vector<Dataset>& MAlphaSampler::enumerated(std::uint64_t x) const {
  std::lock_guard lock(mu_);
  auto it = cache_.find(x);
  if (it != cache_.end()) return it->second;
  const std::size_t n = learner_->concept_class().n();
  std::vector<Dataset> all;
  for (std::uint64_t code = 0; code < (std::uint64_t{1} << (b_ * (n + 1))); ++code) {
    const Dataset t = Dataset::decode(BitString::from_uint(code, b_ * (n + 1)), n);
    const bool has_x = std::any_of(t.samples.begin(), t.samples.end(), [&](const Sample& s) { return s.x == x; });
    if (has_x && learner_->accepts(t, alpha_)) all.push_back(t);
  }
  return cache_.emplace(x, std::move(all)).first->second;
}

std::size_t MAlphaSampler::support_size(std::uint64_t x) const {
  if (mode_ != MAlphaMode::Enumerate) throw Unsupported("support size needs enumeration mode");
  return enumerated(x).size();
}

Dataset MAlphaSampler::sample(std::uint64_t x, Rng& rng) const {
  if (mode_ == MAlphaMode::Enumerate) {
    const auto& all = enumerated(x);
    if (all.empty()) throw NoWitness("T^alpha(x) is empty");
    return all[uniform_below(rng, all.size())];
  }
  const std::size_t n = learner_->concept_class().n();
  Dataset t;
  t.n = n;
  t.samples.resize(b_);
  for (std::uint64_t p = 0; p < max_proposals_; ++p) {
    bool has_x = false;
    for (auto& s : t.samples) {
      s.x = uniform_below(rng, std::uint64_t{1} << n);
      has_x = has_x || s.x == x;
    }
    if (!has_x) continue;
    for (auto& s : t.samples) s.y = coin(rng);
    if (learner_->accepts(t, alpha_)) return t;
  }
  throw NoWitness("no accepted dataset containing x within " + std::to_string(max_proposals_) + " proposals");
}

bool MAlphaSampler::eval(std::uint64_t x, Rng& rng) const { return m_alpha_eval(*this, x, rng); }

bool m_alpha_eval(const MAlphaSampler& sampler, std::uint64_t x, Rng& rng) {
  const Dataset t = sampler.sample(x, rng);
  for (const auto& s : t.samples) {
    if (s.x == x) return s.y;
  }
  throw std::logic_error("sampled dataset lacks x");
}

namespace {

class MAlphaEvaluator final : public EvaluatorUnderTest {
 public:
  MAlphaEvaluator(std::shared_ptr<const MAlphaSampler> sampler, std::size_t n) : sampler_(std::move(sampler)), n_(n) {}

  std::size_t n() const override { return n_; }
  std::string provenance() const override { return "m_alpha"; }
  std::vector<Outcome> evaluate(std::uint64_t x, std::size_t trials, std::uint64_t seed, Oracle&) const override {
    Rng rng(seed);
    std::vector<Outcome> out;
    for (std::size_t t = 0; t < trials; ++t) {
      try {
        out.push_back(label_outcome(m_alpha_eval(*sampler_, x, rng)));
      } catch (const NoWitness&) {
        out.push_back(Outcome::NoWitness);
      }
    }
    return out;
  }

 private:
  std::shared_ptr<const MAlphaSampler> sampler_;
  std::size_t n_;
};

}  // namespace

std::unique_ptr<EvaluatorUnderTest> m_alpha_evaluator(std::shared_ptr<const MAlphaSampler> sampler, std::size_t n) {
  return std::make_unique<MAlphaEvaluator>(std::move(sampler), n);
}

Concept as_concept(const TargetFunction& f) {
  auto shared = std::make_shared<TargetFunction>(f);
  return Concept(f.n(), BitString(), [shared](std::uint64_t x) { return shared->value(x); });
}

OracleStats parallel_for(std::size_t count, unsigned jobs, const BackendConfig& backend,
                         const std::function<void(std::size_t, Oracle&)>& fn) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  std::vector<Oracle> oracles(jobs, Oracle(backend));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i, oracles[0]);
    return oracles[0].stats();
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> workers;
  for (unsigned j = 0; j < jobs; ++j) {
    workers.emplace_back([&, j] {
      try {
        for (std::size_t i = next++; i < count; i = next++) fn(i, oracles[j]);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
        next = count;
      }
    });
  }
  for (auto& w : workers) w.join();
  if (error) std::rethrow_exception(error);
  OracleStats total;
  total.backend = backend.kind;
  for (const auto& o : oracles) total += o.stats();
  return total;
}

void summarize(HeuristicErrorReport& report) {
  std::size_t bad = 0;
  double sum = 0;
  report.min_success = report.per_x.empty() ? 0 : 1;
  report.evaluations = report.wrong = report.abstained = 0;
  report.abstain_causes = {{"no_preimage", 0}, {"no_witness", 0}, {"ambiguous", 0}};
  for (const auto& p : report.per_x) {
    const double s = p.success();
    bad += s < report.threshold - 1e-12;
    sum += s;
    report.min_success = std::min(report.min_success, s);
    report.evaluations += p.trials;
    report.wrong += p.wrong;
    report.abstained += p.abstained;
    report.abstain_causes["no_preimage"] += p.no_preimage;
    report.abstain_causes["no_witness"] += p.no_witness;
    report.abstain_causes["ambiguous"] += p.ambiguous;
  }
  const double k = static_cast<double>(report.per_x.size());
  report.fraction_bad = report.per_x.empty() ? 0 : static_cast<double>(bad) / k;
  report.mean_success = report.per_x.empty() ? 0 : sum / k;
  report.ci_halfwidth =
      report.exhaustive || k == 0 ? 0 : 1.96 * std::sqrt(report.fraction_bad * (1 - report.fraction_bad) / k);
  report.pass = report.fraction_bad <= report.bound;
}

HeuristicErrorReport estimate_heur_error(const EvaluatorUnderTest& evaluator, const Concept& truth,
                                         const InputDistribution& dist, const HeurOptions& options) {
  HeuristicErrorReport report;
  report.threshold = options.threshold;
  report.bound = options.bound;
  report.trials_per_x = evaluator.deterministic() ? 1 : options.trials_per_x;
  if (report.trials_per_x == 0) throw InvalidAssignment("trials_per_x must be positive");
  std::vector<std::uint64_t> xs;
  if (options.sample_inputs == 0) {
    xs = dist.support();
  } else {
    report.exhaustive = false;
    Rng rng(mix_seed(options.seed, 0x5a));
    for (std::size_t i = 0; i < options.sample_inputs; ++i) xs.push_back(dist.sample(rng).to_uint());
  }
  report.per_x.resize(xs.size());
  report.oracle = parallel_for(xs.size(), options.jobs, options.backend, [&](std::size_t i, Oracle& oracle) {
    PerXResult& p = report.per_x[i];
    p.x = xs[i];
    p.truth = truth(xs[i]);
    for (Outcome o : evaluator.evaluate(xs[i], report.trials_per_x, mix_seed(options.seed, xs[i]), oracle)) {
      ++p.trials;
      switch (o) {
        case Outcome::Zero:
        case Outcome::One: (o == Outcome::One) == p.truth ? ++p.correct : ++p.wrong; break;
        case Outcome::NoPreimage: ++p.abstained, ++p.no_preimage; break;
        case Outcome::NoWitness: ++p.abstained, ++p.no_witness; break;
        case Outcome::Ambiguous: ++p.abstained, ++p.ambiguous; break;
      }
    }
  });
  report.oracle += evaluator.setup_stats();
  summarize(report);
  return report;
}

}  // namespace redlab
