#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "redlab/concepts.hpp"
#include "redlab/learners.hpp"
#include "redlab/oracle.hpp"
#include "redlab/samplers.hpp"
#include "redlab/witness.hpp"

namespace redlab {

// Result of one evaluation. Abstentions keep their cause so reports can
// separate them from wrong labels.
enum class Outcome : std::uint8_t { Zero, One, NoPreimage, NoWitness, Ambiguous };

inline Outcome label_outcome(bool y) { return y ? Outcome::One : Outcome::Zero; }
inline bool is_label(Outcome o) { return o == Outcome::Zero || o == Outcome::One; }
std::string to_string(Outcome o);

// A possibly randomised evaluator of some f: {0,1}^n -> {0,1}. evaluate()
// runs `trials` independent evaluations of x whose randomness is a function
// of `seed` alone, so results reproduce given (seed, backend). Implementations
// are safe to call concurrently with distinct oracles.
class EvaluatorUnderTest {
 public:
  virtual ~EvaluatorUnderTest() = default;
  virtual std::size_t n() const = 0;
  virtual std::string provenance() const = 0;
  virtual bool deterministic() const { return false; }
  virtual std::vector<Outcome> evaluate(std::uint64_t x, std::size_t trials, std::uint64_t seed,
                                        Oracle& oracle) const = 0;
  // Oracle work done once at construction, outside evaluate().
  virtual OracleStats setup_stats() const { return {}; }
};

// Wraps a plain function; for tests and baselines.
std::unique_ptr<EvaluatorUnderTest> function_evaluator(std::size_t n, std::string provenance,
                                                       std::function<Outcome(std::uint64_t x, Rng& rng)> fn,
                                                       bool deterministic = false);

// Bit-by-bit inversion of the sampler onto x: at each position keep 1 if the
// prefix so far followed by 1 still extends to some r with sampler(r).x = x,
// else 0. Exactly |r| oracle queries (assumption solves on one session with x
// pinned). Throws NoPreimage when x is outside the image.
BitString prefix_search(const Sampler& sampler, const BitString& x, Oracle& oracle);

// x -> label of sampler(prefix_search(x)). Deterministic.
std::unique_ptr<EvaluatorUnderTest> eval_via_exact_rg(const Sampler& sampler);

// x -> majority label over `votes` near-uniform preimages of x, a fair coin
// when x has no preimage. `votes` must be odd.
std::unique_ptr<EvaluatorUnderTest> eval_via_approx_rg(const Sampler& sampler, std::size_t votes,
                                                       WitnessOptions options = {});

// Exact per-x success probability of eval_via_approx_rg under exactly uniform
// preimages: P(majority of `votes` labels is f(x)), from the enumerated label
// counts of the preimage set. NaN where x has no preimage (success 1/2).
std::vector<double> approx_rg_success_exact(const Sampler& sampler, const TargetFunction& f, std::size_t votes);

// ---- identification inversion ----

// Relation over instance alpha (m bits) and witness (Y, r): Y holds B labels
// for the fixed inputs X, r the learner's seed bits; R = 1 iff
// learner(T_{X,Y}, r) = Identified(alpha). Needs a circuit form.
RelationInstance identifier_relation(const Identifier& learner, const BitString& alpha,
                                     const std::vector<std::uint64_t>& xs);

struct Inversion {
  BitString labels;  // Y, one bit per input of X
  BitString r;       // seed bits, learner.seed_width() of them
  friend bool operator==(const Inversion&, const Inversion&) = default;
  friend auto operator<=>(const Inversion&, const Inversion&) = default;
};

enum class InversionMode { Auto, Sat, BruteForce };

// Every (Y, r) the learner maps to alpha, in lexicographic order of Y then r.
// Space bound 2^20.
std::vector<Inversion> enumerate_inversions(const Identifier& learner, const BitString& alpha,
                                            const std::vector<std::uint64_t>& xs);

// Near-uniform sampler over {(Y, r) : learner(T_{X,Y}, r) = alpha}. Sat mode
// runs the witness generator on identifier_relation; BruteForce picks
// uniformly from enumerate_inversions. Auto prefers Sat when the learner has
// a circuit form. Throws NoWitness when the set is empty.
class IdentifierInverter {
 public:
  IdentifierInverter(const Identifier& learner, const BitString& alpha, std::vector<std::uint64_t> xs,
                     Oracle& oracle, std::uint64_t seed, InversionMode mode = InversionMode::Auto);

  Inversion next();
  InversionMode mode() const { return mode_; }

 private:
  std::size_t b_ = 0;
  InversionMode mode_;
  std::unique_ptr<WitnessGenerator> gen_;
  std::vector<Inversion> all_;
  Rng rng_;
};

Inversion invert_identifier(const Identifier& learner, const BitString& alpha, const std::vector<std::uint64_t>& xs,
                            Oracle& oracle, std::uint64_t seed, InversionMode mode = InversionMode::Auto);

// CHECK with r0 = 0: the label y for which learner({(x, y)} + T) is valid
// while the other label is rejected. nullopt when both or neither are valid.
std::optional<bool> try_check_consistency(const Identifier& learner, std::uint64_t x, const LearnerConfig& cfg,
                                          const Dataset& t);
// As above; throws Ambiguous instead of returning nullopt.
bool check_consistency(const Identifier& learner, std::uint64_t x, const LearnerConfig& cfg, const Dataset& t);

// Labels x so that the learner accepts {(x, y)} + advice.
Outcome advice_evaluator(const Identifier& learner, const Dataset& advice, std::uint64_t x);

struct IdentPoolStats {
  std::size_t draws = 0;
  // Draws whose labels Y equal f^alpha on X.
  std::size_t labelled_by_alpha = 0;
  std::size_t no_witness = 0;
  OracleStats oracle;
};

// Evaluator from a verifiable identifier and a target index alpha. Each trial
// samples B uniform inputs X, inverts the learner to labels Y with
// learner(T_{X,Y}) = alpha, then answers check_consistency(x, T_{X,Y}).
// The `draws` datasets are drawn once at construction; trial t of every x
// uses dataset t, so per-x estimates share their randomness across x.
class VerifiableIdentEvaluator final : public EvaluatorUnderTest {
 public:
  VerifiableIdentEvaluator(std::shared_ptr<const Identifier> learner, BitString alpha, std::size_t B,
                           std::size_t draws, std::uint64_t seed, Oracle& oracle,
                           InversionMode mode = InversionMode::Auto);

  std::size_t n() const override { return learner_->concept_class().n(); }
  std::string provenance() const override { return "verifiable_ident(" + learner_->name() + ")"; }
  std::vector<Outcome> evaluate(std::uint64_t x, std::size_t trials, std::uint64_t seed,
                                Oracle& oracle) const override;
  OracleStats setup_stats() const override { return stats_.oracle; }

  // Entry t is empty when inversion found no labelling for draw t.
  const std::vector<std::optional<Dataset>>& pool() const { return pool_; }
  const IdentPoolStats& pool_stats() const { return stats_; }

 private:
  std::shared_ptr<const Identifier> learner_;
  BitString alpha_;
  std::vector<std::optional<Dataset>> pool_;
  IdentPoolStats stats_;
};

std::unique_ptr<VerifiableIdentEvaluator> eval_via_verifiable_ident(std::shared_ptr<const Identifier> learner,
                                                                    const BitString& alpha, std::size_t B,
                                                                    std::size_t draws, std::uint64_t seed,
                                                                    Oracle& oracle);

// B = ceil(ln 3 / eps), sufficient for 1 - (1 - eps)^B >= 2/3.
std::size_t ident_sample_size(double eps);
// Smallest B with 1 - (1 - eps)^B >= 2/3, i.e. ceil(ln 3 / -ln(1 - eps)).
std::size_t ident_sample_size_tight(double eps);

// ---- approximate verification ----

enum class VerifyGate {
  Exact,   // reject iff the flipped learner returns exactly alpha
  Smooth,  // reject iff it returns an index within normalised distance 1/3
};

// learner'(T) = Invalid if the base learner rejects T, or if for some subset
// S of T of size s = max(1, floor(|T| / beta)) and some seed r the base
// learner run on S with every label flipped identifies the base verdict
// alpha. (Equivalently the label-flipped learner identifies the complement
// concept on S.) Otherwise the base verdict. Accepted datasets therefore have
// fewer than s samples disagreeing with f^alpha whenever a fully mislabelled
// s-subset is identified as alpha for some seed.
class ApproxVerifiableLearner final : public Identifier {
 public:
  ApproxVerifiableLearner(std::shared_ptr<const Identifier> base, double beta, VerifyGate gate = VerifyGate::Exact);

  LearnerVerdict learn(const Dataset& t, const LearnerConfig& cfg) const override;
  const ConceptClass& concept_class() const override { return base_->concept_class(); }
  std::size_t seed_width() const override { return base_->seed_width(); }
  std::string name() const override;

  // Some seed r gives learn(t, r) = Identified(alpha).
  bool accepts(const Dataset& t, const BitString& alpha) const;
  // True iff the flipped-subset scan rejects `alpha` on t.
  bool flipped_subset_hit(const Dataset& t, const BitString& alpha) const;
  std::size_t subset_size(std::size_t t_size) const;
  double beta() const { return beta_; }
  VerifyGate gate() const { return gate_; }

 private:
  std::shared_ptr<const Identifier> base_;
  double beta_;
  VerifyGate gate_;
};

std::shared_ptr<ApproxVerifiableLearner> make_approx_verifiable(std::shared_ptr<const Identifier> learner,
                                                                double beta, VerifyGate gate = VerifyGate::Exact);

// Samples in t whose label differs from f^alpha.
std::size_t mislabel_count(const ConceptClass& cls, const BitString& alpha, const Dataset& t);

enum class MAlphaMode { Auto, Enumerate, Reject };

// Uniform sampler over T^alpha(x) = {T of B samples : x in X and some r has
// learner'(T, r) = alpha}. Enumerate lists the whole universe (at most 2^20
// datasets, cached per x); Reject draws X uniformly conditioned on x in X and
// Y uniformly, keeping the pair iff it is accepted. Auto enumerates up to
// 2^16 datasets.
class MAlphaSampler {
 public:
  MAlphaSampler(std::shared_ptr<const ApproxVerifiableLearner> learner, BitString alpha, std::size_t B,
                MAlphaMode mode = MAlphaMode::Auto, std::uint64_t max_proposals = 1u << 24);

  Dataset sample(std::uint64_t x, Rng& rng) const;
  // x's label in a sampled T (its first occurrence).
  bool eval(std::uint64_t x, Rng& rng) const;
  // Size of T^alpha(x); Enumerate mode only.
  std::size_t support_size(std::uint64_t x) const;
  MAlphaMode mode() const { return mode_; }

 private:
  const std::vector<Dataset>& enumerated(std::uint64_t x) const;

  std::shared_ptr<const ApproxVerifiableLearner> learner_;
  BitString alpha_;
  std::size_t b_;
  MAlphaMode mode_;
  std::uint64_t max_proposals_;
  mutable std::mutex mu_;
  mutable std::map<std::uint64_t, std::vector<Dataset>> cache_;
};

bool m_alpha_eval(const MAlphaSampler& sampler, std::uint64_t x, Rng& rng);

std::unique_ptr<EvaluatorUnderTest> m_alpha_evaluator(std::shared_ptr<const MAlphaSampler> sampler, std::size_t n);

// ---- heuristic error ----

struct PerXResult {
  std::uint64_t x = 0;
  bool truth = false;
  std::uint32_t trials = 0;
  std::uint32_t correct = 0;
  std::uint32_t wrong = 0;
  std::uint32_t abstained = 0;
  std::uint32_t no_preimage = 0;
  std::uint32_t no_witness = 0;
  std::uint32_t ambiguous = 0;

  double success() const { return trials == 0 ? 0.0 : static_cast<double>(correct) / trials; }
};

struct HeuristicErrorReport {
  double fraction_bad = 0;  // mass of x with estimated success < threshold
  double ci_halfwidth = 0;  // 95%, sampled-input mode only
  double threshold = 2.0 / 3;
  double bound = 0;
  bool pass = false;
  std::size_t trials_per_x = 0;
  bool exhaustive = true;
  double mean_success = 0;
  double min_success = 1;
  std::uint64_t evaluations = 0;
  std::uint64_t wrong = 0;
  std::uint64_t abstained = 0;
  std::map<std::string, std::uint64_t> abstain_causes;
  OracleStats oracle;
  std::vector<PerXResult> per_x;  // ascending x (exhaustive) or draw order
};

struct HeurOptions {
  std::size_t trials_per_x = 1;  // forced to 1 for deterministic evaluators
  double bound = 0;
  double threshold = 2.0 / 3;
  std::size_t sample_inputs = 0;  // 0: every x in the support
  unsigned jobs = 1;
  std::uint64_t seed = 0;
  BackendConfig backend;
};

// Per-x evaluation seeds are mix_seed(seed, x); workers own their oracles and
// results merge in x order, so the report is independent of `jobs`.
HeuristicErrorReport estimate_heur_error(const EvaluatorUnderTest& evaluator, const Concept& truth,
                                         const InputDistribution& dist, const HeurOptions& options);

// Fills the summary fields from per_x (fraction over per_x entries).
void summarize(HeuristicErrorReport& report);

Concept as_concept(const TargetFunction& f);

// Runs fn(i, oracle) for i in [0, count) on `jobs` threads, each with its own
// oracle; returns the summed oracle statistics.
OracleStats parallel_for(std::size_t count, unsigned jobs, const BackendConfig& backend,
                         const std::function<void(std::size_t, Oracle&)>& fn);

}  // namespace redlab
