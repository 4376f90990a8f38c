#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "redlab/bitstring.hpp"
#include "redlab/circuit.hpp"
#include "redlab/concepts.hpp"

namespace redlab {

struct Sample {
  std::uint64_t x = 0;  // big-endian value of the n input bits
  bool y = false;

  friend bool operator==(const Sample&, const Sample&) = default;
  friend auto operator<=>(const Sample&, const Sample&) = default;
};

// Ordered labelled sample list T over {0,1}^n.
struct Dataset {
  std::size_t n = 0;
  std::vector<Sample> samples;

  std::size_t size() const { return samples.size(); }
  BitString x_bits(std::size_t i) const { return BitString::from_uint(samples[i].x, n); }

  // B(n+1) bits: each sample contributes its n input bits, then its label.
  BitString encode() const;
  static Dataset decode(const BitString& bits, std::size_t n);

  Dataset with(Sample s) const;  // copy with s prepended

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

// One sample per line, "<x-bits> <y>"; '#' comments and blank lines ignored.
void write_dataset(std::ostream& out, const Dataset& t);
Dataset read_dataset(std::istream& in, std::size_t n = 0);

// Labels X according to concept `alpha` of `cls`.
Dataset label_dataset(const ConceptClass& cls, std::uint64_t alpha, const std::vector<std::uint64_t>& xs);

struct LearnerVerdict {
  bool valid = false;
  BitString alpha;  // meaningful iff valid

  static LearnerVerdict invalid() { return {}; }
  static LearnerVerdict identified(BitString a) { return {true, std::move(a)}; }
  friend bool operator==(const LearnerVerdict&, const LearnerVerdict&) = default;
};

struct LearnerConfig {
  double epsilon = 0.25;
  BitString r;  // random string; missing bits read as 0
  double eps1 = 0.25;
  double eps2 = 0.25;

  double eps_c() const { return eps1 < eps2 ? eps1 : eps2; }
  bool r_bit(std::size_t i) const { return i < r.width() && r[i]; }
};

// An identification algorithm A_B(T, eps, r) for a fixed concept class.
class Identifier {
 public:
  virtual ~Identifier() = default;
  virtual LearnerVerdict learn(const Dataset& t, const LearnerConfig& cfg) const = 0;
  virtual const ConceptClass& concept_class() const = 0;
  // Number of leading bits of r the learner reads.
  virtual std::size_t seed_width() const = 0;
  virtual std::string name() const = 0;
};

// Solves alpha . x_l = y_l xor f(x_l) over GF(2). Free variables take r's
// bits (all zero by default). Invalid iff the system is inconsistent, which
// is exactly when no mask is consistent with T.
class XorMaskLearner final : public Identifier {
 public:
  explicit XorMaskLearner(ConceptClass cls);
  LearnerVerdict learn(const Dataset& t, const LearnerConfig& cfg) const override;
  const ConceptClass& concept_class() const override { return cls_; }
  std::size_t seed_width() const override { return cls_.n(); }
  std::string name() const override { return "xor_gauss"; }

 private:
  ConceptClass cls_;
};

enum class BitIndexMode {
  // Per index majority; ties give 0, unseen indices take r_i. Invalid only
  // for a y = 1 sample at an index beyond m.
  Majority,
  // Invalid iff no concept is consistent with T: conflicting labels at an
  // index or a y = 1 sample beyond m. Otherwise the unique label per seen
  // index, r_i for unseen ones.
  Strict,
};

class BitIndexLearner final : public Identifier {
 public:
  BitIndexLearner(ConceptClass cls, BitIndexMode mode);
  LearnerVerdict learn(const Dataset& t, const LearnerConfig& cfg) const override;
  const ConceptClass& concept_class() const override { return cls_; }
  std::size_t seed_width() const override { return cls_.m(); }
  std::string name() const override;
  BitIndexMode mode() const { return mode_; }

 private:
  ConceptClass cls_;
  BitIndexMode mode_;
};

// Votes each codeword bit from the samples in its block, then decodes to the
// label whose codeword agrees with the most voted blocks (lowest label on
// ties). Invalid if that concept disagrees with every sample.
class RsLearner final : public Identifier {
 public:
  explicit RsLearner(ConceptClass cls);
  LearnerVerdict learn(const Dataset& t, const LearnerConfig& cfg) const override;
  const ConceptClass& concept_class() const override { return cls_; }
  std::size_t seed_width() const override { return 0; }
  std::string name() const override { return "rs_nearest"; }

 private:
  ConceptClass cls_;
};

// The single concept, or Invalid as soon as one sample disagrees with it.
class SingletonLearner final : public Identifier {
 public:
  explicit SingletonLearner(ConceptClass cls);
  LearnerVerdict learn(const Dataset& t, const LearnerConfig& cfg) const override;
  const ConceptClass& concept_class() const override { return cls_; }
  std::size_t seed_width() const override { return 0; }
  std::string name() const override { return "singleton_check"; }

 private:
  ConceptClass cls_;
};

LearnerVerdict xor_mask_learn(const Dataset& t, const LearnerConfig& cfg, const TargetFunction& f);
LearnerVerdict bit_index_learn(const Dataset& t, const LearnerConfig& cfg, std::size_t m,
                               BitIndexMode mode = BitIndexMode::Majority);
LearnerVerdict rs_learn(const Dataset& t, const LearnerConfig& cfg, const ConceptClass& cls);

// Circuit form of BitIndexLearner for datasets of B samples. Input groups
// "T" (B(n+1) bits, Dataset::encode layout) and "r" (m bits); outputs the m
// bits of alpha-hat followed by a validity bit. Throws Unsupported for other
// learners and TooLarge above 96 input bits.
Circuit learner_as_circuit(const Identifier& learner, std::size_t B);

// Emits the same logic into `b` over caller-supplied wires (t in the
// Dataset::encode layout, r of width m), returning alpha-hat then validity.
// Lets callers fix parts of T to constants without the input-width cap.
std::vector<Wire> emit_learner_logic(CircuitBuilder& b, const BitIndexLearner& learner, std::span<const Wire> t,
                                     std::span<const Wire> r);

}  // namespace redlab
