#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "redlab/bitstring.hpp"
#include "redlab/targets.hpp"

namespace redlab {

enum class ClassKind { XorMask, BitIndex, RsBlock, Singleton, Explicit };

std::string to_string(ClassKind kind);

// f^alpha(x) = f(x) xor parity(alpha AND x).
bool xor_mask_eval(const TargetFunction& f, const BitString& alpha, const BitString& x);

// l = ceil(log2 m); i(x) = 1 + (first l bits of x, big-endian). Returns
// alpha[i(x) - 1] if i(x) <= m, else 0.
bool bit_index_eval(const BitString& alpha, const BitString& x);
std::size_t bit_index_of(std::uint64_t x, std::size_t n, std::size_t m);  // 1-based i(x)
std::size_t index_bits(std::size_t m);                                    // ceil(log2 m)

// Block partition of {0,1}^n into `blocks` contiguous ranges of size
// floor(2^n / blocks) in numeric order; the last block absorbs the remainder.
struct BlockPartition {
  std::size_t n = 0;
  std::size_t blocks = 0;
  std::uint64_t size() const;
  std::size_t block_of(std::uint64_t x) const;
};

// Bit of g(k) at the block containing x, where g(k) = codeword_bits of the
// RS(3|k|, |k|) encoding of message label k over GF(2^degree).
bool rs_block_eval(std::uint64_t label, std::size_t message_len, unsigned degree, const BlockPartition& blocks,
                   std::uint64_t x);

class ConceptClass;

// A single concept f^alpha, or any total function on {0,1}^n.
class Concept {
 public:
  Concept(std::size_t n, BitString alpha, std::function<bool(std::uint64_t)> eval);

  std::size_t n() const { return n_; }
  const BitString& alpha() const { return alpha_; }
  bool operator()(std::uint64_t x) const { return eval_(x); }
  bool operator()(const BitString& x) const;
  Concept complement() const;

 private:
  std::size_t n_;
  BitString alpha_;
  std::function<bool(std::uint64_t)> eval_;
};

// Index set of each kind:
//   xor_mask   alpha in {0,1}^n (m = n)
//   bit_index  alpha in {0,1}^m
//   rs_block   alpha = big-endian bits of the message label k, n = |k|*degree
//   singleton  alpha = "0", one concept
//   explicit   alpha = big-endian index into a list of truth tables
class ConceptClass {
 public:
  static ConceptClass xor_mask(TargetFunction f);
  static ConceptClass bit_index(std::size_t n, std::size_t m);
  static ConceptClass rs_block(std::size_t message_len, unsigned degree);
  static ConceptClass singleton(TargetFunction f);
  static ConceptClass explicit_tables(std::size_t n, std::vector<std::vector<std::uint8_t>> tables);

  ClassKind kind() const { return kind_; }
  std::size_t n() const { return n_; }
  std::size_t m() const { return m_; }
  std::uint64_t concept_count() const;
  bool contains_index(std::uint64_t alpha) const { return alpha < concept_count(); }

  bool eval(std::uint64_t alpha, std::uint64_t x) const;
  bool eval(const BitString& alpha, const BitString& x) const;
  Concept member(const BitString& alpha) const;
  std::vector<std::uint8_t> truth_table(std::uint64_t alpha) const;

  const TargetFunction* base_target() const { return base_.get(); }
  std::size_t rs_message_len() const { return rs_len_; }
  unsigned rs_degree() const { return rs_degree_; }
  const BlockPartition& blocks() const { return blocks_; }
  // Codeword bits g(k) for rs_block; cached.
  const BitString& rs_bits(std::uint64_t label) const;

  nlohmann::json params() const;

 private:
  ClassKind kind_ = ClassKind::Explicit;
  std::size_t n_ = 0;
  std::size_t m_ = 0;
  std::shared_ptr<const TargetFunction> base_;
  std::size_t rs_len_ = 0;
  unsigned rs_degree_ = 0;
  BlockPartition blocks_;
  std::shared_ptr<std::vector<std::optional<BitString>>> rs_cache_;
  std::shared_ptr<const std::vector<std::vector<std::uint8_t>>> tables_;
};

// E_{x ~ dist} |c1(x) - c2(x)|, exact by enumerating the support (<= 2^24).
double pac_distance(const Concept& c1, const Concept& c2, const InputDistribution& dist);

struct PacEstimate {
  double value = 0;
  double ci_halfwidth = 0;  // 95% normal approximation
  std::size_t samples = 0;
};
PacEstimate pac_distance_sampled(const Concept& c1, const Concept& c2, const InputDistribution& dist,
                                 std::size_t samples, std::uint64_t seed);

struct DistinctReport {
  std::string class_name;
  nlohmann::json params;
  double min_fraction = 1;
  std::uint64_t min_disagreements = 0;
  std::uint64_t support = 0;
  std::uint64_t pairs = 0;
  std::uint64_t argmin_a = 0, argmin_b = 0;
  double threshold = 0;
  bool pass = true;
};

// Minimum pairwise disagreement fraction over all concept pairs. With
// `promise` set, only inputs in its support count.
DistinctReport verify_c_distinct(const ConceptClass& cls, double c,
                                 const std::optional<InputDistribution>& promise = std::nullopt);

struct SmoothReport {
  std::string class_name;
  nlohmann::json params;
  // Minimum of E|f1 - f2| / d(a1, a2) with d the normalised Hamming distance,
  // also as an exact fraction num / den.
  double min_ratio = 0;
  std::uint64_t min_ratio_num = 0, min_ratio_den = 1;
  std::uint64_t pairs = 0;
  std::uint64_t argmin_a = 0, argmin_b = 0;
  double threshold = 0;
  bool pass = true;
};

SmoothReport verify_avg_smooth(const ConceptClass& cls, double C);

nlohmann::json to_json(const DistinctReport& r);
nlohmann::json to_json(const SmoothReport& r);

}  // namespace redlab
