#include "redlab/concepts.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

#include "redlab/error.hpp"
#include "redlab/rscode.hpp"

namespace redlab {

std::string to_string(ClassKind kind) {
  switch (kind) {
    case ClassKind::XorMask: return "xor";
    case ClassKind::BitIndex: return "bit_index";
    case ClassKind::RsBlock: return "rs_block";
    case ClassKind::Singleton: return "singleton";
    case ClassKind::Explicit: return "explicit";
  }
  return "?";
}

bool xor_mask_eval(const TargetFunction& f, const BitString& alpha, const BitString& x) {
  if (alpha.width() != x.width() || x.width() != f.n()) {
    throw InvalidAssignment("xor_mask_eval: alpha, x and f must share the width n");
  }
  bool parity = false;
  for (std::size_t i = 0; i < x.width(); ++i) parity ^= alpha[i] && x[i];
  return f(x) != parity;
}

std::size_t index_bits(std::size_t m) {
  std::size_t l = 0;
  while ((std::size_t{1} << l) < m) ++l;
  return l;
}

std::size_t bit_index_of(std::uint64_t x, std::size_t n, std::size_t m) {
  const std::size_t l = index_bits(m);
  if (n < l) throw InvalidAssignment("bit_index needs n >= ceil(log2 m)");
  return static_cast<std::size_t>(l == 0 ? 0 : x >> (n - l)) + 1;
}

bool bit_index_eval(const BitString& alpha, const BitString& x) {
  const std::size_t m = alpha.width();
  if (m == 0) throw InvalidAssignment("bit_index_eval: empty alpha");
  const std::size_t i = bit_index_of(x.to_uint(), x.width(), m);
  return i <= m && alpha[i - 1];
}

std::uint64_t BlockPartition::size() const {
  const std::uint64_t s = (std::uint64_t{1} << n) / blocks;
  if (s == 0) throw InvalidAssignment("more blocks than inputs");
  return s;
}

std::size_t BlockPartition::block_of(std::uint64_t x) const {
  return static_cast<std::size_t>(std::min<std::uint64_t>(x / size(), blocks - 1));
}

bool rs_block_eval(std::uint64_t label, std::size_t message_len, unsigned degree, const BlockPartition& blocks,
                   std::uint64_t x) {
  const auto bits = codeword_bits(rs_encode(rs_message(label, message_len, degree)));
  return bits[blocks.block_of(x)];
}

Concept::Concept(std::size_t n, BitString alpha, std::function<bool(std::uint64_t)> eval)
    : n_(n), alpha_(std::move(alpha)), eval_(std::move(eval)) {}

bool Concept::operator()(const BitString& x) const {
  if (x.width() != n_) throw InvalidAssignment("concept input width mismatch");
  return eval_(x.to_uint());
}

Concept Concept::complement() const {
  auto inner = eval_;
  return Concept(n_, alpha_, [inner](std::uint64_t x) { return !inner(x); });
}

ConceptClass ConceptClass::xor_mask(TargetFunction f) {
  if (f.n() > 20) throw TooLarge("xor_mask class needs a tabulated base target (n <= 20)");
  ConceptClass c;
  c.kind_ = ClassKind::XorMask;
  c.n_ = c.m_ = f.n();
  c.base_ = std::make_shared<const TargetFunction>(std::move(f));
  return c;
}

ConceptClass ConceptClass::bit_index(std::size_t n, std::size_t m) {
  if (m == 0 || m > 63) throw InvalidAssignment("bit_index class needs 1 <= m <= 63");
  if (n < index_bits(m) || n > 63) throw InvalidAssignment("bit_index class needs ceil(log2 m) <= n <= 63");
  ConceptClass c;
  c.kind_ = ClassKind::BitIndex;
  c.n_ = n;
  c.m_ = m;
  return c;
}

ConceptClass ConceptClass::rs_block(std::size_t message_len, unsigned degree) {
  rs_encode(rs_message(0, message_len, degree));  // validates the code parameters
  ConceptClass c;
  c.kind_ = ClassKind::RsBlock;
  c.n_ = c.m_ = message_len * degree;
  if (c.n_ > 20) throw TooLarge("rs_block class limited to n <= 20");
  c.rs_len_ = message_len;
  c.rs_degree_ = degree;
  c.blocks_ = {c.n_, 3 * c.n_};
  c.blocks_.size();
  c.rs_cache_ = std::make_shared<std::vector<std::optional<BitString>>>(std::size_t{1} << c.n_);
  return c;
}

ConceptClass ConceptClass::singleton(TargetFunction f) {
  ConceptClass c;
  c.kind_ = ClassKind::Singleton;
  c.n_ = f.n();
  c.m_ = 1;
  c.base_ = std::make_shared<const TargetFunction>(std::move(f));
  return c;
}

ConceptClass ConceptClass::explicit_tables(std::size_t n, std::vector<std::vector<std::uint8_t>> tables) {
  if (tables.empty()) throw InvalidAssignment("explicit class needs at least one concept");
  for (const auto& t : tables) {
    if (n == 0 || n > 20 || t.size() != (std::size_t{1} << n)) throw InvalidAssignment("truth table size is not 2^n");
  }
  ConceptClass c;
  c.kind_ = ClassKind::Explicit;
  c.n_ = n;
  c.m_ = std::max<std::size_t>(1, index_bits(tables.size()));
  c.tables_ = std::make_shared<const std::vector<std::vector<std::uint8_t>>>(std::move(tables));
  return c;
}

std::uint64_t ConceptClass::concept_count() const {
  switch (kind_) {
    case ClassKind::XorMask:
    case ClassKind::RsBlock: return std::uint64_t{1} << n_;
    case ClassKind::BitIndex: return std::uint64_t{1} << m_;
    case ClassKind::Singleton: return 1;
    case ClassKind::Explicit: return tables_->size();
  }
  return 0;
}

const BitString& ConceptClass::rs_bits(std::uint64_t label) const {
  auto& slot = (*rs_cache_).at(label);
  if (!slot) slot = codeword_bits(rs_encode(rs_message(label, rs_len_, rs_degree_)));
  return *slot;
}

bool ConceptClass::eval(std::uint64_t alpha, std::uint64_t x) const {
  if (!contains_index(alpha)) throw InvalidAssignment("alpha outside the class index set");
  switch (kind_) {
    case ClassKind::XorMask: return base_->value(x) != (std::popcount(alpha & x) & 1);
    case ClassKind::BitIndex: {
      const std::size_t i = bit_index_of(x, n_, m_);
      return i <= m_ && ((alpha >> (m_ - i)) & 1u);
    }
    case ClassKind::RsBlock: return rs_bits(alpha)[blocks_.block_of(x)];
    case ClassKind::Singleton: return base_->value(x);
    case ClassKind::Explicit: return (*tables_)[alpha].at(x) != 0;
  }
  return false;
}

bool ConceptClass::eval(const BitString& alpha, const BitString& x) const {
  if (alpha.width() != m_ || x.width() != n_) throw InvalidAssignment("alpha or x width does not match the class");
  return eval(alpha.to_uint(), x.to_uint());
}

Concept ConceptClass::member(const BitString& alpha) const {
  if (alpha.width() != m_) throw InvalidAssignment("alpha width does not match the class");
  const std::uint64_t a = alpha.to_uint();
  if (!contains_index(a)) throw InvalidAssignment("alpha outside the class index set");
  ConceptClass self = *this;
  return Concept(n_, alpha, [self, a](std::uint64_t x) { return self.eval(a, x); });
}

std::vector<std::uint8_t> ConceptClass::truth_table(std::uint64_t alpha) const {
  if (n_ > 24) throw TooLarge("truth table over more than 2^24 inputs");
  std::vector<std::uint8_t> t(std::size_t{1} << n_);
  for (std::uint64_t x = 0; x < t.size(); ++x) t[x] = eval(alpha, x);
  return t;
}

nlohmann::json ConceptClass::params() const {
  nlohmann::json p{{"n", n_}, {"m", m_}, {"concepts", concept_count()}};
  if (kind_ == ClassKind::RsBlock) {
    p["message_len"] = rs_len_;
    p["field_degree"] = rs_degree_;
    p["blocks"] = blocks_.blocks;
    p["block_size"] = blocks_.size();
  }
  return p;
}

double pac_distance(const Concept& c1, const Concept& c2, const InputDistribution& dist) {
  if (c1.n() != c2.n() || c1.n() != dist.n()) throw InvalidAssignment("pac_distance: width mismatch");
  std::uint64_t dis = 0;
  const auto support = dist.support();
  for (auto x : support) dis += c1(x) != c2(x);
  return static_cast<double>(dis) / static_cast<double>(support.size());
}

PacEstimate pac_distance_sampled(const Concept& c1, const Concept& c2, const InputDistribution& dist,
                                 std::size_t samples, std::uint64_t seed) {
  if (c1.n() != c2.n() || c1.n() != dist.n()) throw InvalidAssignment("pac_distance: width mismatch");
  if (samples == 0) throw InvalidAssignment("pac_distance_sampled: zero samples");
  Rng rng(mix_seed(seed));
  std::size_t dis = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    const auto x = dist.sample(rng).to_uint();
    dis += c1(x) != c2(x);
  }
  PacEstimate e;
  e.samples = samples;
  e.value = static_cast<double>(dis) / static_cast<double>(samples);
  e.ci_halfwidth = 1.96 * std::sqrt(e.value * (1 - e.value) / static_cast<double>(samples));
  return e;
}

namespace {

constexpr std::uint64_t kMaxConcepts = std::uint64_t{1} << 16;
constexpr std::uint64_t kMaxInputs = std::uint64_t{1} << 16;

// Truth tables as bitsets restricted to `inputs`.
std::vector<std::vector<std::uint64_t>> packed_tables(const ConceptClass& cls, const std::vector<std::uint64_t>& inputs) {
  const std::uint64_t count = cls.concept_count();
  if (count > kMaxConcepts) throw TooLarge("more than 2^16 concepts");
  if (inputs.size() > kMaxInputs) throw TooLarge("more than 2^16 inputs");
  const std::size_t words = (inputs.size() + 63) / 64;
  std::vector<std::vector<std::uint64_t>> tables(count, std::vector<std::uint64_t>(words));
  for (std::uint64_t a = 0; a < count; ++a) {
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      if (cls.eval(a, inputs[i])) tables[a][i / 64] |= std::uint64_t{1} << (i % 64);
    }
  }
  return tables;
}

std::uint64_t disagreements(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
  std::uint64_t d = 0;
  for (std::size_t w = 0; w < a.size(); ++w) d += static_cast<std::uint64_t>(std::popcount(a[w] ^ b[w]));
  return d;
}

}  // namespace

DistinctReport verify_c_distinct(const ConceptClass& cls, double c, const std::optional<InputDistribution>& promise) {
  std::vector<std::uint64_t> inputs;
  if (promise) {
    if (promise->n() != cls.n()) throw InvalidAssignment("promise distribution width mismatch");
    inputs = promise->support();
  } else {
    if (cls.n() > 16) throw TooLarge("more than 2^16 inputs");
    inputs = InputDistribution::uniform(cls.n()).support();
  }
  const auto tables = packed_tables(cls, inputs);
  DistinctReport r;
  r.class_name = to_string(cls.kind());
  r.params = cls.params();
  r.threshold = c;
  r.support = inputs.size();
  r.min_disagreements = inputs.size();
  for (std::uint64_t a = 0; a < tables.size() && r.min_disagreements > 0; ++a) {
    for (std::uint64_t b = a + 1; b < tables.size(); ++b) {
      ++r.pairs;
      const auto d = disagreements(tables[a], tables[b]);
      if (d < r.min_disagreements) {
        r.min_disagreements = d;
        r.argmin_a = a;
        r.argmin_b = b;
        if (d == 0) break;
      }
    }
  }
  r.min_fraction = static_cast<double>(r.min_disagreements) / static_cast<double>(inputs.size());
  r.pass = r.pairs == 0 || r.min_fraction >= c;
  return r;
}

SmoothReport verify_avg_smooth(const ConceptClass& cls, double C) {
  if (cls.n() > 16) throw TooLarge("more than 2^16 inputs");
  const auto inputs = InputDistribution::uniform(cls.n()).support();
  const auto tables = packed_tables(cls, inputs);
  const std::uint64_t S = inputs.size();
  const std::uint64_t m = cls.m();
  SmoothReport r;
  r.class_name = to_string(cls.kind());
  r.params = cls.params();
  r.threshold = C;
  bool have = false;
  for (std::uint64_t a = 0; a < tables.size(); ++a) {
    for (std::uint64_t b = a + 1; b < tables.size(); ++b) {
      ++r.pairs;
      // ratio = (dis / S) / (ham / m) = dis * m / (S * ham)
      const std::uint64_t ham = static_cast<std::uint64_t>(std::popcount(a ^ b));
      const std::uint64_t num = disagreements(tables[a], tables[b]) * m;
      const std::uint64_t den = S * ham;
      if (!have || static_cast<unsigned __int128>(num) * r.min_ratio_den <
                       static_cast<unsigned __int128>(r.min_ratio_num) * den) {
        have = true;
        r.min_ratio_num = num;
        r.min_ratio_den = den;
        r.argmin_a = a;
        r.argmin_b = b;
      }
    }
  }
  if (have) {
    const std::uint64_t g = std::gcd(r.min_ratio_num, r.min_ratio_den);
    r.min_ratio_num /= g;
    r.min_ratio_den /= g;
    r.min_ratio = static_cast<double>(r.min_ratio_num) / static_cast<double>(r.min_ratio_den);
    r.pass = r.min_ratio >= C - 1e-12;
  }
  return r;
}

nlohmann::json to_json(const DistinctReport& r) {
  return {{"class", r.class_name},
          {"params", r.params},
          {"min_fraction", r.pairs ? nlohmann::json(r.min_fraction) : nlohmann::json(nullptr)},
          {"min_disagreements", r.min_disagreements},
          {"support", r.support},
          {"pairs", r.pairs},
          {"argmin", {r.argmin_a, r.argmin_b}},
          {"threshold", r.threshold},
          {"pass", r.pass}};
}

nlohmann::json to_json(const SmoothReport& r) {
  return {{"class", r.class_name},
          {"params", r.params},
          {"min_ratio", r.pairs ? nlohmann::json(r.min_ratio) : nlohmann::json(nullptr)},
          {"min_ratio_exact", std::to_string(r.min_ratio_num) + "/" + std::to_string(r.min_ratio_den)},
          {"pairs", r.pairs},
          {"argmin", {r.argmin_a, r.argmin_b}},
          {"threshold", r.threshold},
          {"pass", r.pass}};
}

}  // namespace redlab
