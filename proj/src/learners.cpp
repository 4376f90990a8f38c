#include "redlab/learners.hpp"

#include <bit>
#include <istream>
#include <ostream>
#include <sstream>

#include "redlab/error.hpp"

namespace redlab {

BitString Dataset::encode() const {
  BitString out(samples.size() * (n + 1));
  for (std::size_t l = 0; l < samples.size(); ++l) {
    for (std::size_t i = 0; i < n; ++i) out.set(l * (n + 1) + i, uint_bit(samples[l].x, n, i));
    out.set(l * (n + 1) + n, samples[l].y);
  }
  return out;
}

Dataset Dataset::decode(const BitString& bits, std::size_t n) {
  if (n == 0 || bits.width() % (n + 1) != 0) throw InvalidAssignment("dataset encoding width is not a multiple of n+1");
  Dataset t;
  t.n = n;
  for (std::size_t off = 0; off < bits.width(); off += n + 1) {
    t.samples.push_back({bits.slice(off, n).to_uint(), bits[off + n]});
  }
  return t;
}

Dataset Dataset::with(Sample s) const {
  Dataset t;
  t.n = n;
  t.samples.reserve(samples.size() + 1);
  t.samples.push_back(s);
  t.samples.insert(t.samples.end(), samples.begin(), samples.end());
  return t;
}

void write_dataset(std::ostream& out, const Dataset& t) {
  for (std::size_t l = 0; l < t.size(); ++l) out << t.x_bits(l).str() << ' ' << (t.samples[l].y ? 1 : 0) << '\n';
}

Dataset read_dataset(std::istream& in, std::size_t n) {
  Dataset t;
  t.n = n;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string xs, ys, extra;
    if (!(ls >> xs)) continue;
    auto fail = [&](const std::string& what) {
      return ParseError("dataset line " + std::to_string(lineno) + ": " + what);
    };
    if (!(ls >> ys) || (ys != "0" && ys != "1")) throw fail("expected '<x-bits> <0|1>'");
    if (ls >> extra) throw fail("trailing token '" + extra + "'");
    BitString x;
    try {
      x = BitString::parse(xs);
    } catch (const Error&) {
      throw fail("malformed bit string '" + xs + "'");
    }
    if (t.n == 0) t.n = x.width();
    if (x.width() != t.n || t.n > 63) throw fail("input width " + std::to_string(x.width()) + " != " + std::to_string(t.n));
    t.samples.push_back({x.to_uint(), ys == "1"});
  }
  return t;
}

Dataset label_dataset(const ConceptClass& cls, std::uint64_t alpha, const std::vector<std::uint64_t>& xs) {
  Dataset t;
  t.n = cls.n();
  for (auto x : xs) t.samples.push_back({x, cls.eval(alpha, x)});
  return t;
}

namespace {

void check_width(const Dataset& t, std::size_t n) {
  if (t.n != n) throw InvalidAssignment("dataset width " + std::to_string(t.n) + " != class width " + std::to_string(n));
}

}  // namespace

LearnerVerdict xor_mask_learn(const Dataset& t, const LearnerConfig& cfg, const TargetFunction& f) {
  const std::size_t n = f.n();
  check_width(t, n);
  // Rows in reduced echelon form; each pivot (highest set bit of its row)
  // appears in no other row.
  std::vector<std::uint64_t> rows;
  std::vector<bool> rhs;
  for (const auto& s : t.samples) {
    std::uint64_t row = s.x;
    bool b = s.y != f.value(s.x);
    for (std::size_t q = 0; q < rows.size(); ++q) {
      if (row & std::bit_floor(rows[q])) {
        row ^= rows[q];
        b = b != rhs[q];
      }
    }
    if (row == 0) {
      if (b) return LearnerVerdict::invalid();
      continue;
    }
    const std::uint64_t pivot = std::bit_floor(row);
    for (std::size_t q = 0; q < rows.size(); ++q) {
      if (rows[q] & pivot) {
        rows[q] ^= row;
        rhs[q] = rhs[q] != b;
      }
    }
    rows.push_back(row);
    rhs.push_back(b);
  }
  std::uint64_t pivots = 0;
  for (auto row : rows) pivots |= std::bit_floor(row);
  std::uint64_t alpha = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t bit = std::uint64_t{1} << (n - 1 - i);
    if (!(pivots & bit) && cfg.r_bit(i)) alpha |= bit;
  }
  for (std::size_t q = 0; q < rows.size(); ++q) {
    const std::uint64_t pivot = std::bit_floor(rows[q]);
    if (rhs[q] != (std::popcount(rows[q] & ~pivot & alpha) & 1)) alpha |= pivot;
  }
  for (const auto& s : t.samples) {
    if ((f.value(s.x) != (std::popcount(alpha & s.x) & 1)) != s.y) {
      throw std::logic_error("xor_mask_learn: solution fails a sample");
    }
  }
  return LearnerVerdict::identified(BitString::from_uint(alpha, n));
}

LearnerVerdict bit_index_learn(const Dataset& t, const LearnerConfig& cfg, std::size_t m, BitIndexMode mode) {
  std::vector<std::uint32_t> ones(m), zeros(m);
  for (const auto& s : t.samples) {
    const std::size_t i = bit_index_of(s.x, t.n, m);
    if (i > m) {
      if (s.y) return LearnerVerdict::invalid();
      continue;
    }
    ++(s.y ? ones : zeros)[i - 1];
  }
  BitString alpha(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (mode == BitIndexMode::Strict && ones[i] && zeros[i]) return LearnerVerdict::invalid();
    const bool unseen = ones[i] == 0 && zeros[i] == 0;
    alpha.set(i, unseen ? cfg.r_bit(i) : ones[i] > zeros[i]);
  }
  return LearnerVerdict::identified(std::move(alpha));
}

LearnerVerdict rs_learn(const Dataset& t, const LearnerConfig&, const ConceptClass& cls) {
  if (cls.kind() != ClassKind::RsBlock) throw InvalidAssignment("rs_learn needs an rs_block class");
  check_width(t, cls.n());
  if (cls.concept_count() > (std::uint64_t{1} << 16)) throw TooLarge("more than 2^16 messages to scan");
  const std::size_t blocks = cls.blocks().blocks;
  std::vector<int> balance(blocks);
  for (const auto& s : t.samples) balance[cls.blocks().block_of(s.x)] += s.y ? 1 : -1;
  std::uint64_t best = 0;
  std::size_t best_agree = 0;
  for (std::uint64_t k = 0; k < cls.concept_count(); ++k) {
    const BitString& g = cls.rs_bits(k);
    std::size_t agree = 0;
    for (std::size_t j = 0; j < blocks; ++j) agree += (balance[j] > 0 && g[j]) || (balance[j] < 0 && !g[j]);
    if (agree > best_agree) {
      best_agree = agree;
      best = k;
    }
  }
  if (!t.samples.empty()) {
    bool any = false;
    for (const auto& s : t.samples) any = any || cls.eval(best, s.x) == s.y;
    if (!any) return LearnerVerdict::invalid();
  }
  return LearnerVerdict::identified(BitString::from_uint(best, cls.m()));
}

XorMaskLearner::XorMaskLearner(ConceptClass cls) : cls_(std::move(cls)) {
  if (cls_.kind() != ClassKind::XorMask) throw InvalidAssignment("XorMaskLearner needs an xor_mask class");
}

LearnerVerdict XorMaskLearner::learn(const Dataset& t, const LearnerConfig& cfg) const {
  return xor_mask_learn(t, cfg, *cls_.base_target());
}

BitIndexLearner::BitIndexLearner(ConceptClass cls, BitIndexMode mode) : cls_(std::move(cls)), mode_(mode) {
  if (cls_.kind() != ClassKind::BitIndex) throw InvalidAssignment("BitIndexLearner needs a bit_index class");
}

LearnerVerdict BitIndexLearner::learn(const Dataset& t, const LearnerConfig& cfg) const {
  check_width(t, cls_.n());
  return bit_index_learn(t, cfg, cls_.m(), mode_);
}

std::string BitIndexLearner::name() const {
  return mode_ == BitIndexMode::Majority ? "bit_index_majority" : "bit_index_strict";
}

RsLearner::RsLearner(ConceptClass cls) : cls_(std::move(cls)) {
  if (cls_.kind() != ClassKind::RsBlock) throw InvalidAssignment("RsLearner needs an rs_block class");
}

LearnerVerdict RsLearner::learn(const Dataset& t, const LearnerConfig& cfg) const { return rs_learn(t, cfg, cls_); }

SingletonLearner::SingletonLearner(ConceptClass cls) : cls_(std::move(cls)) {
  if (cls_.kind() != ClassKind::Singleton) throw InvalidAssignment("SingletonLearner needs a singleton class");
}

LearnerVerdict SingletonLearner::learn(const Dataset& t, const LearnerConfig&) const {
  check_width(t, cls_.n());
  for (const auto& s : t.samples) {
    if (cls_.eval(0, s.x) != s.y) return LearnerVerdict::invalid();
  }
  return LearnerVerdict::identified(BitString(1));
}

std::vector<Wire> emit_learner_logic(CircuitBuilder& b, const BitIndexLearner& learner, std::span<const Wire> t,
                                     std::span<const Wire> r) {
  const ConceptClass& cls = learner.concept_class();
  const std::size_t n = cls.n(), m = cls.m(), l = index_bits(m);
  if (t.empty() || t.size() % (n + 1) != 0 || r.size() != m) throw InvalidAssignment("learner logic: bad wire widths");
  const std::size_t B = t.size() / (n + 1);
  const bool strict = learner.mode() == BitIndexMode::Strict;
  std::vector<std::vector<Wire>> sel(B, std::vector<Wire>(m));
  std::vector<Wire> labels(B), bad;
  for (std::size_t s = 0; s < B; ++s) {
    const auto prefix = t.subspan(s * (n + 1), l);
    labels[s] = t[s * (n + 1) + n];
    for (std::size_t i = 0; i < m; ++i) {
      sel[s][i] = l == 0 ? b.constant(true) : b.equal_const(prefix, BitString::from_uint(i, l));
    }
    if ((std::size_t{1} << l) > m) bad.push_back(b.and_(b.not_(b.less_than_const(prefix, m)), labels[s]));
  }
  std::vector<Wire> out;
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<Wire> one, zero, seen;
    for (std::size_t s = 0; s < B; ++s) {
      one.push_back(b.and_(sel[s][i], labels[s]));
      zero.push_back(b.and_(sel[s][i], b.not_(labels[s])));
      seen.push_back(sel[s][i]);
    }
    const Wire unseen_r = b.and_(b.not_(b.or_all(seen)), r[i]);
    if (strict) {
      const Wire any1 = b.or_all(one), any0 = b.or_all(zero);
      bad.push_back(b.and_(any1, any0));
      out.push_back(b.or_(any1, unseen_r));
    } else {
      out.push_back(b.or_(b.greater(b.popcount(one), b.popcount(zero)), unseen_r));
    }
  }
  out.push_back(b.not_(b.or_all(bad)));
  return out;
}

Circuit learner_as_circuit(const Identifier& learner, std::size_t B) {
  const auto* bil = dynamic_cast<const BitIndexLearner*>(&learner);
  if (bil == nullptr) throw Unsupported("no circuit form for learner " + learner.name());
  const std::size_t n = bil->concept_class().n(), m = bil->concept_class().m();
  if (B == 0) throw InvalidAssignment("learner circuit needs B >= 1");
  if (B * (n + 1) + m > 96) throw TooLarge("learner circuit input exceeds 96 bits");
  CircuitBuilder b;
  const auto t = b.add_input("T", B * (n + 1));
  const auto r = b.add_input("r", m);
  b.add_outputs(emit_learner_logic(b, *bil, t, r));
  return std::move(b).build();
}

}  // namespace redlab
