#include "redlab/witness.hpp"

#include <algorithm>
#include <cmath>

#include "redlab/error.hpp"

namespace redlab {

namespace {

constexpr int kEstimateRepeats = 3;

void encode_xor(SatSession& s, const std::vector<int>& vars, bool rhs) {
  if (vars.empty()) {
    if (rhs) s.add_clause({});  // 0 = 1
    return;
  }
  int acc = vars[0];
  for (std::size_t i = 1; i < vars.size(); ++i) {
    const int z = s.new_var();
    const int b = vars[i];
    const int c1[] = {-z, acc, b};
    const int c2[] = {-z, -acc, -b};
    const int c3[] = {z, -acc, b};
    const int c4[] = {z, acc, -b};
    s.add_clause(c1);
    s.add_clause(c2);
    s.add_clause(c3);
    s.add_clause(c4);
    acc = z;
  }
  const int c[] = {rhs ? acc : -acc};
  s.add_clause(c);
}

}  // namespace

RelationCnf relation_cnf(const RelationInstance& instance) {
  const Circuit& rc = instance.relation_circuit;
  if (rc.output_width() != 1) throw InvalidAssignment("relation circuit must have exactly one output");
  if (!rc.has_group("witness")) throw InvalidAssignment("relation circuit has no 'witness' group");
  Circuit fixed = rc;
  if (rc.has_group("instance")) {
    if (instance.instance_value.width() != rc.group("instance").width) {
      throw InvalidAssignment("instance value width does not match the 'instance' group");
    }
    fixed = fix_inputs(rc, "instance", instance.instance_value);
  } else if (instance.instance_value.width() != 0) {
    throw InvalidAssignment("instance value given but the relation has no 'instance' group");
  }
  RelationCnf out;
  out.formula = to_cnf(fixed, {true});
  out.witness_vars = out.formula.input_var_map.at("witness");
  return out;
}

RelationInstance preimage_relation(const Circuit& program, std::string_view group, const BitString& x) {
  if (program.groups().size() != 1 || program.groups()[0].name != group) {
    throw InvalidAssignment("preimage_relation: program must have the single input group '" + std::string(group) + "'");
  }
  if (x.width() == 0 || x.width() > program.output_width()) {
    throw InvalidAssignment("preimage_relation: target wider than the program output");
  }
  CircuitBuilder b;
  auto inst = b.add_input("instance", x.width());
  auto wit = b.add_input("witness", program.group(group).width);
  auto out = b.inline_circuit(program, {{std::string(group), wit}});
  out.resize(x.width());
  b.add_output(b.equal(out, inst));
  return {std::move(b).build(), x};
}

WitnessGenerator::WitnessGenerator(const RelationInstance& instance, Oracle& oracle, std::uint64_t seed,
                                   WitnessOptions options)
    : rel_(relation_cnf(instance)), oracle_(oracle), options_(options), rng_(mix_seed(seed)) {
  if (rel_.witness_vars.size() > std::min<std::size_t>(options_.max_width, 64)) {
    throw TooLarge("witness width " + std::to_string(rel_.witness_vars.size()) + " exceeds maximum " +
                   std::to_string(options_.max_width));
  }
  small_ = enumerate_blocking(rel_.formula, rel_.witness_vars, oracle_, options_.cell_cap + 1);
  if (small_.empty()) throw NoWitness("relation has no witness for this instance");
  if (small_.size() <= options_.cell_cap) {
    exact_ = true;
    estimate_ = static_cast<double>(small_.size());
    return;
  }
  small_.clear();
  estimate();
}

WitnessGenerator::Hash WitnessGenerator::draw_hash(std::size_t k) {
  const std::size_t w = rel_.witness_vars.size();
  std::vector<std::uint64_t> rows;
  std::vector<bool> rhs;
  for (std::size_t row = 0; row < k; ++row) {
    std::uint64_t mask = 0;
    for (std::size_t i = 0; i < w; ++i) {
      if (coin(rng_)) mask |= std::uint64_t{1} << i;
    }
    rows.push_back(mask);
    rhs.push_back(coin(rng_));
  }
  // Row-reduce so each row's highest witness position is a pivot no other row
  // mentions. Same solution set; but with decisions in variable order every
  // parity chain becomes unit exactly at its pivot, avoiding parity conflicts.
  Hash h;
  std::vector<std::uint64_t> reduced;
  std::vector<bool> reduced_rhs;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::uint64_t m = rows[r];
    bool b = rhs[r];
    for (std::size_t q = 0; q < reduced.size(); ++q) {
      const std::uint64_t pivot = std::uint64_t{1} << (63 - __builtin_clzll(reduced[q]));
      if (m & pivot) {
        m ^= reduced[q];
        b = b != reduced_rhs[q];
      }
    }
    if (m == 0) {
      if (b) h.inconsistent = true;
      continue;
    }
    const std::uint64_t pivot = std::uint64_t{1} << (63 - __builtin_clzll(m));
    for (std::size_t q = 0; q < reduced.size(); ++q) {
      if (reduced[q] & pivot) {
        reduced[q] ^= m;
        reduced_rhs[q] = reduced_rhs[q] != b;
      }
    }
    reduced.push_back(m);
    reduced_rhs.push_back(b);
  }
  for (std::size_t q = 0; q < reduced.size(); ++q) {
    std::vector<int> vars;
    for (std::size_t i = 0; i < w; ++i) {
      if ((reduced[q] >> i) & 1u) vars.push_back(rel_.witness_vars[i]);
    }
    h.rows.push_back(std::move(vars));
    h.rhs.push_back(reduced_rhs[q]);
  }
  return h;
}

std::vector<BitString> WitnessGenerator::cell(const Hash& h, std::size_t cap) {
  if (h.inconsistent) return {};
  if (!base_) base_ = oracle_.session(rel_.formula);
  auto round = base_->clone();
  SatSession& s = *round;
  for (std::size_t i = 0; i < h.rows.size(); ++i) encode_xor(s, h.rows[i], h.rhs[i]);
  std::vector<BitString> out;
  while (out.size() < cap) {
    const SatVerdict r = s.solve();
    if (!r.sat()) break;
    BitString w = project(*r.model, rel_.witness_vars);
    std::vector<int> block;
    for (std::size_t i = 0; i < w.width(); ++i) block.push_back(w[i] ? -rel_.witness_vars[i] : rel_.witness_vars[i]);
    s.add_clause(block);
    out.push_back(std::move(w));
  }
  return out;
}

void WitnessGenerator::estimate() {
  // Smallest k whose random cell fits under the cap, scaled back up; median
  // over a few repetitions.
  const std::size_t w = rel_.witness_vars.size();
  std::vector<double> ests;
  for (int rep = 0; rep < kEstimateRepeats; ++rep) {
    for (std::size_t k = 1; k <= w; ++k) {
      const auto c = cell(draw_hash(k), options_.cell_cap + 1).size();
      if (c <= options_.cell_cap) {
        ests.push_back(static_cast<double>(std::max<std::size_t>(c, 1)) * std::ldexp(1.0, static_cast<int>(k)));
        break;
      }
    }
  }
  std::sort(ests.begin(), ests.end());
  estimate_ = ests[ests.size() / 2];
  const double k = std::round(std::log2(estimate_ / options_.target_cell));
  k_ = static_cast<std::size_t>(std::clamp(k, 1.0, static_cast<double>(w)));
}

BitString WitnessGenerator::next() {
  if (exact_) return small_[uniform_below(rng_, small_.size())];
  for (std::size_t round = 0; round < options_.stall_cap; ++round) {
    ++rounds_;
    const auto c = cell(draw_hash(k_), options_.cell_cap + 1);
    if (c.size() > options_.cell_cap) {
      ++overflows_;
      continue;
    }
    if (c.empty()) continue;
    return c[uniform_below(rng_, c.size())];
  }
  throw SamplerStall("no witness accepted within " + std::to_string(options_.stall_cap) + " rounds");
}

BitString sample_witness(const RelationInstance& instance, std::uint64_t seed, Oracle& oracle,
                         WitnessOptions options) {
  WitnessGenerator gen(instance, oracle, seed, options);
  return gen.next();
}

std::vector<BitString> enumerate_witnesses(const RelationInstance& instance, std::size_t cap, Oracle& oracle) {
  if (cap < 1) throw InvalidAssignment("enumerate_witnesses: cap must be at least 1");
  const RelationCnf rel = relation_cnf(instance);
  return enumerate_blocking(rel.formula, rel.witness_vars, oracle, cap);
}

}  // namespace redlab
