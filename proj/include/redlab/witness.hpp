#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "redlab/circuit.hpp"
#include "redlab/cnf.hpp"
#include "redlab/oracle.hpp"
#include "redlab/rng.hpp"

namespace redlab {

// R[x, w] as a circuit with input groups "instance" (optional) and "witness"
// and a single output. R_x = {w : R[x, w] = 1}.
struct RelationInstance {
  Circuit relation_circuit;
  BitString instance_value;
};

struct WitnessOptions {
  std::size_t max_width = 32;
  std::size_t cell_cap = 64;
  std::size_t stall_cap = 64;
  // Target mean cell size when hashing; well below cell_cap so that cells
  // rarely overflow. Each round costs about target_cell + 1 solves; sizes 4
  // to 16 showed no bias above sampling noise at 2e5 draws.
  double target_cell = 8.0;
};

// CNF for R[x, .] with the output pinned to 1, and its witness variables.
struct RelationCnf {
  CnfFormula formula;
  std::vector<int> witness_vars;
};

RelationCnf relation_cnf(const RelationInstance& instance);

// R[x, w] = "the first |x| outputs of `program` on input group `group` := w
// equal x". Other input groups of `program` are not allowed.
RelationInstance preimage_relation(const Circuit& program, std::string_view group, const BitString& x);

// Near-uniform witness generator. Small witness sets (<= cell_cap) are
// enumerated once and sampled exactly. Larger ones are cut by k random GF(2)
// parity constraints; each round enumerates the cell and returns a uniform
// member, retrying on empty or overflowing cells. Affine hashes make the
// "other witnesses in my cell" count identically distributed in mean and
// variance for every witness, so the residual bias is third order in 1/|cell|.
// k is fixed once per generator from a hashing estimate of |R_x|.
class WitnessGenerator {
 public:
  WitnessGenerator(const RelationInstance& instance, Oracle& oracle, std::uint64_t seed, WitnessOptions options = {});

  BitString next();

  bool exact_mode() const { return exact_; }
  std::size_t hash_rows() const { return k_; }
  double estimated_count() const { return estimate_; }
  std::uint64_t rounds() const { return rounds_; }
  std::uint64_t overflows() const { return overflows_; }
  std::size_t width() const { return rel_.witness_vars.size(); }

 private:
  struct Hash {
    std::vector<std::vector<int>> rows;
    std::vector<bool> rhs;
    bool inconsistent = false;
  };

  Hash draw_hash(std::size_t k);
  // Cell witnesses under `h`, up to `cap` of them.
  std::vector<BitString> cell(const Hash& h, std::size_t cap);
  void estimate();

  RelationCnf rel_;
  Oracle& oracle_;
  WitnessOptions options_;
  Rng rng_;
  std::unique_ptr<SatSession> base_;
  std::vector<BitString> small_;
  bool exact_ = false;
  std::size_t k_ = 0;
  double estimate_ = 0;
  std::uint64_t rounds_ = 0;
  std::uint64_t overflows_ = 0;
};

BitString sample_witness(const RelationInstance& instance, std::uint64_t seed, Oracle& oracle,
                         WitnessOptions options = {});

std::vector<BitString> enumerate_witnesses(const RelationInstance& instance, std::size_t cap, Oracle& oracle);

}  // namespace redlab
