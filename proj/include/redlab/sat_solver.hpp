#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "redlab/cnf.hpp"

namespace redlab {

// Conflict-driven clause-learning solver: two watched literals, first-UIP
// learning, VSIDS, phase saving, Luby restarts. Deterministic. Value type, so
// a loaded solver can be copied as a snapshot.
//
// Clauses may be added between solve() calls; the witness sampler relies on
// this for blocking clauses.
class CdclSolver {
 public:
  enum class Result { Sat, Unsat };

  CdclSolver() = default;
  explicit CdclSolver(const CnfFormula& f);

  int num_vars() const { return static_cast<int>(assign_.size()); }
  int new_var();
  void ensure_vars(int n);

  // DIMACS literals. Returns false once the clause set is unsatisfiable.
  bool add_clause(std::span<const int> lits);
  bool add_clause(std::initializer_list<int> lits) { return add_clause(std::span<const int>(lits.begin(), lits.size())); }
  void add_formula(const CnfFormula& f);

  Result solve(std::span<const int> assumptions = {});

  // Valid after Sat. Index 0 is unused; index v holds variable v.
  const std::vector<std::uint8_t>& model() const { return model_; }
  bool model_value(int var) const { return model_.at(static_cast<std::size_t>(var)) != 0; }

  std::uint64_t conflicts() const { return conflicts_; }
  std::uint64_t decisions() const { return decisions_; }
  bool okay() const { return ok_; }

 private:
  using Lit = std::uint32_t;
  static constexpr std::uint32_t kNoReason = 0xffffffffu;
  static constexpr std::uint8_t kFalse = 0, kTrue = 1, kUndef = 2;
  enum class Status { Sat, Unsat, Restart };

  struct ClauseData {
    std::vector<Lit> lits;
    double activity = 0;
    bool learnt = false;
    bool deleted = false;
  };
  struct Watcher {
    std::uint32_t cref;
    Lit blocker;
  };

  static Lit to_lit(int dimacs) {
    return dimacs > 0 ? static_cast<Lit>(2 * (dimacs - 1)) : static_cast<Lit>(2 * (-dimacs - 1) + 1);
  }
  static std::uint32_t var_of(Lit l) { return l >> 1; }
  static bool sign_of(Lit l) { return (l & 1u) != 0; }
  static Lit neg(Lit l) { return l ^ 1u; }

  std::uint8_t value(Lit l) const {
    const std::uint8_t a = assign_[var_of(l)];
    return a == kUndef ? kUndef : static_cast<std::uint8_t>(a ^ static_cast<std::uint8_t>(sign_of(l)));
  }
  int decision_level() const { return static_cast<int>(trail_lim_.size()); }

  void enqueue(Lit l, std::uint32_t reason);
  std::uint32_t propagate();
  void analyze(std::uint32_t confl, std::vector<Lit>& learnt, int& bt_level);
  bool redundant(Lit l) const;
  void cancel_until(int level);
  std::uint32_t attach(std::vector<Lit> lits, bool learnt);
  Lit pick_branch();
  Status search(std::int64_t conflict_budget, std::span<const Lit> assumptions);
  void reduce_db();

  void bump_var(std::uint32_t v);
  void bump_clause(ClauseData& c);
  void heap_insert(std::uint32_t v);
  void heap_up(std::size_t i);
  void heap_down(std::size_t i);
  std::uint32_t heap_pop();
  bool heap_less(std::uint32_t a, std::uint32_t b) const;

  std::vector<ClauseData> clauses_;
  std::vector<std::vector<Watcher>> watches_;
  std::vector<std::uint8_t> assign_;
  std::vector<std::uint8_t> phase_;
  std::vector<int> level_;
  std::vector<std::uint32_t> reason_;
  std::vector<Lit> trail_;
  std::vector<std::size_t> trail_lim_;
  std::size_t qhead_ = 0;

  std::vector<double> activity_;
  std::vector<std::uint32_t> heap_;
  std::vector<int> heap_pos_;
  double var_inc_ = 1.0;
  double clause_inc_ = 1.0;

  std::vector<std::uint8_t> seen_;
  std::vector<std::uint32_t> touched_;
  std::vector<Lit> scratch_;
  std::vector<Lit> learnt_buf_;
  std::vector<std::uint32_t> learnts_;
  double max_learnts_ = 0;

  std::vector<std::uint8_t> model_;
  std::uint64_t conflicts_ = 0;
  std::uint64_t decisions_ = 0;
  bool ok_ = true;
};

}  // namespace redlab
