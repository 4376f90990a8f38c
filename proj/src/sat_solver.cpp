#include "redlab/sat_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace redlab {

namespace {

constexpr double kVarDecay = 0.95;
constexpr double kClauseDecay = 0.999;
constexpr std::int64_t kRestartBase = 100;

double luby(double y, int x) {
  int size = 1;
  int seq = 0;
  while (size < x + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    --seq;
    x = x % size;
  }
  return std::pow(y, seq);
}

}  // namespace

CdclSolver::CdclSolver(const CnfFormula& f) { add_formula(f); }

int CdclSolver::new_var() {
  const auto v = static_cast<std::uint32_t>(assign_.size());
  assign_.push_back(kUndef);
  phase_.push_back(0);
  level_.push_back(0);
  reason_.push_back(kNoReason);
  activity_.push_back(0.0);
  seen_.push_back(0);
  heap_pos_.push_back(-1);
  watches_.emplace_back();
  watches_.emplace_back();
  heap_insert(v);
  return static_cast<int>(v) + 1;
}

void CdclSolver::ensure_vars(int n) {
  while (num_vars() < n) new_var();
}

void CdclSolver::add_formula(const CnfFormula& f) {
  ensure_vars(f.variable_count);
  for (const auto& c : f.clauses) {
    if (!add_clause(c)) return;
  }
}

bool CdclSolver::add_clause(std::span<const int> lits) {
  if (!ok_) return false;
  cancel_until(0);
  auto& ls = scratch_;
  ls.clear();
  for (int d : lits) {
    ensure_vars(std::abs(d));
    ls.push_back(to_lit(d));
  }
  std::sort(ls.begin(), ls.end());
  std::vector<Lit> kept;
  kept.reserve(ls.size());
  Lit prev = 0xffffffffu;
  for (Lit l : ls) {
    if (l == prev) continue;
    if (prev != 0xffffffffu && l == neg(prev)) return true;  // tautology
    if (value(l) == kTrue) return true;
    if (value(l) != kFalse) kept.push_back(l);
    prev = l;
  }
  if (kept.empty()) {
    ok_ = false;
    return false;
  }
  if (kept.size() == 1) {
    enqueue(kept[0], kNoReason);
    if (propagate() != kNoReason) ok_ = false;
    return ok_;
  }
  attach(std::move(kept), false);
  return true;
}

std::uint32_t CdclSolver::attach(std::vector<Lit> lits, bool learnt) {
  const auto cref = static_cast<std::uint32_t>(clauses_.size());
  watches_[neg(lits[0])].push_back({cref, lits[1]});
  watches_[neg(lits[1])].push_back({cref, lits[0]});
  ClauseData c;
  c.lits = std::move(lits);
  c.learnt = learnt;
  clauses_.push_back(std::move(c));
  if (learnt) learnts_.push_back(cref);
  return cref;
}

void CdclSolver::enqueue(Lit l, std::uint32_t reason) {
  const auto v = var_of(l);
  assign_[v] = sign_of(l) ? kFalse : kTrue;
  level_[v] = decision_level();
  reason_[v] = reason;
  trail_.push_back(l);
}

std::uint32_t CdclSolver::propagate() {
  std::uint32_t confl = kNoReason;
  while (qhead_ < trail_.size()) {
    const Lit p = trail_[qhead_++];
    const Lit false_lit = neg(p);
    auto& ws = watches_[p];
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < ws.size()) {
      const Watcher w = ws[i];
      if (value(w.blocker) == kTrue) {
        ws[j++] = ws[i++];
        continue;
      }
      ClauseData& c = clauses_[w.cref];
      if (c.deleted) {
        ++i;
        continue;
      }
      auto& lits = c.lits;
      if (lits[0] == false_lit) std::swap(lits[0], lits[1]);
      ++i;
      const Lit first = lits[0];
      if (first != w.blocker && value(first) == kTrue) {
        ws[j++] = {w.cref, first};
        continue;
      }
      bool moved = false;
      for (std::size_t k = 2; k < lits.size(); ++k) {
        if (value(lits[k]) != kFalse) {
          std::swap(lits[1], lits[k]);
          watches_[neg(lits[1])].push_back({w.cref, first});
          moved = true;
          break;
        }
      }
      if (moved) continue;
      ws[j++] = {w.cref, first};
      if (value(first) == kFalse) {
        confl = w.cref;
        qhead_ = trail_.size();
        while (i < ws.size()) ws[j++] = ws[i++];
      } else {
        enqueue(first, w.cref);
      }
    }
    ws.resize(j);
    if (confl != kNoReason) break;
  }
  return confl;
}

void CdclSolver::analyze(std::uint32_t confl, std::vector<Lit>& learnt, int& bt_level) {
  learnt.clear();
  learnt.push_back(0);  // slot for the asserting literal
  int path = 0;
  Lit p = 0xffffffffu;
  std::size_t index = trail_.size();
  auto& touched = touched_;
  touched.clear();

  do {
    ClauseData& c = clauses_[confl];
    if (c.learnt) bump_clause(c);
    for (std::size_t k = (p == 0xffffffffu ? 0 : 1); k < c.lits.size(); ++k) {
      const Lit q = c.lits[k];
      const auto v = var_of(q);
      if (seen_[v] || level_[v] == 0) continue;
      bump_var(v);
      seen_[v] = 1;
      touched.push_back(v);
      if (level_[v] >= decision_level()) {
        ++path;
      } else {
        learnt.push_back(q);
      }
    }
    do {
      --index;
    } while (!seen_[var_of(trail_[index])]);
    p = trail_[index];
    confl = reason_[var_of(p)];
    seen_[var_of(p)] = 0;
    --path;
  } while (path > 0);
  learnt[0] = neg(p);

  // Local minimization: drop literals implied by others already in the clause.
  std::size_t keep = 1;
  for (std::size_t k = 1; k < learnt.size(); ++k) {
    if (!redundant(learnt[k])) learnt[keep++] = learnt[k];
  }
  learnt.resize(keep);

  if (learnt.size() == 1) {
    bt_level = 0;
  } else {
    std::size_t max_i = 1;
    for (std::size_t k = 2; k < learnt.size(); ++k) {
      if (level_[var_of(learnt[k])] > level_[var_of(learnt[max_i])]) max_i = k;
    }
    std::swap(learnt[1], learnt[max_i]);
    bt_level = level_[var_of(learnt[1])];
  }
  for (auto v : touched) seen_[v] = 0;
}

bool CdclSolver::redundant(Lit l) const {
  const auto r = reason_[var_of(l)];
  if (r == kNoReason) return false;
  const auto& lits = clauses_[r].lits;
  for (std::size_t k = 1; k < lits.size(); ++k) {
    const auto v = var_of(lits[k]);
    if (!seen_[v] && level_[v] > 0) return false;
  }
  return true;
}

void CdclSolver::cancel_until(int level) {
  if (decision_level() <= level) return;
  for (std::size_t c = trail_.size(); c-- > trail_lim_[static_cast<std::size_t>(level)];) {
    const auto v = var_of(trail_[c]);
    assign_[v] = kUndef;
    reason_[v] = kNoReason;
    phase_[v] = sign_of(trail_[c]) ? 0 : 1;
    heap_insert(v);
  }
  trail_.resize(trail_lim_[static_cast<std::size_t>(level)]);
  trail_lim_.resize(static_cast<std::size_t>(level));
  qhead_ = trail_.size();
}

CdclSolver::Lit CdclSolver::pick_branch() {
  while (!heap_.empty()) {
    const auto v = heap_pop();
    if (assign_[v] == kUndef) return 2 * v + (phase_[v] ? 0u : 1u);
  }
  return 0xffffffffu;
}

CdclSolver::Status CdclSolver::search(std::int64_t conflict_budget, std::span<const Lit> assumptions) {
  auto& learnt = learnt_buf_;
  std::int64_t local_conflicts = 0;
  for (;;) {
    const std::uint32_t confl = propagate();
    if (confl != kNoReason) {
      ++conflicts_;
      ++local_conflicts;
      if (decision_level() == 0) {
        ok_ = false;
        return Status::Unsat;
      }
      int bt = 0;
      analyze(confl, learnt, bt);
      cancel_until(bt);
      if (learnt.size() == 1) {
        enqueue(learnt[0], kNoReason);
      } else {
        const auto cref = attach(learnt, true);
        bump_clause(clauses_[cref]);
        enqueue(learnt[0], cref);
      }
      var_inc_ /= kVarDecay;
      clause_inc_ /= kClauseDecay;
      continue;
    }

    if (local_conflicts >= conflict_budget) {
      cancel_until(0);
      return Status::Restart;
    }
    if (static_cast<double>(learnts_.size()) - static_cast<double>(trail_.size()) >= max_learnts_) reduce_db();

    Lit next = 0xffffffffu;
    while (static_cast<std::size_t>(decision_level()) < assumptions.size()) {
      const Lit a = assumptions[static_cast<std::size_t>(decision_level())];
      if (value(a) == kTrue) {
        trail_lim_.push_back(trail_.size());
      } else if (value(a) == kFalse) {
        return Status::Unsat;
      } else {
        next = a;
        break;
      }
    }
    if (next == 0xffffffffu) {
      ++decisions_;
      next = pick_branch();
      if (next == 0xffffffffu) {
        model_.assign(assign_.size() + 1, 0);
        for (std::size_t v = 0; v < assign_.size(); ++v) model_[v + 1] = assign_[v] == kTrue ? 1 : 0;
        return Status::Sat;
      }
    }
    trail_lim_.push_back(trail_.size());
    enqueue(next, kNoReason);
  }
}

CdclSolver::Result CdclSolver::solve(std::span<const int> assumptions) {
  model_.clear();
  if (!ok_) return Result::Unsat;
  cancel_until(0);
  std::vector<Lit> assume;
  for (int d : assumptions) {
    ensure_vars(std::abs(d));
    assume.push_back(to_lit(d));
  }
  if (propagate() != kNoReason) {
    ok_ = false;
    return Result::Unsat;
  }
  max_learnts_ = std::max(1000.0, static_cast<double>(clauses_.size() - learnts_.size()) / 3.0);
  for (int round = 0;; ++round) {
    const auto budget = static_cast<std::int64_t>(luby(2.0, round) * kRestartBase);
    const Status st = search(budget, assume);
    if (st != Status::Restart) {
      cancel_until(0);
      return st == Status::Sat ? Result::Sat : Result::Unsat;
    }
    max_learnts_ *= 1.05;
  }
}

void CdclSolver::reduce_db() {
  std::vector<std::uint32_t> cand;
  std::vector<std::uint32_t> kept;
  for (auto cref : learnts_) {
    const ClauseData& c = clauses_[cref];
    const Lit l0 = c.lits[0];
    const bool locked = value(l0) == kTrue && reason_[var_of(l0)] == cref;
    if (c.lits.size() <= 2 || locked) {
      kept.push_back(cref);
    } else {
      cand.push_back(cref);
    }
  }
  std::sort(cand.begin(), cand.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (clauses_[a].activity != clauses_[b].activity) return clauses_[a].activity < clauses_[b].activity;
    return a < b;
  });
  const std::size_t drop = cand.size() / 2;
  for (std::size_t i = 0; i < cand.size(); ++i) {
    if (i < drop) {
      ClauseData& c = clauses_[cand[i]];
      c.deleted = true;
      std::vector<Lit>().swap(c.lits);
    } else {
      kept.push_back(cand[i]);
    }
  }
  for (auto& ws : watches_) {
    ws.erase(std::remove_if(ws.begin(), ws.end(), [&](const Watcher& w) { return clauses_[w.cref].deleted; }),
             ws.end());
  }
  std::sort(kept.begin(), kept.end());
  learnts_ = std::move(kept);
}

void CdclSolver::bump_var(std::uint32_t v) {
  activity_[v] += var_inc_;
  if (activity_[v] > 1e100) {
    for (auto& a : activity_) a *= 1e-100;
    var_inc_ *= 1e-100;
  }
  if (heap_pos_[v] >= 0) heap_up(static_cast<std::size_t>(heap_pos_[v]));
}

void CdclSolver::bump_clause(ClauseData& c) {
  c.activity += clause_inc_;
  if (c.activity > 1e20) {
    for (auto cref : learnts_) clauses_[cref].activity *= 1e-20;
    clause_inc_ *= 1e-20;
  }
}

bool CdclSolver::heap_less(std::uint32_t a, std::uint32_t b) const {
  if (activity_[a] != activity_[b]) return activity_[a] > activity_[b];
  return a < b;
}

void CdclSolver::heap_insert(std::uint32_t v) {
  if (heap_pos_[v] >= 0) return;
  heap_pos_[v] = static_cast<int>(heap_.size());
  heap_.push_back(v);
  heap_up(heap_.size() - 1);
}

void CdclSolver::heap_up(std::size_t i) {
  const auto v = heap_[i];
  while (i > 0) {
    const std::size_t parent = (i - 1) / 2;
    if (!heap_less(v, heap_[parent])) break;
    heap_[i] = heap_[parent];
    heap_pos_[heap_[i]] = static_cast<int>(i);
    i = parent;
  }
  heap_[i] = v;
  heap_pos_[v] = static_cast<int>(i);
}

void CdclSolver::heap_down(std::size_t i) {
  const auto v = heap_[i];
  for (;;) {
    std::size_t child = 2 * i + 1;
    if (child >= heap_.size()) break;
    if (child + 1 < heap_.size() && heap_less(heap_[child + 1], heap_[child])) ++child;
    if (!heap_less(heap_[child], v)) break;
    heap_[i] = heap_[child];
    heap_pos_[heap_[i]] = static_cast<int>(i);
    i = child;
  }
  heap_[i] = v;
  heap_pos_[v] = static_cast<int>(i);
}

std::uint32_t CdclSolver::heap_pop() {
  const auto top = heap_[0];
  heap_pos_[top] = -1;
  const auto last = heap_.back();
  heap_.pop_back();
  if (!heap_.empty()) {
    heap_[0] = last;
    heap_pos_[last] = 0;
    heap_down(0);
  }
  return top;
}

}  // namespace redlab
