#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "redlab/cnf.hpp"
#include "redlab/sat_solver.hpp"

namespace redlab {

enum class SatStatus { Sat, Unsat };

struct SatVerdict {
  SatStatus status = SatStatus::Unsat;
  // Index v holds variable v; index 0 unused. Present iff Sat.
  std::optional<std::vector<std::uint8_t>> model;

  bool sat() const { return status == SatStatus::Sat; }
};

enum class BackendKind { Builtin, External };

struct OracleStats {
  std::uint64_t queries = 0;
  std::uint64_t cumulative_conflicts = 0;
  BackendKind backend = BackendKind::Builtin;

  OracleStats& operator+=(const OracleStats& o) {
    queries += o.queries;
    cumulative_conflicts += o.cumulative_conflicts;
    return *this;
  }
};

struct BackendConfig {
  BackendKind kind = BackendKind::Builtin;
  std::string solver_path;  // External only

  // "builtin" or "dimacs:<path>".
  static BackendConfig parse(const std::string& spec);
  // REDLAB_SAT_SOLVER if set, else builtin.
  static BackendConfig from_environment();
  std::string describe() const;
};

// A clause set that grows between queries. The builtin backend keeps one
// solver alive; the external one re-runs the subprocess per query.
class SatSession {
 public:
  virtual ~SatSession() = default;
  virtual void add_clause(std::span<const int> lits) = 0;
  virtual int new_var() = 0;
  virtual SatVerdict solve(std::span<const int> assumptions = {}) = 0;
  virtual std::size_t clause_count() const = 0;
  // Independent copy of the current clause set and solver state.
  virtual std::unique_ptr<SatSession> clone() const = 0;
};

// One instance per worker; not shareable across threads.
class Oracle {
 public:
  explicit Oracle(BackendConfig config = {});

  SatVerdict decide(const CnfFormula& formula);
  std::unique_ptr<SatSession> session(const CnfFormula& formula);

  const OracleStats& stats() const { return stats_; }
  const BackendConfig& config() const { return config_; }

 private:
  friend class BuiltinSession;
  friend class ExternalSession;
  BackendConfig config_;
  OracleStats stats_;
};

// Runs an external DIMACS solver on `formula`. Accepts SAT-competition output
// ("s SATISFIABLE" / "v ... 0") and MiniSat-style result files.
SatVerdict run_external_solver(const std::string& path, const CnfFormula& formula);

// True iff some suffix v gives C(u.v) with the first |target_x| outputs equal to
// target_x. The sampler's random input group is `r_group`.
bool prefix_extends(const Circuit& sampler, const BitString& target_x, const BitString& prefix_u, Oracle& oracle,
                    std::string_view r_group = "r");

// Exact number of distinct assignments to `vars` extendable to a model.
// Branches over `vars` in order with an assumption-based satisfiability check
// at each node.
std::uint64_t count_models(const CnfFormula& formula, std::span<const int> vars, Oracle& oracle);

// The assignments themselves, in lexicographic order of `vars`.
std::vector<BitString> enumerate_projected(const CnfFormula& formula, std::span<const int> vars, Oracle& oracle,
                                           std::uint64_t cap = ~std::uint64_t{0});

// Blocking-clause enumeration of projected models, up to `cap`.
std::vector<BitString> enumerate_blocking(const CnfFormula& formula, std::span<const int> vars, Oracle& oracle,
                                          std::uint64_t cap);

BitString project(const std::vector<std::uint8_t>& model, std::span<const int> vars);

}  // namespace redlab
