#include "redlab/oracle.hpp"

#include <unistd.h>

#include <array>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "redlab/error.hpp"

namespace redlab {

BackendConfig BackendConfig::parse(const std::string& spec) {
  if (spec == "builtin") return {};
  const std::string prefix = "dimacs:";
  if (spec.rfind(prefix, 0) == 0 && spec.size() > prefix.size()) {
    return {BackendKind::External, spec.substr(prefix.size())};
  }
  throw ConfigError("solver: expected 'builtin' or 'dimacs:<path>', got '" + spec + "'");
}

BackendConfig BackendConfig::from_environment() {
  const char* env = std::getenv("REDLAB_SAT_SOLVER");
  if (env == nullptr || *env == '\0') return {};
  return {BackendKind::External, env};
}

std::string BackendConfig::describe() const {
  return kind == BackendKind::Builtin ? "builtin" : "dimacs:" + solver_path;
}

namespace {

void verify_model(const std::vector<Clause>& clauses, const std::vector<std::uint8_t>& model) {
  for (const auto& c : clauses) {
    bool sat = false;
    for (int lit : c) {
      const auto v = static_cast<std::size_t>(std::abs(lit));
      if (v < model.size() && (model[v] != 0) == (lit > 0)) {
        sat = true;
        break;
      }
    }
    if (!sat) throw std::logic_error("SAT backend returned a model that violates a clause");
  }
}

// Clause list in one buffer; copying a session copies two vectors.
struct FlatClauses {
  std::vector<int> lits;
  std::vector<std::uint32_t> ends;

  void add(std::span<const int> c) {
    lits.insert(lits.end(), c.begin(), c.end());
    ends.push_back(static_cast<std::uint32_t>(lits.size()));
  }

  void verify(const std::vector<std::uint8_t>& model) const {
    std::size_t begin = 0;
    for (const std::uint32_t end : ends) {
      bool sat = false;
      for (std::size_t i = begin; i < end; ++i) {
        const int lit = lits[i];
        const auto v = static_cast<std::size_t>(lit > 0 ? lit : -lit);
        if (v < model.size() && (model[v] != 0) == (lit > 0)) {
          sat = true;
          break;
        }
      }
      if (!sat) throw std::logic_error("SAT backend returned a model that violates a clause");
      begin = end;
    }
  }
};

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

}  // namespace

SatVerdict run_external_solver(const std::string& path, const CnfFormula& formula) {
  static std::atomic<std::uint64_t> counter{0};
  namespace fs = std::filesystem;
  const fs::path file = fs::temp_directory_path() / ("redlab-" + std::to_string(::getpid()) + "-" +
                                                     std::to_string(counter.fetch_add(1)) + ".cnf");
  {
    std::ofstream out(file);
    if (!out) throw BackendUnavailable("cannot write temporary CNF file " + file.string());
    write_dimacs(out, formula);
  }
  const std::string cmd = shell_quote(path) + " " + shell_quote(file.string()) + " 2>/dev/null";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (pipe == nullptr) {
    fs::remove(file);
    throw BackendUnavailable("cannot launch external solver " + path);
  }
  std::string output;
  std::array<char, 4096> buf{};
  std::size_t got;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) output.append(buf.data(), got);
  const int status = ::pclose(pipe);
  std::error_code ec;
  fs::remove(file, ec);

  std::istringstream in(output);
  std::string line;
  std::optional<SatStatus> result;
  std::vector<std::uint8_t> model(static_cast<std::size_t>(formula.variable_count) + 1, 0);
  while (std::getline(in, line)) {
    if (line.rfind("s ", 0) == 0) {
      if (line.find("UNSATISFIABLE") != std::string::npos) {
        result = SatStatus::Unsat;
      } else if (line.find("SATISFIABLE") != std::string::npos) {
        result = SatStatus::Sat;
      }
    } else if (line.rfind("v ", 0) == 0 || line.rfind("v\t", 0) == 0) {
      std::istringstream ls(line.substr(1));
      long lit;
      while (ls >> lit) {
        const auto v = static_cast<std::size_t>(std::labs(lit));
        if (lit != 0 && v < model.size()) model[v] = lit > 0 ? 1 : 0;
      }
    }
  }
  if (!result) {
    throw BackendUnavailable("external solver " + path + " produced no result line (exit status " +
                             std::to_string(status) + ")");
  }
  SatVerdict verdict;
  verdict.status = *result;
  if (verdict.sat()) {
    verify_model(formula.clauses, model);
    verdict.model = std::move(model);
  }
  return verdict;
}

class BuiltinSession final : public SatSession {
 public:
  BuiltinSession(Oracle& oracle, const CnfFormula& f)
      : oracle_(oracle) {
    auto base = std::make_shared<FlatClauses>();
    for (const auto& c : f.clauses) base->add(c);
    base_ = std::move(base);
    solver_.add_formula(f);
  }

  void add_clause(std::span<const int> lits) override {
    extra_.add(lits);
    solver_.add_clause(lits);
  }

  int new_var() override { return solver_.new_var(); }
  std::size_t clause_count() const override { return base_->ends.size() + extra_.ends.size(); }
  std::unique_ptr<SatSession> clone() const override { return std::make_unique<BuiltinSession>(*this); }

  SatVerdict solve(std::span<const int> assumptions) override {
    ++oracle_.stats_.queries;
    const auto before = solver_.conflicts();
    const auto r = solver_.solve(assumptions);
    oracle_.stats_.cumulative_conflicts += solver_.conflicts() - before;
    SatVerdict v;
    if (r == CdclSolver::Result::Sat) {
      v.status = SatStatus::Sat;
      base_->verify(solver_.model());
      extra_.verify(solver_.model());
      for (int a : assumptions) {
        if (solver_.model_value(std::abs(a)) != (a > 0)) throw std::logic_error("model ignores an assumption");
      }
      v.model = solver_.model();
    }
    return v;
  }

 private:
  Oracle& oracle_;
  CdclSolver solver_;
  std::shared_ptr<const FlatClauses> base_;
  FlatClauses extra_;
};

class ExternalSession final : public SatSession {
 public:
  ExternalSession(Oracle& oracle, const CnfFormula& f) : oracle_(oracle), formula_(f) {}

  void add_clause(std::span<const int> lits) override {
    for (int l : lits) {
      if (std::abs(l) > formula_.variable_count) formula_.variable_count = std::abs(l);
    }
    formula_.clauses.emplace_back(lits.begin(), lits.end());
  }

  int new_var() override { return formula_.new_var(); }
  std::size_t clause_count() const override { return formula_.clauses.size(); }
  std::unique_ptr<SatSession> clone() const override { return std::make_unique<ExternalSession>(*this); }

  SatVerdict solve(std::span<const int> assumptions) override {
    ++oracle_.stats_.queries;
    if (assumptions.empty()) return run_external_solver(oracle_.config_.solver_path, formula_);
    CnfFormula f = formula_;
    for (int a : assumptions) {
      if (std::abs(a) > f.variable_count) f.variable_count = std::abs(a);
      f.clauses.push_back({a});
    }
    return run_external_solver(oracle_.config_.solver_path, f);
  }

 private:
  Oracle& oracle_;
  CnfFormula formula_;
};

Oracle::Oracle(BackendConfig config) : config_(std::move(config)) { stats_.backend = config_.kind; }

std::unique_ptr<SatSession> Oracle::session(const CnfFormula& formula) {
  if (config_.kind == BackendKind::External) return std::make_unique<ExternalSession>(*this, formula);
  return std::make_unique<BuiltinSession>(*this, formula);
}

SatVerdict Oracle::decide(const CnfFormula& formula) { return session(formula)->solve({}); }

BitString project(const std::vector<std::uint8_t>& model, std::span<const int> vars) {
  std::vector<std::uint8_t> bits;
  bits.reserve(vars.size());
  for (int v : vars) bits.push_back(model.at(static_cast<std::size_t>(v)));
  return BitString(std::move(bits));
}

bool prefix_extends(const Circuit& sampler, const BitString& target_x, const BitString& prefix_u, Oracle& oracle,
                    std::string_view r_group) {
  const InputGroup& r = sampler.group(r_group);
  if (prefix_u.width() > r.width) throw InvalidAssignment("prefix longer than the random input");
  const Circuit fixed = fix_inputs(sampler, r_group, prefix_u);
  const CnfFormula f = to_cnf(fixed, pin_prefix(target_x, fixed.output_width()));
  return oracle.decide(f).sat();
}

namespace {

void branch(SatSession& s, std::span<const int> vars, std::vector<int>& assumed, const std::vector<std::uint8_t>& model,
            std::uint64_t cap, std::vector<BitString>* out, std::uint64_t& count) {
  const std::size_t depth = assumed.size();
  if (count >= cap) return;
  if (depth == vars.size()) {
    ++count;
    if (out) out->push_back(project(model, vars));
    return;
  }
  const int v = vars[depth];
  for (int val = 0; val <= 1 && count < cap; ++val) {
    assumed.push_back(val ? v : -v);
    if ((model[static_cast<std::size_t>(v)] != 0) == (val != 0)) {
      branch(s, vars, assumed, model, cap, out, count);
    } else {
      const SatVerdict r = s.solve(assumed);
      if (r.sat()) branch(s, vars, assumed, *r.model, cap, out, count);
    }
    assumed.pop_back();
  }
}

std::uint64_t run_projection(const CnfFormula& formula, std::span<const int> vars, Oracle& oracle,
                             std::uint64_t cap, std::vector<BitString>* out) {
  if (vars.size() > 24) throw TooLarge("projected space exceeds 2^24");
  if (formula.is_false()) return 0;
  auto s = oracle.session(formula);
  const SatVerdict root = s->solve({});
  if (!root.sat()) return 0;
  std::vector<int> assumed;
  std::uint64_t count = 0;
  branch(*s, vars, assumed, *root.model, cap, out, count);
  return count;
}

}  // namespace

std::uint64_t count_models(const CnfFormula& formula, std::span<const int> vars, Oracle& oracle) {
  return run_projection(formula, vars, oracle, ~std::uint64_t{0}, nullptr);
}

std::vector<BitString> enumerate_projected(const CnfFormula& formula, std::span<const int> vars, Oracle& oracle,
                                           std::uint64_t cap) {
  std::vector<BitString> out;
  run_projection(formula, vars, oracle, cap, &out);
  return out;
}

std::vector<BitString> enumerate_blocking(const CnfFormula& formula, std::span<const int> vars, Oracle& oracle,
                                          std::uint64_t cap) {
  std::vector<BitString> out;
  if (formula.is_false()) return out;
  auto s = oracle.session(formula);
  while (out.size() < cap) {
    const SatVerdict r = s->solve({});
    if (!r.sat()) break;
    BitString w = project(*r.model, vars);
    Clause block;
    for (std::size_t i = 0; i < vars.size(); ++i) block.push_back(w[i] ? -vars[i] : vars[i]);
    out.push_back(std::move(w));
    if (block.empty()) break;
    s->add_clause(block);
  }
  return out;
}

}  // namespace redlab
