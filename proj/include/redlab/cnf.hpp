#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "redlab/circuit.hpp"

namespace redlab {

using Clause = std::vector<int>;

// DIMACS-style CNF. Variables are 1-based; literal -v negates v.
struct CnfFormula {
  int variable_count = 0;
  std::vector<Clause> clauses;
  // Input group name -> variable per bit, in bit order.
  std::map<std::string, std::vector<int>, std::less<>> input_var_map;
  std::vector<int> output_vars;

  static CnfFormula make_false();
  bool is_false() const;

  int new_var() { return ++variable_count; }
  void add_clause(Clause c);
};

using OutputPins = std::vector<std::optional<bool>>;

// Tseitin image: one fresh variable per non-input gate, inputs numbered first
// in declaration order. `pins[i]` fixes output i when set.
CnfFormula to_cnf(const Circuit& circuit, const OutputPins& pins = {});

// Pins every listed output to the bits of `values`.
OutputPins pin_prefix(const BitString& values, std::size_t total_outputs);

// Adds XOR(vars) == rhs as a Tseitin chain. With `guard` != 0 the final
// parity constraint only binds when `guard` is true.
void add_xor_constraint(CnfFormula& f, std::span<const int> vars, bool rhs, int guard = 0);

std::string to_dimacs(const CnfFormula& f);
void write_dimacs(std::ostream& out, const CnfFormula& f);
CnfFormula parse_dimacs(std::istream& in);

// Every clause has a true literal under `model` (index v holds variable v).
bool satisfies(const CnfFormula& f, std::span<const std::uint8_t> model);

}  // namespace redlab
