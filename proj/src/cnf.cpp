#include "redlab/cnf.hpp"

#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

#include "redlab/error.hpp"

namespace redlab {

CnfFormula CnfFormula::make_false() {
  CnfFormula f;
  f.clauses.push_back({});
  return f;
}

bool CnfFormula::is_false() const {
  for (const auto& c : clauses) {
    if (c.empty()) return true;
  }
  return false;
}

void CnfFormula::add_clause(Clause c) {
  for (int lit : c) {
    if (lit == 0 || std::abs(lit) > variable_count) throw InvalidAssignment("clause literal out of range");
  }
  clauses.push_back(std::move(c));
}

CnfFormula to_cnf(const Circuit& circuit, const OutputPins& pins) {
  if (pins.size() > circuit.output_width()) throw InvalidAssignment("more pins than outputs");
  CnfFormula f;
  f.variable_count = static_cast<int>(circuit.input_width());
  for (const auto& g : circuit.groups()) {
    auto& vars = f.input_var_map[g.name];
    for (std::size_t i = 0; i < g.width; ++i) vars.push_back(static_cast<int>(g.offset + i) + 1);
  }

  const auto& gates = circuit.gates();
  std::vector<int> var(gates.size());
  for (std::size_t i = 0; i < gates.size(); ++i) {
    const Gate& g = gates[i];
    if (g.kind == GateKind::Input) {
      var[i] = static_cast<int>(g.a) + 1;
      continue;
    }
    const int z = f.new_var();
    var[i] = z;
    const int a = var[g.a];
    const int b = (g.kind == GateKind::And || g.kind == GateKind::Or || g.kind == GateKind::Xor) ? var[g.b] : 0;
    switch (g.kind) {
      case GateKind::Const:
        f.clauses.push_back({g.a ? z : -z});
        break;
      case GateKind::Not:
        f.clauses.push_back({-z, -a});
        f.clauses.push_back({z, a});
        break;
      case GateKind::And:
        f.clauses.push_back({-z, a});
        f.clauses.push_back({-z, b});
        f.clauses.push_back({z, -a, -b});
        break;
      case GateKind::Or:
        f.clauses.push_back({z, -a});
        f.clauses.push_back({z, -b});
        f.clauses.push_back({-z, a, b});
        break;
      case GateKind::Xor:
        f.clauses.push_back({-z, a, b});
        f.clauses.push_back({-z, -a, -b});
        f.clauses.push_back({z, -a, b});
        f.clauses.push_back({z, a, -b});
        break;
      case GateKind::Input:
        break;
    }
  }
  for (Wire w : circuit.outputs()) f.output_vars.push_back(var[w]);
  for (std::size_t i = 0; i < pins.size(); ++i) {
    if (pins[i]) f.clauses.push_back({*pins[i] ? f.output_vars[i] : -f.output_vars[i]});
  }
  return f;
}

OutputPins pin_prefix(const BitString& values, std::size_t total_outputs) {
  if (values.width() > total_outputs) throw InvalidAssignment("pin_prefix: too many values");
  OutputPins pins(total_outputs);
  for (std::size_t i = 0; i < values.width(); ++i) pins[i] = values[i];
  return pins;
}

void add_xor_constraint(CnfFormula& f, std::span<const int> vars, bool rhs, int guard) {
  if (vars.empty()) {
    if (!rhs) return;
    if (guard) {
      f.add_clause({-guard});
    } else {
      f.clauses.push_back({});
    }
    return;
  }
  int acc = vars[0];
  for (std::size_t i = 1; i < vars.size(); ++i) {
    const int z = f.new_var();
    const int b = vars[i];
    f.clauses.push_back({-z, acc, b});
    f.clauses.push_back({-z, -acc, -b});
    f.clauses.push_back({z, -acc, b});
    f.clauses.push_back({z, acc, -b});
    acc = z;
  }
  const int lit = rhs ? acc : -acc;
  if (guard) {
    f.add_clause({-guard, lit});
  } else {
    f.add_clause({lit});
  }
}

void write_dimacs(std::ostream& out, const CnfFormula& f) {
  out << "p cnf " << f.variable_count << ' ' << f.clauses.size() << '\n';
  for (const auto& c : f.clauses) {
    for (int lit : c) out << lit << ' ';
    out << "0\n";
  }
}

std::string to_dimacs(const CnfFormula& f) {
  std::ostringstream os;
  write_dimacs(os, f);
  return os.str();
}

CnfFormula parse_dimacs(std::istream& in) {
  CnfFormula f;
  std::string line;
  bool header = false;
  std::size_t declared = 0;
  Clause current;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    if (tok == "c" || tok[0] == 'c' || tok[0] == '%') continue;
    if (tok == "p") {
      std::string fmt;
      long vars = -1;
      long ncl = -1;
      if (!(ls >> fmt >> vars >> ncl) || fmt != "cnf" || vars < 0 || ncl < 0) {
        throw ParseError("line " + std::to_string(line_no) + ": malformed DIMACS header");
      }
      f.variable_count = static_cast<int>(vars);
      declared = static_cast<std::size_t>(ncl);
      header = true;
      continue;
    }
    if (!header) throw ParseError("line " + std::to_string(line_no) + ": clause before header");
    ls.clear();
    ls.str(line);
    long lit;
    while (ls >> lit) {
      if (lit == 0) {
        f.clauses.push_back(std::move(current));
        current.clear();
        continue;
      }
      if (std::labs(lit) > f.variable_count) {
        throw ParseError("line " + std::to_string(line_no) + ": literal exceeds variable count");
      }
      current.push_back(static_cast<int>(lit));
    }
    if (!ls.eof()) throw ParseError("line " + std::to_string(line_no) + ": bad literal");
  }
  if (!header) throw ParseError("missing DIMACS header");
  if (!current.empty()) f.clauses.push_back(std::move(current));
  if (f.clauses.size() != declared) throw ParseError("clause count does not match header");
  return f;
}

bool satisfies(const CnfFormula& f, std::span<const std::uint8_t> model) {
  for (const auto& c : f.clauses) {
    bool sat = false;
    for (int lit : c) {
      const auto v = static_cast<std::size_t>(std::abs(lit));
      if (v >= model.size()) return false;
      if ((model[v] != 0) == (lit > 0)) {
        sat = true;
        break;
      }
    }
    if (!sat) return false;
  }
  return true;
}

}  // namespace redlab
