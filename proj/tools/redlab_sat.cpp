// Standalone DIMACS solver over the builtin CDCL engine, speaking the
// SAT-competition output format. Usable as an external backend:
//   REDLAB_SAT_SOLVER=/path/to/redlab-sat

#include <fstream>
#include <iostream>

#include "redlab/cnf.hpp"
#include "redlab/error.hpp"
#include "redlab/sat_solver.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: redlab-sat <file.cnf>\n";
    return 1;
  }
  std::ifstream in(argv[1]);
  if (!in) {
    std::cerr << "redlab-sat: cannot open " << argv[1] << "\n";
    return 1;
  }
  redlab::CnfFormula f;
  try {
    f = redlab::parse_dimacs(in);
  } catch (const redlab::Error& e) {
    std::cerr << "redlab-sat: " << e.what() << "\n";
    return 1;
  }
  redlab::CdclSolver solver(f);
  solver.ensure_vars(f.variable_count);
  if (solver.solve() == redlab::CdclSolver::Result::Unsat) {
    std::cout << "s UNSATISFIABLE\n";
    return 20;
  }
  std::cout << "s SATISFIABLE\nv";
  for (int v = 1; v <= f.variable_count; ++v) std::cout << ' ' << (solver.model_value(v) ? v : -v);
  std::cout << " 0\n";
  return 10;
}
