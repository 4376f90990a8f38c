#include "redlab/targets.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <sstream>

#include "redlab/error.hpp"

namespace redlab {

namespace {

void check_qubits(unsigned q) {
  if (q > kMaxQubits) {
    throw TooManyQubits(std::to_string(q) + " qubits requested, at most " + std::to_string(kMaxQubits) + " supported");
  }
}

}  // namespace

QCircuit parse_qcircuit(std::istream& in) {
  QCircuit c;
  std::optional<unsigned> declared;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string op;
    if (!(ls >> op)) continue;
    auto fail = [&](const std::string& what) {
      return ParseError("quantum circuit line " + std::to_string(lineno) + ": " + what);
    };
    long a = -1, b = -1;
    if (op == "qubits") {
      if (!(ls >> a) || a < 0) throw fail("expected a qubit count");
      declared = static_cast<unsigned>(a);
      continue;
    }
    QGate g{};
    if (op == "H") g.kind = QGateKind::H;
    else if (op == "S") g.kind = QGateKind::S;
    else if (op == "T") g.kind = QGateKind::T;
    else if (op == "X") g.kind = QGateKind::X;
    else if (op == "Z") g.kind = QGateKind::Z;
    else if (op == "CNOT") g.kind = QGateKind::Cnot;
    else throw fail("unknown gate '" + op + "'");
    if (!(ls >> a) || a < 0) throw fail("missing qubit index");
    if (g.kind == QGateKind::Cnot) {
      if (!(ls >> b) || b < 0) throw fail("CNOT needs control and target");
      if (a == b) throw fail("CNOT control equals target");
      g.control = static_cast<unsigned>(a);
      g.target = static_cast<unsigned>(b);
    } else {
      g.target = static_cast<unsigned>(a);
    }
    std::string extra;
    if (ls >> extra) throw fail("trailing token '" + extra + "'");
    c.qubits = std::max({c.qubits, g.target + 1, g.kind == QGateKind::Cnot ? g.control + 1 : 0u});
    c.gates.push_back(g);
  }
  if (declared) {
    if (*declared < c.qubits) throw ParseError("declared qubit count is smaller than the largest index used");
    c.qubits = *declared;
  }
  return c;
}

QCircuit parse_qcircuit(const std::string& text) {
  std::istringstream in(text);
  return parse_qcircuit(in);
}

void apply_gate(Statevector& state, const QGate& gate) {
  using C = std::complex<double>;
  const std::size_t dim = state.size();
  const std::size_t t = std::size_t{1} << gate.target;
  if (t >= dim || (gate.kind == QGateKind::Cnot && (std::size_t{1} << gate.control) >= dim)) {
    throw InvalidAssignment("gate addresses a qubit outside the register");
  }
  switch (gate.kind) {
    case QGateKind::H: {
      const double s = 1.0 / std::sqrt(2.0);
      for (std::size_t i = 0; i < dim; ++i) {
        if (i & t) continue;
        const C a = state[i], b = state[i | t];
        state[i] = s * (a + b);
        state[i | t] = s * (a - b);
      }
      break;
    }
    case QGateKind::S:
    case QGateKind::T:
    case QGateKind::Z: {
      const C phase = gate.kind == QGateKind::Z   ? C(-1, 0)
                      : gate.kind == QGateKind::S ? C(0, 1)
                                                  : std::polar(1.0, M_PI / 4);
      for (std::size_t i = 0; i < dim; ++i) {
        if (i & t) state[i] *= phase;
      }
      break;
    }
    case QGateKind::X:
      for (std::size_t i = 0; i < dim; ++i) {
        if (!(i & t)) std::swap(state[i], state[i | t]);
      }
      break;
    case QGateKind::Cnot: {
      const std::size_t c = std::size_t{1} << gate.control;
      for (std::size_t i = 0; i < dim; ++i) {
        if ((i & c) && !(i & t)) std::swap(state[i], state[i | t]);
      }
      break;
    }
  }
}

Statevector simulate(const QCircuit& circuit, const BitString& x) {
  const unsigned q = std::max<unsigned>(circuit.qubits, static_cast<unsigned>(x.width()));
  check_qubits(q);
  std::size_t index = 0;
  for (std::size_t i = 0; i < x.width(); ++i) {
    if (x[i]) index |= std::size_t{1} << i;
  }
  Statevector state(std::size_t{1} << q);
  state[index] = 1.0;
  for (const auto& g : circuit.gates) apply_gate(state, g);
  return state;
}

double expval_z1(const QCircuit& circuit, const BitString& x) {
  const auto state = simulate(circuit, x);
  double e = 0;
  for (std::size_t i = 0; i < state.size(); ++i) e += (i & 1u ? -1.0 : 1.0) * std::norm(state[i]);
  return e;
}

TargetFunction TargetFunction::from_circuit(Circuit circuit) {
  if (circuit.output_width() != 1) throw InvalidAssignment("target circuit must have exactly one output");
  if (circuit.input_width() == 0 || circuit.input_width() > 32) {
    throw InvalidAssignment("target circuit input width must be in [1, 32]");
  }
  TargetFunction f;
  f.kind_ = TargetKind::Classical;
  f.n_ = circuit.input_width();
  if (f.n_ <= 20) {
    auto table = std::make_shared<std::vector<std::uint8_t>>(std::size_t{1} << f.n_);
    sweep_inputs(circuit, [&](std::uint64_t base, std::span<const std::uint64_t> out, unsigned lanes) {
      for (unsigned l = 0; l < lanes; ++l) (*table)[base + l] = (out[0] >> l) & 1u;
    });
    f.table_ = std::move(table);
  }
  f.circuit_ = std::move(circuit);
  return f;
}

TargetFunction TargetFunction::from_table(std::size_t n, std::vector<std::uint8_t> table) {
  if (n == 0 || n > 20 || table.size() != (std::size_t{1} << n)) {
    throw InvalidAssignment("truth table size does not match 2^n with 1 <= n <= 20");
  }
  for (auto& v : table) v = v != 0;
  TargetFunction f;
  f.n_ = n;
  f.table_ = std::make_shared<const std::vector<std::uint8_t>>(std::move(table));
  return f;
}

bool TargetFunction::value(std::uint64_t x) const {
  if (n_ < 64 && (x >> n_) != 0) throw InvalidAssignment("input outside {0,1}^n");
  if (table_) return (*table_)[x] != 0;
  return circuit_->eval_flat(BitString::from_uint(x, n_).bits())[0];
}

bool TargetFunction::operator()(const BitString& x) const {
  if (x.width() != n_) {
    throw InvalidAssignment("target expects " + std::to_string(n_) + " input bits, got " + std::to_string(x.width()));
  }
  return value(x.to_uint());
}

bool TargetFunction::in_promise(std::uint64_t x) const {
  if (expval_.empty()) return true;
  return std::abs(expval_.at(x)) >= kPromiseMargin + kPromiseGuard;
}

bool TargetFunction::in_yes(std::uint64_t x) const { return value(x); }

double TargetFunction::expval(std::uint64_t x) const {
  if (expval_.empty()) throw Unsupported("expval is defined only for quantum targets");
  return expval_.at(x);
}

const std::vector<std::uint8_t>& TargetFunction::truth_table() const {
  if (!table_) throw TooLarge("truth table cached only for n <= 20");
  return *table_;
}

TargetFunction make_quantum_target(const QCircuit& circuit, std::size_t n) {
  if (n == 0) throw InvalidAssignment("quantum target needs n >= 1");
  check_qubits(std::max<unsigned>(circuit.qubits, static_cast<unsigned>(std::min<std::size_t>(n, 64))));
  TargetFunction f;
  f.kind_ = TargetKind::Quantum;
  f.n_ = n;
  auto table = std::make_shared<std::vector<std::uint8_t>>(std::size_t{1} << n);
  f.expval_.resize(std::size_t{1} << n);
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x) {
    const double e = expval_z1(circuit, BitString::from_uint(x, n));
    f.expval_[x] = e;
    (*table)[x] = e <= -kPromiseMargin - kPromiseGuard;
  }
  f.table_ = std::move(table);
  return f;
}

TargetFunction make_classical_standin(std::uint64_t seed, std::size_t n) {
  if (n == 0 || n > 32) throw InvalidAssignment("classical stand-in needs 1 <= n <= 32");
  Rng rng(mix_seed(seed, 0x7a67));
  CircuitBuilder b;
  auto reg = b.add_input("x", n);
  if (n >= 2) {
    for (std::size_t step = 0; step < 3 * n; ++step) {
      // The last update always lands on the output wire.
      const std::size_t i = step + 1 == 3 * n ? 0 : uniform_below(rng, n);
      std::size_t j = uniform_below(rng, n - 1);
      if (j >= i) ++j;
      std::size_t k = uniform_below(rng, n - 1);
      if (k >= i) ++k;
      const Wire g = coin(rng) ? b.and_(reg[j], reg[k]) : b.or_(reg[j], reg[k]);
      reg[i] = b.xor_(reg[i], g);
    }
  }
  b.add_output(reg[0]);
  return TargetFunction::from_circuit(std::move(b).build());
}

InputDistribution InputDistribution::uniform(std::size_t n) {
  if (n == 0 || n > 63) throw InvalidAssignment("uniform distribution needs 1 <= n <= 63");
  InputDistribution d;
  d.n_ = n;
  return d;
}

InputDistribution InputDistribution::promise_uniform(const TargetFunction& f) {
  InputDistribution d;
  d.kind_ = DistributionKind::PromiseUniform;
  d.n_ = f.n();
  if (d.n_ > 24) throw TooLarge("promise support enumeration limited to n <= 24");
  auto members = std::make_shared<std::vector<std::uint64_t>>();
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << d.n_); ++x) {
    if (f.in_promise(x)) members->push_back(x);
  }
  if (members->empty()) throw InvalidAssignment("promise set is empty");
  d.members_ = std::move(members);
  return d;
}

InputDistribution InputDistribution::over(std::size_t n, std::vector<std::uint64_t> support) {
  if (n == 0 || n > 24) throw InvalidAssignment("explicit support needs 1 <= n <= 24");
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());
  if (support.empty()) throw InvalidAssignment("empty support");
  if ((support.back() >> n) != 0) throw InvalidAssignment("support element outside {0,1}^n");
  InputDistribution d;
  d.kind_ = DistributionKind::PromiseUniform;
  d.n_ = n;
  d.members_ = std::make_shared<const std::vector<std::uint64_t>>(std::move(support));
  return d;
}

BitString InputDistribution::sample(Rng& rng) const {
  if (kind_ == DistributionKind::Uniform) return BitString::from_uint(uniform_below(rng, std::uint64_t{1} << n_), n_);
  return BitString::from_uint((*members_)[uniform_below(rng, members_->size())], n_);
}

std::vector<std::uint64_t> InputDistribution::support() const {
  if (members_) return *members_;
  if (n_ > 24) throw TooLarge("support enumeration limited to n <= 24");
  std::vector<std::uint64_t> s(std::size_t{1} << n_);
  for (std::uint64_t x = 0; x < s.size(); ++x) s[x] = x;
  return s;
}

std::uint64_t InputDistribution::support_size() const {
  return members_ ? members_->size() : std::uint64_t{1} << n_;
}

bool InputDistribution::contains(std::uint64_t x) const {
  if ((x >> n_) != 0) return false;
  if (!members_) return true;
  return std::binary_search(members_->begin(), members_->end(), x);
}

}  // namespace redlab
