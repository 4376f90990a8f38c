#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "redlab/circuit.hpp"
#include "redlab/rng.hpp"

namespace redlab {

enum class QGateKind { H, S, T, X, Z, Cnot };

struct QGate {
  QGateKind kind;
  unsigned target = 0;
  unsigned control = 0;  // Cnot only
};

struct QCircuit {
  unsigned qubits = 0;
  std::vector<QGate> gates;
};

inline constexpr unsigned kMaxQubits = 12;

// One gate per line: "H 0", "S 2", "T 1", "X 0", "Z 3", "CNOT <control> <target>".
// Blank lines and '#' comments are ignored. The qubit count is one more than
// the largest index mentioned unless a "qubits <n>" line says otherwise.
QCircuit parse_qcircuit(std::istream& in);
QCircuit parse_qcircuit(const std::string& text);

// Basis-state index convention: qubit q is bit q (least significant = qubit 0)
// of the amplitude index. Input bit i of x prepares qubit i.
using Statevector = std::vector<std::complex<double>>;
Statevector simulate(const QCircuit& circuit, const BitString& x);
void apply_gate(Statevector& state, const QGate& gate);

// <x| U^dagger Z_0 U |x> where Z_0 acts on qubit 0, the first input bit.
double expval_z1(const QCircuit& circuit, const BitString& x);

enum class TargetKind { Quantum, Classical };

inline constexpr double kPromiseMargin = 1.0 / 3.0;
inline constexpr double kPromiseGuard = 1e-9;

// Total deterministic f: {0,1}^n -> {0,1}. Inputs are addressed by their
// big-endian integer value (BitString::to_uint).
class TargetFunction {
 public:
  // Classical target given by a one-output circuit.
  static TargetFunction from_circuit(Circuit circuit);
  // Classical target given by its truth table (index = big-endian x).
  static TargetFunction from_table(std::size_t n, std::vector<std::uint8_t> table);

  TargetKind kind() const { return kind_; }
  std::size_t n() const { return n_; }
  bool operator()(const BitString& x) const;
  bool value(std::uint64_t x) const;

  const std::optional<Circuit>& circuit_form() const { return circuit_; }

  // Promise problem view. Without a promise every input is in it and the yes
  // set is f^-1(1).
  bool has_promise() const { return !expval_.empty(); }
  bool in_promise(std::uint64_t x) const;
  bool in_yes(std::uint64_t x) const;
  double expval(std::uint64_t x) const;

  // Cached for n <= 20.
  const std::vector<std::uint8_t>& truth_table() const;

 private:
  friend TargetFunction make_quantum_target(const QCircuit& circuit, std::size_t n);
  TargetKind kind_ = TargetKind::Classical;
  std::size_t n_ = 0;
  std::optional<Circuit> circuit_;
  std::shared_ptr<const std::vector<std::uint8_t>> table_;
  std::vector<double> expval_;
};

// f(x) = 1 iff expval <= -1/3 (acceptance probability >= 2/3); promise
// membership iff |expval| >= 1/3, with a 1e-9 guard band. f = 0 outside the
// promise.
TargetFunction make_quantum_target(const QCircuit& circuit, std::size_t n);

// A register of n wires initialised to x and updated ~3n times by
// reg[i] ^= g(reg[j], reg[k]) with g in {AND, OR}; f(x) = reg[0]. Every update
// is invertible, so the whole map is a permutation of {0,1}^n and f is
// exactly balanced.
TargetFunction make_classical_standin(std::uint64_t seed, std::size_t n);

enum class DistributionKind { Uniform, PromiseUniform };

class InputDistribution {
 public:
  static InputDistribution uniform(std::size_t n);
  // Uniform over the promise set of `f` (all inputs if f has no promise).
  static InputDistribution promise_uniform(const TargetFunction& f);
  // Uniform over an explicit support set (kind PromiseUniform).
  static InputDistribution over(std::size_t n, std::vector<std::uint64_t> support);

  DistributionKind kind() const { return kind_; }
  std::size_t n() const { return n_; }
  BitString sample(Rng& rng) const;
  // Support in ascending order; n <= 24.
  std::vector<std::uint64_t> support() const;
  std::uint64_t support_size() const;
  bool contains(std::uint64_t x) const;

 private:
  DistributionKind kind_ = DistributionKind::Uniform;
  std::size_t n_ = 0;
  std::shared_ptr<const std::vector<std::uint64_t>> members_;  // PromiseUniform only
};

}  // namespace redlab
