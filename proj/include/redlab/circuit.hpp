#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "redlab/bitstring.hpp"

namespace redlab {

enum class GateKind : std::uint8_t { Input, Const, Not, And, Or, Xor };

using Wire = std::uint32_t;

struct Gate {
  GateKind kind;
  // Input: a = flat input bit. Const: a = value. Not: a. And/Or/Xor: a, b.
  std::uint32_t a = 0;
  std::uint32_t b = 0;
};

struct InputGroup {
  std::string name;
  std::size_t width = 0;
  std::size_t offset = 0;  // position in the flat input vector
};

using InputAssignment = std::map<std::string, BitString, std::less<>>;

// Immutable acyclic circuit. Wires are gate indices; every gate refers only to
// earlier wires, so the gate list is already in topological order.
class Circuit {
 public:
  const std::vector<InputGroup>& groups() const { return groups_; }
  const std::vector<Gate>& gates() const { return gates_; }
  const std::vector<Wire>& outputs() const { return outputs_; }
  const std::vector<Wire>& input_wires() const { return input_wires_; }

  std::size_t input_width() const { return input_wires_.size(); }
  std::size_t output_width() const { return outputs_.size(); }
  const InputGroup& group(std::string_view name) const;
  bool has_group(std::string_view name) const;

  // Flat input: groups concatenated in declaration order.
  BitString eval_flat(std::span<const std::uint8_t> inputs) const;
  // 64 evaluations at once; word i carries input bit i across lanes.
  std::vector<std::uint64_t> eval_words(std::span<const std::uint64_t> inputs) const;

 private:
  friend class CircuitBuilder;
  std::vector<InputGroup> groups_;
  std::vector<Gate> gates_;
  std::vector<Wire> outputs_;
  std::vector<Wire> input_wires_;
};

// Builds circuits over the fixed basis. Derived gates (mux, comparators,
// adders) are lowered immediately.
class CircuitBuilder {
 public:
  std::vector<Wire> add_input(std::string name, std::size_t width);

  Wire constant(bool value);
  Wire not_(Wire a);
  Wire and_(Wire a, Wire b);
  Wire or_(Wire a, Wire b);
  Wire xor_(Wire a, Wire b);

  Wire xnor(Wire a, Wire b) { return not_(xor_(a, b)); }
  Wire mux(Wire sel, Wire if_true, Wire if_false);
  Wire and_all(std::span<const Wire> ws);
  Wire or_all(std::span<const Wire> ws);
  Wire xor_all(std::span<const Wire> ws);
  Wire equal(std::span<const Wire> a, std::span<const Wire> b);
  Wire equal_const(std::span<const Wire> a, const BitString& value);
  // Big-endian unsigned comparison against a constant: value(a) < c.
  Wire less_than_const(std::span<const Wire> a, std::uint64_t c);
  // Little-endian popcount of ws.
  std::vector<Wire> popcount(std::span<const Wire> ws);
  // Little-endian unsigned a > b (widths may differ).
  Wire greater(std::span<const Wire> a, std::span<const Wire> b);

  // Splices `c` in, binding each of its input groups to the given wires.
  std::vector<Wire> inline_circuit(const Circuit& c,
                                   const std::map<std::string, std::vector<Wire>, std::less<>>& bindings);

  void add_output(Wire w);
  void add_outputs(std::span<const Wire> ws);

  std::size_t gate_count() const { return c_.gates_.size(); }
  Circuit build() &&;

 private:
  Wire push(Gate g);
  void check(Wire w) const;
  Circuit c_;
};

BitString eval(const Circuit& circuit, const InputAssignment& assignment);

// Evaluates every flat input in [0, 2^input_width) in ascending big-endian
// order, 64 at a time. `visit(base, outputs, lanes)` sees input base + l in
// lane l < lanes; outputs[j] carries output j across lanes.
void sweep_inputs(const Circuit& circuit,
                  const std::function<void(std::uint64_t, std::span<const std::uint64_t>, unsigned)>& visit);

// Fixes the first |value| bits of `group` to constants. A fully fixed group
// disappears; a partially fixed one keeps its name with the remaining width.
Circuit fix_inputs(const Circuit& circuit, std::string_view group, const BitString& value);

}  // namespace redlab
