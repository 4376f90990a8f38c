#include "redlab/circuit.hpp"

#include <algorithm>

#include "redlab/error.hpp"

namespace redlab {

const InputGroup& Circuit::group(std::string_view name) const {
  for (const auto& g : groups_) {
    if (g.name == name) return g;
  }
  throw InvalidAssignment("unknown input group '" + std::string(name) + "'");
}

bool Circuit::has_group(std::string_view name) const {
  return std::any_of(groups_.begin(), groups_.end(), [&](const InputGroup& g) { return g.name == name; });
}

BitString Circuit::eval_flat(std::span<const std::uint8_t> inputs) const {
  if (inputs.size() != input_wires_.size()) throw InvalidAssignment("flat input width mismatch");
  std::vector<std::uint8_t> v(gates_.size());
  for (std::size_t i = 0; i < gates_.size(); ++i) {
    const Gate& g = gates_[i];
    switch (g.kind) {
      case GateKind::Input: v[i] = inputs[g.a] & 1u; break;
      case GateKind::Const: v[i] = static_cast<std::uint8_t>(g.a); break;
      case GateKind::Not: v[i] = v[g.a] ^ 1u; break;
      case GateKind::And: v[i] = v[g.a] & v[g.b]; break;
      case GateKind::Or: v[i] = v[g.a] | v[g.b]; break;
      case GateKind::Xor: v[i] = v[g.a] ^ v[g.b]; break;
    }
  }
  std::vector<std::uint8_t> out(outputs_.size());
  for (std::size_t i = 0; i < outputs_.size(); ++i) out[i] = v[outputs_[i]];
  return BitString(std::move(out));
}

std::vector<std::uint64_t> Circuit::eval_words(std::span<const std::uint64_t> inputs) const {
  if (inputs.size() != input_wires_.size()) throw InvalidAssignment("flat input width mismatch");
  std::vector<std::uint64_t> v(gates_.size());
  for (std::size_t i = 0; i < gates_.size(); ++i) {
    const Gate& g = gates_[i];
    switch (g.kind) {
      case GateKind::Input: v[i] = inputs[g.a]; break;
      case GateKind::Const: v[i] = g.a ? ~std::uint64_t{0} : 0; break;
      case GateKind::Not: v[i] = ~v[g.a]; break;
      case GateKind::And: v[i] = v[g.a] & v[g.b]; break;
      case GateKind::Or: v[i] = v[g.a] | v[g.b]; break;
      case GateKind::Xor: v[i] = v[g.a] ^ v[g.b]; break;
    }
  }
  std::vector<std::uint64_t> out(outputs_.size());
  for (std::size_t i = 0; i < outputs_.size(); ++i) out[i] = v[outputs_[i]];
  return out;
}

std::vector<Wire> CircuitBuilder::add_input(std::string name, std::size_t width) {
  if (width == 0) throw InvalidAssignment("input group '" + name + "' has zero width");
  if (c_.has_group(name)) throw InvalidAssignment("duplicate input group '" + name + "'");
  InputGroup g{std::move(name), width, c_.input_wires_.size()};
  std::vector<Wire> wires;
  for (std::size_t i = 0; i < width; ++i) {
    Wire w = push({GateKind::Input, static_cast<std::uint32_t>(c_.input_wires_.size()), 0});
    c_.input_wires_.push_back(w);
    wires.push_back(w);
  }
  c_.groups_.push_back(std::move(g));
  return wires;
}

Wire CircuitBuilder::push(Gate g) {
  c_.gates_.push_back(g);
  return static_cast<Wire>(c_.gates_.size() - 1);
}

void CircuitBuilder::check(Wire w) const {
  if (w >= c_.gates_.size()) throw InvalidAssignment("gate references a wire that does not exist yet");
}

Wire CircuitBuilder::constant(bool value) { return push({GateKind::Const, value ? 1u : 0u, 0}); }

Wire CircuitBuilder::not_(Wire a) {
  check(a);
  return push({GateKind::Not, a, 0});
}

Wire CircuitBuilder::and_(Wire a, Wire b) {
  check(a);
  check(b);
  return push({GateKind::And, a, b});
}

Wire CircuitBuilder::or_(Wire a, Wire b) {
  check(a);
  check(b);
  return push({GateKind::Or, a, b});
}

Wire CircuitBuilder::xor_(Wire a, Wire b) {
  check(a);
  check(b);
  return push({GateKind::Xor, a, b});
}

Wire CircuitBuilder::mux(Wire sel, Wire if_true, Wire if_false) {
  return or_(and_(sel, if_true), and_(not_(sel), if_false));
}

Wire CircuitBuilder::and_all(std::span<const Wire> ws) {
  if (ws.empty()) return constant(true);
  Wire acc = ws[0];
  for (std::size_t i = 1; i < ws.size(); ++i) acc = and_(acc, ws[i]);
  return acc;
}

Wire CircuitBuilder::or_all(std::span<const Wire> ws) {
  if (ws.empty()) return constant(false);
  Wire acc = ws[0];
  for (std::size_t i = 1; i < ws.size(); ++i) acc = or_(acc, ws[i]);
  return acc;
}

Wire CircuitBuilder::xor_all(std::span<const Wire> ws) {
  if (ws.empty()) return constant(false);
  Wire acc = ws[0];
  for (std::size_t i = 1; i < ws.size(); ++i) acc = xor_(acc, ws[i]);
  return acc;
}

Wire CircuitBuilder::equal(std::span<const Wire> a, std::span<const Wire> b) {
  if (a.size() != b.size()) throw InvalidAssignment("equal: width mismatch");
  std::vector<Wire> eq;
  for (std::size_t i = 0; i < a.size(); ++i) eq.push_back(xnor(a[i], b[i]));
  return and_all(eq);
}

Wire CircuitBuilder::equal_const(std::span<const Wire> a, const BitString& value) {
  if (a.size() != value.width()) throw InvalidAssignment("equal_const: width mismatch");
  std::vector<Wire> eq;
  for (std::size_t i = 0; i < a.size(); ++i) eq.push_back(value[i] ? a[i] : not_(a[i]));
  return and_all(eq);
}

Wire CircuitBuilder::less_than_const(std::span<const Wire> a, std::uint64_t c) {
  const std::size_t w = a.size();
  if (w < 64 && c >= (std::uint64_t{1} << w)) return constant(true);
  if (c == 0) return constant(false);
  // Scan from the most significant bit: a < c iff at the first differing bit
  // c has 1 and a has 0.
  Wire lt = constant(false);
  Wire prefix_eq = constant(true);
  for (std::size_t i = 0; i < w; ++i) {
    const bool cbit = uint_bit(c, w, i);
    if (cbit) {
      lt = or_(lt, and_(prefix_eq, not_(a[i])));
      prefix_eq = and_(prefix_eq, a[i]);
    } else {
      prefix_eq = and_(prefix_eq, not_(a[i]));
    }
  }
  return lt;
}

std::vector<Wire> CircuitBuilder::popcount(std::span<const Wire> ws) {
  if (ws.empty()) return {constant(false)};
  // Fold in one bit at a time with a ripple incrementer.
  std::vector<Wire> acc{ws[0]};
  for (std::size_t i = 1; i < ws.size(); ++i) {
    Wire carry = ws[i];
    std::vector<Wire> next;
    for (Wire bit : acc) {
      next.push_back(xor_(bit, carry));
      carry = and_(bit, carry);
    }
    // Width grows only when the count can exceed the current range.
    if ((std::size_t{1} << acc.size()) <= i + 1) next.push_back(carry);
    acc = std::move(next);
  }
  return acc;
}

Wire CircuitBuilder::greater(std::span<const Wire> a, std::span<const Wire> b) {
  const std::size_t w = std::max(a.size(), b.size());
  Wire zero = constant(false);
  auto at = [&](std::span<const Wire> v, std::size_t i) { return i < v.size() ? v[i] : zero; };
  Wire gt = zero;
  Wire eq = constant(true);
  for (std::size_t k = w; k-- > 0;) {
    Wire ai = at(a, k);
    Wire bi = at(b, k);
    gt = or_(gt, and_(eq, and_(ai, not_(bi))));
    eq = and_(eq, xnor(ai, bi));
  }
  return gt;
}

std::vector<Wire> CircuitBuilder::inline_circuit(
    const Circuit& c, const std::map<std::string, std::vector<Wire>, std::less<>>& bindings) {
  std::vector<Wire> flat(c.input_width());
  for (const auto& g : c.groups()) {
    auto it = bindings.find(g.name);
    if (it == bindings.end()) throw InvalidAssignment("inline: group '" + g.name + "' not bound");
    if (it->second.size() != g.width) throw InvalidAssignment("inline: width mismatch for '" + g.name + "'");
    for (std::size_t i = 0; i < g.width; ++i) {
      check(it->second[i]);
      flat[g.offset + i] = it->second[i];
    }
  }
  std::vector<Wire> map(c.gates().size());
  for (std::size_t i = 0; i < c.gates().size(); ++i) {
    const Gate& g = c.gates()[i];
    switch (g.kind) {
      case GateKind::Input: map[i] = flat[g.a]; break;
      case GateKind::Const: map[i] = constant(g.a != 0); break;
      case GateKind::Not: map[i] = not_(map[g.a]); break;
      case GateKind::And: map[i] = and_(map[g.a], map[g.b]); break;
      case GateKind::Or: map[i] = or_(map[g.a], map[g.b]); break;
      case GateKind::Xor: map[i] = xor_(map[g.a], map[g.b]); break;
    }
  }
  std::vector<Wire> outs;
  for (Wire w : c.outputs()) outs.push_back(map[w]);
  return outs;
}

void CircuitBuilder::add_output(Wire w) {
  check(w);
  c_.outputs_.push_back(w);
}

void CircuitBuilder::add_outputs(std::span<const Wire> ws) {
  for (Wire w : ws) add_output(w);
}

Circuit CircuitBuilder::build() && {
  if (c_.outputs_.empty()) throw InvalidAssignment("circuit has no outputs");
  return std::move(c_);
}

BitString eval(const Circuit& circuit, const InputAssignment& assignment) {
  std::vector<std::uint8_t> flat(circuit.input_width());
  std::size_t bound = 0;
  for (const auto& g : circuit.groups()) {
    auto it = assignment.find(g.name);
    if (it == assignment.end()) throw InvalidAssignment("missing assignment for group '" + g.name + "'");
    if (it->second.width() != g.width) {
      throw InvalidAssignment("group '" + g.name + "' expects " + std::to_string(g.width) + " bits, got " +
                              std::to_string(it->second.width()));
    }
    for (std::size_t i = 0; i < g.width; ++i) flat[g.offset + i] = it->second[i];
    ++bound;
  }
  if (bound != assignment.size()) throw InvalidAssignment("assignment names a group the circuit does not have");
  return circuit.eval_flat(flat);
}

Circuit fix_inputs(const Circuit& circuit, std::string_view group, const BitString& value) {
  const InputGroup& fixed = circuit.group(group);
  if (value.width() > fixed.width) throw InvalidAssignment("fix_inputs: value wider than group");

  CircuitBuilder b;
  std::map<std::string, std::vector<Wire>, std::less<>> bindings;
  for (const auto& g : circuit.groups()) {
    if (g.name != group) {
      bindings[g.name] = b.add_input(g.name, g.width);
      continue;
    }
    std::vector<Wire> ws;
    for (std::size_t i = 0; i < value.width(); ++i) ws.push_back(b.constant(value[i]));
    if (value.width() < g.width) {
      auto rest = b.add_input(g.name, g.width - value.width());
      ws.insert(ws.end(), rest.begin(), rest.end());
    }
    bindings[g.name] = std::move(ws);
  }
  b.add_outputs(b.inline_circuit(circuit, bindings));
  return std::move(b).build();
}

void sweep_inputs(const Circuit& circuit,
                  const std::function<void(std::uint64_t, std::span<const std::uint64_t>, unsigned)>& visit) {
  const std::size_t n = circuit.input_width();
  if (n > 40) throw TooLarge("input sweep over 2^" + std::to_string(n) + " points");
  static constexpr std::uint64_t kLanePattern[6] = {0xAAAAAAAAAAAAAAAAULL, 0xCCCCCCCCCCCCCCCCULL,
                                                    0xF0F0F0F0F0F0F0F0ULL, 0xFF00FF00FF00FF00ULL,
                                                    0xFFFF0000FFFF0000ULL, 0xFFFFFFFF00000000ULL};
  const std::uint64_t total = std::uint64_t{1} << n;
  std::vector<std::uint64_t> in(n);
  for (std::uint64_t base = 0; base < total; base += 64) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t pos = n - 1 - i;
      in[i] = pos < 6 ? kLanePattern[pos] : (((base >> pos) & 1u) ? ~std::uint64_t{0} : 0);
    }
    const auto out = circuit.eval_words(in);
    visit(base, out, static_cast<unsigned>(std::min<std::uint64_t>(64, total - base)));
  }
}

}  // namespace redlab
