#pragma once

// Shared test fixtures: a random circuit description with its own
// straight-line interpreter, independent of Circuit::eval_flat.

#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "redlab/bitstring.hpp"
#include "redlab/circuit.hpp"
#include "redlab/rng.hpp"

namespace redlab::testing {

struct RandomCircuit {
  struct Op {
    int kind;  // 0 const, 1 not, 2 and, 3 or, 4 xor
    int a;
    int b;
  };
  std::vector<std::size_t> group_widths;
  std::vector<Op> ops;       // node id = inputs + op index
  std::vector<int> outputs;  // node ids

  std::size_t inputs() const {
    std::size_t n = 0;
    for (auto w : group_widths) n += w;
    return n;
  }
};

inline RandomCircuit random_circuit(Rng& rng, std::vector<std::size_t> widths, std::size_t gates,
                                    std::size_t outputs) {
  RandomCircuit rc;
  rc.group_widths = std::move(widths);
  const auto n = static_cast<int>(rc.inputs());
  for (std::size_t g = 0; g < gates; ++g) {
    const int nodes = n + static_cast<int>(g);
    RandomCircuit::Op op{};
    const auto r = uniform_below(rng, 20);
    op.kind = r == 0 ? 0 : r < 4 ? 1 : 2 + static_cast<int>(uniform_below(rng, 3));
    // Bias operands towards recent nodes so outputs depend on many inputs.
    auto pick = [&]() {
      if (nodes > 8 && coin(rng)) return nodes - 1 - static_cast<int>(uniform_below(rng, 8));
      return static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(nodes)));
    };
    op.a = op.kind == 0 ? static_cast<int>(uniform_below(rng, 2)) : pick();
    op.b = op.kind >= 2 ? pick() : 0;
    rc.ops.push_back(op);
  }
  const int total = n + static_cast<int>(gates);
  for (std::size_t o = 0; o < outputs; ++o) {
    rc.outputs.push_back(total - 1 - static_cast<int>(uniform_below(rng, std::min<std::uint64_t>(6, total))));
  }
  return rc;
}

inline Circuit build(const RandomCircuit& rc) {
  CircuitBuilder b;
  std::vector<Wire> node;
  for (std::size_t g = 0; g < rc.group_widths.size(); ++g) {
    auto ws = b.add_input("g" + std::to_string(g), rc.group_widths[g]);
    node.insert(node.end(), ws.begin(), ws.end());
  }
  for (const auto& op : rc.ops) {
    switch (op.kind) {
      case 0: node.push_back(b.constant(op.a != 0)); break;
      case 1: node.push_back(b.not_(node[op.a])); break;
      case 2: node.push_back(b.and_(node[op.a], node[op.b])); break;
      case 3: node.push_back(b.or_(node[op.a], node[op.b])); break;
      default: node.push_back(b.xor_(node[op.a], node[op.b])); break;
    }
  }
  for (int o : rc.outputs) b.add_output(node[static_cast<std::size_t>(o)]);
  return std::move(b).build();
}

// Recursive evaluation straight from the description. Input bit i of the flat
// input word `x` is bit (width-1-i), matching BitString::from_uint.
inline BitString interpret(const RandomCircuit& rc, std::uint64_t x) {
  const auto n = static_cast<int>(rc.inputs());
  std::function<int(int)> node = [&](int id) -> int {
    if (id < n) return static_cast<int>((x >> (n - 1 - id)) & 1u);
    const auto& op = rc.ops[static_cast<std::size_t>(id - n)];
    switch (op.kind) {
      case 0: return op.a;
      case 1: return 1 - node(op.a);
      case 2: return node(op.a) && node(op.b);
      case 3: return node(op.a) || node(op.b);
      default: return node(op.a) != node(op.b);
    }
  };
  std::vector<std::uint8_t> out;
  for (int o : rc.outputs) out.push_back(static_cast<std::uint8_t>(node(o)));
  return BitString(std::move(out));
}

inline std::set<BitString> brute_force_preimage(const RandomCircuit& rc, const BitString& target) {
  std::set<BitString> out;
  const auto n = rc.inputs();
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x) {
    if (interpret(rc, x) == target) out.insert(BitString::from_uint(x, n));
  }
  return out;
}

}  // namespace redlab::testing
