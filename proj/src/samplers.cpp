#include "redlab/samplers.hpp"

#include <cmath>
#include <string>

#include "redlab/error.hpp"

namespace redlab {

std::pair<BitString, bool> Sampler::run(const BitString& r) const {
  const auto out = eval(program, {{"r", r}});
  return {out.slice(0, n), out[n]};
}

Sampler sampler_from_circuit(Circuit program, std::size_t n, double declared_epsilon) {
  if (program.groups().size() != 1 || program.groups()[0].name != "r") {
    throw InvalidAssignment("sampler program must have the single input group 'r'");
  }
  if (program.output_width() != n + 1) throw InvalidAssignment("sampler program must output n + 1 bits");
  Sampler s;
  s.n = n;
  s.scramble_width = program.group("r").width;
  s.declared_epsilon = declared_epsilon;
  s.program = std::move(program);
  return s;
}

Circuit feistel_scramble(std::size_t n, std::size_t rounds, std::uint64_t seed) {
  if (n < 2) throw InvalidAssignment("feistel_scramble needs n >= 2");
  Rng rng(mix_seed(seed, 0xfe15));
  CircuitBuilder b;
  auto w = b.add_input("in", n);
  const std::size_t h = n / 2;
  for (std::size_t round = 0; round < rounds; ++round) {
    const bool left = round % 2 == 0;
    const std::size_t lo = left ? 0 : h, hi = left ? h : n;  // half being updated
    const std::size_t src_lo = left ? h : 0, src_w = left ? n - h : h;
    const auto pick = [&] { return w[src_lo + uniform_below(rng, src_w)]; };
    std::vector<Wire> next = w;
    for (std::size_t i = lo; i < hi; ++i) {
      const Wire a = pick(), bb = pick(), c = pick();
      next[i] = b.xor_(w[i], b.xor_(b.and_(a, bb), c));
    }
    w = std::move(next);
  }
  b.add_outputs(w);
  return std::move(b).build();
}

Circuit identity_scramble(std::size_t n) {
  CircuitBuilder b;
  b.add_outputs(b.add_input("in", n));
  return std::move(b).build();
}

bool is_bijective(const Circuit& scramble) {
  const std::size_t n = scramble.input_width();
  if (scramble.groups().size() != 1 || scramble.output_width() != n) return false;
  if (n > 24) throw TooLarge("bijectivity check limited to 24 bits");
  std::vector<std::uint8_t> seen(std::size_t{1} << n);
  bool ok = true;
  sweep_inputs(scramble, [&](std::uint64_t, std::span<const std::uint64_t> out, unsigned lanes) {
    for (unsigned l = 0; l < lanes && ok; ++l) {
      std::uint64_t v = 0;
      for (std::size_t j = 0; j < n; ++j) v = (v << 1) | ((out[j] >> l) & 1u);
      if (seen[v]) ok = false;
      seen[v] = 1;
    }
  });
  return ok;
}

namespace {

Sampler assemble(const TargetFunction& f, const Circuit& scramble, std::size_t aux, double eps, std::uint64_t seed) {
  if (!f.circuit_form()) throw Unsupported("sampler construction needs a classical target with a circuit form");
  const std::size_t n = f.n();
  if (scramble.groups().size() != 1 || scramble.input_width() != n || scramble.output_width() != n) {
    throw NotBijective("scramble must map n bits to n bits through a single input group");
  }
  if (n <= 20 && !is_bijective(scramble)) throw NotBijective("scramble circuit is not a permutation");
  CircuitBuilder b;
  const auto r = b.add_input("r", n + aux);
  const std::vector<Wire> rx(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(n));
  const auto x = b.inline_circuit(scramble, {{scramble.groups()[0].name, rx}});
  const auto& fc = *f.circuit_form();
  Wire y = b.inline_circuit(fc, {{fc.groups()[0].name, x}})[0];
  if (aux > 0) {
    Rng rng(mix_seed(seed, 0xa0c5));
    const auto threshold = static_cast<std::uint64_t>(std::floor(eps * std::ldexp(1.0, static_cast<int>(aux))));
    std::vector<Wire> word;
    for (std::size_t j = 0; j < aux; ++j) {
      std::vector<Wire> terms{r[n + j]};
      for (std::size_t i = 0; i < n; ++i) {
        if (coin(rng)) terms.push_back(r[i]);
      }
      word.push_back(b.xor_all(terms));
    }
    y = b.xor_(y, b.less_than_const(word, threshold));
  }
  auto out = x;
  out.push_back(y);
  b.add_outputs(out);
  Sampler s;
  s.program = std::move(b).build();
  s.n = n;
  s.scramble_width = n;
  s.aux_width = aux;
  s.declared_epsilon = eps;
  return s;
}

}  // namespace

Sampler build_exact_sampler(const TargetFunction& f, const Circuit& scramble) {
  return assemble(f, scramble, 0, 0, 0);
}

Sampler build_approx_sampler(const TargetFunction& f, const Circuit& scramble, double eps, std::uint64_t seed,
                             std::size_t aux_width) {
  if (!(eps >= 0 && eps <= 0.5)) throw InvalidAssignment("eps must lie in [0, 1/2]");
  if (eps == 0) return build_exact_sampler(f, scramble);
  if (aux_width == 0 || aux_width > 20) throw InvalidAssignment("aux_width must be in [1, 20]");
  return assemble(f, scramble, aux_width, eps, seed);
}

double realised_flip_probability(double eps, std::size_t aux_width) {
  const double scale = std::ldexp(1.0, static_cast<int>(aux_width));
  return std::floor(eps * scale) / scale;
}

double tv_distance_exact(const Sampler& s, const TargetFunction& f, const InputDistribution& dist) {
  const std::size_t n = s.n;
  if (f.n() != n || dist.n() != n) throw InvalidAssignment("tv_distance_exact: width mismatch");
  const std::size_t rw = s.program.input_width();
  if (rw > 24) throw TooLarge("random input of " + std::to_string(rw) + " bits exceeds 2^24 enumeration");
  std::vector<std::uint64_t> count(std::size_t{2} << n);
  sweep_inputs(s.program, [&](std::uint64_t, std::span<const std::uint64_t> out, unsigned lanes) {
    for (unsigned l = 0; l < lanes; ++l) {
      std::uint64_t v = 0;
      for (std::size_t j = 0; j <= n; ++j) v = (v << 1) | ((out[j] >> l) & 1u);
      ++count[v];
    }
  });
  const double total = std::ldexp(1.0, static_cast<int>(rw));
  const double qmass = 1.0 / static_cast<double>(dist.support_size());
  double tv = 0;
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x) {
    const bool fx = f.value(x);
    const bool in = dist.contains(x);
    for (int y = 0; y <= 1; ++y) {
      const double p = static_cast<double>(count[(x << 1) | static_cast<std::uint64_t>(y)]) / total;
      const double q = in && (y != 0) == fx ? qmass : 0.0;
      tv += std::abs(p - q);
    }
  }
  return tv / 2;
}

}  // namespace redlab
