// Acceptance checks. `acceptance --criterion N` runs one check and prints one
// line; without arguments every check runs. Exit status 0 iff all ran checks
// pass, each within its time limit.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "redlab/cnf.hpp"
#include "redlab/harness.hpp"
#include "redlab/oracle.hpp"
#include "support.hpp"

using namespace redlab;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  double limit_s;
  std::function<Verdict()> run;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

ExperimentConfig config(const std::string& experiment, std::vector<std::pair<std::string, std::string>> fields = {}) {
  ExperimentConfig c;
  c.experiment = experiment;
  c.solver = {};
  for (const auto& [k, v] : fields) set_field(c, k, v);
  return c;
}

// Straight-line evaluation of the description, node by node.
BitString run_description(const testing::RandomCircuit& rc, std::uint64_t x) {
  const auto n = rc.inputs();
  std::vector<int> val(n + rc.ops.size());
  for (std::size_t i = 0; i < n; ++i) val[i] = static_cast<int>((x >> (n - 1 - i)) & 1u);
  for (std::size_t g = 0; g < rc.ops.size(); ++g) {
    const auto& op = rc.ops[g];
    const int a = op.kind == 0 ? op.a : val[static_cast<std::size_t>(op.a)];
    const int b = op.kind >= 2 ? val[static_cast<std::size_t>(op.b)] : 0;
    int v = 0;
    switch (op.kind) {
      case 0: v = a; break;
      case 1: v = 1 - a; break;
      case 2: v = a & b; break;
      case 3: v = a | b; break;
      default: v = a ^ b; break;
    }
    val[n + g] = v;
  }
  std::vector<std::uint8_t> out;
  for (int o : rc.outputs) out.push_back(static_cast<std::uint8_t>(val[static_cast<std::size_t>(o)]));
  return BitString(std::move(out));
}

Verdict c1() {
  const auto r = run_experiment(config("verify-class", {{"class", "xor"}, {"n", "8"}}));
  const double f = r.metrics["min_fraction"].get<double>();
  return {f == 0.5, "min_fraction=" + num(f) + " over " + r.metrics["pairs"].dump() + " pairs (want exactly 0.5)"};
}

Verdict c2() {
  const auto r = run_experiment(config("verify-class", {{"class", "bit_index"}, {"n", "8"}, {"m", "8"}}));
  const double ratio = r.metrics["min_ratio"].get<double>();
  const auto violations = r.metrics["identity_violations"].get<std::uint64_t>();
  return {ratio >= 0.5 && violations == 0,
          "min E|f1-f2|/d=" + num(ratio) + " (want >= 0.5), identity (m/2^l)*d broken on " +
              std::to_string(violations) + " of " + r.metrics["pairs"].dump() + " pairs"};
}

Verdict c3() {
  const auto r = run_experiment(config("rs-props", {{"degree", "4"}, {"k", "2"}}));
  const auto& m = r.metrics;
  return {r.pass, "min symbol distance=" + m["min_symbol_distance"].dump() + " (want >= 5), min bit distance=" +
                      m["min_bit_distance"].dump() + " (want >= 8), rs_block min disagreement=" +
                      num(m["rs_block_min_fraction"].get<double>()) + " (want >= 1/3)"};
}

Verdict c4() {
  Rng rng(2024);
  Oracle oracle;
  std::size_t mismatched = 0, total_solutions = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + uniform_below(rng, 16);
    const std::size_t outputs = std::max<std::size_t>(1, n > 10 ? n - 10 : 1) + uniform_below(rng, 4);
    const auto rc = testing::random_circuit(rng, {n}, std::max<std::size_t>(4, 3 * n), outputs);
    const auto circuit = testing::build(rc);
    const auto target = run_description(rc, uniform_below(rng, std::uint64_t{1} << n));
    std::set<BitString> truth;
    for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x) {
      if (run_description(rc, x) == target) truth.insert(BitString::from_uint(x, n));
    }
    const auto f = to_cnf(circuit, pin_prefix(target, circuit.output_width()));
    const auto sols = enumerate_projected(f, f.input_var_map.at("g0"), oracle);
    const std::set<BitString> got(sols.begin(), sols.end());
    mismatched += got != truth || got.size() != sols.size();
    total_solutions += truth.size();
  }
  return {mismatched == 0, std::to_string(mismatched) + " of 500 circuits differ (" + std::to_string(total_solutions) +
                               " preimages compared)"};
}

Verdict c5() {
  const auto r = run_experiment(config("invert-exact-rg", {{"n", "10"}, {"seed", "7"}}));
  const auto dis = r.metrics["disagreements"].get<std::uint64_t>();
  const auto abst = r.metrics["abstained"].get<std::uint64_t>();
  return {dis == 0 && abst == 0, std::to_string(dis) + " disagreements, " + std::to_string(abst) +
                                     " abstentions over 1024 inputs, " + r.metrics["oracle"]["queries"].dump() +
                                     " oracle queries"};
}

Verdict c6() {
  const auto r = run_experiment(config("invert-approx-rg", {{"n", "8"}, {"eps", "0.05"}, {"votes", "9"}}));
  const double f = r.metrics["fraction_bad"].get<double>();
  return {f <= 0.30, "fraction of x with success < 2/3 = " + num(f) + " (want <= 6*eps = 0.3), exact prediction " +
                         num(r.metrics["predicted_fraction_bad"].get<double>())};
}

Verdict c7() {
  const auto r = run_experiment(config("witness-uniformity", {{"instances", "20"}, {"draws", "100000"}}));
  const auto& m = r.metrics;
  return {r.pass, "max TV=" + num(m["max_tv"].get<double>()) + " (want <= 0.1), mean TV=" +
                      num(m["mean_tv"].get<double>()) + ", min chi-square p=" + num(m["min_p_value"].get<double>()) +
                      ", largest |R_x|=" + m["max_support"].dump() + ", invalid samples " + m["invalid_samples"].dump()};
}

Verdict c8() {
  const auto r = run_experiment(config("ident-reduce", {{"n", "8"}, {"m", "8"}, {"eps_prime", "0.1"}}));
  const auto& m = r.metrics;
  const double bad = m["fraction_bad"].get<double>(), valid = m["validity_rate"].get<double>(),
               pred = m["predicted_validity"].get<double>();
  return {r.pass, "B=" + r.params["B"].dump() + " eps=" + num(r.params["eps"].get<double>()) + ": heuristic error " +
                      num(bad) + " (want <= 0.15), validity " + num(valid) + " vs 1-(1-eps)^B=" + num(pred) +
                      " (want within 0.05)"};
}

Verdict c9() {
  const auto r = run_experiment(config("advice-eval", {{"n", "8"}}));
  const double s = r.metrics["singleton"]["exact_fraction"].get<double>();
  const double b = r.metrics["bit_index"]["exact_fraction"].get<double>();
  return {s == 1.0 && b == 1.0, "exact on " + num(100 * s) + "% (singleton) and " + num(100 * b) + "% (bit_index)"};
}

Verdict c10() {
  const auto av = run_experiment(
      config("approx-verif", {{"n", "6"}, {"B", "6"}, {"beta", "6"}, {"samples", "10000"}}));
  const auto ma = run_experiment(config("m-alpha", {{"n", "6"}, {"B", "6"}, {"beta", "6"}}));
  const auto violations = av.metrics["violations"].get<std::uint64_t>();
  const auto accepted = av.metrics["accepted"].get<std::uint64_t>();
  const double bad = ma.metrics["fraction_bad"].get<double>();
  return {av.pass && ma.pass, std::to_string(violations) + " of " + std::to_string(accepted) +
                                  " accepted cases exceed the 1/beta budget; M^alpha bad fraction " + num(bad) +
                                  " (re-derived bound 5/(2beta)=" + num(ma.metrics["bound_rederived"].get<double>()) +
                                  ", stated 5/(6beta)=" + num(ma.metrics["bound_stated"].get<double>()) + ")"};
}

Verdict c11() {
  const std::vector<ExperimentConfig> runs = {
      config("verify-class", {{"class", "xor"}, {"n", "6"}}),
      config("verify-class", {{"class", "bit_index"}, {"n", "6"}, {"m", "5"}}),
      config("rs-props"),
      config("invert-exact-rg", {{"n", "8"}}),
      config("invert-approx-rg", {{"n", "6"}, {"trials", "5"}, {"aux", "8"}}),
      config("ident-reduce", {{"n", "6"}, {"m", "4"}, {"draws", "100"}}),
      config("advice-eval", {{"n", "6"}, {"m", "6"}}),
      config("approx-verif", {{"samples", "500"}}),
      config("m-alpha", {{"n", "4"}, {"m", "4"}, {"B", "4"}, {"beta", "4"}, {"trials", "20"}}),
      config("witness-uniformity", {{"instances", "2"}, {"draws", "2000"}, {"width", "10"}, {"min_support", "65"},
                                    {"max_support", "300"}}),
  };
  std::size_t differing = 0;
  std::string which;
  for (auto c : runs) {
    const auto a = run_experiment(c);
    const auto b = run_experiment(c);
    c.jobs = 2;
    const auto p = run_experiment(c);
    std::ostringstream ca, cb, cp;
    write_csv(ca, a.csv);
    write_csv(cb, b.csv);
    write_csv(cp, p.csv);
    const auto ja = to_json(a, false).dump(), jb = to_json(b, false).dump(), jp = to_json(p, false).dump();
    if (ja != jb || ja != jp || ca.str() != cb.str() || ca.str() != cp.str()) {
      ++differing;
      which += " " + c.experiment;
    }
  }
  return {differing == 0, std::to_string(differing) + " of " + std::to_string(runs.size()) +
                              " configurations differ across reruns or job counts" + which};
}

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {1, "xor-mask 0.5-distinctness", 60, c1},
      {2, "bit-index smoothness", 30, c2},
      {3, "RS code distances", 120, c3},
      {4, "Tseitin projection equals brute force", 300, c4},
      {5, "exact-RG inversion", 600, c5},
      {6, "approx-RG 6eps bound", 900, c6},
      {7, "witness uniformity", 600, c7},
      {8, "verifiable-identification reduction", 1200, c8},
      {9, "advice evaluators", 120, c9},
      {10, "approx-verifiable soundness and M^alpha", 1800, c10},
      {11, "determinism", 120, c11},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  int only = 0;
  app.add_option("--criterion", only, "run a single criterion (1-11)")->check(CLI::Range(1, 11));
  CLI11_PARSE(app, argc, argv);

  bool all_pass = true;
  for (const auto& c : criteria()) {
    if (only != 0 && c.id != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.limit_s;
    const bool pass = v.pass && in_time;
    all_pass = all_pass && pass;
    std::cout << "criterion " << c.id << " " << (pass ? "PASS" : "FAIL") << " " << c.title << ": " << v.detail
              << " [" << num(secs) << " s, limit " << num(c.limit_s) << " s" << (in_time ? "" : ", over limit")
              << "]" << std::endl;
  }
  return all_pass ? 0 : 1;
}
