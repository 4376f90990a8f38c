// Command-line front end: one subcommand per experiment. Exit status is 0 when
// every bound holds, 1 when one fails, 2 on configuration errors and 3 on
// other failures.

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "redlab/error.hpp"
#include "redlab/harness.hpp"

namespace {

const std::map<std::string, std::string> kDescriptions = {
    {"verify-class", "pairwise distinctness or smoothness of a concept class"},
    {"rs-props", "Reed-Solomon symbol and bit distances, rs_block disagreement"},
    {"invert-exact-rg", "prefix-search evaluator over an exact sampler"},
    {"invert-approx-rg", "majority-of-witnesses evaluator over an eps-close sampler"},
    {"ident-reduce", "evaluator from a verifiable identifier and CHECK"},
    {"advice-eval", "evaluator from a fixed advice dataset"},
    {"approx-verif", "mislabel soundness of the approximate-verifiable wrapper"},
    {"m-alpha", "M^alpha evaluator on the approximate-verifiable wrapper"},
    {"witness-uniformity", "TV distance of the witness generator on random relations"},
};

struct Flags {
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
  std::string config;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Desk-scale experiments on oracle reductions for learning and sampling"};
  app.require_subcommand(1);
  std::map<std::string, Flags> flags;
  for (const auto& name : redlab::experiment_names()) {
    auto* sub = app.add_subcommand(name, kDescriptions.at(name));
    Flags& f = flags[name];
    sub->add_option("--config", f.config, "JSON config file; flags override its values");
    const std::vector<std::pair<std::string, std::string>> common = {
        {"seed", "random seed (default 1)"},
        {"jobs", "worker threads (default 1)"},
        {"solver", "builtin or dimacs:<path>"},
        {"output", "write the JSON report here instead of stdout"},
        {"csv", "write per-item rows here"}};
    for (const auto& [field, help] : common) f.options[field] = sub->add_option("--" + field, f.values[field], help);
    for (const auto& field : redlab::experiment_fields(name)) {
      f.options[field] = sub->add_option("--" + field, f.values[field]);
    }
  }
  CLI11_PARSE(app, argc, argv);

  const std::string name = app.get_subcommands().front()->get_name();
  Flags& f = flags[name];
  redlab::ExperimentConfig config;
  try {
    config.experiment = name;
    std::vector<std::string> given = {"experiment"};
    for (const auto& [field, opt] : f.options) {
      if (opt->count() > 0) given.push_back(field);
    }
    if (!f.config.empty()) redlab::merge_json_file(config, f.config, given);
    for (const auto& field : given) {
      if (field != "experiment") redlab::set_field(config, field, f.values[field]);
    }
    redlab::validate(config);
  } catch (const redlab::ConfigError& e) {
    std::cerr << "redlab " << name << ": " << e.what() << '\n';
    return 2;
  }

  try {
    const auto report = redlab::run_experiment(config);
    redlab::write_outputs(config, report);
    if (config.output) {
      std::cout << name << ": " << (report.pass ? "pass" : "FAIL") << " (" << *config.output << ")\n";
    } else {
      std::cout << redlab::to_json(report).dump(2) << '\n';
    }
    return report.pass ? 0 : 1;
  } catch (const redlab::ConfigError& e) {
    std::cerr << "redlab " << name << ": " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "redlab " << name << ": " << e.what() << '\n';
    return 3;
  }
}
