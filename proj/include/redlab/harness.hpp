#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "redlab/oracle.hpp"

namespace redlab {

// Experiments, one per construction:
//   verify-class        c-distinctness / smoothness of a concept class
//   rs-props            Reed-Solomon distances behind the rs_block class
//   invert-exact-rg     prefix-search evaluator over an exact sampler
//   invert-approx-rg    majority-of-witnesses evaluator over an eps-close sampler
//   ident-reduce        evaluator from a verifiable identifier and CHECK
//   advice-eval         evaluator from a fixed advice dataset
//   approx-verif        mislabel soundness of the approximate-verifiable wrapper
//   m-alpha             M^alpha evaluator on top of that wrapper
//   witness-uniformity  TV distance of the witness generator on random relations
const std::vector<std::string>& experiment_names();

// Parameters every experiment may read. Unset fields take per-experiment
// defaults; the report echoes the resolved values.
struct ExperimentConfig {
  std::string experiment;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  BackendConfig solver = BackendConfig::from_environment();
  std::optional<std::string> output;  // JSON report path
  std::optional<std::string> csv;     // per-item CSV path

  std::optional<std::size_t> n, m, B, votes, trials, draws, instances, rounds, aux, degree, k, samples, width,
      min_support, max_support, bit_bound;
  std::optional<double> beta, eps, eps_prime, delta, c;
  std::optional<std::string> class_kind, target, learner, alpha;
};

// Names of the parameters `experiment` accepts, besides seed, jobs, solver,
// output and csv. Throws ConfigError for an unknown experiment.
const std::vector<std::string>& experiment_fields(const std::string& experiment);

// Sets parameter `field` from its textual form. Throws ConfigError naming the
// field on unknown names or malformed values.
void set_field(ExperimentConfig& config, const std::string& field, const std::string& value);

// Merges a JSON object into `config`; keys are parameter names plus
// "experiment", "seed", "jobs", "solver", "output" and "csv". Fields already
// present in `keep` are not overwritten, so command-line flags win.
void merge_json(ExperimentConfig& config, const nlohmann::json& object, const std::vector<std::string>& keep = {});

// Reads and merges a JSON config file. Parse errors carry "<path>:<line>".
void merge_json_file(ExperimentConfig& config, const std::string& path, const std::vector<std::string>& keep = {});

// Range checks; throws ConfigError naming the offending field.
void validate(const ExperimentConfig& config);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct ReductionReport {
  std::string experiment;
  nlohmann::json params;   // resolved parameters
  std::uint64_t seed = 0;
  nlohmann::json metrics;  // measured values
  nlohmann::json bound;    // the thresholds the metrics are checked against
  bool pass = false;
  double wall_time_ms = 0;
  CsvTable csv;
};

ReductionReport run_experiment(const ExperimentConfig& config);

nlohmann::json to_json(const ReductionReport& report, bool with_wall_time = true);
void write_csv(std::ostream& out, const CsvTable& table);

// Writes the report (and CSV, if configured) to the configured paths.
void write_outputs(const ExperimentConfig& config, const ReductionReport& report);

}  // namespace redlab
