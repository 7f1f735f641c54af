#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "naqbc/harness.hpp"
#include "naqbc/oracles.hpp"

namespace naqbc {

// One human-editable JSON document drives a whole run. Every field has a
// default (registry values for registry problems), and serialization always
// materializes all fields, so parse -> serialize -> parse is a fixed point.
struct RunConfig {
  // problem section
  std::string problem_name = "sine";
  std::string dataset_path;  // required for dataset-backed problems
  std::vector<std::string> input_columns;
  std::vector<std::string> output_columns;
  int n_0 = 0;         // 0 = registry default
  int k = 0;           // 0 = registry default
  int n_test = 0;      // 0 = registry default
  int n_ens = 0;       // 0 = registry default
  double e_star = 0.0;  // 0 = registry default
  std::vector<int> arch;  // empty = registry default (full widths)

  // method section
  std::string method = "qbc";
  int gamma = 0;  // 0 = absent; required >=1 for pool methods
  int bald_passes = 25;
  double bald_dropout_rate = 0.1;

  // training section
  std::string activation = "relu";
  double learning_rate = 1e-3;
  int max_epochs = 500;
  int patience = 20;
  int batch_size = 0;
  std::vector<int> lr_milestones;
  double lr_drop = 0.1;

  // synthesis section
  int synthesis_steps = 300;
  double synthesis_learning_rate = 0.01;
  double boundary_strength = 1.0;

  // harness section
  int budget_steps = 200;
  int hits_to_stop = 5;
  bool consecutive_hits = false;
  bool record_timing = false;

  // sweep section
  std::vector<int> sweep_gammas = {2, 4, 8, 16, 32, 64};
  std::vector<std::string> sweep_methods;  // empty = every method

  std::vector<std::uint64_t> seeds = {0};

  // output section
  std::string out_dir;  // empty = $NAQBC_OUT or ./naqbc_out
  int workers = 1;
};

RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

// Canonical form: alphabetized keys, two-space indent, all fields present.
std::string serialize_run_config(const RunConfig& config);

// Fail-fast validation against the registry and type invariants; called by
// the parse path but usable standalone. Throws ConfigError with the field.
void validate_run_config(const RunConfig& config);

// Registry defaults for 0/empty fields, applied in place.
void apply_registry_defaults(RunConfig& config);

// Builds the runnable problem (loading the dataset when needed), with any
// config overrides applied on top of the registry values.
Problem resolve_problem(const RunConfig& config);

TrialConfig resolve_trial_config(const RunConfig& config);

}  // namespace naqbc
