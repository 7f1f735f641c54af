#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "naqbc/dataset.hpp"
#include "naqbc/mlp.hpp"
#include "naqbc/oracles.hpp"
#include "naqbc/synthesis.hpp"

namespace naqbc {

enum class Method { kRandom, kQbc, kDivQbc, kDendivQbc, kBald, kCoreset, kNaQbc };

std::string method_name(Method method);
Method parse_method(const std::string& name);
bool method_is_pool_based(Method method);
const std::vector<Method>& all_methods();

enum class RunStatus { kRunning, kStoppedAtTarget, kExhaustedBudget, kFailed };

std::string status_name(RunStatus status);

struct StepRecord {
  int step_index = 0;
  long train_size = 0;
  double test_mse = 0.0;
  bool hit_flag = false;
  int cumulative_hits = 0;
  double seconds = 0.0;
  std::vector<double> member_mse;  // logged for inspection, never used for stopping
};

struct TrialConfig {
  int budget_steps = 200;
  int hits_to_stop = 5;
  bool consecutive_hits = false;  // default: cumulative occurrences
  Activation activation = Activation::kRelu;
  TrainConfig train{};
  SynthesisConfig synthesis{};
  int bald_passes = 25;
  double bald_dropout_rate = 0.1;
  // Wall time per step is recorded only when set; otherwise the seconds
  // column is 0.000 so step logs are byte-reproducible.
  bool record_timing = false;

  void validate() const;
};

struct ActiveRun {
  std::string run_id;
  std::string problem_name;
  Method method = Method::kRandom;
  int gamma = 0;  // 0 = no pool (random, na_qbc)
  std::uint64_t seed = 0;
  LabeledSet labeled;
  std::vector<StepRecord> step_log;
  RunStatus status = RunStatus::kRunning;
  long stop_train_size = -1;  // train size at the stopping hit; -1 otherwise
  int failed_step = -1;
};

std::string make_run_id(const std::string& problem_name, Method method, int gamma,
                        std::uint64_t seed);

// Mean over test rows and output coordinates of the squared error of the
// committee-mean predictor. `member_mse` (optional) receives each member's
// own MSE.
double evaluate_mse(const Committee& committee, const LabeledSet& test,
                    std::vector<double>* member_mse = nullptr);

// One full AL trial: seed N_0 uniform labeled points, then per step train
// the committee, evaluate on the shared test set, record the hit, and
// acquire K more points by `method` until the stopping rule fires or the
// step budget runs out. gamma must be positive exactly for pool methods.
ActiveRun run_trial(const Problem& problem, Method method, int gamma, std::uint64_t seed,
                    const TrialConfig& cfg = {});

// Train size at the fifth (hits_to_stop-th) hit, recomputed from the step
// log under the given counting rule; nullopt when never reached. Throws
// UsageError on a run still in progress.
std::optional<long> annotation_burden(const ActiveRun& run, int hits_to_stop = 5,
                                      bool consecutive = false);

// Columns: run_id, step, train_size, test_mse, hit, cumulative_hits, seconds.
void write_step_log(std::ostream& out, const ActiveRun& run, bool header = true);

}  // namespace naqbc
