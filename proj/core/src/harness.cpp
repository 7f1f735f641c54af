#include "naqbc/harness.hpp"

#include <chrono>
#include <cstdio>
#include <limits>

#include "naqbc/acquisition.hpp"
#include "naqbc/hash.hpp"

namespace naqbc {

std::string method_name(Method method) {
  switch (method) {
    case Method::kRandom: return "random";
    case Method::kQbc: return "qbc";
    case Method::kDivQbc: return "div_qbc";
    case Method::kDendivQbc: return "dendiv_qbc";
    case Method::kBald: return "bald";
    case Method::kCoreset: return "coreset";
    case Method::kNaQbc: return "na_qbc";
  }
  throw UsageError("method_name: bad enum value");
}

Method parse_method(const std::string& name) {
  for (Method m : all_methods())
    if (method_name(m) == name) return m;
  throw ConfigError("unknown method '" + name +
                    "' (expected random, qbc, div_qbc, dendiv_qbc, bald, coreset, or na_qbc)");
}

bool method_is_pool_based(Method method) {
  switch (method) {
    case Method::kQbc:
    case Method::kDivQbc:
    case Method::kDendivQbc:
    case Method::kBald:
    case Method::kCoreset:
      return true;
    case Method::kRandom:
    case Method::kNaQbc:
      return false;
  }
  throw UsageError("method_is_pool_based: bad enum value");
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods = {
      Method::kRandom,  Method::kQbc,     Method::kDivQbc, Method::kDendivQbc,
      Method::kBald,    Method::kCoreset, Method::kNaQbc};
  return methods;
}

std::string status_name(RunStatus status) {
  switch (status) {
    case RunStatus::kRunning: return "running";
    case RunStatus::kStoppedAtTarget: return "stopped_at_target";
    case RunStatus::kExhaustedBudget: return "exhausted_budget";
    case RunStatus::kFailed: return "failed";
  }
  throw UsageError("status_name: bad enum value");
}

void TrialConfig::validate() const {
  if (budget_steps < 1) throw ConfigError("trial: budget_steps must be >= 1");
  if (hits_to_stop < 1) throw ConfigError("trial: hits_to_stop must be >= 1");
  if (bald_passes < 2) throw ConfigError("trial: bald_passes must be >= 2");
  if (!(bald_dropout_rate > 0.0 && bald_dropout_rate < 1.0))
    throw ConfigError("trial: bald_dropout_rate must lie in (0,1)");
  train.validate();
  synthesis.validate();
}

std::string make_run_id(const std::string& problem_name, Method method, int gamma,
                        std::uint64_t seed) {
  std::string id = problem_name + "_" + method_name(method);
  if (method_is_pool_based(method)) id += "_g" + std::to_string(gamma);
  id += "_s" + std::to_string(seed);
  return id;
}

double evaluate_mse(const Committee& committee, const LabeledSet& test,
                    std::vector<double>* member_mse) {
  if (test.n() == 0) throw ConfigError("evaluate_mse: empty test set");
  const double denom = static_cast<double>(test.n() * test.d_y());
  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(test.n(), test.d_y());
  if (member_mse) member_mse->clear();
  for (const MlpModel& m : committee.members) {
    const Eigen::MatrixXd pred = forward_batch(m, test.xs);
    if (member_mse) member_mse->push_back((pred - test.ys).squaredNorm() / denom);
    mean += pred;
  }
  mean /= static_cast<double>(committee.size());
  return (mean - test.ys).squaredNorm() / denom;
}

ActiveRun run_trial(const Problem& problem, Method method, int gamma, std::uint64_t seed,
                    const TrialConfig& cfg) {
  cfg.validate();
  if (!problem.oracle) throw ConfigError("run_trial: problem has no oracle");
  if (method_is_pool_based(method)) {
    if (gamma < 1) throw ConfigError("run_trial: pool method needs gamma >= 1");
  } else if (gamma != 0) {
    throw ConfigError("run_trial: gamma given for a method without a pool");
  }

  ActiveRun run;
  run.run_id = make_run_id(problem.name, method, gamma, seed);
  run.problem_name = problem.name;
  run.method = method;
  run.gamma = gamma;
  run.seed = seed;

  const std::uint64_t trial_base = fnv1a64(run.run_id);
  const LabeledSet test = make_test_set(problem, seed);

  // The starting set depends on (problem, seed) only, so every method in a
  // trial pair grows from identical data.
  {
    Rng init_rng(mix64(fnv1a64(problem.name), mix64(seed, seed_tag::kInitialSet)));
    run.labeled = problem.label(problem.domain.sample_rows(problem.n_0, init_rng));
  }

  Committee committee = make_committee(problem.arch, cfg.activation, problem.n_ens, trial_base);

  int total_hits = 0;
  int consecutive = 0;
  for (int step = 0; step < cfg.budget_steps; ++step) {
    const auto started = std::chrono::steady_clock::now();
    StepRecord record;
    record.step_index = step;
    record.train_size = run.labeled.n();
    bool evaluated = false;
    try {
      const std::uint64_t step_key = static_cast<std::uint64_t>(step);
      train_committee(committee, run.labeled, cfg.train,
                      mix64(trial_base, mix64(step_key, seed_tag::kTrain)));
      record.test_mse = evaluate_mse(committee, test, &record.member_mse);
      evaluated = true;

      record.hit_flag = record.test_mse <= problem.e_star;
      total_hits += record.hit_flag ? 1 : 0;
      consecutive = record.hit_flag ? consecutive + 1 : 0;
      record.cumulative_hits = total_hits;
      const int counter = cfg.consecutive_hits ? consecutive : total_hits;

      if (counter >= cfg.hits_to_stop) {
        if (cfg.record_timing)
          record.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                         started)
                               .count();
        run.step_log.push_back(std::move(record));
        run.status = RunStatus::kStoppedAtTarget;
        run.stop_train_size = run.labeled.n();
        return run;
      }

      if (step + 1 < cfg.budget_steps) {
        Eigen::MatrixXd new_xs;
        switch (method) {
          case Method::kRandom: {
            Rng rng(mix64(trial_base, mix64(step_key, seed_tag::kRandomAcquire)));
            new_xs = problem.domain.sample_rows(problem.k, rng);
            break;
          }
          case Method::kNaQbc: {
            Rng rng(mix64(trial_base, mix64(step_key, seed_tag::kSynthesis)));
            new_xs = synthesize_queries(committee, problem.domain, problem.k, cfg.synthesis,
                                        rng)
                         .queries;
            break;
          }
          default: {
            Rng pool_rng(mix64(trial_base, mix64(step_key, seed_tag::kPool)));
            const Pool pool = sample_pool(problem.domain, gamma, problem.k, pool_rng);
            std::vector<long> picks;
            if (method == Method::kQbc) {
              picks = select_qbc(committee, pool, problem.k);
            } else if (method == Method::kDivQbc) {
              picks = select_div_qbc(committee, pool, problem.k);
            } else if (method == Method::kDendivQbc) {
              picks = select_dendiv_qbc(committee, pool, problem.k);
            } else if (method == Method::kCoreset) {
              picks = select_coreset(run.labeled.xs, pool, problem.k);
            } else {
              MlpModel net = init_model(problem.arch, cfg.activation,
                                        mix64(trial_base, mix64(step_key, seed_tag::kBaldTrain)),
                                        cfg.bald_dropout_rate);
              Rng train_rng(mix64(trial_base, mix64(step_key, seed_tag::kBaldTrain)),
                            seed_tag::kTrain);
              net = train(net, run.labeled, cfg.train, train_rng);
              Rng select_rng(mix64(trial_base, mix64(step_key, seed_tag::kBald)));
              picks = select_bald_mcdropout(net, pool, problem.k, cfg.bald_passes, select_rng);
            }
            new_xs = gather_rows(pool.candidates, picks);
            break;
          }
        }
        const LabeledSet fresh = problem.label(new_xs);
        run.labeled.append(fresh.xs, fresh.ys);
      }
    } catch (const NumericError&) {
      run.status = RunStatus::kFailed;
      run.failed_step = step;
      if (!evaluated) {
        record.test_mse = std::numeric_limits<double>::quiet_NaN();
        record.cumulative_hits = total_hits;
      }
      run.step_log.push_back(std::move(record));
      return run;
    }
    if (cfg.record_timing)
      record.seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    run.step_log.push_back(std::move(record));
  }

  run.status = RunStatus::kExhaustedBudget;
  return run;
}

std::optional<long> annotation_burden(const ActiveRun& run, int hits_to_stop, bool consecutive) {
  if (run.status == RunStatus::kRunning)
    throw UsageError("annotation_burden: run '" + run.run_id + "' is still in progress");
  if (run.status == RunStatus::kExhaustedBudget || run.status == RunStatus::kFailed)
    return std::nullopt;
  int total = 0;
  int streak = 0;
  for (const StepRecord& record : run.step_log) {
    total += record.hit_flag ? 1 : 0;
    streak = record.hit_flag ? streak + 1 : 0;
    const int counter = consecutive ? streak : total;
    if (counter >= hits_to_stop) return record.train_size;
  }
  return std::nullopt;
}

void write_step_log(std::ostream& out, const ActiveRun& run, bool header) {
  if (header) out << "run_id\tstep\ttrain_size\ttest_mse\thit\tcumulative_hits\tseconds\n";
  char buf[64];
  for (const StepRecord& record : run.step_log) {
    std::snprintf(buf, sizeof(buf), "%.12g", record.test_mse);
    out << run.run_id << '\t' << record.step_index << '\t' << record.train_size << '\t' << buf
        << '\t' << (record.hit_flag ? 1 : 0) << '\t' << record.cumulative_hits << '\t';
    std::snprintf(buf, sizeof(buf), "%.3f", record.seconds);
    out << buf << '\n';
  }
}

}  // namespace naqbc
