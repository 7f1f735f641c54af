#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <functional>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "naqbc/config.hpp"
#include "naqbc/harness.hpp"
#include "naqbc/manifest.hpp"
#include "naqbc/metrics.hpp"
#include "naqbc/plot.hpp"
#include "naqbc/table_io.hpp"
#include "naqbc/version.hpp"

namespace fs = std::filesystem;
using namespace naqbc;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitTrialFailure = 1;
constexpr int kExitBadInput = 2;

std::string default_out_dir(const RunConfig& cfg) {
  if (!cfg.out_dir.empty()) return cfg.out_dir;
  if (const char* env = std::getenv("NAQBC_OUT")) return env;
  return "naqbc_out";
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream stream(text);
  std::string token;
  while (std::getline(stream, token, ',')) {
    const std::size_t dots = token.find("..");
    if (dots != std::string::npos) {
      const std::uint64_t lo = std::stoull(token.substr(0, dots));
      const std::uint64_t hi = std::stoull(token.substr(dots + 2));
      if (hi < lo) throw ConfigError("seeds: range '" + token + "' is reversed");
      for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
    } else if (!token.empty()) {
      seeds.push_back(std::stoull(token));
    }
  }
  if (seeds.empty()) throw ConfigError("seeds: empty list");
  return seeds;
}

template <typename Fn>
void parallel_for(long n, int workers, Fn fn) {
  workers = static_cast<int>(std::min<long>(workers, n));
  if (workers <= 1) {
    for (long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<long> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (long i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  for (std::thread& t : pool) t.join();
}

struct TrialTask {
  Method method = Method::kRandom;
  int gamma = 0;
  std::uint64_t seed = 0;
};

struct TrialOutcome {
  ActiveRun run;
  std::string error;
  double seconds = 0.0;
  bool ran = false;
};

TrialOutcome execute_trial(const Problem& problem, const TrialTask& task,
                           const TrialConfig& trial_cfg) {
  TrialOutcome outcome;
  const auto started = std::chrono::steady_clock::now();
  try {
    outcome.run = run_trial(problem, task.method, task.gamma, task.seed, trial_cfg);
    outcome.ran = true;
  } catch (const std::exception& e) {
    outcome.error = e.what();
    outcome.run.run_id = make_run_id(problem.name, task.method, task.gamma, task.seed);
    outcome.run.problem_name = problem.name;
    outcome.run.method = task.method;
    outcome.run.gamma = task.gamma;
    outcome.run.seed = task.seed;
    outcome.run.status = RunStatus::kFailed;
  }
  outcome.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return outcome;
}

// Runs the tasks (possibly in parallel), writes one step log per trial, and
// fills manifest entries plus the burden table. Returns the failed run ids.
std::vector<std::string> run_tasks(const Problem& problem, const std::vector<TrialTask>& tasks,
                                   const TrialConfig& trial_cfg, const RunConfig& cfg,
                                   const fs::path& out, EfficiencyTable& table,
                                   RunManifest& manifest) {
  std::vector<TrialOutcome> outcomes(tasks.size());
  parallel_for(static_cast<long>(tasks.size()), cfg.workers, [&](long i) {
    outcomes[i] = execute_trial(problem, tasks[i], trial_cfg);
    const ActiveRun& run = outcomes[i].run;
    if (outcomes[i].ran) {
      std::ofstream log(out / (run.run_id + "_steps.tsv"), std::ios::binary | std::ios::trunc);
      write_step_log(log, run);
    }
  });

  std::vector<std::string> failed;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const TrialOutcome& outcome = outcomes[i];
    const ActiveRun& run = outcome.run;

    TrialManifestEntry entry;
    entry.run_id = run.run_id;
    entry.status = status_name(run.status);
    entry.seconds = outcome.seconds;
    if (outcome.ran) {
      const auto burden =
          annotation_burden(run, trial_cfg.hits_to_stop, trial_cfg.consecutive_hits);
      entry.burden = burden ? *burden : -1;
      table.add_run(run, trial_cfg.hits_to_stop, trial_cfg.consecutive_hits);
      const std::string log_name = run.run_id + "_steps.tsv";
      manifest.checksums[log_name] = checksum_file((out / log_name).string());
    } else {
      entry.status = "failed";
      BurdenEntry b;
      b.problem = run.problem_name;
      b.method = run.method;
      b.gamma = run.gamma;
      b.seed = run.seed;
      table.add(std::move(b));
    }
    manifest.trials.push_back(entry);

    std::cout << run.run_id << "\t" << entry.status
              << (entry.burden >= 0 ? "\tburden=" + std::to_string(entry.burden) : "")
              << (outcome.error.empty() ? "" : "\terror: " + outcome.error) << "\n";
    if (run.status == RunStatus::kFailed) failed.push_back(run.run_id);
  }
  return failed;
}

void write_table_file(const fs::path& path, const std::function<void(std::ostream&)>& writer,
                      RunManifest& manifest) {
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    writer(out);
  }
  manifest.checksums[path.filename().string()] = checksum_file(path.string());
}

std::vector<PlotSeries> eta_series_from_summary(const SweepSummary& summary) {
  std::vector<PlotSeries> series;
  for (Method method : all_methods()) {
    PlotSeries s;
    s.label = method_name(method);
    for (const CellSummary& cell : summary.cells) {
      if (cell.method != method || !cell.defined) continue;
      if (method_is_pool_based(method)) {
        s.xs.push_back(static_cast<double>(cell.gamma));
        s.ys.push_back(cell.eta.mean);
      } else {
        s.horizontal_rule = true;
        s.ys.push_back(cell.eta.mean);
      }
    }
    if (!s.ys.empty()) series.push_back(std::move(s));
  }
  return series;
}

int cmd_run(const RunConfig& cfg, const std::string& manifest_path) {
  const Method method = parse_method(cfg.method);
  if (method_is_pool_based(method) && cfg.gamma < 1) {
    std::cerr << "error: method '" << cfg.method << "' needs --gamma >= 1\n";
    return kExitBadInput;
  }

  const Problem problem = resolve_problem(cfg);
  const TrialConfig trial_cfg = resolve_trial_config(cfg);

  const fs::path out = default_out_dir(cfg);
  fs::create_directories(out);

  RunManifest manifest;
  manifest.version = kVersion;
  manifest.command = "run";
  manifest.config_json = serialize_run_config(cfg);
  manifest.seeds = cfg.seeds;
  manifest.started_at = current_utc_timestamp();

  std::vector<TrialTask> tasks;
  for (std::uint64_t seed : cfg.seeds) tasks.push_back({method, cfg.gamma, seed});

  EfficiencyTable table;
  const std::vector<std::string> failed =
      run_tasks(problem, tasks, trial_cfg, cfg, out, table, manifest);

  write_table_file(out / "burdens.tsv", [&](std::ostream& o) { write_burden_table(o, table); },
                   manifest);

  manifest.finished_at = current_utc_timestamp();
  write_manifest((out / "manifest.json").string(), manifest);
  (void)manifest_path;

  if (!failed.empty()) {
    std::cerr << "failed trials:";
    for (const std::string& id : failed) std::cerr << ' ' << id;
    std::cerr << "\n";
    return kExitTrialFailure;
  }
  return kExitOk;
}

int cmd_sweep(const RunConfig& cfg) {
  const Problem problem = resolve_problem(cfg);
  const TrialConfig trial_cfg = resolve_trial_config(cfg);

  std::vector<Method> methods;
  if (cfg.sweep_methods.empty()) {
    methods = all_methods();
  } else {
    for (const std::string& name : cfg.sweep_methods) methods.push_back(parse_method(name));
    // The baseline is always needed to normalize burdens.
    if (std::find(methods.begin(), methods.end(), Method::kRandom) == methods.end())
      methods.insert(methods.begin(), Method::kRandom);
  }

  std::vector<TrialTask> tasks;
  for (Method method : methods) {
    if (method_is_pool_based(method)) {
      for (int gamma : cfg.sweep_gammas)
        for (std::uint64_t seed : cfg.seeds) tasks.push_back({method, gamma, seed});
    } else {
      for (std::uint64_t seed : cfg.seeds) tasks.push_back({method, 0, seed});
    }
  }

  const fs::path out = default_out_dir(cfg);
  fs::create_directories(out);

  RunManifest manifest;
  manifest.version = kVersion;
  manifest.command = "sweep";
  manifest.config_json = serialize_run_config(cfg);
  manifest.seeds = cfg.seeds;
  manifest.started_at = current_utc_timestamp();

  EfficiencyTable table;
  const std::vector<std::string> failed =
      run_tasks(problem, tasks, trial_cfg, cfg, out, table, manifest);

  write_table_file(out / "burdens.tsv", [&](std::ostream& o) { write_burden_table(o, table); },
                   manifest);

  const SweepSummary summary = gamma_sweep_summary(table, problem.name);
  write_table_file(out / ("summary_" + problem.name + ".tsv"),
                   [&](std::ostream& o) { write_sweep_summary(o, summary); }, manifest);
  write_table_file(out / ("eta_" + problem.name + ".tsv"),
                   [&](std::ostream& o) { write_eta_list(o, problem.name, summary.cells); },
                   manifest);

  const std::vector<PlotSeries> series = eta_series_from_summary(summary);
  if (!series.empty()) {
    PlotOptions options;
    options.title = "Normalized annotation burden vs pool ratio (" + problem.name + ")";
    options.x_label = "pool ratio gamma";
    options.y_label = "eta";
    const fs::path plot_path = out / ("eta_vs_gamma_" + problem.name + ".svg");
    write_plot(plot_path.string(), PlotKind::kEtaVsGamma, series, options);
    manifest.checksums[plot_path.filename().string()] = checksum_file(plot_path.string());
  }

  for (const auto& [method, gamma] : summary.gamma_star)
    std::cout << "gamma*(" << method_name(method) << ", " << problem.name << ") = " << gamma
              << "\n";

  manifest.finished_at = current_utc_timestamp();
  write_manifest((out / "manifest.json").string(), manifest);

  if (!failed.empty()) {
    std::cerr << "failed trials:";
    for (const std::string& id : failed) std::cerr << ' ' << id;
    std::cerr << "\n";
    return kExitTrialFailure;
  }
  return kExitOk;
}

int cmd_crossval(const std::vector<std::string>& table_paths, const std::string& out_dir,
                 bool by_median) {
  EfficiencyTable merged;
  for (const std::string& path : table_paths) {
    std::ifstream file(path);
    if (!file) throw ConfigError("crossval: cannot open '" + path + "'");
    EfficiencyTable t = read_burden_table(file);
    for (BurdenEntry& e : t.entries) merged.add(std::move(e));
  }
  const std::vector<std::string> problems = merged.problems();
  if (problems.size() < 2)
    throw UsageError("crossval: need burden tables covering >= 2 problems, found " +
                     std::to_string(problems.size()));

  const CrossValResult result = cross_validate(merged, problems, by_median);

  const fs::path out = out_dir.empty()
                           ? fs::path(std::getenv("NAQBC_OUT") ? std::getenv("NAQBC_OUT")
                                                               : "naqbc_out")
                           : fs::path(out_dir);
  fs::create_directories(out);

  RunManifest manifest;
  manifest.version = kVersion;
  manifest.command = "crossval";
  manifest.config_json = "{}";
  manifest.started_at = current_utc_timestamp();

  write_table_file(out / "crossval.tsv",
                   [&](std::ostream& o) { write_crossval_matrix(o, result); }, manifest);

  if (!result.skipped.empty()) {
    write_table_file(out / "crossval_skipped.txt",
                     [&](std::ostream& o) {
                       for (const std::string& s : result.skipped) o << s << "\n";
                     },
                     manifest);
  }

  std::vector<PlotSeries> series;
  for (const std::string& target : result.problems) {
    PlotSeries s;
    s.label = target;
    for (std::size_t m = 0; m < result.methods.size(); ++m) {
      const auto& row = result.eta_cv.at(result.methods[m]);
      auto it = row.find(target);
      if (it == row.end()) continue;
      s.xs.push_back(static_cast<double>(m));
      s.ys.push_back(it->second);
    }
    if (!s.ys.empty()) series.push_back(std::move(s));
  }
  if (!series.empty()) {
    PlotOptions options;
    options.title = "Cross-dataset normalized annotation burden";
    options.x_label = "method";
    options.y_label = "eta_cv";
    for (Method m : result.methods) options.x_tick_labels.push_back(method_name(m));
    write_plot((out / "crossval.svg").string(), PlotKind::kCrossvalBox, series, options);
    manifest.checksums["crossval.svg"] = checksum_file((out / "crossval.svg").string());
  }

  manifest.finished_at = current_utc_timestamp();
  write_manifest((out / "manifest.json").string(), manifest);

  for (const std::string& s : result.skipped) std::cerr << "skipped: " << s << "\n";
  return kExitOk;
}

int cmd_plot(const std::string& kind_name, const std::string& input, const std::string& output,
             double smoothing, const std::string& title) {
  std::ifstream file(input);
  if (!file) throw ConfigError("plot: cannot open '" + input + "'");
  const TsvTable tsv = read_tsv(file);

  PlotOptions options;
  options.title = title;
  std::vector<PlotSeries> series;
  PlotKind kind;

  if (kind_name == "eta_vs_gamma") {
    kind = PlotKind::kEtaVsGamma;
    options.x_label = "pool ratio gamma";
    options.y_label = "eta";
    const long c_method = tsv_column(tsv, "method");
    const long c_gamma = tsv_column(tsv, "gamma");
    const long c_mean = tsv_column(tsv, "mean_eta");
    std::map<std::string, PlotSeries> by_method;
    std::vector<std::string> order;
    for (const auto& row : tsv.rows) {
      if (row[c_mean] == "/") continue;
      PlotSeries& s = by_method[row[c_method]];
      if (s.label.empty()) {
        s.label = row[c_method];
        order.push_back(s.label);
      }
      if (row[c_gamma] == "/") {
        s.horizontal_rule = true;
        s.ys.push_back(parse_double_field(row[c_mean], "mean_eta"));
      } else {
        s.xs.push_back(parse_double_field(row[c_gamma], "gamma"));
        s.ys.push_back(parse_double_field(row[c_mean], "mean_eta"));
      }
    }
    for (const std::string& label : order) series.push_back(by_method[label]);
  } else if (kind_name == "mse_vs_trainsize") {
    kind = PlotKind::kMseVsTrainsize;
    options.x_label = "training set size";
    options.y_label = "test MSE";
    options.smoothing = smoothing;
    const long c_run = tsv_column(tsv, "run_id");
    const long c_size = tsv_column(tsv, "train_size");
    const long c_mse = tsv_column(tsv, "test_mse");
    std::map<std::string, PlotSeries> by_run;
    std::vector<std::string> order;
    for (const auto& row : tsv.rows) {
      PlotSeries& s = by_run[row[c_run]];
      if (s.label.empty()) {
        s.label = row[c_run];
        order.push_back(s.label);
      }
      s.xs.push_back(parse_double_field(row[c_size], "train_size"));
      s.ys.push_back(parse_double_field(row[c_mse], "test_mse"));
    }
    for (const std::string& label : order) series.push_back(by_run[label]);
  } else if (kind_name == "crossval_box") {
    kind = PlotKind::kCrossvalBox;
    options.x_label = "method";
    options.y_label = "eta_cv";
    for (std::size_t col = 1; col < tsv.header.size(); ++col) {
      PlotSeries s;
      s.label = tsv.header[col];
      for (std::size_t r = 0; r < tsv.rows.size(); ++r) {
        if (tsv.rows[r][col] == "/") continue;
        s.xs.push_back(static_cast<double>(r));
        s.ys.push_back(parse_double_field(tsv.rows[r][col], tsv.header[col]));
      }
      if (!s.ys.empty()) series.push_back(std::move(s));
    }
    for (const auto& row : tsv.rows) options.x_tick_labels.push_back(row[0]);
  } else {
    throw ConfigError("plot: unknown kind '" + kind_name +
                      "' (eta_vs_gamma, mse_vs_trainsize, crossval_box)");
  }

  write_plot(output, kind, series, options);
  std::cout << "wrote " << output << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deep active learning lab for regression: pool selection and query synthesis"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  std::string config_path, manifest_path, out_dir, dataset_path;
  std::string problem_name, method_name_arg, seeds_text, activation;
  std::vector<std::string> input_columns, output_columns;
  int gamma = -1, budget_steps = 0, workers = 0, max_epochs = 0;
  bool timing = false;
  bool by_median = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file");
    cmd->add_option("--problem", problem_name, "registry problem name");
    cmd->add_option("--dataset", dataset_path, "delimiter-separated dataset file");
    cmd->add_option("--input-columns", input_columns, "dataset input column names");
    cmd->add_option("--output-columns", output_columns, "dataset output column names");
    cmd->add_option("--seeds", seeds_text, "comma list and/or lo..hi ranges");
    cmd->add_option("--out", out_dir, "output directory (default $NAQBC_OUT or ./naqbc_out)");
    cmd->add_option("--budget-steps", budget_steps, "max AL steps per trial");
    cmd->add_option("--workers", workers, "parallel trial workers");
    cmd->add_option("--activation", activation, "relu or tanh");
    cmd->add_option("--max-epochs", max_epochs, "training epochs cap");
    cmd->add_flag("--timing", timing, "record wall time in step logs (breaks byte determinism)");
  };

  CLI::App* run = app.add_subcommand("run", "Run one (method, gamma) over the listed seeds");
  add_common(run);
  run->add_option("--method", method_name_arg, "random|qbc|div_qbc|dendiv_qbc|bald|coreset|na_qbc");
  run->add_option("--gamma", gamma, "pool ratio (pool-based methods only)");
  run->add_option("--manifest", manifest_path, "rerun the config stored in a manifest");

  CLI::App* sweep = app.add_subcommand("sweep", "Full (method x gamma x seed) grid on one problem");
  add_common(sweep);

  CLI::App* crossval = app.add_subcommand("crossval", "Cross-dataset eta from sweep outputs");
  std::vector<std::string> table_paths;
  crossval->add_option("--tables", table_paths, "burden table files from sweeps (>= 2 problems)")
      ->required();
  crossval->add_option("--out", out_dir, "output directory");
  crossval->add_flag("--by-median", by_median, "pick gamma* by median eta instead of mean");

  CLI::App* plot = app.add_subcommand("plot", "Render an SVG from emitted tables");
  std::string plot_kind, plot_in, plot_out, plot_title;
  double smoothing = 0.0;
  plot->add_option("--kind", plot_kind, "eta_vs_gamma|mse_vs_trainsize|crossval_box")->required();
  plot->add_option("--in", plot_in, "input table")->required();
  plot->add_option("--out-file", plot_out, "output .svg path")->required();
  plot->add_option("--smoothing", smoothing, "EMA weight for mse_vs_trainsize (e.g. 0.3)");
  plot->add_option("--title", plot_title, "plot title");

  CLI::App* validate = app.add_subcommand("validate-config", "Parse and validate a config");
  validate->add_option("--config", config_path, "JSON config file")->required();
  bool print_canonical = false;
  validate->add_flag("--print", print_canonical, "print the canonical serialized form");

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) {
      const RunConfig cfg = load_run_config(config_path);
      if (print_canonical)
        std::cout << serialize_run_config(cfg);
      else
        std::cout << "config ok\n";
      return kExitOk;
    }

    if (plot->parsed()) return cmd_plot(plot_kind, plot_in, plot_out, smoothing, plot_title);

    if (crossval->parsed()) return cmd_crossval(table_paths, out_dir, by_median);

    // run and sweep share config assembly: file (or manifest snapshot), then
    // command-line overrides, then re-validation.
    RunConfig cfg;
    if (run->parsed() && !manifest_path.empty()) {
      const RunManifest stored = read_manifest(manifest_path);
      cfg = parse_run_config(stored.config_json);
      if (out_dir.empty()) out_dir = default_out_dir(cfg) + "_rerun";
    } else if (!config_path.empty()) {
      cfg = load_run_config(config_path);
    } else {
      apply_registry_defaults(cfg);
    }

    if (!problem_name.empty()) {
      cfg.problem_name = problem_name;
      // A different problem resets derived defaults unless explicitly set.
      cfg.n_0 = cfg.k = cfg.n_test = cfg.n_ens = 0;
      cfg.e_star = 0.0;
      cfg.arch.clear();
      apply_registry_defaults(cfg);
    }
    if (!dataset_path.empty()) cfg.dataset_path = dataset_path;
    if (!input_columns.empty()) cfg.input_columns = input_columns;
    if (!output_columns.empty()) cfg.output_columns = output_columns;
    if (!method_name_arg.empty()) cfg.method = method_name_arg;
    if (gamma >= 0) cfg.gamma = gamma;
    if (!seeds_text.empty()) cfg.seeds = parse_seed_list(seeds_text);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (budget_steps > 0) cfg.budget_steps = budget_steps;
    if (workers > 0) cfg.workers = workers;
    if (!activation.empty()) cfg.activation = activation;
    if (max_epochs > 0) cfg.max_epochs = max_epochs;
    if (timing) cfg.record_timing = true;
    validate_run_config(cfg);

    if (run->parsed()) return cmd_run(cfg, manifest_path);
    return cmd_sweep(cfg);
  } catch (const UnsupportedOracleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitTrialFailure;
  }
}
