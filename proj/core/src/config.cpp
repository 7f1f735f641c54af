#include "naqbc/config.hpp"

#include <fstream>
#include <memory>
#include <set>
#include <sstream>

#include <json.hpp>

namespace naqbc {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::string& section,
                const std::set<std::string>& allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key()))
      throw ConfigError("config: unknown key '" + section + "." + it.key() + "'");
  }
}

template <typename T>
T get_or(const json& obj, const std::string& section, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config: bad value for '" + section + "." + key + "'");
  }
}

Activation parse_activation(const std::string& name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "tanh") return Activation::kTanh;
  throw ConfigError("config: activation must be 'relu' or 'tanh', got '" + name + "'");
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config: top level must be an object");
  check_keys(root, "",
             {"problem", "method", "training", "synthesis", "harness", "sweep", "seeds",
              "output"});

  RunConfig cfg;
  RunConfig defaults;

  if (root.contains("problem")) {
    const json& p = root["problem"];
    check_keys(p, "problem",
               {"name", "dataset", "input_columns", "output_columns", "n_0", "k", "n_test",
                "n_ens", "e_star", "arch"});
    cfg.problem_name = get_or<std::string>(p, "problem", "name", defaults.problem_name);
    cfg.dataset_path = get_or<std::string>(p, "problem", "dataset", "");
    cfg.input_columns = get_or<std::vector<std::string>>(p, "problem", "input_columns", {});
    cfg.output_columns = get_or<std::vector<std::string>>(p, "problem", "output_columns", {});
    cfg.n_0 = get_or<int>(p, "problem", "n_0", 0);
    cfg.k = get_or<int>(p, "problem", "k", 0);
    cfg.n_test = get_or<int>(p, "problem", "n_test", 0);
    cfg.n_ens = get_or<int>(p, "problem", "n_ens", 0);
    cfg.e_star = get_or<double>(p, "problem", "e_star", 0.0);
    cfg.arch = get_or<std::vector<int>>(p, "problem", "arch", {});
  }
  if (root.contains("method")) {
    const json& m = root["method"];
    check_keys(m, "method", {"name", "gamma", "bald_passes", "bald_dropout_rate"});
    cfg.method = get_or<std::string>(m, "method", "name", defaults.method);
    cfg.gamma = get_or<int>(m, "method", "gamma", 0);
    cfg.bald_passes = get_or<int>(m, "method", "bald_passes", defaults.bald_passes);
    cfg.bald_dropout_rate =
        get_or<double>(m, "method", "bald_dropout_rate", defaults.bald_dropout_rate);
  }
  if (root.contains("training")) {
    const json& t = root["training"];
    check_keys(t, "training",
               {"activation", "learning_rate", "max_epochs", "patience", "batch_size",
                "lr_milestones", "lr_drop"});
    cfg.activation = get_or<std::string>(t, "training", "activation", defaults.activation);
    cfg.learning_rate = get_or<double>(t, "training", "learning_rate", defaults.learning_rate);
    cfg.max_epochs = get_or<int>(t, "training", "max_epochs", defaults.max_epochs);
    cfg.patience = get_or<int>(t, "training", "patience", defaults.patience);
    cfg.batch_size = get_or<int>(t, "training", "batch_size", defaults.batch_size);
    cfg.lr_milestones = get_or<std::vector<int>>(t, "training", "lr_milestones", {});
    cfg.lr_drop = get_or<double>(t, "training", "lr_drop", defaults.lr_drop);
  }
  if (root.contains("synthesis")) {
    const json& s = root["synthesis"];
    check_keys(s, "synthesis", {"steps", "learning_rate", "boundary_strength"});
    cfg.synthesis_steps = get_or<int>(s, "synthesis", "steps", defaults.synthesis_steps);
    cfg.synthesis_learning_rate =
        get_or<double>(s, "synthesis", "learning_rate", defaults.synthesis_learning_rate);
    cfg.boundary_strength =
        get_or<double>(s, "synthesis", "boundary_strength", defaults.boundary_strength);
  }
  if (root.contains("harness")) {
    const json& h = root["harness"];
    check_keys(h, "harness",
               {"budget_steps", "hits_to_stop", "consecutive_hits", "record_timing"});
    cfg.budget_steps = get_or<int>(h, "harness", "budget_steps", defaults.budget_steps);
    cfg.hits_to_stop = get_or<int>(h, "harness", "hits_to_stop", defaults.hits_to_stop);
    cfg.consecutive_hits =
        get_or<bool>(h, "harness", "consecutive_hits", defaults.consecutive_hits);
    cfg.record_timing = get_or<bool>(h, "harness", "record_timing", defaults.record_timing);
  }
  if (root.contains("sweep")) {
    const json& s = root["sweep"];
    check_keys(s, "sweep", {"gammas", "methods"});
    cfg.sweep_gammas = get_or<std::vector<int>>(s, "sweep", "gammas", defaults.sweep_gammas);
    cfg.sweep_methods = get_or<std::vector<std::string>>(s, "sweep", "methods", {});
  }
  if (root.contains("seeds")) {
    try {
      cfg.seeds = root["seeds"].get<std::vector<std::uint64_t>>();
    } catch (const json::exception&) {
      throw ConfigError("config: 'seeds' must be a list of non-negative integers");
    }
  }
  if (root.contains("output")) {
    const json& o = root["output"];
    check_keys(o, "output", {"dir", "workers"});
    cfg.out_dir = get_or<std::string>(o, "output", "dir", "");
    cfg.workers = get_or<int>(o, "output", "workers", defaults.workers);
  }

  apply_registry_defaults(cfg);
  validate_run_config(cfg);
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << file.rdbuf();
  return parse_run_config(buffer.str());
}

std::string serialize_run_config(const RunConfig& cfg) {
  json root;
  root["problem"] = {{"name", cfg.problem_name},
                     {"dataset", cfg.dataset_path},
                     {"input_columns", cfg.input_columns},
                     {"output_columns", cfg.output_columns},
                     {"n_0", cfg.n_0},
                     {"k", cfg.k},
                     {"n_test", cfg.n_test},
                     {"n_ens", cfg.n_ens},
                     {"e_star", cfg.e_star},
                     {"arch", cfg.arch}};
  root["method"] = {{"name", cfg.method},
                    {"gamma", cfg.gamma},
                    {"bald_passes", cfg.bald_passes},
                    {"bald_dropout_rate", cfg.bald_dropout_rate}};
  root["training"] = {{"activation", cfg.activation},
                      {"learning_rate", cfg.learning_rate},
                      {"max_epochs", cfg.max_epochs},
                      {"patience", cfg.patience},
                      {"batch_size", cfg.batch_size},
                      {"lr_milestones", cfg.lr_milestones},
                      {"lr_drop", cfg.lr_drop}};
  root["synthesis"] = {{"steps", cfg.synthesis_steps},
                       {"learning_rate", cfg.synthesis_learning_rate},
                       {"boundary_strength", cfg.boundary_strength}};
  root["harness"] = {{"budget_steps", cfg.budget_steps},
                     {"hits_to_stop", cfg.hits_to_stop},
                     {"consecutive_hits", cfg.consecutive_hits},
                     {"record_timing", cfg.record_timing}};
  root["sweep"] = {{"gammas", cfg.sweep_gammas}, {"methods", cfg.sweep_methods}};
  root["seeds"] = cfg.seeds;
  root["output"] = {{"dir", cfg.out_dir}, {"workers", cfg.workers}};
  return root.dump(2) + "\n";
}

void apply_registry_defaults(RunConfig& cfg) {
  const ProblemSpec* spec = find_problem_spec(cfg.problem_name);
  if (spec) {
    cfg.problem_name = spec->name;
    if (cfg.n_0 == 0) cfg.n_0 = spec->n_0;
    if (cfg.k == 0) cfg.k = spec->k;
    if (cfg.n_test == 0) cfg.n_test = spec->n_test;
    if (cfg.n_ens == 0) cfg.n_ens = spec->n_ens;
    if (cfg.e_star == 0.0) cfg.e_star = spec->e_star;
    if (cfg.arch.empty()) cfg.arch = spec->full_arch();
  } else {
    if (cfg.n_0 == 0) cfg.n_0 = 80;
    if (cfg.k == 0) cfg.k = 40;
    if (cfg.n_test == 0) cfg.n_test = 4000;
    if (cfg.n_ens == 0) cfg.n_ens = 10;
  }
}

void validate_run_config(const RunConfig& cfg) {
  const ProblemSpec* spec = find_problem_spec(cfg.problem_name);
  if (!spec && cfg.dataset_path.empty())
    throw ConfigError("config: unknown problem '" + cfg.problem_name +
                      "' and no dataset given");

  int d_x = 0, d_y = 0;
  if (spec) {
    d_x = spec->d_x;
    d_y = spec->d_y;
    if (spec->dataset_backed) {
      if (cfg.dataset_path.empty())
        throw ConfigError("config: problem '" + spec->name + "' needs problem.dataset");
      if (cfg.input_columns.size() != static_cast<std::size_t>(d_x))
        throw ConfigError("config: problem '" + spec->name + "' needs " +
                          std::to_string(d_x) + " input_columns");
      if (cfg.output_columns.size() != static_cast<std::size_t>(d_y))
        throw ConfigError("config: problem '" + spec->name + "' needs " +
                          std::to_string(d_y) + " output_columns");
    } else if (!cfg.dataset_path.empty()) {
      throw ConfigError("config: problem '" + spec->name + "' does not take a dataset");
    }
  } else {
    if (cfg.input_columns.empty() || cfg.output_columns.empty())
      throw ConfigError("config: custom dataset problems need input_columns and output_columns");
    if (cfg.e_star <= 0.0)
      throw ConfigError("config: custom dataset problems need problem.e_star > 0");
    if (cfg.arch.empty())
      throw ConfigError("config: custom dataset problems need problem.arch");
    d_x = static_cast<int>(cfg.input_columns.size());
    d_y = static_cast<int>(cfg.output_columns.size());
  }

  if (cfg.n_0 < 1) throw ConfigError("config: problem.n_0 must be >= 1");
  if (cfg.k < 1) throw ConfigError("config: problem.k must be >= 1");
  if (cfg.n_test < 1) throw ConfigError("config: problem.n_test must be >= 1");
  if (cfg.n_ens < 2) throw ConfigError("config: problem.n_ens must be >= 2");
  if (!(cfg.e_star > 0.0)) throw ConfigError("config: problem.e_star must be > 0");
  if (cfg.arch.size() < 3) throw ConfigError("config: problem.arch needs >= 3 layer widths");
  for (int w : cfg.arch)
    if (w <= 0) throw ConfigError("config: problem.arch widths must be positive");
  if (cfg.arch.front() != d_x)
    throw ConfigError("config: problem.arch must start with d_x = " + std::to_string(d_x));
  if (cfg.arch.back() != d_y)
    throw ConfigError("config: problem.arch must end with d_y = " + std::to_string(d_y));

  const Method method = parse_method(cfg.method);
  if (!method_is_pool_based(method) && cfg.gamma != 0)
    throw ConfigError("config: method '" + cfg.method + "' takes no gamma");
  if (cfg.gamma < 0) throw ConfigError("config: method.gamma must be >= 0");
  if (cfg.bald_passes < 2) throw ConfigError("config: method.bald_passes must be >= 2");
  if (!(cfg.bald_dropout_rate > 0.0 && cfg.bald_dropout_rate < 1.0))
    throw ConfigError("config: method.bald_dropout_rate must lie in (0,1)");

  parse_activation(cfg.activation);
  if (!(cfg.learning_rate > 0.0))
    throw ConfigError("config: training.learning_rate must be > 0");
  if (cfg.max_epochs < 1) throw ConfigError("config: training.max_epochs must be >= 1");
  if (cfg.patience < 1 || cfg.patience > cfg.max_epochs)
    throw ConfigError("config: training.patience must lie in [1, max_epochs]");
  if (cfg.batch_size < 0) throw ConfigError("config: training.batch_size must be >= 0");
  if (!(cfg.lr_drop > 0.0 && cfg.lr_drop <= 1.0))
    throw ConfigError("config: training.lr_drop must lie in (0,1]");
  for (std::size_t i = 0; i < cfg.lr_milestones.size(); ++i) {
    if (cfg.lr_milestones[i] < 0)
      throw ConfigError("config: training.lr_milestones must be >= 0");
    if (i > 0 && cfg.lr_milestones[i] <= cfg.lr_milestones[i - 1])
      throw ConfigError("config: training.lr_milestones must be strictly increasing");
  }

  if (cfg.synthesis_steps < 1) throw ConfigError("config: synthesis.steps must be >= 1");
  if (!(cfg.synthesis_learning_rate > 0.0))
    throw ConfigError("config: synthesis.learning_rate must be > 0");
  if (!(cfg.boundary_strength >= 0.0))
    throw ConfigError("config: synthesis.boundary_strength must be >= 0");

  if (cfg.budget_steps < 1) throw ConfigError("config: harness.budget_steps must be >= 1");
  if (cfg.hits_to_stop < 1) throw ConfigError("config: harness.hits_to_stop must be >= 1");

  if (cfg.sweep_gammas.empty()) throw ConfigError("config: sweep.gammas must be non-empty");
  for (int g : cfg.sweep_gammas)
    if (g < 1) throw ConfigError("config: sweep.gammas entries must be >= 1");
  for (const std::string& m : cfg.sweep_methods) parse_method(m);

  if (cfg.seeds.empty()) throw ConfigError("config: seeds must be non-empty");
  if (cfg.workers < 1) throw ConfigError("config: output.workers must be >= 1");
}

Problem resolve_problem(const RunConfig& cfg) {
  validate_run_config(cfg);
  const ProblemSpec* spec = find_problem_spec(cfg.problem_name);

  Problem problem;
  if (spec && !spec->dataset_backed) {
    problem = make_problem(spec->name);  // throws for simulator-backed names
  } else {
    auto oracle = std::make_shared<DatasetOracle>(
        load_dataset_oracle(cfg.dataset_path, cfg.input_columns, cfg.output_columns));
    if (spec) {
      problem = make_dataset_problem(*spec, std::move(oracle));
    } else {
      problem.name = cfg.problem_name;
      problem.d_x = oracle->d_x();
      problem.d_y = oracle->d_y();
      problem.domain = HyperRectangle::unit_cube(problem.d_x);
      problem.oracle = [oracle](const Eigen::MatrixXd& xs) { return oracle->query_batch(xs); };
    }
  }

  problem.n_0 = cfg.n_0;
  problem.k = cfg.k;
  problem.n_test = cfg.n_test;
  problem.n_ens = cfg.n_ens;
  problem.e_star = cfg.e_star;
  problem.arch = cfg.arch;
  return problem;
}

TrialConfig resolve_trial_config(const RunConfig& cfg) {
  TrialConfig trial;
  trial.budget_steps = cfg.budget_steps;
  trial.hits_to_stop = cfg.hits_to_stop;
  trial.consecutive_hits = cfg.consecutive_hits;
  trial.record_timing = cfg.record_timing;
  trial.activation = parse_activation(cfg.activation);
  trial.train.learning_rate = cfg.learning_rate;
  trial.train.max_epochs = cfg.max_epochs;
  trial.train.patience = cfg.patience;
  trial.train.batch_size = cfg.batch_size;
  trial.train.lr_milestones = cfg.lr_milestones;
  trial.train.lr_drop = cfg.lr_drop;
  trial.synthesis.steps = cfg.synthesis_steps;
  trial.synthesis.learning_rate = cfg.synthesis_learning_rate;
  trial.synthesis.boundary_strength = cfg.boundary_strength;
  trial.bald_passes = cfg.bald_passes;
  trial.bald_dropout_rate = cfg.bald_dropout_rate;
  return trial;
}

}  // namespace naqbc
