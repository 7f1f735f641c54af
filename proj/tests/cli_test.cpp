#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "naqbc/config.hpp"
#include "naqbc/manifest.hpp"
#include "naqbc/plot.hpp"
#include "naqbc/table_io.hpp"
#include "naqbc/version.hpp"

using namespace naqbc;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  out << content;
}

CliResult run_cli(const std::string& args, const std::string& env_prefix = "") {
  static int counter = 0;
  const std::string out_path = "cli_stdout_" + std::to_string(counter) + ".txt";
  const std::string err_path = "cli_stderr_" + std::to_string(counter) + ".txt";
  ++counter;
  const std::string command = env_prefix + (env_prefix.empty() ? "" : " ") + NAQBC_CLI_PATH +
                              " " + args + " > " + out_path + " 2> " + err_path;
  const int status = std::system(command.c_str());
  CliResult r;
  r.exit_code = WEXITSTATUS(status);
  r.out = read_file(out_path);
  r.err = read_file(err_path);
  std::remove(out_path.c_str());
  std::remove(err_path.c_str());
  return r;
}

// Fresh scratch directory relative to the test working directory.
struct ScratchDir {
  fs::path path;
  explicit ScratchDir(const std::string& name) : path(name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~ScratchDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

// Small sine problem that stops at step 0: the target is trivially met and a
// single hit suffices, so every trial records burden n_0 = 6.
const char* kInstantConfig = R"({
  "problem": {"name": "sine", "n_0": 6, "k": 3, "n_test": 50, "n_ens": 2,
              "arch": [1, 8, 1], "e_star": 1000000.0},
  "method": {"name": "qbc", "gamma": 2},
  "training": {"max_epochs": 30, "patience": 10, "learning_rate": 0.01},
  "harness": {"budget_steps": 2, "hits_to_stop": 1},
  "seeds": [0]
})";

// Unreachable target: runs the full 2-step budget, then exhausts.
const char* kExhaustConfig = R"({
  "problem": {"name": "sine", "n_0": 6, "k": 3, "n_test": 50, "n_ens": 2,
              "arch": [1, 8, 1], "e_star": 1e-09},
  "method": {"name": "qbc", "gamma": 2},
  "training": {"max_epochs": 25, "patience": 25, "learning_rate": 0.01},
  "harness": {"budget_steps": 2},
  "seeds": [4]
})";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("version flag") {
  const CliResult r = run_cli("--version");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find(kVersion) != std::string::npos);
}

TEST_CASE("validate-config accepts, prints, and rejects") {
  const ScratchDir dir("cli_validate");
  write_file(dir.file("good.json"), kInstantConfig);

  CliResult ok = run_cli("validate-config --config " + dir.file("good.json"));
  CHECK(ok.exit_code == 0);
  CHECK(ok.out == "config ok\n");

  CliResult printed = run_cli("validate-config --config " + dir.file("good.json") + " --print");
  CHECK(printed.exit_code == 0);
  CHECK(printed.out == serialize_run_config(load_run_config(dir.file("good.json"))));

  write_file(dir.file("bad.json"), R"({"problem":{"n0":6}})");
  CliResult bad = run_cli("validate-config --config " + dir.file("bad.json"));
  CHECK(bad.exit_code == 2);
  CHECK(bad.err.find("unknown key 'problem.n0'") != std::string::npos);

  CliResult missing = run_cli("validate-config --config " + dir.file("absent.json"));
  CHECK(missing.exit_code == 2);
  CHECK(missing.err.find("cannot open") != std::string::npos);
}

TEST_CASE("run writes step logs, the burden table, and a checksummed manifest") {
  const ScratchDir dir("cli_run");
  write_file(dir.file("cfg.json"), kInstantConfig);
  const std::string out = dir.file("out");

  const CliResult r =
      run_cli("run --config " + dir.file("cfg.json") + " --out " + out);
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("sine_qbc_g2_s0\tstopped_at_target\tburden=6") != std::string::npos);

  CHECK(read_file(out + "/burdens.tsv") ==
        "problem\tmethod\tgamma\tseed\tburden\n"
        "sine\tqbc\t2\t0\t6\n");

  const std::string log = read_file(out + "/sine_qbc_g2_s0_steps.tsv");
  CHECK(log.rfind("run_id\tstep\ttrain_size\ttest_mse\thit\tcumulative_hits\tseconds\n", 0) == 0);
  CHECK(log.find("sine_qbc_g2_s0\t0\t6\t") != std::string::npos);

  const RunManifest manifest = read_manifest(out + "/manifest.json");
  CHECK(manifest.version == kVersion);
  CHECK(manifest.command == "run");
  CHECK(manifest.seeds == std::vector<std::uint64_t>{0});
  REQUIRE(manifest.trials.size() == 1);
  CHECK(manifest.trials[0].run_id == "sine_qbc_g2_s0");
  CHECK(manifest.trials[0].status == "stopped_at_target");
  CHECK(manifest.trials[0].burden == 6);
  for (const char* name : {"sine_qbc_g2_s0_steps.tsv", "burdens.tsv"}) {
    REQUIRE(manifest.checksums.count(name) == 1);
    CHECK(manifest.checksums.at(name) == checksum_file(out + "/" + name));
  }
}

TEST_CASE("pool methods demand a gamma") {
  const ScratchDir dir("cli_nogamma");
  write_file(dir.file("cfg.json"),
             R"({"problem":{"name":"sine","n_0":6,"k":3,"n_test":50,"n_ens":2,
                 "arch":[1,8,1]},"method":{"name":"qbc"}})");
  const CliResult r =
      run_cli("run --config " + dir.file("cfg.json") + " --out " + dir.file("out"));
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("needs --gamma >= 1") != std::string::npos);
}

TEST_CASE("unknown problems exit with a usage error") {
  const CliResult r = run_cli("run --problem nope --method random --out cli_nope_out");
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("unknown problem 'nope'") != std::string::npos);
  CHECK_FALSE(fs::exists("cli_nope_out"));
}

TEST_CASE("diverging trials exit 1 and are marked failed in the manifest") {
  const ScratchDir dir("cli_fail");
  write_file(dir.file("cfg.json"), R"({
    "problem": {"name": "sine", "n_0": 6, "k": 3, "n_test": 50, "n_ens": 2,
                "arch": [1, 8, 1], "e_star": 1e-09},
    "method": {"name": "qbc", "gamma": 2},
    "training": {"activation": "tanh", "learning_rate": 1e160,
                 "max_epochs": 5, "patience": 5},
    "harness": {"budget_steps": 2},
    "seeds": [0]
  })");
  const std::string out = dir.file("out");
  const CliResult r = run_cli("run --config " + dir.file("cfg.json") + " --out " + out);
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("failed trials: sine_qbc_g2_s0") != std::string::npos);
  CHECK(r.out.find("sine_qbc_g2_s0\tfailed") != std::string::npos);

  const RunManifest manifest = read_manifest(out + "/manifest.json");
  REQUIRE(manifest.trials.size() == 1);
  CHECK(manifest.trials[0].status == "failed");
  CHECK(manifest.trials[0].burden == -1);
  // The harness swallows the divergence and still logs the step it died on.
  CHECK(read_file(out + "/sine_qbc_g2_s0_steps.tsv").find("nan") != std::string::npos);
}

TEST_CASE("rerunning from a manifest reproduces artifacts byte for byte") {
  const ScratchDir dir("cli_rerun");
  write_file(dir.file("cfg.json"), kExhaustConfig);
  const std::string first = dir.file("first");
  const std::string second = dir.file("second");

  CHECK(run_cli("run --config " + dir.file("cfg.json") + " --out " + first).exit_code == 0);
  CHECK(run_cli("run --manifest " + first + "/manifest.json --out " + second).exit_code == 0);

  const std::string log = "/sine_qbc_g2_s4_steps.tsv";
  CHECK(read_file(first + log) == read_file(second + log));
  CHECK(read_file(first + log).find("\t0.000\n") != std::string::npos);
  CHECK(read_file(first + "/burdens.tsv") == read_file(second + "/burdens.tsv"));
}

TEST_CASE("sweep emits the grid, summaries, and the eta plot") {
  const ScratchDir dir("cli_sweep");
  write_file(dir.file("cfg.json"), R"({
    "problem": {"name": "sine", "n_0": 6, "k": 3, "n_test": 50, "n_ens": 2,
                "arch": [1, 8, 1], "e_star": 1000000.0},
    "training": {"max_epochs": 30, "patience": 10, "learning_rate": 0.01},
    "harness": {"budget_steps": 2, "hits_to_stop": 1},
    "sweep": {"methods": ["qbc"], "gammas": [2, 4]},
    "seeds": [0, 1]
  })");
  const std::string out = dir.file("out");
  const CliResult r = run_cli("sweep --config " + dir.file("cfg.json") + " --out " + out);
  CHECK(r.exit_code == 0);
  // Every trial stops at n_0, so both gammas tie at eta 1 and the smaller wins.
  CHECK(r.out.find("gamma*(qbc, sine) = 2") != std::string::npos);

  for (const char* name :
       {"sine_random_s0_steps.tsv", "sine_random_s1_steps.tsv", "sine_qbc_g2_s0_steps.tsv",
        "sine_qbc_g2_s1_steps.tsv", "sine_qbc_g4_s0_steps.tsv", "sine_qbc_g4_s1_steps.tsv",
        "burdens.tsv", "summary_sine.tsv", "eta_sine.tsv", "eta_vs_gamma_sine.svg",
        "manifest.json"})
    CHECK(fs::exists(out + "/" + name));

  const RunManifest manifest = read_manifest(out + "/manifest.json");
  CHECK(manifest.command == "sweep");
  CHECK(manifest.trials.size() == 6);
  CHECK(manifest.checksums.at("eta_vs_gamma_sine.svg") ==
        checksum_file(out + "/eta_vs_gamma_sine.svg"));

  const std::string summary = read_file(out + "/summary_sine.tsv");
  CHECK(summary.rfind("method\tgamma\tn_runs\tmean_eta\tmedian_eta\tp25\tp75\tn_excluded\n",
                      0) == 0);
  CHECK(summary.find("qbc\t2\t2\t1\t1\t1\t1\t0\n") != std::string::npos);
}

TEST_CASE("crossval merges burden tables and writes the matrix") {
  const ScratchDir dir("cli_crossval");
  write_file(dir.file("a.tsv"),
             "problem\tmethod\tgamma\tseed\tburden\n"
             "a\trandom\t/\t0\t1000\n"
             "a\tqbc\t2\t0\t800\n");
  write_file(dir.file("b.tsv"),
             "problem\tmethod\tgamma\tseed\tburden\n"
             "b\trandom\t/\t0\t500\n"
             "b\tqbc\t2\t0\t300\n");
  const std::string out = dir.file("out");
  const CliResult r = run_cli("crossval --tables " + dir.file("a.tsv") + " " +
                              dir.file("b.tsv") + " --out " + out);
  CHECK(r.exit_code == 0);
  CHECK(read_file(out + "/crossval.tsv") ==
        "method\ta\tb\n"
        "random\t1\t1\n"
        "qbc\t0.8\t0.6\n");
  CHECK(fs::exists(out + "/crossval.svg"));
  CHECK(read_manifest(out + "/manifest.json").command == "crossval");

  const CliResult single =
      run_cli("crossval --tables " + dir.file("a.tsv") + " --out " + dir.file("out2"));
  CHECK(single.exit_code == 2);
  CHECK(single.err.find(">= 2 problems, found 1") != std::string::npos);
}

TEST_CASE("plot renders emitted tables exactly like the library") {
  const ScratchDir dir("cli_plot");
  write_file(dir.file("cfg.json"), kExhaustConfig);
  const std::string out = dir.file("out");
  CHECK(run_cli("run --config " + dir.file("cfg.json") + " --out " + out).exit_code == 0);

  const std::string steps = out + "/sine_qbc_g2_s4_steps.tsv";
  const CliResult r = run_cli("plot --kind mse_vs_trainsize --in " + steps + " --out-file " +
                              out + "/curve.svg --smoothing 0.3 --title learning");
  CHECK(r.exit_code == 0);
  CHECK(r.out == "wrote " + out + "/curve.svg\n");

  // Rebuild the same series through the library and compare bytes.
  std::ifstream file(steps);
  const TsvTable tsv = read_tsv(file);
  PlotSeries s;
  s.label = "sine_qbc_g2_s4";
  const long c_size = tsv_column(tsv, "train_size");
  const long c_mse = tsv_column(tsv, "test_mse");
  for (const auto& row : tsv.rows) {
    s.xs.push_back(parse_double_field(row[c_size], "train_size"));
    s.ys.push_back(parse_double_field(row[c_mse], "test_mse"));
  }
  PlotOptions options;
  options.title = "learning";
  options.x_label = "training set size";
  options.y_label = "test MSE";
  options.smoothing = 0.3;
  CHECK(read_file(out + "/curve.svg") ==
        render_plot(PlotKind::kMseVsTrainsize, {s}, options));

  const CliResult bad = run_cli("plot --kind pie --in " + steps + " --out-file x.svg");
  CHECK(bad.exit_code == 2);
  CHECK(bad.err.find("unknown kind 'pie'") != std::string::npos);
}

TEST_CASE("the output directory falls back to NAQBC_OUT") {
  const ScratchDir dir("cli_env");
  write_file(dir.file("cfg.json"), kInstantConfig);
  const std::string envdir = dir.file("from_env");

  CliResult r = run_cli("run --config " + dir.file("cfg.json"), "NAQBC_OUT=" + envdir);
  CHECK(r.exit_code == 0);
  CHECK(fs::exists(envdir + "/manifest.json"));

  // An explicit --out wins over the environment.
  const std::string unused = dir.file("unused_env");
  r = run_cli("run --config " + dir.file("cfg.json") + " --out " + dir.file("explicit"),
              "NAQBC_OUT=" + unused);
  CHECK(r.exit_code == 0);
  CHECK(fs::exists(dir.file("explicit") + "/manifest.json"));
  CHECK_FALSE(fs::exists(unused));
}

TEST_CASE("seed lists accept ranges and reject reversed ones") {
  const ScratchDir dir("cli_seeds");
  write_file(dir.file("cfg.json"), kInstantConfig);
  const std::string out = dir.file("out");
  const CliResult r = run_cli("run --config " + dir.file("cfg.json") +
                              " --seeds 0..2,7 --out " + out);
  CHECK(r.exit_code == 0);
  const RunManifest manifest = read_manifest(out + "/manifest.json");
  CHECK(manifest.seeds == std::vector<std::uint64_t>{0, 1, 2, 7});
  CHECK(manifest.trials.size() == 4);
  CHECK(manifest.trials[3].run_id == "sine_qbc_g2_s7");

  const CliResult reversed = run_cli("run --config " + dir.file("cfg.json") +
                                     " --seeds 3..1 --out " + out);
  CHECK(reversed.exit_code == 2);
  CHECK(reversed.err.find("range '3..1' is reversed") != std::string::npos);
}

}  // TEST_SUITE
