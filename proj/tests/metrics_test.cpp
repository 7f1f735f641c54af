#include <doctest.h>

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "naqbc/errors.hpp"
#include "naqbc/harness.hpp"
#include "naqbc/metrics.hpp"

using namespace naqbc;

namespace {

std::vector<std::optional<long>> burdens(std::initializer_list<long> values) {
  std::vector<std::optional<long>> out;
  for (long v : values) out.emplace_back(v);
  return out;
}

void add_entry(EfficiencyTable& table, const std::string& problem, Method method, int gamma,
               std::uint64_t seed, std::optional<long> burden) {
  BurdenEntry e;
  e.problem = problem;
  e.method = method;
  e.gamma = gamma;
  e.seed = seed;
  e.burden = burden;
  table.add(std::move(e));
}

// Random baseline 1000; qbc gamma 2 burdens {800,900}, gamma 8 {700,850}.
EfficiencyTable small_sweep_table() {
  EfficiencyTable table;
  add_entry(table, "toy", Method::kRandom, 0, 0, 1000);
  add_entry(table, "toy", Method::kRandom, 0, 1, 1000);
  add_entry(table, "toy", Method::kQbc, 2, 0, 800);
  add_entry(table, "toy", Method::kQbc, 2, 1, 900);
  add_entry(table, "toy", Method::kQbc, 8, 0, 700);
  add_entry(table, "toy", Method::kQbc, 8, 1, 850);
  return table;
}

const CellSummary* find_cell(const SweepSummary& summary, Method method, int gamma) {
  for (const CellSummary& cell : summary.cells)
    if (cell.method == method && cell.gamma == gamma) return &cell;
  return nullptr;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("a single pair divides AL burden by random burden") {
  const EtaSummary s = efficiency(burdens({800}), burdens({1000}));
  REQUIRE(s.etas.size() == 1);
  CHECK(s.etas[0] == 0.8);
  CHECK(s.mean == 0.8);
  CHECK(s.median == 0.8);
  CHECK(s.p25 == 0.8);
  CHECK(s.p75 == 0.8);
  CHECK(s.n_al_excluded == 0);
  CHECK(s.n_rand_excluded == 0);
}

TEST_CASE("all pairs are formed in AL-major order") {
  const EtaSummary s = efficiency(burdens({800, 1200}), burdens({1000, 2000}));
  REQUIRE(s.etas.size() == 4);
  CHECK(s.etas == std::vector<double>({0.8, 0.4, 1.2, 0.6}));
  CHECK(s.mean == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("balanced burdens around the baseline average to one") {
  const EtaSummary s = efficiency(burdens({900, 1100}), burdens({1000}));
  CHECK(s.mean == doctest::Approx(1.0).epsilon(1e-12));
  const EtaSummary same = efficiency(burdens({640, 640}), burdens({640, 640}));
  for (double e : same.etas) CHECK(e == 1.0);
}

TEST_CASE("eta is scale-free under a consistent burden rescaling") {
  const EtaSummary a = efficiency(burdens({840, 920}), burdens({1000, 1160}));
  const EtaSummary b = efficiency(burdens({1680, 1840}), burdens({2000, 2320}));
  CHECK(a.etas == b.etas);
  CHECK(a.mean == b.mean);
}

TEST_CASE("unfinished runs are excluded and counted per side") {
  std::vector<std::optional<long>> al = {800, std::nullopt, 900};
  std::vector<std::optional<long>> rand = {std::nullopt, 1000};
  const EtaSummary s = efficiency(al, rand);
  CHECK(s.etas == std::vector<double>({0.8, 0.9}));
  CHECK(s.n_al_excluded == 1);
  CHECK(s.n_rand_excluded == 1);
}

TEST_CASE("a side with no finished run leaves eta undefined") {
  std::vector<std::optional<long>> none = {std::nullopt, std::nullopt};
  try {
    efficiency(none, burdens({1000}));
    FAIL("expected UndefinedEtaError");
  } catch (const UndefinedEtaError& e) {
    CHECK(e.al_excluded == 2);
    CHECK(e.rand_excluded == 0);
    CHECK(std::string(e.what()).find("AL") != std::string::npos);
  }
  try {
    efficiency(burdens({500}), none);
    FAIL("expected UndefinedEtaError");
  } catch (const UndefinedEtaError& e) {
    CHECK(e.al_excluded == 0);
    CHECK(e.rand_excluded == 2);
  }
  CHECK_THROWS_AS(efficiency({}, {}), UndefinedEtaError);
}

TEST_CASE("percentile interpolates between order statistics") {
  std::vector<double> v = {3, 1, 4, 2};  // sorted inside
  CHECK(percentile(v, 0) == 1.0);
  CHECK(percentile(v, 100) == 4.0);
  CHECK(percentile(v, 50) == 2.5);
  CHECK(percentile(v, 25) == 1.75);
  CHECK(percentile(v, 75) == 3.25);
  CHECK(percentile({7.0}, 50) == 7.0);
  CHECK_THROWS_AS(percentile({}, 50), UsageError);
  CHECK_THROWS_AS(percentile({1.0}, 101), UsageError);
  CHECK_THROWS_AS(percentile({1.0}, -1), UsageError);
}

TEST_CASE("the table validates gamma pairing and burden sign") {
  EfficiencyTable table;
  CHECK_THROWS_AS(add_entry(table, "toy", Method::kQbc, 0, 0, 500), ConfigError);
  CHECK_THROWS_AS(add_entry(table, "toy", Method::kRandom, 2, 0, 500), ConfigError);
  CHECK_THROWS_AS(add_entry(table, "toy", Method::kNaQbc, 1, 0, 500), ConfigError);
  CHECK_THROWS_AS(add_entry(table, "toy", Method::kQbc, 2, 0, 0), ConfigError);
  CHECK_THROWS_AS(add_entry(table, "toy", Method::kQbc, 2, 0, -5), ConfigError);
  CHECK(table.entries.empty());
}

TEST_CASE("the table filters burdens and lists gammas and problems") {
  EfficiencyTable table = small_sweep_table();
  add_entry(table, "toy", Method::kQbc, 2, 2, std::nullopt);
  add_entry(table, "other", Method::kNaQbc, 0, 0, 440);

  const auto qbc2 = table.burdens("toy", Method::kQbc, 2);
  REQUIRE(qbc2.size() == 3);
  CHECK(*qbc2[0] == 800);
  CHECK(*qbc2[1] == 900);
  CHECK(!qbc2[2].has_value());

  CHECK(table.gammas("toy", Method::kQbc) == std::vector<int>({2, 8}));
  CHECK(table.gammas("toy", Method::kRandom) == std::vector<int>({0}));
  CHECK(table.gammas("other", Method::kQbc).empty());
  CHECK(table.problems() == std::vector<std::string>({"toy", "other"}));
}

TEST_CASE("add_run recomputes the burden from the step log") {
  ActiveRun run;
  run.run_id = "toy_qbc_g2_s5";
  run.problem_name = "toy";
  run.method = Method::kQbc;
  run.gamma = 2;
  run.seed = 5;
  run.status = RunStatus::kStoppedAtTarget;
  for (int step = 0; step < 5; ++step) {
    StepRecord r;
    r.step_index = step;
    r.train_size = 80 + 40L * step;
    r.hit_flag = true;
    r.cumulative_hits = step + 1;
    run.step_log.push_back(r);
  }
  EfficiencyTable table;
  table.add_run(run, 5, false);
  REQUIRE(table.entries.size() == 1);
  CHECK(table.entries[0].burden == 80 + 40 * 4);
  CHECK(table.entries[0].seed == 5);

  run.status = RunStatus::kExhaustedBudget;
  table.add_run(run, 5, false);
  CHECK(!table.entries[1].burden.has_value());
}

TEST_CASE("gamma sweep summarizes each cell against the random baseline") {
  const SweepSummary summary = gamma_sweep_summary(small_sweep_table(), "toy");

  const CellSummary* rand = find_cell(summary, Method::kRandom, 0);
  REQUIRE(rand != nullptr);
  CHECK(rand->defined);
  CHECK(rand->eta.mean == 1.0);

  const CellSummary* qbc2 = find_cell(summary, Method::kQbc, 2);
  REQUIRE(qbc2 != nullptr);
  CHECK(qbc2->n_runs == 2);
  CHECK(qbc2->eta.etas == std::vector<double>({0.8, 0.8, 0.9, 0.9}));
  CHECK(qbc2->eta.mean == doctest::Approx(0.85).epsilon(1e-12));

  const CellSummary* qbc8 = find_cell(summary, Method::kQbc, 8);
  REQUIRE(qbc8 != nullptr);
  CHECK(qbc8->eta.mean == doctest::Approx(0.775).epsilon(1e-12));

  REQUIRE(summary.gamma_star.count(Method::kQbc) == 1);
  CHECK(summary.gamma_star.at(Method::kQbc) == 8);
  CHECK(summary.gamma_star.count(Method::kRandom) == 0);
}

TEST_CASE("gamma* ties resolve to the smaller gamma") {
  EfficiencyTable table;
  add_entry(table, "toy", Method::kRandom, 0, 0, 1000);
  add_entry(table, "toy", Method::kQbc, 2, 0, 800);
  add_entry(table, "toy", Method::kQbc, 4, 0, 800);
  const SweepSummary summary = gamma_sweep_summary(table, "toy");
  CHECK(summary.gamma_star.at(Method::kQbc) == 2);
}

TEST_CASE("gamma* can rank by median instead of mean") {
  EfficiencyTable table;
  add_entry(table, "toy", Method::kRandom, 0, 0, 1000);
  // gamma 2: etas {0.5, 0.9, 1.0} -> mean 0.8, median 0.9
  add_entry(table, "toy", Method::kQbc, 2, 0, 500);
  add_entry(table, "toy", Method::kQbc, 2, 1, 900);
  add_entry(table, "toy", Method::kQbc, 2, 2, 1000);
  // gamma 4: eta {0.85} -> mean 0.85, median 0.85
  add_entry(table, "toy", Method::kQbc, 4, 0, 850);
  CHECK(gamma_sweep_summary(table, "toy", false).gamma_star.at(Method::kQbc) == 2);
  CHECK(gamma_sweep_summary(table, "toy", true).gamma_star.at(Method::kQbc) == 4);
}

TEST_CASE("cells with no surviving pair are marked undefined") {
  EfficiencyTable table;
  add_entry(table, "toy", Method::kRandom, 0, 0, 1000);
  add_entry(table, "toy", Method::kQbc, 2, 0, std::nullopt);
  add_entry(table, "toy", Method::kQbc, 2, 1, std::nullopt);
  const SweepSummary summary = gamma_sweep_summary(table, "toy");
  const CellSummary* cell = find_cell(summary, Method::kQbc, 2);
  REQUIRE(cell != nullptr);
  CHECK(!cell->defined);
  CHECK(cell->n_runs == 2);
  CHECK(cell->eta.n_al_excluded == 2);
  CHECK(summary.gamma_star.count(Method::kQbc) == 0);
}

TEST_CASE("without a random baseline every cell is undefined") {
  EfficiencyTable table;
  add_entry(table, "toy", Method::kQbc, 2, 0, 800);
  const SweepSummary summary = gamma_sweep_summary(table, "toy");
  const CellSummary* cell = find_cell(summary, Method::kQbc, 2);
  REQUIRE(cell != nullptr);
  CHECK(!cell->defined);
  CHECK(summary.gamma_star.empty());
}

TEST_CASE("three-problem cross-validation transfers gamma* between problems") {
  EfficiencyTable table;
  // a: qbc gamma2 -> 0.8, gamma8 -> 0.6 (gamma* 8)
  add_entry(table, "a", Method::kRandom, 0, 0, 1000);
  add_entry(table, "a", Method::kQbc, 2, 0, 800);
  add_entry(table, "a", Method::kQbc, 8, 0, 600);
  // b: qbc gamma2 -> 0.7, gamma8 -> 0.9 (gamma* 2)
  add_entry(table, "b", Method::kRandom, 0, 0, 1000);
  add_entry(table, "b", Method::kQbc, 2, 0, 700);
  add_entry(table, "b", Method::kQbc, 8, 0, 900);
  // c: qbc gamma2 -> 0.5, gamma8 -> 1.0 (gamma* 2)
  add_entry(table, "c", Method::kRandom, 0, 0, 1000);
  add_entry(table, "c", Method::kQbc, 2, 0, 500);
  add_entry(table, "c", Method::kQbc, 8, 0, 1000);

  const CrossValResult cv = cross_validate(table, {"a", "b", "c"});
  CHECK(cv.problems == std::vector<std::string>({"a", "b", "c"}));
  REQUIRE(cv.eta_cv.count(Method::kQbc) == 1);
  const auto& qbc = cv.eta_cv.at(Method::kQbc);
  // target a: sources b,c both carry gamma*=2 -> eta(a, gamma2)=0.8 twice
  CHECK(qbc.at("a") == doctest::Approx(0.8).epsilon(1e-12));
  // target b: source a brings gamma 8 (0.9), source c brings gamma 2 (0.7)
  CHECK(qbc.at("b") == doctest::Approx(0.8).epsilon(1e-12));
  // target c: source a brings gamma 8 (1.0), source b brings gamma 2 (0.5)
  CHECK(qbc.at("c") == doctest::Approx(0.75).epsilon(1e-12));

  // The baseline itself transfers nothing: direct mean eta per target.
  REQUIRE(cv.eta_cv.count(Method::kRandom) == 1);
  for (const char* p : {"a", "b", "c"})
    CHECK(cv.eta_cv.at(Method::kRandom).at(p) == 1.0);
  CHECK(cv.skipped.empty());
}

TEST_CASE("cross-validation records skipped transfers") {
  EfficiencyTable table;
  add_entry(table, "a", Method::kRandom, 0, 0, 1000);
  add_entry(table, "b", Method::kRandom, 0, 0, 1000);
  // div_qbc exists only on problem a.
  add_entry(table, "a", Method::kDivQbc, 2, 0, 900);

  const CrossValResult cv = cross_validate(table, {"a", "b"});
  CHECK(cv.eta_cv.count(Method::kDivQbc) == 0);
  REQUIRE(!cv.skipped.empty());
  bool mentions_div = false;
  for (const std::string& s : cv.skipped)
    if (s.find("div_qbc") != std::string::npos) mentions_div = true;
  CHECK(mentions_div);

  CHECK_THROWS_AS(cross_validate(table, {"a"}), UsageError);
}

TEST_CASE("burden tables round-trip through their text form") {
  EfficiencyTable table = small_sweep_table();
  add_entry(table, "toy", Method::kNaQbc, 0, 3, std::nullopt);

  std::ostringstream out;
  write_burden_table(out, table);
  std::istringstream in(out.str());
  const EfficiencyTable back = read_burden_table(in);

  REQUIRE(back.entries.size() == table.entries.size());
  for (std::size_t i = 0; i < table.entries.size(); ++i) {
    CHECK(back.entries[i].problem == table.entries[i].problem);
    CHECK(back.entries[i].method == table.entries[i].method);
    CHECK(back.entries[i].gamma == table.entries[i].gamma);
    CHECK(back.entries[i].seed == table.entries[i].seed);
    CHECK(back.entries[i].burden == table.entries[i].burden);
  }

  std::ostringstream again;
  write_burden_table(again, back);
  CHECK(again.str() == out.str());
}

TEST_CASE("burden rows print slash for missing gamma and burden") {
  EfficiencyTable table;
  add_entry(table, "toy", Method::kNaQbc, 0, 7, std::nullopt);
  std::ostringstream out;
  write_burden_table(out, table);
  CHECK(out.str() ==
        "problem\tmethod\tgamma\tseed\tburden\n"
        "toy\tna_qbc\t/\t7\t/\n");
}

TEST_CASE("sweep summaries print fixed columns with slashes for undefined cells") {
  EfficiencyTable table = small_sweep_table();
  add_entry(table, "toy", Method::kDivQbc, 4, 0, std::nullopt);
  const SweepSummary summary = gamma_sweep_summary(table, "toy");
  std::ostringstream out;
  write_sweep_summary(out, summary);
  CHECK(out.str() ==
        "method\tgamma\tn_runs\tmean_eta\tmedian_eta\tp25\tp75\tn_excluded\n"
        "random\t/\t2\t1\t1\t1\t1\t0\n"
        "qbc\t2\t2\t0.85\t0.85\t0.8\t0.9\t0\n"
        "qbc\t8\t2\t0.775\t0.775\t0.7\t0.85\t0\n"
        "div_qbc\t4\t1\t/\t/\t/\t/\t1\n");
}

TEST_CASE("eta lists expand every surviving pair") {
  const SweepSummary summary = gamma_sweep_summary(small_sweep_table(), "toy");
  std::ostringstream out;
  write_eta_list(out, "toy", summary.cells);
  const std::string text = out.str();
  CHECK(text.find("problem\tmethod\tgamma\teta\n") == 0);
  CHECK(text.find("toy\tqbc\t2\t0.8\n") != std::string::npos);
  CHECK(text.find("toy\tqbc\t8\t0.7\n") != std::string::npos);
  // 4 random self-pairs + 4 + 4 qbc pairs + header
  long lines = 0;
  for (char c : text)
    if (c == '\n') ++lines;
  CHECK(lines == 13);
}

TEST_CASE("the cross-validation matrix prints methods by row") {
  EfficiencyTable table;
  add_entry(table, "a", Method::kRandom, 0, 0, 1000);
  add_entry(table, "b", Method::kRandom, 0, 0, 1000);
  add_entry(table, "a", Method::kQbc, 2, 0, 800);
  add_entry(table, "b", Method::kQbc, 2, 0, 600);
  const CrossValResult cv = cross_validate(table, {"a", "b"});
  std::ostringstream out;
  write_crossval_matrix(out, cv);
  CHECK(out.str() ==
        "method\ta\tb\n"
        "random\t1\t1\n"
        "qbc\t0.8\t0.6\n");
}

}  // TEST_SUITE
