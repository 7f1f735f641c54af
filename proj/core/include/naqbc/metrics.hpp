#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "naqbc/harness.hpp"

namespace naqbc {

struct BurdenEntry {
  std::string problem;
  Method method = Method::kRandom;
  int gamma = 0;  // 0 when the method has no pool
  std::uint64_t seed = 0;
  std::optional<long> burden;  // T-tilde; nullopt = target never reached
};

// Completed burdens keyed by (problem, method, gamma, seed).
struct EfficiencyTable {
  std::vector<BurdenEntry> entries;

  void add(BurdenEntry entry);
  void add_run(const ActiveRun& run, int hits_to_stop = 5, bool consecutive = false);
  std::vector<std::optional<long>> burdens(const std::string& problem, Method method,
                                           int gamma) const;
  std::vector<int> gammas(const std::string& problem, Method method) const;
  std::vector<std::string> problems() const;
};

// p in [0,100]; linear interpolation between order statistics.
double percentile(std::vector<double> values, double p);

struct EtaSummary {
  std::vector<double> etas;  // all |AL| x |rand| defined pairs, AL-major order
  double mean = 0.0;
  double median = 0.0;
  double p25 = 0.0;
  double p75 = 0.0;
  long n_al_excluded = 0;    // "not reached" runs dropped on the AL side
  long n_rand_excluded = 0;  // same on the random side
};

// All-pairs ratios T_al / T_rand over the defined burdens. Throws
// UndefinedEtaError when either side has no defined burden at all.
EtaSummary efficiency(const std::vector<std::optional<long>>& al_burdens,
                      const std::vector<std::optional<long>>& rand_burdens);

struct CellSummary {
  Method method = Method::kRandom;
  int gamma = 0;
  long n_runs = 0;
  EtaSummary eta;
  bool defined = false;  // false when no pair survived exclusion
};

struct SweepSummary {
  std::string problem;
  std::vector<CellSummary> cells;
  // Per pool-based method: the gamma minimizing mean eta (ties -> smaller).
  std::map<Method, int> gamma_star;
};

// Summarizes every (method, gamma) cell present for `problem` against its
// random baseline. `by_median` switches the gamma* criterion to median eta.
SweepSummary gamma_sweep_summary(const EfficiencyTable& table, const std::string& problem,
                                 bool by_median = false);

struct CrossValResult {
  std::vector<std::string> problems;
  std::vector<Method> methods;
  // eta_cv[method][target] = average over source problems != target of that
  // method's mean eta on the target at gamma*(source); methods without a
  // gamma carry their own direct mean eta.
  std::map<Method, std::map<std::string, double>> eta_cv;
  std::vector<std::string> skipped;  // "(method, source->target): why"
};

CrossValResult cross_validate(const EfficiencyTable& table,
                              const std::vector<std::string>& problems,
                              bool by_median = false);

// --- Delimiter-separated persistence (header row, tab separator) ---

// Columns: problem, method, gamma, seed, burden. gamma and burden print "/"
// when absent.
void write_burden_table(std::ostream& out, const EfficiencyTable& table);
EfficiencyTable read_burden_table(std::istream& in);

// Columns: method, gamma, n_runs, mean_eta, median_eta, p25, p75, n_excluded.
void write_sweep_summary(std::ostream& out, const SweepSummary& summary);

// Columns: problem, method, gamma, eta — one row per surviving pair.
void write_eta_list(std::ostream& out, const std::string& problem,
                    const std::vector<CellSummary>& cells);

// Row per method, one column per target problem; "/" for missing values.
void write_crossval_matrix(std::ostream& out, const CrossValResult& result);

}  // namespace naqbc
