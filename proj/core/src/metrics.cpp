#include "naqbc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "naqbc/table_io.hpp"

namespace naqbc {

void EfficiencyTable::add(BurdenEntry entry) {
  if (method_is_pool_based(entry.method)) {
    if (entry.gamma < 1)
      throw ConfigError("efficiency table: pool method entry needs gamma >= 1");
  } else if (entry.gamma != 0) {
    throw ConfigError("efficiency table: gamma given for a method without a pool");
  }
  if (entry.burden && *entry.burden <= 0)
    throw ConfigError("efficiency table: burden must be positive");
  entries.push_back(std::move(entry));
}

void EfficiencyTable::add_run(const ActiveRun& run, int hits_to_stop, bool consecutive) {
  BurdenEntry entry;
  entry.problem = run.problem_name;
  entry.method = run.method;
  entry.gamma = run.gamma;
  entry.seed = run.seed;
  entry.burden = annotation_burden(run, hits_to_stop, consecutive);
  add(std::move(entry));
}

std::vector<std::optional<long>> EfficiencyTable::burdens(const std::string& problem,
                                                          Method method, int gamma) const {
  std::vector<std::optional<long>> out;
  for (const BurdenEntry& e : entries)
    if (e.problem == problem && e.method == method && e.gamma == gamma)
      out.push_back(e.burden);
  return out;
}

std::vector<int> EfficiencyTable::gammas(const std::string& problem, Method method) const {
  std::set<int> seen;
  for (const BurdenEntry& e : entries)
    if (e.problem == problem && e.method == method) seen.insert(e.gamma);
  return {seen.begin(), seen.end()};
}

std::vector<std::string> EfficiencyTable::problems() const {
  std::vector<std::string> out;
  for (const BurdenEntry& e : entries)
    if (std::find(out.begin(), out.end(), e.problem) == out.end()) out.push_back(e.problem);
  return out;
}

double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw UsageError("percentile: empty input");
  if (!(p >= 0.0 && p <= 100.0)) throw UsageError("percentile: p must lie in [0,100]");
  std::sort(values.begin(), values.end());
  const double rank = (p / 100.0) * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(rank);
  const double frac = rank - static_cast<double>(lo);
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] * (1.0 - frac) + values[lo + 1] * frac;
}

EtaSummary efficiency(const std::vector<std::optional<long>>& al_burdens,
                      const std::vector<std::optional<long>>& rand_burdens) {
  EtaSummary summary;
  std::vector<long> al, rand;
  for (const auto& b : al_burdens) {
    if (b)
      al.push_back(*b);
    else
      ++summary.n_al_excluded;
  }
  for (const auto& b : rand_burdens) {
    if (b)
      rand.push_back(*b);
    else
      ++summary.n_rand_excluded;
  }
  if (al.empty() || rand.empty())
    throw UndefinedEtaError("efficiency: no defined burden on the " +
                                std::string(al.empty() ? "AL" : "random") + " side (" +
                                std::to_string(summary.n_al_excluded) + " AL and " +
                                std::to_string(summary.n_rand_excluded) +
                                " random runs excluded)",
                            summary.n_al_excluded, summary.n_rand_excluded);

  summary.etas.reserve(al.size() * rand.size());
  for (long a : al)
    for (long r : rand)
      summary.etas.push_back(static_cast<double>(a) / static_cast<double>(r));

  double sum = 0.0;
  for (double e : summary.etas) sum += e;
  summary.mean = sum / static_cast<double>(summary.etas.size());
  summary.median = percentile(summary.etas, 50.0);
  summary.p25 = percentile(summary.etas, 25.0);
  summary.p75 = percentile(summary.etas, 75.0);
  return summary;
}

SweepSummary gamma_sweep_summary(const EfficiencyTable& table, const std::string& problem,
                                 bool by_median) {
  SweepSummary summary;
  summary.problem = problem;
  const std::vector<std::optional<long>> rand_burdens =
      table.burdens(problem, Method::kRandom, 0);

  for (Method method : all_methods()) {
    std::vector<int> cell_gammas;
    if (method_is_pool_based(method)) {
      cell_gammas = table.gammas(problem, method);
    } else if (!table.burdens(problem, method, 0).empty()) {
      cell_gammas = {0};
    }
    for (int gamma : cell_gammas) {
      CellSummary cell;
      cell.method = method;
      cell.gamma = gamma;
      const auto al = table.burdens(problem, method, gamma);
      cell.n_runs = static_cast<long>(al.size());
      try {
        cell.eta = efficiency(al, rand_burdens);
        cell.defined = true;
      } catch (const UndefinedEtaError& e) {
        cell.eta.n_al_excluded = e.al_excluded;
        cell.eta.n_rand_excluded = e.rand_excluded;
        cell.defined = false;
      }
      summary.cells.push_back(std::move(cell));
    }
  }

  for (const CellSummary& cell : summary.cells) {
    if (!method_is_pool_based(cell.method) || !cell.defined) continue;
    const double score = by_median ? cell.eta.median : cell.eta.mean;
    auto it = summary.gamma_star.find(cell.method);
    if (it == summary.gamma_star.end()) {
      summary.gamma_star[cell.method] = cell.gamma;
      continue;
    }
    double incumbent = 0.0;
    for (const CellSummary& other : summary.cells)
      if (other.method == cell.method && other.gamma == it->second)
        incumbent = by_median ? other.eta.median : other.eta.mean;
    // Cells arrive in ascending gamma, so strict < keeps the smaller gamma
    // on ties.
    if (score < incumbent) it->second = cell.gamma;
  }
  return summary;
}

CrossValResult cross_validate(const EfficiencyTable& table,
                              const std::vector<std::string>& problems, bool by_median) {
  if (problems.size() < 2)
    throw UsageError("cross_validate: need at least 2 problems, got " +
                     std::to_string(problems.size()));

  CrossValResult result;
  result.problems = problems;

  std::map<std::string, SweepSummary> sweeps;
  for (const std::string& p : problems) sweeps.emplace(p, gamma_sweep_summary(table, p, by_median));

  auto cell_mean = [&](const std::string& problem, Method method, int gamma) -> const CellSummary* {
    for (const CellSummary& cell : sweeps.at(problem).cells)
      if (cell.method == method && cell.gamma == gamma) return &cell;
    return nullptr;
  };

  for (Method method : all_methods()) {
    bool present = false;
    for (const std::string& p : problems) {
      for (const CellSummary& cell : sweeps.at(p).cells)
        if (cell.method == method) {
          present = true;
          break;
        }
      if (present) break;
    }
    // Absent everywhere is not a failed transfer, so it leaves no trace.
    if (!present) continue;

    bool any = false;
    std::map<std::string, double> row;
    if (method_is_pool_based(method)) {
      for (const std::string& target : problems) {
        double sum = 0.0;
        long count = 0;
        for (const std::string& source : problems) {
          if (source == target) continue;
          const auto& star = sweeps.at(source).gamma_star;
          auto it = star.find(method);
          if (it == star.end()) {
            result.skipped.push_back("(" + method_name(method) + ", " + source + "->" + target +
                                     "): no gamma* on source");
            continue;
          }
          const CellSummary* cell = cell_mean(target, method, it->second);
          if (!cell || !cell->defined) {
            result.skipped.push_back("(" + method_name(method) + ", " + source + "->" + target +
                                     "): no defined eta at gamma " + std::to_string(it->second) +
                                     " on target");
            continue;
          }
          sum += cell->eta.mean;
          ++count;
        }
        if (count > 0) {
          row[target] = sum / static_cast<double>(count);
          any = true;
        }
      }
    } else {
      for (const std::string& target : problems) {
        const CellSummary* cell = cell_mean(target, method, 0);
        if (cell && cell->defined) {
          row[target] = cell->eta.mean;
          any = true;
        }
      }
    }
    if (any) {
      result.methods.push_back(method);
      result.eta_cv[method] = std::move(row);
    }
  }
  return result;
}

namespace {

std::string gamma_cell(Method method, int gamma) {
  return method_is_pool_based(method) ? std::to_string(gamma) : "/";
}

}  // namespace

void write_burden_table(std::ostream& out, const EfficiencyTable& table) {
  TsvTable t;
  t.header = {"problem", "method", "gamma", "seed", "burden"};
  for (const BurdenEntry& e : table.entries)
    t.rows.push_back({e.problem, method_name(e.method), gamma_cell(e.method, e.gamma),
                      std::to_string(e.seed), e.burden ? std::to_string(*e.burden) : "/"});
  write_tsv(out, t);
}

EfficiencyTable read_burden_table(std::istream& in) {
  const TsvTable t = read_tsv(in);
  const long c_problem = tsv_column(t, "problem");
  const long c_method = tsv_column(t, "method");
  const long c_gamma = tsv_column(t, "gamma");
  const long c_seed = tsv_column(t, "seed");
  const long c_burden = tsv_column(t, "burden");

  EfficiencyTable table;
  for (const auto& row : t.rows) {
    BurdenEntry e;
    e.problem = row[c_problem];
    e.method = parse_method(row[c_method]);
    e.gamma = row[c_gamma] == "/" ? 0 : static_cast<int>(parse_long_field(row[c_gamma], "gamma"));
    e.seed = parse_u64_field(row[c_seed], "seed");
    if (row[c_burden] != "/") e.burden = parse_long_field(row[c_burden], "burden");
    table.add(std::move(e));
  }
  return table;
}

void write_sweep_summary(std::ostream& out, const SweepSummary& summary) {
  TsvTable t;
  t.header = {"method", "gamma", "n_runs", "mean_eta", "median_eta", "p25", "p75", "n_excluded"};
  for (const CellSummary& cell : summary.cells) {
    const long excluded = cell.eta.n_al_excluded + cell.eta.n_rand_excluded;
    if (cell.defined) {
      t.rows.push_back({method_name(cell.method), gamma_cell(cell.method, cell.gamma),
                        std::to_string(cell.n_runs), fmt_g(cell.eta.mean),
                        fmt_g(cell.eta.median), fmt_g(cell.eta.p25), fmt_g(cell.eta.p75),
                        std::to_string(excluded)});
    } else {
      t.rows.push_back({method_name(cell.method), gamma_cell(cell.method, cell.gamma),
                        std::to_string(cell.n_runs), "/", "/", "/", "/",
                        std::to_string(excluded)});
    }
  }
  write_tsv(out, t);
}

void write_eta_list(std::ostream& out, const std::string& problem,
                    const std::vector<CellSummary>& cells) {
  TsvTable t;
  t.header = {"problem", "method", "gamma", "eta"};
  for (const CellSummary& cell : cells) {
    if (!cell.defined) continue;
    for (double eta : cell.eta.etas)
      t.rows.push_back(
          {problem, method_name(cell.method), gamma_cell(cell.method, cell.gamma), fmt_g(eta)});
  }
  write_tsv(out, t);
}

void write_crossval_matrix(std::ostream& out, const CrossValResult& result) {
  TsvTable t;
  t.header = {"method"};
  for (const std::string& p : result.problems) t.header.push_back(p);
  for (Method method : result.methods) {
    std::vector<std::string> row = {method_name(method)};
    const auto& cv = result.eta_cv.at(method);
    for (const std::string& p : result.problems) {
      auto it = cv.find(p);
      row.push_back(it == cv.end() ? "/" : fmt_g(it->second));
    }
    t.rows.push_back(std::move(row));
  }
  write_tsv(out, t);
}

}  // namespace naqbc
