#include "naqbc/oracles.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "naqbc/hash.hpp"
#include "naqbc/rng.hpp"

namespace naqbc {

double sine_point(double x) { return x * std::sin(3.0 * std::sin(30.0 * x)); }

Eigen::Vector2d arm_point(const Eigen::Vector4d& x) {
  static const double lengths[3] = {0.5, 0.5, 1.0};
  const double half_pi = std::acos(0.0);
  double y0 = 0.0;
  double y1 = x[0];
  for (int i = 0; i < 3; ++i) {
    y0 += std::cos(half_pi * x[i + 1]) * lengths[i];
    y1 += std::sin(half_pi * x[i + 1]) * lengths[i];
  }
  return {y0, y1};
}

DatasetOracle::DatasetOracle(Eigen::MatrixXd xs_raw, Eigen::MatrixXd ys, int neighbors)
    : ys_(std::move(ys)), neighbors_(neighbors) {
  if (xs_raw.rows() == 0) throw ConfigError("dataset oracle: table is empty");
  if (xs_raw.rows() != ys_.rows())
    throw ShapeError("dataset oracle: input/output row counts differ");
  if (neighbors_ < 1) throw ConfigError("dataset oracle: neighbors must be >= 1");

  raw_min_ = xs_raw.colwise().minCoeff();
  raw_max_ = xs_raw.colwise().maxCoeff();
  for (Eigen::Index d = 0; d < raw_min_.size(); ++d) {
    if (!(raw_max_[d] > raw_min_[d]))
      throw ConfigError("dataset oracle: input column " + std::to_string(d) +
                        " is constant, cannot scale to [-1,1]");
  }
  scaled_xs_.resize(xs_raw.rows(), xs_raw.cols());
  for (Eigen::Index d = 0; d < xs_raw.cols(); ++d)
    scaled_xs_.col(d) =
        2.0 * (xs_raw.col(d).array() - raw_min_[d]) / (raw_max_[d] - raw_min_[d]) - 1.0;
}

Eigen::VectorXd DatasetOracle::query(const Eigen::VectorXd& x_scaled) const {
  if (x_scaled.size() != d_x()) throw ShapeError("dataset oracle: query dimension mismatch");

  const long n = n_rows();
  Eigen::VectorXd dists(n);
  for (long i = 0; i < n; ++i) {
    const Eigen::VectorXd diff = scaled_xs_.row(i).transpose() - x_scaled;
    if ((diff.array() == 0.0).all()) return ys_.row(i);
    dists[i] = diff.norm();
  }

  const long m = std::min<long>(neighbors_, n);
  std::vector<long> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::partial_sort(idx.begin(), idx.begin() + m, idx.end(), [&](long a, long b) {
    if (dists[a] != dists[b]) return dists[a] < dists[b];
    return a < b;
  });

  constexpr double kEps = 1e-9;
  Eigen::VectorXd y = Eigen::VectorXd::Zero(d_y());
  double weight_sum = 0.0;
  for (long j = 0; j < m; ++j) {
    const double w = 1.0 / (kEps + dists[idx[j]]);
    y += w * ys_.row(idx[j]).transpose();
    weight_sum += w;
  }
  return y / weight_sum;
}

Eigen::MatrixXd DatasetOracle::query_batch(const Eigen::MatrixXd& xs_scaled) const {
  Eigen::MatrixXd out(xs_scaled.rows(), d_y());
  for (long i = 0; i < xs_scaled.rows(); ++i)
    out.row(i) = query(xs_scaled.row(i).transpose()).transpose();
  return out;
}

namespace {

std::string lower_copy(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

char detect_delimiter(const std::string& header) {
  if (header.find('\t') != std::string::npos) return '\t';
  if (header.find(',') != std::string::npos) return ',';
  if (header.find(';') != std::string::npos) return ';';
  return '\t';
}

std::vector<std::string> split_line(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, delim)) out.push_back(field);
  if (!line.empty() && line.back() == delim) out.push_back("");
  return out;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_cell(const std::string& raw, long row, const std::string& column) {
  const std::string cell = trim(raw);
  if (cell.empty())
    throw ConfigError("dataset: missing value in row " + std::to_string(row) + ", column " +
                      column);
  std::size_t consumed = 0;
  double value = 0.0;
  try {
    value = std::stod(cell, &consumed);
  } catch (const std::exception&) {
    throw ConfigError("dataset: non-numeric value '" + cell + "' in row " +
                      std::to_string(row) + ", column " + column);
  }
  if (consumed != cell.size())
    throw ConfigError("dataset: non-numeric value '" + cell + "' in row " +
                      std::to_string(row) + ", column " + column);
  return value;
}

}  // namespace

DatasetOracle load_dataset_oracle(const std::string& path,
                                  const std::vector<std::string>& input_columns,
                                  const std::vector<std::string>& output_columns,
                                  int neighbors) {
  if (input_columns.empty() || output_columns.empty())
    throw ConfigError("dataset: input and output column lists must be non-empty");

  std::ifstream file(path);
  if (!file) throw ConfigError("dataset: cannot open '" + path + "'");

  std::string line;
  if (!std::getline(file, line)) throw ConfigError("dataset: '" + path + "' is empty");
  const char delim = detect_delimiter(line);
  std::vector<std::string> header = split_line(line, delim);
  for (std::string& h : header) h = trim(h);

  auto column_index = [&](const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<long>(i);
    throw ConfigError("dataset: column '" + name + "' not found in '" + path + "'");
  };
  std::vector<long> in_idx, out_idx;
  for (const std::string& c : input_columns) in_idx.push_back(column_index(c));
  for (const std::string& c : output_columns) out_idx.push_back(column_index(c));

  std::vector<std::vector<double>> xs, ys;
  long row = 1;
  while (std::getline(file, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_line(line, delim);
    if (cells.size() != header.size())
      throw ConfigError("dataset: row " + std::to_string(row) + " has " +
                        std::to_string(cells.size()) + " fields, expected " +
                        std::to_string(header.size()));
    std::vector<double> x, y;
    for (std::size_t j = 0; j < in_idx.size(); ++j)
      x.push_back(parse_cell(cells[in_idx[j]], row, input_columns[j]));
    for (std::size_t j = 0; j < out_idx.size(); ++j)
      y.push_back(parse_cell(cells[out_idx[j]], row, output_columns[j]));
    xs.push_back(std::move(x));
    ys.push_back(std::move(y));
  }
  if (xs.empty()) throw ConfigError("dataset: '" + path + "' has no data rows");

  Eigen::MatrixXd xm(xs.size(), in_idx.size()), ym(ys.size(), out_idx.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = 0; j < in_idx.size(); ++j) xm(i, j) = xs[i][j];
    for (std::size_t j = 0; j < out_idx.size(); ++j) ym(i, j) = ys[i][j];
  }
  return DatasetOracle(std::move(xm), std::move(ym), neighbors);
}

LabeledSet Problem::label(const Eigen::MatrixXd& xs) const {
  if (!oracle) throw ConfigError("problem '" + name + "': no oracle attached");
  LabeledSet set;
  set.xs = xs;
  set.ys = oracle(xs);
  if (set.ys.rows() != xs.rows() || set.ys.cols() != d_y)
    throw ShapeError("problem '" + name + "': oracle returned wrong shape");
  return set;
}

std::vector<int> ProblemSpec::full_arch() const {
  std::vector<int> widths;
  widths.push_back(d_x);
  for (int l = 0; l < hidden_layers; ++l) widths.push_back(hidden_width);
  widths.push_back(d_y);
  return widths;
}

const std::vector<ProblemSpec>& problem_registry() {
  static const std::vector<ProblemSpec> registry = {
      //    name    d_x  d_y   e_star  hw    hl  ens  n0   k  n_test  sup    data
      {"sine", 1, 1, 1e-3, 20, 9, 10, 80, 40, 4000, true, false},
      {"arm", 4, 2, 5e-5, 500, 4, 10, 80, 40, 4000, true, false},
      {"stack", 5, 201, 3e-5, 700, 9, 10, 80, 40, 4000, false, false},
      {"adm", 14, 2000, 3e-3, 1500, 6, 5, 80, 40, 4000, false, false},
      {"foil", 5, 1, 3e-3, 100, 4, 10, 80, 40, 4000, true, true},
      {"hydr", 6, 1, 7e-3, 100, 4, 10, 80, 40, 4000, true, true},
  };
  return registry;
}

const ProblemSpec* find_problem_spec(const std::string& name) {
  std::string key = lower_copy(name);
  if (key == "robo") key = "arm";
  for (const ProblemSpec& spec : problem_registry())
    if (spec.name == key) return &spec;
  return nullptr;
}

namespace {

Problem problem_from_spec(const ProblemSpec& spec) {
  Problem p;
  p.name = spec.name;
  p.d_x = spec.d_x;
  p.d_y = spec.d_y;
  p.domain = HyperRectangle::unit_cube(spec.d_x);
  p.e_star = spec.e_star;
  p.arch = spec.full_arch();
  p.n_ens = spec.n_ens;
  p.n_0 = spec.n_0;
  p.k = spec.k;
  p.n_test = spec.n_test;
  return p;
}

}  // namespace

Problem make_problem(const std::string& name) {
  const ProblemSpec* spec = find_problem_spec(name);
  if (!spec) throw ConfigError("unknown problem '" + name + "'");
  if (!spec->supported)
    throw UnsupportedOracleError("problem '" + spec->name +
                                 "' needs an external simulator and is not runnable");
  if (spec->dataset_backed)
    throw ConfigError("problem '" + spec->name +
                      "' is dataset-backed; supply a dataset file");

  Problem p = problem_from_spec(*spec);
  if (spec->name == "sine") {
    p.oracle = [](const Eigen::MatrixXd& xs) {
      Eigen::MatrixXd ys(xs.rows(), 1);
      for (long i = 0; i < xs.rows(); ++i) ys(i, 0) = sine_point(xs(i, 0));
      return ys;
    };
  } else {
    p.oracle = [](const Eigen::MatrixXd& xs) {
      Eigen::MatrixXd ys(xs.rows(), 2);
      for (long i = 0; i < xs.rows(); ++i)
        ys.row(i) = arm_point(xs.row(i).transpose()).transpose();
      return ys;
    };
  }
  return p;
}

Problem make_dataset_problem(const ProblemSpec& spec, std::shared_ptr<DatasetOracle> oracle) {
  if (!oracle) throw ConfigError("dataset problem: oracle is null");
  if (oracle->d_x() != spec.d_x || oracle->d_y() != spec.d_y)
    throw ShapeError("dataset problem '" + spec.name + "': oracle shape (" +
                     std::to_string(oracle->d_x()) + "," + std::to_string(oracle->d_y()) +
                     ") does not match registry (" + std::to_string(spec.d_x) + "," +
                     std::to_string(spec.d_y) + ")");
  Problem p = problem_from_spec(spec);
  p.oracle = [oracle](const Eigen::MatrixXd& xs) { return oracle->query_batch(xs); };
  return p;
}

LabeledSet make_test_set(const Problem& problem, std::uint64_t seed) {
  Rng rng(mix64(fnv1a64(problem.name), mix64(seed, seed_tag::kTestSet)));
  const Eigen::MatrixXd xs = problem.domain.sample_rows(problem.n_test, rng);
  return problem.label(xs);
}

}  // namespace naqbc
