#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "naqbc/dataset.hpp"
#include "naqbc/domain.hpp"
#include "naqbc/errors.hpp"

namespace naqbc {

// y = x * sin(3 * sin(30 x)) on [-1, 1].
double sine_point(double x);

// Planar three-segment arm with link lengths [0.5, 0.5, 1]; x_0 is a base
// offset and x_1..x_3 are joint angles in units of quarter turns.
// y_0 = sum cos((pi/2) x_i) l_i, y_1 = x_0 + sum sin((pi/2) x_i) l_i.
Eigen::Vector2d arm_point(const Eigen::Vector4d& x);

// Interpolating oracle over a fixed table. Raw inputs are affinely mapped so
// each dimension's observed min/max land on -1/+1; queries arrive in that
// scaled space. Labels are inverse-distance-weighted averages of the nearest
// `neighbors` rows (weights 1/(eps + dist), eps = 1e-9); an exact hit on a
// table row returns that row's y unchanged.
class DatasetOracle {
 public:
  DatasetOracle(Eigen::MatrixXd xs_raw, Eigen::MatrixXd ys, int neighbors = 5);

  int d_x() const { return static_cast<int>(scaled_xs_.cols()); }
  int d_y() const { return static_cast<int>(ys_.cols()); }
  long n_rows() const { return scaled_xs_.rows(); }
  int neighbors() const { return neighbors_; }
  const Eigen::MatrixXd& scaled_xs() const { return scaled_xs_; }
  const Eigen::MatrixXd& ys() const { return ys_; }

  Eigen::VectorXd query(const Eigen::VectorXd& x_scaled) const;
  Eigen::MatrixXd query_batch(const Eigen::MatrixXd& xs_scaled) const;

 private:
  Eigen::MatrixXd scaled_xs_;
  Eigen::MatrixXd ys_;
  Eigen::VectorXd raw_min_, raw_max_;
  int neighbors_;
};

// Reads a delimiter-separated file (tab, comma, or semicolon; header row
// required), picks the named input/output columns, and builds an oracle.
// Missing or non-numeric cells are rejected.
DatasetOracle load_dataset_oracle(const std::string& path,
                                  const std::vector<std::string>& input_columns,
                                  const std::vector<std::string>& output_columns,
                                  int neighbors = 5);

using BatchOracle = std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)>;

struct Problem {
  std::string name;
  int d_x = 0;
  int d_y = 0;
  HyperRectangle domain{Eigen::VectorXd::Constant(1, -1.0),
                        Eigen::VectorXd::Constant(1, 1.0)};
  BatchOracle oracle;
  double e_star = 0.0;
  std::vector<int> arch;  // full layer widths, input and output included
  int n_ens = 10;
  int n_0 = 80;
  int k = 40;
  int n_test = 4000;

  LabeledSet label(const Eigen::MatrixXd& xs) const;
};

// Registry constants for the built-in benchmark problems. `supported` is
// false for problems whose labeling backend (an external simulator) is out
// of scope; their constants still parse in configs.
struct ProblemSpec {
  std::string name;
  int d_x;
  int d_y;
  double e_star;
  int hidden_width;
  int hidden_layers;
  int n_ens;
  int n_0;
  int k;
  int n_test;
  bool supported;
  bool dataset_backed;

  std::vector<int> full_arch() const;
};

const std::vector<ProblemSpec>& problem_registry();

// nullptr when the name is unknown; lookup is case-insensitive and accepts
// the "robo" alias for arm.
const ProblemSpec* find_problem_spec(const std::string& name);

// Builds a ready-to-run problem. Throws UnsupportedOracleError for reserved
// simulator-backed names, ConfigError for dataset-backed names (those need
// make_dataset_problem) and unknown names.
Problem make_problem(const std::string& name);

Problem make_dataset_problem(const ProblemSpec& spec, std::shared_ptr<DatasetOracle> oracle);

// n_test uniform domain samples labeled by the oracle; the stream depends
// only on (problem name, seed) so every method in a trial pair shares it.
LabeledSet make_test_set(const Problem& problem, std::uint64_t seed);

}  // namespace naqbc
