#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "naqbc/dataset.hpp"
#include "naqbc/errors.hpp"
#include "naqbc/mlp.hpp"
#include "naqbc/rng.hpp"

namespace naqbc {

// An ensemble of identically shaped regressors that disagree only through
// their weight initialization (and minibatch order, when minibatching).
struct Committee {
  std::vector<MlpModel> members;

  int size() const { return static_cast<int>(members.size()); }
  int d_x() const { return members.front().d_x(); }
  int d_y() const { return members.front().d_y(); }
};

Committee make_committee(const std::vector<int>& widths, Activation activation, int n_members,
                         std::uint64_t base_seed, double dropout_rate = 0.0);

// Retrains every member from its own initialization on the given data.
// Member n trains with an independent stream derived from `base_seed` and n.
void train_committee(Committee& committee, const LabeledSet& data, const TrainConfig& cfg,
                     std::uint64_t base_seed);

Eigen::VectorXd mean_prediction(const Committee& committee, const Eigen::VectorXd& x);

// Disagreement at x: population variance across members, per output
// coordinate, averaged over the d_y coordinates. Accumulated with Welford
// updates so wide committees stay stable.
double qbc_variance(const Committee& committee, const Eigen::VectorXd& x);

// Variance for every row of xs (one forward batch per member).
Eigen::VectorXd qbc_variance_batch(const Committee& committee, const Eigen::MatrixXd& xs);

// d/dx of qbc_variance: (2 / (N d_y)) * sum_n J_n^T (f_n(x) - mean(x)).
Eigen::VectorXd qbc_variance_gradient(const Committee& committee, const Eigen::VectorXd& x);

}  // namespace naqbc
