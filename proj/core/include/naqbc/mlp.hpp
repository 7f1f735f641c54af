#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "naqbc/dataset.hpp"
#include "naqbc/errors.hpp"
#include "naqbc/rng.hpp"

namespace naqbc {

enum class Activation { kRelu, kTanh };

// Dense feed-forward regressor. Hidden layers carry the activation, the
// output layer is linear. Immutable by convention once trained: forward and
// gradient calls are const and safe to run concurrently.
struct MlpModel {
  std::vector<int> layer_widths;         // [d_x, hidden..., d_y], at least 3 entries
  std::vector<Eigen::MatrixXd> weights;  // per layer, (out x in)
  std::vector<Eigen::VectorXd> biases;
  Activation activation = Activation::kRelu;
  double dropout_rate = 0.0;  // in [0,1); 0 disables dropout
  std::uint64_t seed = 0;

  int d_x() const { return layer_widths.front(); }
  int d_y() const { return layer_widths.back(); }
  int n_layers() const { return static_cast<int>(weights.size()); }
  int n_hidden() const { return n_layers() - 1; }
};

struct TrainConfig {
  double learning_rate = 1e-3;
  int max_epochs = 500;
  int patience = 20;  // epochs without >= kMinImprovement gain in best train MSE
  int batch_size = 0;  // 0 = full batch (capped at kFullBatchCap rows)
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  // Step decay: the rate is multiplied by lr_drop at each milestone epoch
  // (ascending, 0-based). Empty keeps the rate constant.
  std::vector<int> lr_milestones;
  double lr_drop = 0.1;

  static constexpr double kMinImprovement = 1e-7;
  static constexpr int kFullBatchCap = 2048;

  void validate() const;
};

// Multiplicative factors per hidden layer: 0 for dropped units,
// 1/(1-dropout_rate) for survivors.
struct DropoutMask {
  std::vector<Eigen::VectorXd> factors;

  // Draw order: hidden layers front to back, units in index order, one
  // uniform draw per unit; a unit is kept when draw >= dropout_rate.
  static DropoutMask draw(const MlpModel& model, Rng& rng);
  static DropoutMask all_keep(const MlpModel& model);
};

// Weights uniform in (-1/sqrt(fan_in), +1/sqrt(fan_in)) drawn row-major per
// layer from Rng(seed); biases zero.
MlpModel init_model(const std::vector<int>& widths, Activation activation, std::uint64_t seed,
                    double dropout_rate = 0.0);

Eigen::VectorXd forward(const MlpModel& model, const Eigen::VectorXd& x,
                        const DropoutMask* mask = nullptr);

// Rows are samples; evaluation path, never applies dropout.
Eigen::MatrixXd forward_batch(const MlpModel& model, const Eigen::MatrixXd& xs);

// J^T * upstream where J = d forward / d x, via reverse accumulation through
// the same graph as forward (no dropout).
Eigen::VectorXd input_gradient(const MlpModel& model, const Eigen::VectorXd& x,
                               const Eigen::VectorXd& upstream);

struct TrainReport {
  std::vector<double> epoch_loss;       // full-data MSE after each epoch, no dropout
  std::vector<double> best_loss_trace;  // running best after each epoch
  double best_loss = 0.0;
  int epochs_run = 0;
};

// Adam on mean-squared error. Stops at max_epochs or when the best train MSE
// has not improved by >= TrainConfig::kMinImprovement for `patience` epochs;
// returns the best-loss snapshot. Throws NumericError (with the epoch index)
// if the loss turns non-finite. When model.dropout_rate > 0 fresh per-sample
// masks are drawn from `rng` each epoch.
MlpModel train(const MlpModel& model, const LabeledSet& data, const TrainConfig& cfg, Rng& rng,
               TrainReport* report = nullptr);

}  // namespace naqbc
