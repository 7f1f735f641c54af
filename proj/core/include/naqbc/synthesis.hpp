#pragma once

#include <Eigen/Dense>
#include <vector>

#include "naqbc/adam.hpp"
#include "naqbc/committee.hpp"
#include "naqbc/domain.hpp"
#include "naqbc/rng.hpp"

namespace naqbc {

struct SynthesisConfig {
  int steps = 300;               // ascent steps per query (S_bp)
  double learning_rate = 0.01;   // alpha
  double boundary_strength = 1.0;  // lambda
  bool convergence_log = false;
  AdamConfig adam{};

  void validate() const;
};

// lambda * sum_d max(0, |x_d - mid_d| - range_d / 2); zero inside the box.
double boundary_loss(const Eigen::VectorXd& x, const HyperRectangle& domain, double lambda);

// Per dimension: lambda * sign(x_d - mid_d) outside, 0 inside and at the kink.
Eigen::VectorXd boundary_loss_gradient(const Eigen::VectorXd& x, const HyperRectangle& domain,
                                       double lambda);

struct SynthesisResult {
  Eigen::MatrixXd queries;           // k x d_x, all inside the closed domain
  Eigen::MatrixXd initial_points;    // the k uniform initializations
  Eigen::VectorXd initial_variance;  // committee variance at each initialization
  Eigen::VectorXd final_variance;    // committee variance at each returned query
  std::vector<long> reinitialized;   // queries replaced by fresh uniform draws
  // Per query, steps+1 entries (initial value, then one per ascent step);
  // only filled when convergence_log is set.
  Eigen::MatrixXd variance_trace;
  Eigen::MatrixXd boundary_trace;
};

// Draws k uniform points (row-wise, before any ascent), then runs `steps`
// Adam ascent iterations per point on qbc_variance(x) - boundary_loss(x),
// each trajectory independent with fresh optimizer state. A non-finite
// objective or gradient restarts that trajectory once from a fresh uniform
// draw; a second failure raises NumericError. After ascent, any point
// outside the closed domain is replaced by a fresh uniform sample.
SynthesisResult synthesize_queries(const Committee& committee, const HyperRectangle& domain,
                                   int k, const SynthesisConfig& cfg, Rng& rng);

}  // namespace naqbc
