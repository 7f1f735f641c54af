#pragma once

#include <Eigen/Dense>
#include <vector>

#include "naqbc/committee.hpp"
#include "naqbc/domain.hpp"
#include "naqbc/mlp.hpp"
#include "naqbc/rng.hpp"

namespace naqbc {

// Fresh candidate set for one AL step; resampled every iteration.
struct Pool {
  Eigen::MatrixXd candidates;  // N_U x d_x, N_U = gamma * k
  int gamma = 0;

  long size() const { return candidates.rows(); }
};

Pool sample_pool(const HyperRectangle& domain, int gamma, int k, Rng& rng);

// Indices of the k largest scores, in descending score order; equal scores
// keep ascending index order.
std::vector<long> top_k_stable(const Eigen::VectorXd& scores, int k);

Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& m, const std::vector<long>& indices);

// Top-k committee variance.
std::vector<long> select_qbc(const Committee& committee, const Pool& pool, int k);

// Greedy batch: each pick maximizes (1/2) vtilde + (1/2) dtilde, where
// vtilde is the pool-wide min-max normalized committee variance and dtilde
// is the min-max normalized (over remaining candidates, each round) distance
// to the nearest already-picked point; zero before the first pick.
std::vector<long> select_div_qbc(const Committee& committee, const Pool& pool, int k);

// As select_div_qbc with a third term: (1/3)(vtilde + dtilde + rhotilde).
// rho is the mean distance to the 10 nearest other pool points (fewer when
// the pool is small), min-max normalized and flipped so dense regions score
// high; computed once per pool.
std::vector<long> select_dendiv_qbc(const Committee& committee, const Pool& pool, int k);

// Predictive variance across `passes` stochastic forward passes with fresh
// dropout masks, per output coordinate, averaged over d_y. Candidate i draws
// its masks from an independent stream derived from one draw on `rng`.
Eigen::VectorXd bald_scores(const MlpModel& dropout_model, const Pool& pool, int passes,
                            Rng& rng);

std::vector<long> select_bald_mcdropout(const MlpModel& dropout_model, const Pool& pool, int k,
                                        int passes, Rng& rng);

// Greedy k-center: repeatedly pick the candidate farthest from the training
// points and everything picked so far.
std::vector<long> select_coreset(const Eigen::MatrixXd& train_xs, const Pool& pool, int k);

}  // namespace naqbc
