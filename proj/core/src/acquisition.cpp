#include "naqbc/acquisition.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "naqbc/errors.hpp"
#include "naqbc/hash.hpp"

namespace naqbc {

namespace {

void check_pool(const Pool& pool, int k) {
  if (pool.size() == 0) throw ConfigError("selector: pool is empty");
  if (k < 1) throw ConfigError("selector: k must be >= 1");
  if (k > pool.size()) throw ConfigError("selector: k exceeds pool size");
}

// Min-max to [0,1]; a constant vector maps to all zeros.
Eigen::VectorXd min_max_normalize(const Eigen::VectorXd& v) {
  const double lo = v.minCoeff();
  const double hi = v.maxCoeff();
  if (hi == lo) return Eigen::VectorXd::Zero(v.size());
  return (v.array() - lo) / (hi - lo);
}

std::vector<long> greedy_variance_diversity(const Eigen::VectorXd& vtilde,
                                            const Eigen::MatrixXd& candidates, int k,
                                            const Eigen::VectorXd* static_term,
                                            double weight) {
  const long n = candidates.rows();
  std::vector<bool> picked(n, false);
  std::vector<long> out;
  out.reserve(k);
  Eigen::VectorXd min_dist =
      Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());

  for (int round = 0; round < k; ++round) {
    Eigen::VectorXd dtilde;
    if (out.empty()) {
      dtilde = Eigen::VectorXd::Zero(n);
    } else {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -std::numeric_limits<double>::infinity();
      for (long i = 0; i < n; ++i) {
        if (picked[i]) continue;
        lo = std::min(lo, min_dist[i]);
        hi = std::max(hi, min_dist[i]);
      }
      dtilde.resize(n);
      for (long i = 0; i < n; ++i)
        dtilde[i] = (picked[i] || hi == lo) ? 0.0 : (min_dist[i] - lo) / (hi - lo);
    }

    long best = -1;
    double best_score = -std::numeric_limits<double>::infinity();
    for (long i = 0; i < n; ++i) {
      if (picked[i]) continue;
      double score = weight * (vtilde[i] + dtilde[i]);
      if (static_term) score += weight * (*static_term)[i];
      if (score > best_score) {
        best_score = score;
        best = i;
      }
    }
    picked[best] = true;
    out.push_back(best);
    for (long i = 0; i < n; ++i) {
      if (picked[i]) continue;
      const double d = (candidates.row(i) - candidates.row(best)).norm();
      min_dist[i] = std::min(min_dist[i], d);
    }
  }
  return out;
}

}  // namespace

Pool sample_pool(const HyperRectangle& domain, int gamma, int k, Rng& rng) {
  if (gamma < 1) throw ConfigError("sample_pool: gamma must be >= 1");
  if (k < 1) throw ConfigError("sample_pool: k must be >= 1");
  const long long n_u = static_cast<long long>(gamma) * static_cast<long long>(k);
  if (n_u > std::numeric_limits<int>::max())
    throw ConfigError("sample_pool: gamma * k overflows the pool size");
  Pool pool;
  pool.gamma = gamma;
  pool.candidates = domain.sample_rows(static_cast<long>(n_u), rng);
  return pool;
}

std::vector<long> top_k_stable(const Eigen::VectorXd& scores, int k) {
  if (k < 1 || k > scores.size()) throw ConfigError("top_k_stable: bad k");
  std::vector<long> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::partial_sort(idx.begin(), idx.begin() + k, idx.end(), [&](long a, long b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });
  idx.resize(k);
  return idx;
}

Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& m, const std::vector<long>& indices) {
  Eigen::MatrixXd out(static_cast<long>(indices.size()), m.cols());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] < 0 || indices[i] >= m.rows())
      throw ShapeError("gather_rows: index out of range");
    out.row(static_cast<long>(i)) = m.row(indices[i]);
  }
  return out;
}

std::vector<long> select_qbc(const Committee& committee, const Pool& pool, int k) {
  check_pool(pool, k);
  return top_k_stable(qbc_variance_batch(committee, pool.candidates), k);
}

std::vector<long> select_div_qbc(const Committee& committee, const Pool& pool, int k) {
  check_pool(pool, k);
  const Eigen::VectorXd vtilde =
      min_max_normalize(qbc_variance_batch(committee, pool.candidates));
  return greedy_variance_diversity(vtilde, pool.candidates, k, nullptr, 0.5);
}

std::vector<long> select_dendiv_qbc(const Committee& committee, const Pool& pool, int k) {
  check_pool(pool, k);
  const long n = pool.size();
  const Eigen::VectorXd vtilde =
      min_max_normalize(qbc_variance_batch(committee, pool.candidates));

  const long n_neighbors = std::min<long>(10, n - 1);
  Eigen::VectorXd rho = Eigen::VectorXd::Zero(n);
  if (n_neighbors > 0) {
    std::vector<double> dists;
    dists.reserve(n - 1);
    for (long i = 0; i < n; ++i) {
      dists.clear();
      for (long j = 0; j < n; ++j) {
        if (j == i) continue;
        dists.push_back((pool.candidates.row(i) - pool.candidates.row(j)).norm());
      }
      std::nth_element(dists.begin(), dists.begin() + (n_neighbors - 1), dists.end());
      double sum = 0.0;
      for (long j = 0; j < n_neighbors; ++j) sum += dists[j];
      rho[i] = sum / static_cast<double>(n_neighbors);
    }
  }
  // Flip: small mean neighbor distance (dense region) should score high.
  const Eigen::VectorXd rhotilde = min_max_normalize(-rho);

  return greedy_variance_diversity(vtilde, pool.candidates, k, &rhotilde, 1.0 / 3.0);
}

Eigen::VectorXd bald_scores(const MlpModel& dropout_model, const Pool& pool, int passes,
                            Rng& rng) {
  if (pool.size() == 0) throw ConfigError("bald: pool is empty");
  if (dropout_model.dropout_rate <= 0.0)
    throw ConfigError("bald: model has dropout_rate 0, scores would be identically 0");
  if (passes < 2) throw ConfigError("bald: passes must be >= 2");
  if (pool.candidates.cols() != dropout_model.d_x())
    throw ShapeError("bald: pool dimension mismatch");

  const long n = pool.size();
  const int d_y = dropout_model.d_y();
  const int n_layers = dropout_model.n_layers();
  const double rate = dropout_model.dropout_rate;
  const double keep_scale = 1.0 / (1.0 - rate);

  const std::uint64_t base = rng.next_u64();
  std::vector<Rng> streams;
  streams.reserve(n);
  for (long i = 0; i < n; ++i) streams.emplace_back(mix64(base, static_cast<std::uint64_t>(i)));

  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(n, d_y);
  Eigen::MatrixXd m2 = Eigen::MatrixXd::Zero(n, d_y);
  Eigen::MatrixXd a, mask;
  for (int p = 0; p < passes; ++p) {
    a = pool.candidates;
    for (int l = 0; l < n_layers; ++l) {
      Eigen::MatrixXd z = (a * dropout_model.weights[l].transpose()).rowwise() +
                          dropout_model.biases[l].transpose();
      if (l < n_layers - 1) {
        if (dropout_model.activation == Activation::kRelu)
          z = z.cwiseMax(0.0);
        else
          z = z.array().tanh();
        mask.resize(n, z.cols());
        for (long i = 0; i < n; ++i)
          for (Eigen::Index j = 0; j < z.cols(); ++j)
            mask(i, j) = (streams[i].next_double() >= rate) ? keep_scale : 0.0;
        z = z.cwiseProduct(mask);
      }
      a = std::move(z);
    }
    const Eigen::MatrixXd delta = a - mean;
    mean += delta / static_cast<double>(p + 1);
    m2 += delta.cwiseProduct(a - mean);
  }
  return m2.rowwise().sum() / static_cast<double>(passes * d_y);
}

std::vector<long> select_bald_mcdropout(const MlpModel& dropout_model, const Pool& pool, int k,
                                        int passes, Rng& rng) {
  check_pool(pool, k);
  return top_k_stable(bald_scores(dropout_model, pool, passes, rng), k);
}

std::vector<long> select_coreset(const Eigen::MatrixXd& train_xs, const Pool& pool, int k) {
  check_pool(pool, k);
  if (train_xs.rows() == 0) throw ConfigError("coreset: training set is empty");
  if (train_xs.cols() != pool.candidates.cols())
    throw ShapeError("coreset: train/pool dimension mismatch");

  const long n = pool.size();
  Eigen::VectorXd min_dist(n);
  for (long i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (long j = 0; j < train_xs.rows(); ++j)
      best = std::min(best, (pool.candidates.row(i) - train_xs.row(j)).norm());
    min_dist[i] = best;
  }

  std::vector<bool> picked(n, false);
  std::vector<long> out;
  out.reserve(k);
  for (int round = 0; round < k; ++round) {
    long best = -1;
    double best_dist = -std::numeric_limits<double>::infinity();
    for (long i = 0; i < n; ++i) {
      if (picked[i]) continue;
      if (min_dist[i] > best_dist) {
        best_dist = min_dist[i];
        best = i;
      }
    }
    picked[best] = true;
    out.push_back(best);
    for (long i = 0; i < n; ++i) {
      if (picked[i]) continue;
      const double d = (pool.candidates.row(i) - pool.candidates.row(best)).norm();
      min_dist[i] = std::min(min_dist[i], d);
    }
  }
  return out;
}

}  // namespace naqbc
