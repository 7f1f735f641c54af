#include "naqbc/committee.hpp"

#include "naqbc/hash.hpp"

namespace naqbc {

Committee make_committee(const std::vector<int>& widths, Activation activation, int n_members,
                         std::uint64_t base_seed, double dropout_rate) {
  if (n_members < 2) throw ConfigError("committee: need at least 2 members");
  Committee c;
  c.members.reserve(n_members);
  for (int n = 0; n < n_members; ++n)
    c.members.push_back(init_model(widths, activation, mix64(base_seed, n), dropout_rate));
  return c;
}

void train_committee(Committee& committee, const LabeledSet& data, const TrainConfig& cfg,
                     std::uint64_t base_seed) {
  if (committee.size() < 2) throw ConfigError("committee: need at least 2 members");
  for (int n = 0; n < committee.size(); ++n) {
    MlpModel fresh = init_model(committee.members[n].layer_widths,
                                committee.members[n].activation, mix64(base_seed, n),
                                committee.members[n].dropout_rate);
    Rng rng(mix64(base_seed, n), seed_tag::kTrain);
    committee.members[n] = train(fresh, data, cfg, rng);
  }
}

Eigen::VectorXd mean_prediction(const Committee& committee, const Eigen::VectorXd& x) {
  if (committee.size() < 2) throw ConfigError("committee: need at least 2 members");
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(committee.d_y());
  for (const MlpModel& m : committee.members) sum += forward(m, x);
  return sum / static_cast<double>(committee.size());
}

double qbc_variance(const Committee& committee, const Eigen::VectorXd& x) {
  if (committee.size() < 2) throw ConfigError("committee: need at least 2 members");
  const int d_y = committee.d_y();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d_y);
  Eigen::VectorXd m2 = Eigen::VectorXd::Zero(d_y);
  long count = 0;
  for (const MlpModel& m : committee.members) {
    const Eigen::VectorXd y = forward(m, x);
    ++count;
    const Eigen::VectorXd delta = y - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta.cwiseProduct(y - mean);
  }
  return m2.sum() / static_cast<double>(count * d_y);
}

Eigen::VectorXd qbc_variance_batch(const Committee& committee, const Eigen::MatrixXd& xs) {
  if (committee.size() < 2) throw ConfigError("committee: need at least 2 members");
  const long rows = xs.rows();
  const double d_y = static_cast<double>(committee.d_y());
  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(rows, committee.d_y());
  Eigen::MatrixXd m2 = Eigen::MatrixXd::Zero(rows, committee.d_y());
  long count = 0;
  for (const MlpModel& m : committee.members) {
    const Eigen::MatrixXd y = forward_batch(m, xs);
    ++count;
    const Eigen::MatrixXd delta = y - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta.cwiseProduct(y - mean);
  }
  return m2.rowwise().sum() / (static_cast<double>(count) * d_y);
}

Eigen::VectorXd qbc_variance_gradient(const Committee& committee, const Eigen::VectorXd& x) {
  if (committee.size() < 2) throw ConfigError("committee: need at least 2 members");
  const int n = committee.size();
  const int d_y = committee.d_y();

  std::vector<Eigen::VectorXd> preds;
  preds.reserve(n);
  // Running mean (as in qbc_variance) rather than sum/n: residuals of a
  // committee whose members agree bitwise are then exactly zero, so the
  // gradient vanishes instead of leaving ulp-sized noise.
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d_y);
  long count = 0;
  for (const MlpModel& m : committee.members) {
    preds.push_back(forward(m, x));
    ++count;
    mean += (preds.back() - mean) / static_cast<double>(count);
  }

  // The derivative of the committee mean drops out because the residuals
  // f_n - mean sum to zero across members.
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(committee.d_x());
  for (int i = 0; i < n; ++i)
    grad += input_gradient(committee.members[i], x, preds[i] - mean);
  return grad * (2.0 / static_cast<double>(n * d_y));
}

}  // namespace naqbc
