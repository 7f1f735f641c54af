#include "naqbc/mlp.hpp"

#include <cmath>
#include <limits>

#include "naqbc/adam.hpp"

namespace naqbc {

namespace {

void check_widths(const std::vector<int>& widths) {
  if (widths.size() < 3)
    throw ConfigError("mlp: need at least [input, hidden, output] widths");
  for (int w : widths) {
    if (w <= 0) throw ConfigError("mlp: layer widths must be positive");
  }
}

void activate_inplace(Activation act, Eigen::MatrixXd& z) {
  if (act == Activation::kRelu) {
    z = z.cwiseMax(0.0);
  } else {
    z = z.array().tanh();
  }
}

// Derivative w.r.t. pre-activation; relu uses z, tanh uses the cached output.
Eigen::MatrixXd activation_prime(Activation act, const Eigen::MatrixXd& z,
                                 const Eigen::MatrixXd& a) {
  if (act == Activation::kRelu) return (z.array() > 0.0).cast<double>();
  return 1.0 - a.array().square();
}

}  // namespace

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("train config: learning_rate must be > 0");
  if (max_epochs < 1) throw ConfigError("train config: max_epochs must be >= 1");
  if (patience < 1) throw ConfigError("train config: patience must be >= 1");
  if (patience > max_epochs) throw ConfigError("train config: patience must be <= max_epochs");
  if (batch_size < 0) throw ConfigError("train config: batch_size must be >= 0");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0))
    throw ConfigError("train config: adam betas must lie in [0,1)");
  if (!(adam_eps > 0.0)) throw ConfigError("train config: adam_eps must be > 0");
  if (!(lr_drop > 0.0 && lr_drop <= 1.0))
    throw ConfigError("train config: lr_drop must lie in (0,1]");
  for (std::size_t i = 0; i < lr_milestones.size(); ++i) {
    if (lr_milestones[i] < 0) throw ConfigError("train config: lr_milestones must be >= 0");
    if (i > 0 && lr_milestones[i] <= lr_milestones[i - 1])
      throw ConfigError("train config: lr_milestones must be strictly increasing");
  }
}

DropoutMask DropoutMask::draw(const MlpModel& model, Rng& rng) {
  DropoutMask mask;
  const double rate = model.dropout_rate;
  const double keep_scale = 1.0 / (1.0 - rate);
  mask.factors.reserve(model.n_hidden());
  for (int l = 0; l < model.n_hidden(); ++l) {
    Eigen::VectorXd f(model.layer_widths[l + 1]);
    for (Eigen::Index j = 0; j < f.size(); ++j)
      f[j] = (rng.next_double() >= rate) ? keep_scale : 0.0;
    mask.factors.push_back(std::move(f));
  }
  return mask;
}

DropoutMask DropoutMask::all_keep(const MlpModel& model) {
  DropoutMask mask;
  for (int l = 0; l < model.n_hidden(); ++l)
    mask.factors.push_back(Eigen::VectorXd::Ones(model.layer_widths[l + 1]));
  return mask;
}

MlpModel init_model(const std::vector<int>& widths, Activation activation, std::uint64_t seed,
                    double dropout_rate) {
  check_widths(widths);
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0))
    throw ConfigError("mlp: dropout_rate must lie in [0,1)");

  MlpModel m;
  m.layer_widths = widths;
  m.activation = activation;
  m.dropout_rate = dropout_rate;
  m.seed = seed;

  Rng rng(seed);
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const int fan_in = widths[l];
    const int fan_out = widths[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    Eigen::MatrixXd w(fan_out, fan_in);
    for (int r = 0; r < fan_out; ++r)
      for (int c = 0; c < fan_in; ++c) w(r, c) = rng.uniform(-bound, bound);
    m.weights.push_back(std::move(w));
    m.biases.push_back(Eigen::VectorXd::Zero(fan_out));
  }
  return m;
}

Eigen::VectorXd forward(const MlpModel& model, const Eigen::VectorXd& x,
                        const DropoutMask* mask) {
  if (x.size() != model.d_x()) throw ShapeError("forward: input dimension mismatch");
  if (mask && static_cast<int>(mask->factors.size()) != model.n_hidden())
    throw ShapeError("forward: dropout mask layer count mismatch");

  Eigen::VectorXd a = x;
  for (int l = 0; l < model.n_layers(); ++l) {
    Eigen::VectorXd z = model.weights[l] * a + model.biases[l];
    if (l < model.n_layers() - 1) {
      if (model.activation == Activation::kRelu)
        z = z.cwiseMax(0.0);
      else
        z = z.array().tanh();
      if (mask) z = z.cwiseProduct(mask->factors[l]);
    }
    a = std::move(z);
  }
  return a;
}

Eigen::MatrixXd forward_batch(const MlpModel& model, const Eigen::MatrixXd& xs) {
  if (xs.cols() != model.d_x()) throw ShapeError("forward_batch: input dimension mismatch");
  Eigen::MatrixXd a = xs;
  for (int l = 0; l < model.n_layers(); ++l) {
    Eigen::MatrixXd z =
        (a * model.weights[l].transpose()).rowwise() + model.biases[l].transpose();
    if (l < model.n_layers() - 1) activate_inplace(model.activation, z);
    a = std::move(z);
  }
  return a;
}

Eigen::VectorXd input_gradient(const MlpModel& model, const Eigen::VectorXd& x,
                               const Eigen::VectorXd& upstream) {
  if (x.size() != model.d_x()) throw ShapeError("input_gradient: input dimension mismatch");
  if (upstream.size() != model.d_y())
    throw ShapeError("input_gradient: upstream dimension mismatch");

  const int n_layers = model.n_layers();
  std::vector<Eigen::VectorXd> zs(n_layers);
  std::vector<Eigen::VectorXd> as(n_layers + 1);
  as[0] = x;
  for (int l = 0; l < n_layers; ++l) {
    zs[l] = model.weights[l] * as[l] + model.biases[l];
    if (l < n_layers - 1) {
      if (model.activation == Activation::kRelu)
        as[l + 1] = zs[l].cwiseMax(0.0);
      else
        as[l + 1] = zs[l].array().tanh();
    } else {
      as[l + 1] = zs[l];
    }
  }

  Eigen::VectorXd delta = upstream;
  for (int l = n_layers - 1; l >= 0; --l) {
    Eigen::VectorXd da_prev = model.weights[l].transpose() * delta;
    if (l == 0) return da_prev;
    if (model.activation == Activation::kRelu) {
      delta = da_prev.cwiseProduct((zs[l - 1].array() > 0.0).cast<double>().matrix());
    } else {
      delta = da_prev.cwiseProduct((1.0 - as[l].array().square()).matrix());
    }
  }
  return Eigen::VectorXd::Zero(model.d_x());  // unreachable
}

namespace {

double full_mse(const MlpModel& m, const LabeledSet& data) {
  const Eigen::MatrixXd pred = forward_batch(m, data.xs);
  return (pred - data.ys).squaredNorm() / static_cast<double>(data.n() * data.d_y());
}

}  // namespace

MlpModel train(const MlpModel& model, const LabeledSet& data, const TrainConfig& cfg, Rng& rng,
               TrainReport* report) {
  cfg.validate();
  if (data.n() < 1) throw ConfigError("train: dataset is empty");
  if (data.d_x() != model.d_x()) throw ShapeError("train: data input dimension mismatch");
  if (data.d_y() != model.d_y()) throw ShapeError("train: data output dimension mismatch");

  const long n = data.n();
  const long batch = cfg.batch_size == 0
                         ? std::min<long>(n, TrainConfig::kFullBatchCap)
                         : std::min<long>(cfg.batch_size, n);
  const bool full_batch = batch == n;
  const bool use_dropout = model.dropout_rate > 0.0;
  const double keep_scale = use_dropout ? 1.0 / (1.0 - model.dropout_rate) : 1.0;

  MlpModel cur = model;
  const int n_layers = cur.n_layers();
  const AdamConfig adam_cfg{cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps};
  std::vector<AdamState> st_w, st_b;
  for (int l = 0; l < n_layers; ++l) {
    st_w.emplace_back(cur.weights[l].size());
    st_b.emplace_back(cur.biases[l].size());
  }

  std::vector<long> order(n);
  for (long i = 0; i < n; ++i) order[i] = i;

  MlpModel best = cur;
  double best_loss = std::numeric_limits<double>::infinity();
  int epochs_since_gain = 0;
  TrainReport local_report;
  TrainReport& rep = report ? *report : local_report;
  rep = TrainReport{};

  std::vector<Eigen::MatrixXd> acts(n_layers + 1), zs(n_layers), masks(n_layers - 1);
  double lr = cfg.learning_rate;
  std::size_t next_milestone = 0;
  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    while (next_milestone < cfg.lr_milestones.size() &&
           epoch >= cfg.lr_milestones[next_milestone]) {
      lr *= cfg.lr_drop;
      ++next_milestone;
    }
    if (!full_batch) rng.shuffle(order);

    for (long start = 0; start < n; start += batch) {
      const long nb = std::min(batch, n - start);
      Eigen::MatrixXd xb, yb;
      if (full_batch) {
        xb = data.xs;
        yb = data.ys;
      } else {
        xb.resize(nb, data.d_x());
        yb.resize(nb, data.d_y());
        for (long i = 0; i < nb; ++i) {
          xb.row(i) = data.xs.row(order[start + i]);
          yb.row(i) = data.ys.row(order[start + i]);
        }
      }

      acts[0] = xb;
      for (int l = 0; l < n_layers; ++l) {
        zs[l] = (acts[l] * cur.weights[l].transpose()).rowwise() +
                cur.biases[l].transpose();
        if (l < n_layers - 1) {
          Eigen::MatrixXd a = zs[l];
          activate_inplace(cur.activation, a);
          if (use_dropout) {
            Eigen::MatrixXd& mk = masks[l];
            mk.resize(nb, a.cols());
            for (long i = 0; i < nb; ++i)
              for (Eigen::Index j = 0; j < a.cols(); ++j)
                mk(i, j) = (rng.next_double() >= cur.dropout_rate) ? keep_scale : 0.0;
            a = a.cwiseProduct(mk);
          }
          acts[l + 1] = std::move(a);
        } else {
          acts[l + 1] = zs[l];
        }
      }

      Eigen::MatrixXd delta =
          (2.0 / static_cast<double>(nb * data.d_y())) * (acts[n_layers] - yb);
      for (int l = n_layers - 1; l >= 0; --l) {
        const Eigen::MatrixXd grad_w = delta.transpose() * acts[l];
        const Eigen::VectorXd grad_b = delta.colwise().sum().transpose();
        if (l > 0) {
          Eigen::MatrixXd da_prev = delta * cur.weights[l];
          delta = da_prev.cwiseProduct(activation_prime(cur.activation, zs[l - 1], acts[l]));
          if (use_dropout) delta = delta.cwiseProduct(masks[l - 1]);
        }
        Eigen::Map<Eigen::VectorXd> wv(cur.weights[l].data(), cur.weights[l].size());
        Eigen::Map<const Eigen::VectorXd> gwv(grad_w.data(), grad_w.size());
        adam_step(wv, gwv, st_w[l], lr, adam_cfg);
        adam_step(cur.biases[l], grad_b, st_b[l], lr, adam_cfg);
      }
    }

    const double loss = full_mse(cur, data);
    if (!std::isfinite(loss))
      throw NumericError("train: non-finite loss at epoch " + std::to_string(epoch), epoch);

    if (loss + TrainConfig::kMinImprovement <= best_loss)
      epochs_since_gain = 0;
    else
      ++epochs_since_gain;
    if (loss < best_loss) {
      best_loss = loss;
      best = cur;
    }
    rep.epoch_loss.push_back(loss);
    rep.best_loss_trace.push_back(best_loss);
    rep.epochs_run = epoch + 1;
    if (epochs_since_gain >= cfg.patience) break;
  }

  rep.best_loss = best_loss;
  return best;
}

}  // namespace naqbc
