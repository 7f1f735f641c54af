#include "naqbc/synthesis.hpp"

#include <cmath>

#include "naqbc/errors.hpp"

namespace naqbc {

void SynthesisConfig::validate() const {
  if (steps < 1) throw ConfigError("synthesis: steps must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("synthesis: learning_rate must be > 0");
  if (!(boundary_strength >= 0.0))
    throw ConfigError("synthesis: boundary_strength must be >= 0");
}

double boundary_loss(const Eigen::VectorXd& x, const HyperRectangle& domain, double lambda) {
  if (x.size() != domain.dims()) throw ShapeError("boundary_loss: dimension mismatch");
  const Eigen::VectorXd mid = domain.mid();
  const Eigen::VectorXd half_range = 0.5 * domain.range();
  double total = 0.0;
  for (Eigen::Index d = 0; d < x.size(); ++d)
    total += std::max(0.0, std::abs(x[d] - mid[d]) - half_range[d]);
  return lambda * total;
}

Eigen::VectorXd boundary_loss_gradient(const Eigen::VectorXd& x, const HyperRectangle& domain,
                                       double lambda) {
  if (x.size() != domain.dims()) throw ShapeError("boundary_loss_gradient: dimension mismatch");
  const Eigen::VectorXd mid = domain.mid();
  const Eigen::VectorXd half_range = 0.5 * domain.range();
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(x.size());
  for (Eigen::Index d = 0; d < x.size(); ++d) {
    const double offset = x[d] - mid[d];
    if (std::abs(offset) > half_range[d]) grad[d] = lambda * (offset > 0.0 ? 1.0 : -1.0);
  }
  return grad;
}

SynthesisResult synthesize_queries(const Committee& committee, const HyperRectangle& domain,
                                   int k, const SynthesisConfig& cfg, Rng& rng) {
  cfg.validate();
  if (k < 1) throw ConfigError("synthesis: k must be >= 1");
  if (committee.d_x() != domain.dims()) throw ShapeError("synthesis: domain dimension mismatch");

  SynthesisResult result;
  result.initial_points = domain.sample_rows(k, rng);
  result.queries = result.initial_points;
  result.initial_variance.resize(k);
  result.final_variance.resize(k);
  if (cfg.convergence_log) {
    result.variance_trace.resize(k, cfg.steps + 1);
    result.boundary_trace.resize(k, cfg.steps + 1);
  }

  const double lambda = cfg.boundary_strength;
  for (int j = 0; j < k; ++j) {
    Eigen::VectorXd x = result.initial_points.row(j).transpose();
    result.initial_variance[j] = qbc_variance(committee, x);

    int attempts = 0;
    bool done = false;
    while (!done) {
      AdamState adam(x.size());
      bool failed = false;
      for (int s = 0; s <= cfg.steps; ++s) {
        const double variance = qbc_variance(committee, x);
        const double bnd = boundary_loss(x, domain, lambda);
        if (!std::isfinite(variance - bnd)) {
          failed = true;
          break;
        }
        if (cfg.convergence_log) {
          result.variance_trace(j, s) = variance;
          result.boundary_trace(j, s) = bnd;
        }
        if (s == cfg.steps) break;
        // Descend on L = L_bnd - variance, i.e. ascend the variance.
        const Eigen::VectorXd descent = boundary_loss_gradient(x, domain, lambda) -
                                        qbc_variance_gradient(committee, x);
        if (!descent.allFinite()) {
          failed = true;
          break;
        }
        adam_step(x, descent, adam, cfg.learning_rate, cfg.adam);
      }
      if (!failed) {
        done = true;
      } else if (++attempts >= 2) {
        throw NumericError("synthesis: query " + std::to_string(j) +
                               " hit a non-finite objective twice",
                           j);
      } else {
        x = domain.sample(rng);
      }
    }

    if (!domain.contains(x)) {
      x = domain.sample(rng);
      result.reinitialized.push_back(j);
    }
    result.queries.row(j) = x.transpose();
    result.final_variance[j] = qbc_variance(committee, x);
  }
  return result;
}

}  // namespace naqbc
