#pragma once

#include <Eigen/Dense>

#include "naqbc/errors.hpp"
#include "naqbc/rng.hpp"

namespace naqbc {

// Admissible input domain: an axis-aligned box, by default [-1,1]^d.
struct HyperRectangle {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  HyperRectangle(Eigen::VectorXd lo, Eigen::VectorXd hi)
      : lower(std::move(lo)), upper(std::move(hi)) {
    if (lower.size() != upper.size()) throw ShapeError("hyperrectangle: bound sizes differ");
    if (lower.size() == 0) throw ConfigError("hyperrectangle: zero dimensions");
    for (Eigen::Index i = 0; i < lower.size(); ++i) {
      if (!(lower[i] < upper[i])) throw ConfigError("hyperrectangle: lower must be < upper");
    }
  }

  static HyperRectangle unit_cube(int dims) {
    return HyperRectangle(Eigen::VectorXd::Constant(dims, -1.0),
                          Eigen::VectorXd::Constant(dims, 1.0));
  }

  int dims() const { return static_cast<int>(lower.size()); }
  Eigen::VectorXd mid() const { return 0.5 * (lower + upper); }
  Eigen::VectorXd range() const { return upper - lower; }

  // Closed-box membership.
  bool contains(const Eigen::VectorXd& x) const {
    if (x.size() != lower.size()) throw ShapeError("hyperrectangle: point dimension mismatch");
    return (x.array() >= lower.array()).all() && (x.array() <= upper.array()).all();
  }

  // One uniform draw per dimension, in dimension order.
  Eigen::VectorXd sample(Rng& rng) const {
    Eigen::VectorXd x(lower.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = rng.uniform(lower[i], upper[i]);
    return x;
  }

  // n rows, row-major draw order (row 0 fully drawn before row 1).
  Eigen::MatrixXd sample_rows(long n, Rng& rng) const {
    Eigen::MatrixXd out(n, lower.size());
    for (long r = 0; r < n; ++r) out.row(r) = sample(rng).transpose();
    return out;
  }
};

}  // namespace naqbc
