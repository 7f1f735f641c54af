#pragma once

#include <Eigen/Dense>

#include "naqbc/errors.hpp"

namespace naqbc {

// Labeled training/test data. Rows are samples.
struct LabeledSet {
  Eigen::MatrixXd xs;  // n x d_x
  Eigen::MatrixXd ys;  // n x d_y

  LabeledSet() = default;
  LabeledSet(Eigen::MatrixXd x, Eigen::MatrixXd y) : xs(std::move(x)), ys(std::move(y)) {
    if (xs.rows() != ys.rows()) throw ShapeError("labeled set: xs/ys row counts differ");
  }

  long n() const { return xs.rows(); }
  int d_x() const { return static_cast<int>(xs.cols()); }
  int d_y() const { return static_cast<int>(ys.cols()); }

  void append(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
    if (x.rows() != y.rows()) throw ShapeError("labeled set: appended row counts differ");
    if (n() == 0) {
      xs = x;
      ys = y;
      return;
    }
    if (x.cols() != xs.cols() || y.cols() != ys.cols())
      throw ShapeError("labeled set: appended column counts differ");
    const long old_n = n();
    xs.conservativeResize(old_n + x.rows(), Eigen::NoChange);
    ys.conservativeResize(old_n + y.rows(), Eigen::NoChange);
    xs.bottomRows(x.rows()) = x;
    ys.bottomRows(y.rows()) = y;
  }
};

}  // namespace naqbc
