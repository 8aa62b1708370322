#pragma once

#include <Eigen/Dense>

namespace srecop {

using Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

enum class Metric { Euclidean, GreatCircle };

}  // namespace srecop
