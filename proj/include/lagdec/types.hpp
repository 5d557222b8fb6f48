#pragma once

#include <Eigen/Dense>

namespace lagdec {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

} // namespace lagdec
