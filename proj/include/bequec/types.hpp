#pragma once

#include <Eigen/Dense>

#include <cstdint>

namespace bequec {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

}  // namespace bequec
