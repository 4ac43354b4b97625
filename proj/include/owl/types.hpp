#pragma once

#include <Eigen/Core>

namespace owl {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;  // column-major

}  // namespace owl
