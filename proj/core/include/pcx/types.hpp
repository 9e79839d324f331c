#pragma once

#include <limits>

#include <Eigen/Dense>

namespace pcx {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Value used for "+infinity" in the extended reals and for "unbounded"
/// Lipschitz declarations.
inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace pcx
