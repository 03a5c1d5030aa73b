#pragma once

#include <Eigen/Dense>

namespace accbo {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline bool all_finite(const Vector& v) { return v.allFinite(); }

}  // namespace accbo
