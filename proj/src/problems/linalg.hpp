#pragma once

#include "accbo/core/types.hpp"

namespace accbo::problems::detail {

double operator_norm(const Matrix& m);
double min_eigenvalue(const Matrix& symmetric);
double max_eigenvalue(const Matrix& symmetric);

}  // namespace accbo::problems::detail
