#pragma once

#include <memory>
#include <string>
#include <vector>

#include "accbo/problems/exp_upper.hpp"
#include "accbo/problems/instance.hpp"
#include "accbo/problems/quadratic.hpp"
#include "accbo/problems/ridge.hpp"

namespace accbo::problems {

/// f = 1/2||x||^2 + 1/2||y||^2, g = 1/2||y - x||^2 in `dim` dimensions.
std::shared_ptr<const QuadraticBilevel> identity_quadratic(Eigen::Index dim);

/// Two-dimensional isotropic instance with mu = 1 and y*(x) = 2 R x + b for a
/// rotation R, so l_g1 = 2.
std::shared_ptr<const QuadraticBilevel> reference_isotropic();

/// Three-dimensional anisotropic lower level (spectrum 1, 1.6, 2.5).
std::shared_ptr<const QuadraticBilevel> reference_general();

/// Two-dimensional exp upper level over an isotropic lower level.
std::shared_ptr<const ExpUpperToy> reference_exp_toy();

/// 8 training and 4 validation samples in R^3 drawn from a seeded stream.
/// `upper_reg` is the penalty rho/2 ||lambda||^2 on the raw weights.
std::shared_ptr<const RidgeWeighting> reference_ridge(double upper_reg = 0.0);

/// Names accepted by `fixture_by_name`.
std::vector<std::string> fixture_names();
std::shared_ptr<const BilevelProblem> fixture_by_name(const std::string& name);

}  // namespace accbo::problems
