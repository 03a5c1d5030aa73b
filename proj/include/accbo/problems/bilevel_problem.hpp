#pragma once

#include <string>

#include "accbo/core/constants.hpp"
#include "accbo/core/types.hpp"

namespace accbo::problems {

enum class Kind { isotropic_quadratic, general_quadratic, ridge_weighting, exp_upper_toy };

std::string to_string(Kind kind);
Kind kind_from_string(const std::string& name);

/// Exact, noise-free description of a bilevel problem
///   min_x f(x, y*(x))  with  y*(x) = argmin_y g(x, y).
/// Every derivative is a closed form. The cross derivative is stored as the
/// dim_x x dim_y matrix d/dx (grad_y g).
class BilevelProblem {
 public:
  virtual ~BilevelProblem() = default;

  virtual Kind kind() const = 0;
  virtual Eigen::Index dim_x() const = 0;
  virtual Eigen::Index dim_y() const = 0;

  virtual double f(const Vector& x, const Vector& y) const = 0;
  virtual double g(const Vector& x, const Vector& y) const = 0;
  virtual Vector grad_x_f(const Vector& x, const Vector& y) const = 0;
  virtual Vector grad_y_f(const Vector& x, const Vector& y) const = 0;
  virtual Vector grad_y_g(const Vector& x, const Vector& y) const = 0;

  /// grad^2_xy g(x, y) applied to v in R^{dim_y}; result in R^{dim_x}.
  virtual Vector jvp_xy_g(const Vector& x, const Vector& y, const Vector& v) const;
  /// grad^2_yy g(x, y) applied to v.
  virtual Vector hvp_yy_g(const Vector& x, const Vector& y, const Vector& v) const;

  virtual Matrix lower_hessian(const Vector& x, const Vector& y) const = 0;
  virtual Matrix cross_jacobian(const Vector& x, const Vector& y) const = 0;

  virtual Vector lower_minimizer(const Vector& x) const = 0;

  /// g(x, y) - g(x, y*(x)).
  virtual double lower_gap(const Vector& x, const Vector& y) const;

  /// inf_x Phi(x). Exact unless `phi_infimum_is_exact()` is false, in which
  /// case it is a lower bound.
  virtual double phi_infimum() const = 0;
  virtual bool phi_infimum_is_exact() const { return true; }

  /// Constants (noise fields zero) valid on the region ||x|| <= x_radius the
  /// problem was built with, plus a unit margin around y*(x) where a bound
  /// depends on y.
  virtual core::ProblemConstants analytic_constants() const = 0;
};

}  // namespace accbo::problems
