#pragma once

#include "accbo/problems/bilevel_problem.hpp"

namespace accbo::problems {

/// Isotropic quadratic lower level (y*(x) = A x + b) under the upper level
///   f(x, y) = exp(u . x) + (ky/2)||y - d||^2,
/// whose x-gradient grows with its own norm (Lx1 > 0, Lx0 = 0).
class ExpUpperToy final : public BilevelProblem {
 public:
  /// A must have full column rank so that Phi has a unique minimizer.
  ExpUpperToy(double mu, const Matrix& A, const Vector& b, const Vector& u, double ky, const Vector& d,
              double x_radius);

  Kind kind() const override { return Kind::exp_upper_toy; }
  Eigen::Index dim_x() const override { return A_.cols(); }
  Eigen::Index dim_y() const override { return A_.rows(); }

  double f(const Vector& x, const Vector& y) const override;
  double g(const Vector& x, const Vector& y) const override;
  Vector grad_x_f(const Vector& x, const Vector& y) const override;
  Vector grad_y_f(const Vector& x, const Vector& y) const override;
  Vector grad_y_g(const Vector& x, const Vector& y) const override;
  Vector jvp_xy_g(const Vector& x, const Vector& y, const Vector& v) const override;
  Vector hvp_yy_g(const Vector& x, const Vector& y, const Vector& v) const override;
  Matrix lower_hessian(const Vector& x, const Vector& y) const override;
  Matrix cross_jacobian(const Vector& x, const Vector& y) const override;
  Vector lower_minimizer(const Vector& x) const override;
  double lower_gap(const Vector& x, const Vector& y) const override;
  double phi_infimum() const override { return phi_min_; }
  core::ProblemConstants analytic_constants() const override { return constants_; }

  const Vector& phi_argmin() const { return x_opt_; }
  double mu() const { return mu_; }
  const Matrix& A() const { return A_; }
  const Vector& b() const { return b_; }
  const Vector& u() const { return u_; }
  double ky() const { return ky_; }
  const Vector& d() const { return d_; }
  double x_radius() const { return x_radius_; }

 private:
  double mu_;
  Matrix A_;
  Vector b_, u_;
  double ky_;
  Vector d_;
  double x_radius_;
  Vector x_opt_;
  double phi_min_ = 0.0;
  core::ProblemConstants constants_;
};

}  // namespace accbo::problems
