#pragma once

#include <cstdint>

#include "accbo/problems/bilevel_problem.hpp"

namespace accbo::problems {

/// Per-sample data weighting for ridge regression.
///
/// Upper variable x = lambda in R^n (one raw weight per training sample),
/// lower variable y = w in R^p.
///   g(lambda, w) = (1/n) sum_i sigmoid(lambda_i) * 1/2 (z_i . w - t_i)^2 + c ||w||^2
///   f(lambda, w) = 1/(2m) ||V w - u||^2 + rho/2 ||lambda||^2
/// The first term of f is the validation loss; rho >= 0 is an optional
/// penalty on the raw weights (zero gives the pure data-weighting problem).
class RidgeWeighting final : public BilevelProblem {
 public:
  RidgeWeighting(const Matrix& Z_train, const Vector& t_train, const Matrix& Z_val, const Vector& t_val,
                 double c_reg, double upper_reg = 0.0);

  Kind kind() const override { return Kind::ridge_weighting; }
  Eigen::Index dim_x() const override { return Z_.rows(); }
  Eigen::Index dim_y() const override { return Z_.cols(); }

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
  /// Lower bound min_w validation_loss(w) <= inf_lambda Phi(lambda).
  double phi_infimum() const override { return f_floor_; }
  bool phi_infimum_is_exact() const override { return false; }
  /// Valid for every lambda (the weights live in (0,1)); y-dependent bounds
  /// use the ball ||w|| <= R_w + 1 with R_w = sqrt(sum t_i^2 / (2 c n)).
  core::ProblemConstants analytic_constants() const override { return constants_; }

  /// Validation loss evaluated directly from the stored data.
  double validation_loss(const Vector& w) const;
  double weight_radius() const { return R_w_; }

  const Matrix& Z_train() const { return Z_; }
  const Vector& t_train() const { return t_; }
  const Matrix& Z_val() const { return V_; }
  const Vector& t_val() const { return u_; }
  double c_reg() const { return c_; }
  double upper_reg() const { return rho_; }

 private:
  Vector residual(const Vector& w) const { return Z_ * w - t_; }
  /// sigmoid(lambda), memoized per thread for the last lambda seen.
  const Vector& weights(const Vector& x) const;

  Matrix Z_;
  Vector t_;
  Matrix V_;
  Vector u_;
  double c_;
  double rho_;
  std::uint64_t id_;
  double f_floor_ = 0.0;
  double R_w_ = 0.0;
  core::ProblemConstants constants_;
};

double sigmoid(double v);

}  // namespace accbo::problems
