#pragma once

#include "accbo/problems/bilevel_problem.hpp"

namespace accbo::problems {

/// f(x, y) = (kx/2)||x - c||^2 + (ky/2)||y - d||^2.
struct QuadraticUpper {
  double kx = 1.0;
  Vector c;
  double ky = 1.0;
  Vector d;
};

/// Quadratic lower level g(x, y) = 1/2 (y - y*(x))^T H (y - y*(x)) with
/// y*(x) = H^{-1}(B x + b), and a quadratic upper level.
///
/// The isotropic variant has H = mu*I and B = mu*A, so y*(x) = A x + b_iso;
/// its l_g1 is mu * max(1, ||A||).
class QuadraticBilevel final : public BilevelProblem {
 public:
  static QuadraticBilevel isotropic(double mu, const Matrix& A, const Vector& b, QuadraticUpper upper,
                                    double x_radius);
  static QuadraticBilevel general(const Matrix& H, const Matrix& B, const Vector& b, QuadraticUpper upper,
                                  double x_radius);

  Kind kind() const override { return kind_; }
  Eigen::Index dim_x() const override { return B_.cols(); }
  Eigen::Index dim_y() const override { return B_.rows(); }

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

  /// argmin_x Phi(x) (minimum-norm solution when Phi is flat along a direction).
  const Vector& phi_argmin() const { return x_opt_; }

  const Matrix& H() const { return H_; }
  const Matrix& B() const { return B_; }
  const Vector& b() const { return b_; }
  const QuadraticUpper& upper() const { return upper_; }
  double x_radius() const { return x_radius_; }
  /// Only meaningful for the isotropic variant.
  const Matrix& A() const { return A_; }
  const Vector& b_iso() const { return b_iso_; }

 private:
  QuadraticBilevel() = default;
  void finish();

  Kind kind_ = Kind::general_quadratic;
  Matrix H_, B_, A_;
  Vector b_, b_iso_;
  Eigen::LLT<Matrix> llt_;
  Matrix M_;  // H^{-1} B
  Vector m_;  // H^{-1} b
  QuadraticUpper upper_;
  double x_radius_ = 1.0;
  Vector x_opt_;
  double phi_min_ = 0.0;
  core::ProblemConstants constants_;
};

}  // namespace accbo::problems
