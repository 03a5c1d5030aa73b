#include "accbo/problems/quadratic.hpp"

#include <algorithm>
#include <cmath>

#include "accbo/core/errors.hpp"
#include "linalg.hpp"

namespace accbo::problems {

namespace {

void check_upper(const QuadraticUpper& u, Eigen::Index dx, Eigen::Index dy) {
  require(u.c.size() == dx, "upper center c has the wrong dimension");
  require(u.d.size() == dy, "upper center d has the wrong dimension");
  require(std::isfinite(u.kx) && u.kx >= 0.0, "upper kx must be nonnegative");
  require(std::isfinite(u.ky) && u.ky >= 0.0, "upper ky must be nonnegative");
}

}  // namespace

QuadraticBilevel QuadraticBilevel::isotropic(double mu, const Matrix& A, const Vector& b, QuadraticUpper upper,
                                             double x_radius) {
  require(std::isfinite(mu) && mu > 0.0, "isotropic quadratic needs mu > 0");
  require(b.size() == A.rows(), "b must have dim_y entries");
  QuadraticBilevel q;
  q.kind_ = Kind::isotropic_quadratic;
  q.A_ = A;
  q.b_iso_ = b;
  q.H_ = mu * Matrix::Identity(A.rows(), A.rows());
  q.B_ = mu * A;
  q.b_ = mu * b;
  q.upper_ = std::move(upper);
  q.x_radius_ = x_radius;
  q.finish();
  return q;
}

QuadraticBilevel QuadraticBilevel::general(const Matrix& H, const Matrix& B, const Vector& b,
                                           QuadraticUpper upper, double x_radius) {
  require(H.rows() == H.cols(), "H must be square");
  require(B.rows() == H.rows(), "B must have dim_y rows");
  require(b.size() == H.rows(), "b must have dim_y entries");
  require((H - H.transpose()).norm() <= 1e-12 * std::max(1.0, H.norm()), "H must be symmetric");
  QuadraticBilevel q;
  q.kind_ = Kind::general_quadratic;
  q.H_ = H;
  q.B_ = B;
  q.b_ = b;
  q.upper_ = std::move(upper);
  q.x_radius_ = x_radius;
  q.finish();
  return q;
}

void QuadraticBilevel::finish() {
  require(B_.cols() >= 1 && B_.rows() >= 1, "dimensions must be positive");
  require(H_.allFinite() && B_.allFinite() && b_.allFinite(), "quadratic data must be finite");
  require(std::isfinite(x_radius_) && x_radius_ >= 0.0, "x_radius must be nonnegative");
  check_upper(upper_, B_.cols(), B_.rows());
  const double mu = detail::min_eigenvalue(H_);
  require(mu > 0.0, "lower-level Hessian must be positive definite");
  llt_.compute(H_);
  require(llt_.info() == Eigen::Success, "lower-level Hessian factorization failed");
  M_ = llt_.solve(B_);
  m_ = llt_.solve(b_);

  // Phi(x) = kx/2 ||x - c||^2 + ky/2 ||M x + m - d||^2.
  const Eigen::Index dx = B_.cols();
  const Matrix normal = upper_.kx * Matrix::Identity(dx, dx) + upper_.ky * M_.transpose() * M_;
  const Vector rhs = upper_.kx * upper_.c + upper_.ky * M_.transpose() * (upper_.d - m_);
  x_opt_ = normal.completeOrthogonalDecomposition().solve(rhs);
  phi_min_ = f(x_opt_, lower_minimizer(x_opt_));

  core::ProblemConstants c;
  c.mu = kind_ == Kind::isotropic_quadratic ? H_(0, 0) : mu;
  c.l_g1 = std::max(detail::max_eigenvalue(H_), detail::operator_norm(B_));
  c.l_g1 = std::max(c.l_g1, c.mu);
  c.l_g2 = 0.0;
  c.Lx0 = upper_.kx;
  c.Ly0 = upper_.ky;
  c.l_f0 = upper_.ky * (detail::operator_norm(M_) * x_radius_ + (m_ - upper_.d).norm() + 1.0);
  constants_ = c;
}

double QuadraticBilevel::f(const Vector& x, const Vector& y) const {
  return 0.5 * upper_.kx * (x - upper_.c).squaredNorm() + 0.5 * upper_.ky * (y - upper_.d).squaredNorm();
}

double QuadraticBilevel::g(const Vector& x, const Vector& y) const {
  const Vector e = y - lower_minimizer(x);
  return 0.5 * e.dot(H_ * e);
}

Vector QuadraticBilevel::grad_x_f(const Vector& x, const Vector&) const { return upper_.kx * (x - upper_.c); }

Vector QuadraticBilevel::grad_y_f(const Vector&, const Vector& y) const { return upper_.ky * (y - upper_.d); }

Vector QuadraticBilevel::grad_y_g(const Vector& x, const Vector& y) const { return H_ * y - (B_ * x + b_); }

Vector QuadraticBilevel::jvp_xy_g(const Vector&, const Vector&, const Vector& v) const {
  return -(B_.transpose() * v);
}

Vector QuadraticBilevel::hvp_yy_g(const Vector&, const Vector&, const Vector& v) const { return H_ * v; }

Matrix QuadraticBilevel::lower_hessian(const Vector&, const Vector&) const { return H_; }

Matrix QuadraticBilevel::cross_jacobian(const Vector&, const Vector&) const { return -B_.transpose(); }

Vector QuadraticBilevel::lower_minimizer(const Vector& x) const {
  if (kind_ == Kind::isotropic_quadratic) return A_ * x + b_iso_;
  return M_ * x + m_;
}

double QuadraticBilevel::lower_gap(const Vector& x, const Vector& y) const { return g(x, y); }

}  // namespace accbo::problems
