#include "accbo/problems/exp_upper.hpp"

#include <algorithm>
#include <cmath>

#include "accbo/core/errors.hpp"
#include "linalg.hpp"

namespace accbo::problems {

ExpUpperToy::ExpUpperToy(double mu, const Matrix& A, const Vector& b, const Vector& u, double ky, const Vector& d,
                         double x_radius)
    : mu_(mu), A_(A), b_(b), u_(u), ky_(ky), d_(d), x_radius_(x_radius) {
  require(std::isfinite(mu) && mu > 0.0, "exp toy needs mu > 0");
  require(A.rows() >= 1 && A.cols() >= 1, "dimensions must be positive");
  require(b.size() == A.rows() && d.size() == A.rows(), "b and d must have dim_y entries");
  require(u.size() == A.cols(), "u must have dim_x entries");
  require(std::isfinite(ky) && ky > 0.0, "exp toy needs ky > 0");
  require(std::isfinite(x_radius) && x_radius >= 0.0, "x_radius must be nonnegative");
  const Matrix AtA = A.transpose() * A;
  require(detail::min_eigenvalue(AtA) > 1e-12, "exp toy needs A with full column rank");

  // Damped Newton on the strictly convex Phi(x) = exp(u.x) + ky/2 ||A x + b - d||^2.
  auto phi = [&](const Vector& x) { return std::exp(u_.dot(x)) + 0.5 * ky_ * (A_ * x + b_ - d_).squaredNorm(); };
  Vector x = Vector::Zero(A.cols());
  for (int it = 0; it < 200; ++it) {
    const double e = std::exp(u_.dot(x));
    const Vector grad = u_ * e + ky_ * A_.transpose() * (A_ * x + b_ - d_);
    if (grad.norm() <= 1e-15) break;
    const Matrix hess = u_ * u_.transpose() * e + ky_ * AtA;
    const Vector step = hess.llt().solve(grad);
    double t = 1.0;
    const double base = phi(x);
    while (t > 1e-12 && phi(x - t * step) > base - 0.25 * t * grad.dot(step)) t *= 0.5;
    const Vector next = x - t * step;
    if ((next - x).norm() <= 1e-16 * std::max(1.0, x.norm())) {
      x = next;
      break;
    }
    x = next;
  }
  x_opt_ = x;
  phi_min_ = phi(x);

  const double normA = detail::operator_norm(A);
  core::ProblemConstants c;
  c.mu = mu;
  c.l_g1 = mu * std::max(1.0, normA);
  c.Lx0 = 0.0;
  c.Lx1 = u.norm() * std::exp(1.0 / std::sqrt(2.0));
  c.Ly0 = ky;
  c.l_f0 = ky * (normA * x_radius + (b - d).norm() + 1.0);
  constants_ = c;
}

double ExpUpperToy::f(const Vector& x, const Vector& y) const {
  return std::exp(u_.dot(x)) + 0.5 * ky_ * (y - d_).squaredNorm();
}

double ExpUpperToy::g(const Vector& x, const Vector& y) const {
  return 0.5 * mu_ * (y - lower_minimizer(x)).squaredNorm();
}

Vector ExpUpperToy::grad_x_f(const Vector& x, const Vector&) const { return u_ * std::exp(u_.dot(x)); }

Vector ExpUpperToy::grad_y_f(const Vector&, const Vector& y) const { return ky_ * (y - d_); }

Vector ExpUpperToy::grad_y_g(const Vector& x, const Vector& y) const { return mu_ * (y - lower_minimizer(x)); }

Vector ExpUpperToy::jvp_xy_g(const Vector&, const Vector&, const Vector& v) const {
  return -mu_ * (A_.transpose() * v);
}

Vector ExpUpperToy::hvp_yy_g(const Vector&, const Vector&, const Vector& v) const { return mu_ * v; }

Matrix ExpUpperToy::lower_hessian(const Vector&, const Vector&) const {
  return mu_ * Matrix::Identity(A_.rows(), A_.rows());
}

Matrix ExpUpperToy::cross_jacobian(const Vector&, const Vector&) const { return -mu_ * A_.transpose(); }

Vector ExpUpperToy::lower_minimizer(const Vector& x) const { return A_ * x + b_; }

double ExpUpperToy::lower_gap(const Vector& x, const Vector& y) const { return g(x, y); }

}  // namespace accbo::problems
