#include "accbo/problems/ridge.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

#include "accbo/core/errors.hpp"
#include "linalg.hpp"

namespace accbo::problems {

namespace {

constexpr double kMaxSigmoidSlope = 0.25;
// max |sigmoid''| = 1 / (6 sqrt 3).
const double kMaxSigmoidCurvature = 1.0 / (6.0 * std::sqrt(3.0));

std::atomic<std::uint64_t> next_id{1};

double sigmoid_slope(double v) {
  const double s = sigmoid(v);
  return s * (1.0 - s);
}

}  // namespace

double sigmoid(double v) {
  if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
  const double e = std::exp(v);
  return e / (1.0 + e);
}

RidgeWeighting::RidgeWeighting(const Matrix& Z_train, const Vector& t_train, const Matrix& Z_val,
                               const Vector& t_val, double c_reg, double upper_reg)
    : Z_(Z_train), t_(t_train), V_(Z_val), u_(t_val), c_(c_reg), rho_(upper_reg), id_(next_id++) {
  require(Z_.rows() >= 1 && Z_.cols() >= 1, "training set must be nonempty");
  require(t_.size() == Z_.rows(), "training labels must match training rows");
  require(V_.rows() >= 1 && V_.cols() == Z_.cols(), "validation features must match training width");
  require(u_.size() == V_.rows(), "validation labels must match validation rows");
  require(std::isfinite(c_) && c_ > 0.0, "ridge regularizer must be positive");
  require(std::isfinite(rho_) && rho_ >= 0.0, "upper-level penalty must be nonnegative");
  require(Z_.allFinite() && t_.allFinite() && V_.allFinite() && u_.allFinite(), "ridge data must be finite");

  const double n = static_cast<double>(Z_.rows());
  const double m = static_cast<double>(V_.rows());
  const Matrix VtV = V_.transpose() * V_;
  f_floor_ = validation_loss(V_.completeOrthogonalDecomposition().solve(u_));

  // c ||w*||^2 <= g(lambda, 0) <= sum t_i^2 / (2n).
  R_w_ = std::sqrt(t_.squaredNorm() / (2.0 * c_ * n));
  const double Rb = R_w_ + 1.0;

  double cross_sq = 0.0;
  double z4 = 0.0;
  double rz_max = 0.0;
  for (Eigen::Index i = 0; i < Z_.rows(); ++i) {
    const double zn = Z_.row(i).norm();
    const double rmax = zn * Rb + std::abs(t_[i]);
    cross_sq += std::pow(kMaxSigmoidSlope * rmax * zn, 2);
    z4 += std::pow(zn, 4);
    rz_max = std::max(rz_max, rmax * zn);
  }

  core::ProblemConstants c;
  c.mu = 2.0 * c_;
  c.Lx0 = rho_;
  const double hess_max = detail::max_eigenvalue(Z_.transpose() * Z_) / n + 2.0 * c_;
  c.l_g1 = std::max(hess_max, std::sqrt(cross_sq) / n);
  c.l_g2 = (kMaxSigmoidCurvature * rz_max + kMaxSigmoidSlope * std::sqrt(z4)) / n;
  c.Ly0 = detail::max_eigenvalue(VtV) / m;
  c.l_f0 = (detail::max_eigenvalue(VtV) * Rb + (V_.transpose() * u_).norm()) / m;
  constants_ = c;
}

const Vector& RidgeWeighting::weights(const Vector& x) const {
  thread_local std::uint64_t owner = 0;
  thread_local Vector last_x;
  thread_local Vector last_s;
  if (owner != id_ || last_x.size() != x.size() || last_x != x) {
    last_s.resize(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) last_s[i] = sigmoid(x[i]);
    last_x = x;
    owner = id_;
  }
  return last_s;
}

double RidgeWeighting::validation_loss(const Vector& w) const {
  return 0.5 / static_cast<double>(V_.rows()) * (V_ * w - u_).squaredNorm();
}

double RidgeWeighting::f(const Vector& x, const Vector& y) const {
  return validation_loss(y) + 0.5 * rho_ * x.squaredNorm();
}

double RidgeWeighting::g(const Vector& x, const Vector& y) const {
  const Vector r = residual(y);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) acc += sigmoid(x[i]) * 0.5 * r[i] * r[i];
  return acc / static_cast<double>(Z_.rows()) + c_ * y.squaredNorm();
}

Vector RidgeWeighting::grad_x_f(const Vector& x, const Vector&) const { return rho_ * x; }

Vector RidgeWeighting::grad_y_f(const Vector&, const Vector& y) const {
  return V_.transpose() * (V_ * y - u_) / static_cast<double>(V_.rows());
}

Vector RidgeWeighting::grad_y_g(const Vector& x, const Vector& y) const {
  const Vector& s = weights(x);
  const double inv_n = 1.0 / static_cast<double>(Z_.rows());
  Vector out = 2.0 * c_ * y;
  for (Eigen::Index i = 0; i < Z_.rows(); ++i) {
    const double r = Z_.row(i).dot(y) - t_[i];
    out.noalias() += (s[i] * r * inv_n) * Z_.row(i).transpose();
  }
  return out;
}

Vector RidgeWeighting::jvp_xy_g(const Vector& x, const Vector& y, const Vector& v) const {
  const Vector r = residual(y);
  const Vector zv = Z_ * v;
  Vector out(x.size());
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = sigmoid_slope(x[i]) * r[i] * zv[i];
  return out / static_cast<double>(Z_.rows());
}

Vector RidgeWeighting::hvp_yy_g(const Vector& x, const Vector&, const Vector& v) const {
  Vector zv = Z_ * v;
  zv.array() *= weights(x).array();
  return Z_.transpose() * zv / static_cast<double>(Z_.rows()) + 2.0 * c_ * v;
}

Matrix RidgeWeighting::lower_hessian(const Vector& x, const Vector&) const {
  const Vector& s = weights(x);
  const auto p = Z_.cols();
  return Z_.transpose() * s.asDiagonal() * Z_ / static_cast<double>(Z_.rows()) +
         2.0 * c_ * Matrix::Identity(p, p);
}

Matrix RidgeWeighting::cross_jacobian(const Vector& x, const Vector& y) const {
  const Vector r = residual(y);
  Matrix J = Z_;
  for (Eigen::Index i = 0; i < J.rows(); ++i) J.row(i) *= sigmoid_slope(x[i]) * r[i];
  return J / static_cast<double>(Z_.rows());
}

Vector RidgeWeighting::lower_minimizer(const Vector& x) const {
  Vector st(x.size());
  for (Eigen::Index i = 0; i < st.size(); ++i) st[i] = sigmoid(x[i]) * t_[i];
  const Vector rhs = Z_.transpose() * st / static_cast<double>(Z_.rows());
  Eigen::LLT<Matrix> llt(lower_hessian(x, Vector::Zero(Z_.cols())));
  require(llt.info() == Eigen::Success, "ridge lower-level Hessian is not positive definite");
  return llt.solve(rhs);
}

}  // namespace accbo::problems
