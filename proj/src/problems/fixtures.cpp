#include "accbo/problems/fixtures.hpp"

#include <cmath>

#include "accbo/core/errors.hpp"
#include "accbo/core/random_stream.hpp"

namespace accbo::problems {

namespace {

Matrix rotation(double theta) {
  Matrix R(2, 2);
  R << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return R;
}

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

}  // namespace

std::shared_ptr<const QuadraticBilevel> identity_quadratic(Eigen::Index dim) {
  QuadraticUpper up{1.0, Vector::Zero(dim), 1.0, Vector::Zero(dim)};
  return std::make_shared<const QuadraticBilevel>(
      QuadraticBilevel::isotropic(1.0, Matrix::Identity(dim, dim), Vector::Zero(dim), up, 10.0));
}

std::shared_ptr<const QuadraticBilevel> reference_isotropic() {
  QuadraticUpper up{0.2, vec({1.0, -1.0}), 0.04, vec({0.3, 0.2})};
  return std::make_shared<const QuadraticBilevel>(
      QuadraticBilevel::isotropic(1.0, 2.0 * rotation(0.5), vec({0.5, -0.3}), up, 10.0));
}

std::shared_ptr<const QuadraticBilevel> reference_general() {
  // Orthonormal basis from a fixed QR so the spectrum is exactly {1, 1.6, 2.5}.
  Matrix seed(3, 3);
  seed << 1.0, 0.4, -0.3, 0.2, 1.0, 0.5, -0.6, 0.1, 1.0;
  const Matrix Qm = seed.householderQr().householderQ();
  const Matrix H = Qm * vec({1.0, 1.6, 2.5}).asDiagonal() * Qm.transpose();
  const Matrix Hs = 0.5 * (H + H.transpose());
  Matrix B(3, 2);
  B << 1.2, -0.4, 0.3, 0.9, -0.5, 0.6;
  QuadraticUpper up{0.5, vec({0.5, -0.5}), 0.3, vec({0.2, -0.1, 0.4})};
  return std::make_shared<const QuadraticBilevel>(
      QuadraticBilevel::general(Hs, B, vec({0.3, -0.2, 0.1}), up, 5.0));
}

std::shared_ptr<const ExpUpperToy> reference_exp_toy() {
  Matrix A(2, 2);
  A << 1.5, 0.3, -0.2, 1.2;
  return std::make_shared<const ExpUpperToy>(1.0, A, vec({0.1, -0.2}), vec({0.4, -0.3}), 0.5, vec({0.5, 0.5}),
                                             5.0);
}

std::shared_ptr<const RidgeWeighting> reference_ridge(double upper_reg) {
  const core::RandomStream root(20240607);
  const Eigen::Index n = 8, m = 4, p = 3;
  const Vector w_true = core::gaussian_vector(root.child("w_true"), p, 1.0);
  Matrix Z(n, p), V(m, p);
  for (Eigen::Index i = 0; i < n; ++i) Z.row(i) = core::gaussian_vector(root.child("z_train", i), p, 0.5).transpose();
  for (Eigen::Index i = 0; i < m; ++i) V.row(i) = core::gaussian_vector(root.child("z_val", i), p, 0.5).transpose();
  Vector t = 2.0 * Z * w_true + core::gaussian_vector(root.child("noise_train"), n, 0.1);
  const Vector u = 2.0 * V * w_true + core::gaussian_vector(root.child("noise_val"), m, 0.1);
  // Three corrupted training labels give the weights something to learn.
  t[1] = -3.0 * t[1];
  t[4] += 4.0;
  t[6] = -t[6] - 2.0;
  return std::make_shared<const RidgeWeighting>(Z, t, V, u, 1.0, upper_reg);
}

std::vector<std::string> fixture_names() {
  return {"identity",        "reference_isotropic", "reference_general",
          "reference_exp_toy", "reference_ridge",     "reference_ridge_penalized"};
}

std::shared_ptr<const BilevelProblem> fixture_by_name(const std::string& name) {
  if (name == "identity") return identity_quadratic(1);
  if (name == "reference_isotropic") return reference_isotropic();
  if (name == "reference_general") return reference_general();
  if (name == "reference_exp_toy") return reference_exp_toy();
  if (name == "reference_ridge") return reference_ridge();
  if (name == "reference_ridge_penalized") return reference_ridge(1.0);
  throw ConstraintViolation("unknown fixture '" + name + "'");
}

}  // namespace accbo::problems
