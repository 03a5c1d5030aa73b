#pragma once

#include <memory>

#include "accbo/core/constants.hpp"
#include "accbo/core/random_stream.hpp"
#include "accbo/problems/bilevel_problem.hpp"

namespace accbo::problems {

/// Additive Gaussian oracle noise.
///
/// Lower-level gradient noise has iid entries of std sigma_g1 / sqrt(8 d_y),
/// so E||e||^2 = sigma_g1^2 / 8 and the norm tail is sub-Gaussian with room to
/// spare. Upper-level gradient noise has per-entry std sigma_f1 / sqrt(d).
/// Second-order products get exact(v) + xi * ||v|| with per-entry std
/// sigma_g2 / sqrt(d_out).
struct NoiseModel {
  double sigma_f1 = 0.0;
  double sigma_g1 = 0.0;
  double sigma_g2 = 0.0;

  friend bool operator==(const NoiseModel&, const NoiseModel&) = default;
};

/// A problem together with its noise model and constants. The constants are
/// the problem's analytic ones with the noise scales filled in.
struct BilevelInstance {
  std::shared_ptr<const BilevelProblem> problem;
  NoiseModel noise;
  core::ProblemConstants constants;

  const BilevelProblem& exact() const { return *problem; }
  Eigen::Index dim_x() const { return problem->dim_x(); }
  Eigen::Index dim_y() const { return problem->dim_y(); }
};

BilevelInstance make_instance(std::shared_ptr<const BilevelProblem> problem, const NoiseModel& noise);
BilevelInstance with_noise(const BilevelInstance& inst, const NoiseModel& noise);

Vector lower_minimizer(const BilevelInstance& inst, const Vector& x);
double phi_value(const BilevelInstance& inst, const Vector& x);
/// grad_x f - J H^{-1} grad_y f at (x, y*(x)), via a dense Cholesky solve.
Vector true_hypergradient(const BilevelInstance& inst, const Vector& x);
/// Same, with the lower minimizer y_star = y*(x) already at hand.
Vector true_hypergradient(const BilevelInstance& inst, const Vector& x, const Vector& y_star);

Vector stoch_grad_y_g(const BilevelInstance& inst, const Vector& x, const Vector& y,
                      const core::RandomStream& stream);
Vector stoch_grad_x_f(const BilevelInstance& inst, const Vector& x, const Vector& y,
                      const core::RandomStream& stream);
Vector stoch_grad_y_f(const BilevelInstance& inst, const Vector& x, const Vector& y,
                      const core::RandomStream& stream);
Vector stoch_jvp_xy_g(const BilevelInstance& inst, const Vector& x, const Vector& y, const Vector& v,
                      const core::RandomStream& stream);
Vector stoch_hvp_yy_g(const BilevelInstance& inst, const Vector& x, const Vector& y, const Vector& v,
                      const core::RandomStream& stream);

/// Throws ConstraintViolation if the vector's size differs from `expected`.
void check_dim(const Vector& v, Eigen::Index expected, const char* what);

}  // namespace accbo::problems
