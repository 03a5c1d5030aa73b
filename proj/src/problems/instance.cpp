#include "accbo/problems/instance.hpp"

#include <cmath>
#include <string>

#include "accbo/core/errors.hpp"

namespace accbo::problems {

namespace {

void add_noise(Vector& v, const core::RandomStream& stream, double per_entry_std) {
  if (per_entry_std == 0.0 || v.size() == 0) return;
  auto engine = stream.engine();
  Vector noise(v.size());
  core::fill_gaussian(engine, noise, per_entry_std);
  v += noise;
}

double per_entry(double sigma, Eigen::Index dim) { return sigma / std::sqrt(static_cast<double>(dim)); }

void check_noise(const NoiseModel& n) {
  auto ok = [](double s) { return std::isfinite(s) && s >= 0.0; };
  require(ok(n.sigma_f1) && ok(n.sigma_g1) && ok(n.sigma_g2), "noise scales must be finite and nonnegative");
}

}  // namespace

void check_dim(const Vector& v, Eigen::Index expected, const char* what) {
  if (v.size() != expected) {
    throw ConstraintViolation(std::string(what) + " has dimension " + std::to_string(v.size()) + ", expected " +
                              std::to_string(expected));
  }
}

BilevelInstance make_instance(std::shared_ptr<const BilevelProblem> problem, const NoiseModel& noise) {
  require(problem != nullptr, "instance needs a problem");
  check_noise(noise);
  BilevelInstance inst;
  inst.problem = std::move(problem);
  inst.noise = noise;
  inst.constants = inst.problem->analytic_constants();
  inst.constants.sigma_f1 = noise.sigma_f1;
  inst.constants.sigma_g1 = noise.sigma_g1;
  inst.constants.sigma_g2 = noise.sigma_g2;
  inst.constants.validate();
  return inst;
}

BilevelInstance with_noise(const BilevelInstance& inst, const NoiseModel& noise) {
  return make_instance(inst.problem, noise);
}

Vector lower_minimizer(const BilevelInstance& inst, const Vector& x) {
  check_dim(x, inst.dim_x(), "x");
  return inst.problem->lower_minimizer(x);
}

double phi_value(const BilevelInstance& inst, const Vector& x) {
  check_dim(x, inst.dim_x(), "x");
  return inst.problem->f(x, inst.problem->lower_minimizer(x));
}

Vector true_hypergradient(const BilevelInstance& inst, const Vector& x) {
  check_dim(x, inst.dim_x(), "x");
  return true_hypergradient(inst, x, inst.problem->lower_minimizer(x));
}

Vector true_hypergradient(const BilevelInstance& inst, const Vector& x, const Vector& y) {
  check_dim(x, inst.dim_x(), "x");
  check_dim(y, inst.dim_y(), "y");
  const auto& p = *inst.problem;
  Eigen::LLT<Matrix> llt(p.lower_hessian(x, y));
  require(llt.info() == Eigen::Success, "lower-level Hessian is not positive definite");
  return p.grad_x_f(x, y) - p.cross_jacobian(x, y) * llt.solve(p.grad_y_f(x, y));
}

Vector stoch_grad_y_g(const BilevelInstance& inst, const Vector& x, const Vector& y,
                      const core::RandomStream& stream) {
  check_dim(x, inst.dim_x(), "x");
  check_dim(y, inst.dim_y(), "y");
  Vector out = inst.problem->grad_y_g(x, y);
  add_noise(out, stream, inst.noise.sigma_g1 / std::sqrt(8.0 * static_cast<double>(inst.dim_y())));
  return out;
}

Vector stoch_grad_x_f(const BilevelInstance& inst, const Vector& x, const Vector& y,
                      const core::RandomStream& stream) {
  check_dim(x, inst.dim_x(), "x");
  check_dim(y, inst.dim_y(), "y");
  Vector out = inst.problem->grad_x_f(x, y);
  add_noise(out, stream, per_entry(inst.noise.sigma_f1, inst.dim_x()));
  return out;
}

Vector stoch_grad_y_f(const BilevelInstance& inst, const Vector& x, const Vector& y,
                      const core::RandomStream& stream) {
  check_dim(x, inst.dim_x(), "x");
  check_dim(y, inst.dim_y(), "y");
  Vector out = inst.problem->grad_y_f(x, y);
  add_noise(out, stream, per_entry(inst.noise.sigma_f1, inst.dim_y()));
  return out;
}

Vector stoch_jvp_xy_g(const BilevelInstance& inst, const Vector& x, const Vector& y, const Vector& v,
                      const core::RandomStream& stream) {
  check_dim(x, inst.dim_x(), "x");
  check_dim(y, inst.dim_y(), "y");
  check_dim(v, inst.dim_y(), "v");
  Vector out = inst.problem->jvp_xy_g(x, y, v);
  add_noise(out, stream, per_entry(inst.noise.sigma_g2, inst.dim_x()) * v.norm());
  return out;
}

Vector stoch_hvp_yy_g(const BilevelInstance& inst, const Vector& x, const Vector& y, const Vector& v,
                      const core::RandomStream& stream) {
  check_dim(x, inst.dim_x(), "x");
  check_dim(y, inst.dim_y(), "y");
  check_dim(v, inst.dim_y(), "v");
  Vector out = inst.problem->hvp_yy_g(x, y, v);
  add_noise(out, stream, per_entry(inst.noise.sigma_g2, inst.dim_y()) * v.norm());
  return out;
}

}  // namespace accbo::problems
