#include "accbo/problems/bilevel_problem.hpp"

#include "accbo/core/errors.hpp"

namespace accbo::problems {

std::string to_string(Kind kind) {
  switch (kind) {
    case Kind::isotropic_quadratic: return "isotropic_quadratic";
    case Kind::general_quadratic: return "general_quadratic";
    case Kind::ridge_weighting: return "ridge_weighting";
    case Kind::exp_upper_toy: return "exp_upper_toy";
  }
  return "unknown";
}

Kind kind_from_string(const std::string& name) {
  if (name == "isotropic_quadratic") return Kind::isotropic_quadratic;
  if (name == "general_quadratic") return Kind::general_quadratic;
  if (name == "ridge_weighting") return Kind::ridge_weighting;
  if (name == "exp_upper_toy") return Kind::exp_upper_toy;
  throw ConstraintViolation("unknown instance kind '" + name + "'");
}

Vector BilevelProblem::jvp_xy_g(const Vector& x, const Vector& y, const Vector& v) const {
  return cross_jacobian(x, y) * v;
}

Vector BilevelProblem::hvp_yy_g(const Vector& x, const Vector& y, const Vector& v) const {
  return lower_hessian(x, y) * v;
}

double BilevelProblem::lower_gap(const Vector& x, const Vector& y) const {
  return g(x, y) - g(x, lower_minimizer(x));
}

}  // namespace accbo::problems
