#include "accbo/problems/serialization.hpp"

#include "accbo/core/errors.hpp"
#include "accbo/problems/fixtures.hpp"

namespace accbo::problems {

using core::Json;
using core::JsonObjectReader;

namespace {

QuadraticUpper upper_from_json(const Json& node, const std::string& path) {
  JsonObjectReader r(node, path);
  QuadraticUpper up;
  up.kx = r.required_double("kx");
  up.c = r.required_vector("c");
  up.ky = r.required_double("ky");
  up.d = r.required_vector("d");
  r.finish();
  return up;
}

Json upper_to_json(const QuadraticUpper& up) {
  return Json{{"kx", up.kx}, {"c", core::vector_to_json(up.c)}, {"ky", up.ky}, {"d", core::vector_to_json(up.d)}};
}

template <class Fn>
auto wrap(const std::string& path, Fn&& fn) {
  try {
    return fn();
  } catch (const ConstraintViolation& e) {
    core::config_error(path, e.what());
  }
}

}  // namespace

NoiseModel noise_from_json(const Json& node, const std::string& path) {
  JsonObjectReader r(node, path);
  NoiseModel n;
  n.sigma_f1 = r.optional_double("sigma_f1").value_or(0.0);
  n.sigma_g1 = r.optional_double("sigma_g1").value_or(0.0);
  n.sigma_g2 = r.optional_double("sigma_g2").value_or(0.0);
  r.finish();
  if (n.sigma_f1 < 0.0 || n.sigma_g1 < 0.0 || n.sigma_g2 < 0.0) core::config_error(path, "noise scales must be nonnegative");
  return n;
}

Json noise_to_json(const NoiseModel& n) {
  return Json{{"sigma_f1", n.sigma_f1}, {"sigma_g1", n.sigma_g1}, {"sigma_g2", n.sigma_g2}};
}

BilevelInstance instance_from_json(const Json& node, const std::string& path) {
  JsonObjectReader r(node, path);
  NoiseModel noise;
  if (const Json* n = r.optional_node("noise")) noise = noise_from_json(*n, r.path_of("noise"));

  std::shared_ptr<const BilevelProblem> problem;
  if (r.has("fixture")) {
    const std::string name = r.required_string("fixture");
    problem = wrap(r.path_of("fixture"), [&] { return fixture_by_name(name); });
  } else {
    const std::string kind_name = r.required_string("kind");
    const Kind kind = wrap(r.path_of("kind"), [&] { return kind_from_string(kind_name); });
    switch (kind) {
      case Kind::isotropic_quadratic: {
        const double mu = r.required_double("mu");
        const Matrix A = r.required_matrix("A");
        const Vector b = r.required_vector("b");
        const QuadraticUpper up = upper_from_json(r.required_node("upper"), r.path_of("upper"));
        const double radius = r.required_double("x_radius");
        problem = wrap(path, [&] {
          return std::make_shared<const QuadraticBilevel>(QuadraticBilevel::isotropic(mu, A, b, up, radius));
        });
        break;
      }
      case Kind::general_quadratic: {
        const Matrix H = r.required_matrix("H");
        const Matrix B = r.required_matrix("B");
        const Vector b = r.required_vector("b");
        const QuadraticUpper up = upper_from_json(r.required_node("upper"), r.path_of("upper"));
        const double radius = r.required_double("x_radius");
        problem = wrap(path, [&] {
          return std::make_shared<const QuadraticBilevel>(QuadraticBilevel::general(H, B, b, up, radius));
        });
        break;
      }
      case Kind::exp_upper_toy: {
        const double mu = r.required_double("mu");
        const Matrix A = r.required_matrix("A");
        const Vector b = r.required_vector("b");
        const Vector u = r.required_vector("u");
        const double ky = r.required_double("ky");
        const Vector d = r.required_vector("d");
        const double radius = r.required_double("x_radius");
        problem = wrap(path, [&] { return std::make_shared<const ExpUpperToy>(mu, A, b, u, ky, d, radius); });
        break;
      }
      case Kind::ridge_weighting: {
        const Matrix Z = r.required_matrix("Z_train");
        const Vector t = r.required_vector("t_train");
        const Matrix V = r.required_matrix("Z_val");
        const Vector u = r.required_vector("t_val");
        const double c = r.required_double("c_reg");
        const double rho = r.optional_double("upper_reg").value_or(0.0);
        problem = wrap(path, [&] { return std::make_shared<const RidgeWeighting>(Z, t, V, u, c, rho); });
        break;
      }
    }
  }
  r.finish();
  return wrap(path, [&] { return make_instance(problem, noise); });
}

Json instance_to_json(const BilevelInstance& inst) {
  Json out;
  const BilevelProblem* p = inst.problem.get();
  if (const auto* q = dynamic_cast<const QuadraticBilevel*>(p)) {
    out["kind"] = to_string(q->kind());
    if (q->kind() == Kind::isotropic_quadratic) {
      out["mu"] = q->H()(0, 0);
      out["A"] = core::matrix_to_json(q->A());
      out["b"] = core::vector_to_json(q->b_iso());
    } else {
      out["H"] = core::matrix_to_json(q->H());
      out["B"] = core::matrix_to_json(q->B());
      out["b"] = core::vector_to_json(q->b());
    }
    out["upper"] = upper_to_json(q->upper());
    out["x_radius"] = q->x_radius();
  } else if (const auto* e = dynamic_cast<const ExpUpperToy*>(p)) {
    out["kind"] = to_string(Kind::exp_upper_toy);
    out["mu"] = e->mu();
    out["A"] = core::matrix_to_json(e->A());
    out["b"] = core::vector_to_json(e->b());
    out["u"] = core::vector_to_json(e->u());
    out["ky"] = e->ky();
    out["d"] = core::vector_to_json(e->d());
    out["x_radius"] = e->x_radius();
  } else if (const auto* rw = dynamic_cast<const RidgeWeighting*>(p)) {
    out["kind"] = to_string(Kind::ridge_weighting);
    out["Z_train"] = core::matrix_to_json(rw->Z_train());
    out["t_train"] = core::vector_to_json(rw->t_train());
    out["Z_val"] = core::matrix_to_json(rw->Z_val());
    out["t_val"] = core::vector_to_json(rw->t_val());
    out["c_reg"] = rw->c_reg();
    out["upper_reg"] = rw->upper_reg();
  } else {
    throw ConstraintViolation("instance_to_json: unsupported problem type");
  }
  out["noise"] = noise_to_json(inst.noise);
  return out;
}

}  // namespace accbo::problems
