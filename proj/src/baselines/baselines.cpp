#include "accbo/baselines/baselines.hpp"

#include <cmath>

#include "accbo/core/errors.hpp"

namespace accbo::baselines {

using optimizer::RunOptions;
using optimizer::RunResult;
using problems::BilevelInstance;

std::string to_string(BaselineKind kind) {
  return kind == BaselineKind::sgd_tracker ? "sgd_tracker" : "plain_momentum_bilevel";
}

Vector sgd_tracking_step(const Vector& w, const snag::GradientOracle& grad, double alpha,
                         const core::RandomStream& stream) {
  require(std::isfinite(alpha) && alpha > 0.0, "SGD step size must be positive");
  const Vector g = grad(w, stream);
  if (g.size() != w.size() || !g.allFinite()) throw NumericalAbort("SGD step: non-finite or misshapen gradient");
  return w - alpha * g;
}

std::vector<double> run_sgd_tracking(const snag::QuadraticFamily& family, const snag::DriftProcess& drift,
                                     double alpha, std::int64_t T, const Vector& w0,
                                     const core::RandomStream& stream) {
  const Eigen::Index d = family.dim();
  require(w0.size() == d, "SGD tracking: dimension mismatch");
  require(T >= 1, "SGD tracking: T must be at least 1");
  drift.validate(d);
  const double per_entry = family.sigma / std::sqrt(8.0 * static_cast<double>(d));
  Vector w_star = family.w_star0;
  snag::GradientOracle grad = [&](const Vector& z, const core::RandomStream& s) -> Vector {
    Vector g = family.H * (z - w_star);
    if (per_entry > 0.0) {
      auto engine = s.engine();
      Vector noise(d);
      core::fill_gaussian(engine, noise, per_entry);
      g += noise;
    }
    return g;
  };
  std::vector<double> dist;
  dist.reserve(static_cast<std::size_t>(T) + 1);
  Vector w = w0;
  for (std::int64_t t = 0;; ++t) {
    dist.push_back((w - w_star).norm());
    if (t == T) break;
    w = sgd_tracking_step(w, grad, alpha, stream.child("grad", static_cast<std::uint64_t>(t)));
    if (drift.kind != snag::DriftKind::none) w_star += drift.displacement(t, d, stream);
  }
  return dist;
}

RunResult run_plain_momentum_bilevel(const BilevelInstance& inst, const Vector& x0, const core::Schedule& schedule,
                                     const PlainMomentumParams& params, const core::RandomStream& stream,
                                     const RunOptions& options) {
  problems::check_dim(x0, inst.dim_x(), "x0");
  require(std::isfinite(params.lower_step) && params.lower_step > 0.0, "baseline lower step must be positive");
  require(schedule.beta >= 0.0 && schedule.beta < 1.0, "baseline beta must lie in [0,1)");
  require(schedule.eta > 0.0, "baseline eta must be positive");
  require(options.log_every >= 1, "log_every must be at least 1");
  const auto& p = *inst.problem;
  const auto cfg = optimizer::estimator_config(schedule, inst);

  RunResult result;
  auto& calls = result.calls;
  Vector x = x0;
  Vector y;
  Vector m = Vector::Zero(inst.dim_x());
  double sum_after = 0.0;
  optimizer::IterationLog last_log;
  last_log.t = -1;
  try {
    y = optimizer::warm_start(inst, x0, Vector::Zero(inst.dim_y()), schedule.alpha_init, schedule.T0, stream, &calls);
    Vector y_star = p.lower_minimizer(x0);
    double grad_norm = problems::true_hypergradient(inst, x0, y_star).norm();
    result.warm_start_error = (y - y_star).norm();
    for (std::int64_t t = 0; t < schedule.T; ++t) {
      optimizer::IterationLog log;
      log.t = t;
      log.grad_norm = grad_norm;
      log.y_err = (y - y_star).norm();
      log.yhat_err = log.y_err;

      const Vector g = hypergrad::estimate_hypergradient(inst, x, y, cfg,
                                                         stream.child("upper", static_cast<std::uint64_t>(t)), &calls);
      m = t == 0 ? g : Vector(schedule.beta * m + (1.0 - schedule.beta) * g);
      if (!m.allFinite()) throw NumericalAbort("baseline momentum became non-finite at t=" + std::to_string(t));

      calls.g1 += 1;
      const Vector y_next =
          y - params.lower_step *
                  problems::stoch_grad_y_g(inst, x, y, stream.child("lower", static_cast<std::uint64_t>(t)));
      if (!y_next.allFinite()) throw NumericalAbort("baseline lower iterate became non-finite at t=" + std::to_string(t));

      const auto up = optimizer::upper_step(x, m, schedule.eta);
      log.m_norm = m.norm();
      log.yhat_step = (y_next - y).norm();
      log.zero_momentum = up.zero_momentum;
      log.calls = calls;
      if (up.zero_momentum) ++result.zero_momentum_events;
      if (t % options.log_every == 0) result.logs.push_back(log);
      last_log = log;

      x = up.x;
      y = y_next;
      y_star = p.lower_minimizer(x);
      const double after = problems::true_hypergradient(inst, x, y_star).norm();
      grad_norm = after;
      if (!std::isfinite(after)) throw NumericalAbort("hypergradient became non-finite at t=" + std::to_string(t + 1));
      result.grad_norm_after.push_back(after);
      sum_after += after;
      const double avg = sum_after / static_cast<double>(result.grad_norm_after.size());
      if (!result.reached_target && options.target > 0.0 && avg <= options.target) {
        result.reached_target = true;
        result.calls_to_target = calls.total();
        result.iterations_to_target = t + 1;
        if (options.stop_at_target) break;
      }
    }
  } catch (const NumericalAbort& e) {
    result.aborted = true;
    result.abort_reason = e.what();
  }
  if (last_log.t >= 0 && (result.logs.empty() || result.logs.back().t != last_log.t)) result.logs.push_back(last_log);
  result.x_final = x;
  result.avg_grad_norm =
      result.grad_norm_after.empty() ? 0.0 : sum_after / static_cast<double>(result.grad_norm_after.size());
  return result;
}

}  // namespace accbo::baselines
