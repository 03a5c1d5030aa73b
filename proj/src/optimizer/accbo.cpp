#include "accbo/optimizer/accbo.hpp"

#include <cmath>

#include "accbo/core/errors.hpp"
#include "accbo/snag/snag.hpp"

namespace accbo::optimizer {

using problems::BilevelInstance;

std::string to_string(LowerOption option) { return option == LowerOption::one ? "one" : "two"; }

LowerOption lower_option_from_string(const std::string& name) {
  if (name == "one" || name == "I" || name == "1") return LowerOption::one;
  if (name == "two" || name == "II" || name == "2") return LowerOption::two;
  throw ConstraintViolation("unknown lower-level option '" + name + "'");
}

bool has_isotropic_lower_level(const BilevelInstance& inst) {
  const auto kind = inst.problem->kind();
  return kind == problems::Kind::isotropic_quadratic || kind == problems::Kind::exp_upper_toy;
}

namespace {

snag::GradientOracle lower_oracle(const BilevelInstance& inst, const Vector& x, OracleCounters* counters) {
  return [&inst, x, counters](const Vector& z, const core::RandomStream& s) {
    if (counters) counters->g1 += 1;
    return problems::stoch_grad_y_g(inst, x, z, s);
  };
}

void check_finite(const Vector& v, const char* what, std::int64_t t) {
  if (!v.allFinite()) throw NumericalAbort(std::string(what) + " became non-finite at t=" + std::to_string(t));
}

}  // namespace

Vector warm_start(const BilevelInstance& inst, const Vector& x0, const Vector& y_init, double alpha_init,
                  std::int64_t T0, const core::RandomStream& stream, OracleCounters* counters) {
  require(T0 >= 1, "warm start needs T0 >= 1");
  problems::check_dim(x0, inst.dim_x(), "x0");
  problems::check_dim(y_init, inst.dim_y(), "y_init");
  auto state = snag::SnagState::start(y_init, inst.constants.mu, alpha_init);
  const auto grad = lower_oracle(inst, x0, counters);
  for (std::int64_t k = 0; k < T0; ++k) {
    state = snag::snag_step(state, grad, stream.child("warm", static_cast<std::uint64_t>(k)));
  }
  return state.w;
}

AccboState lower_step_option1(const AccboState& s, const BilevelInstance& inst, const core::RandomStream& stream,
                              OracleCounters* counters) {
  require(s.option == LowerOption::one, "lower_step_option1 called on an option-two state");
  snag::SnagState inner;
  inner.w = s.y;
  inner.w_prev = s.y_prev;
  inner.alpha = s.schedule.alpha;
  inner.gamma = s.schedule.gamma;
  inner.mu = inst.constants.mu;
  inner = snag::snag_step(inner, lower_oracle(inst, s.x, counters), stream);
  AccboState out = s;
  out.y_prev = inner.w_prev;
  out.y = inner.w;
  return out;
}

AccboState lower_round_option2(const AccboState& s, const BilevelInstance& inst, std::int64_t N,
                               const core::RandomStream& stream, OracleCounters* counters) {
  require(N >= 0, "inner round length must be nonnegative");
  snag::SnagState inner;
  inner.w = s.y;
  inner.w_prev = s.y;
  inner.alpha = s.schedule.alpha;
  inner.gamma = s.schedule.gamma;
  inner.mu = inst.constants.mu;
  const auto grad = lower_oracle(inst, s.x, counters);
  for (std::int64_t j = 0; j < N; ++j) inner = snag::snag_step(inner, grad, stream.child("#", static_cast<std::uint64_t>(j)));
  AccboState out = s;
  out.y_prev = N > 0 ? inner.w_prev : s.y_prev;
  out.y = inner.w;
  return out;
}

Vector average_step(const Vector& y_hat, const Vector& y_next, double tau) {
  require(tau >= 0.0 && tau <= 1.0, "averaging weight must lie in [0,1]");
  return (1.0 - tau) * y_hat + tau * y_next;
}

Vector momentum_update(const Vector& m_prev, const Vector& x_now, const Vector& x_prev, const Vector& yhat_now,
                       const Vector& yhat_prev, const BilevelInstance& inst, const hypergrad::EstimatorConfig& cfg,
                       double beta, bool first, const core::RandomStream& stream, OracleCounters* counters) {
  const Vector g = hypergrad::estimate_hypergradient(inst, x_now, yhat_now, cfg, stream, counters);
  if (first) return g;
  const Vector g_prev = hypergrad::estimate_hypergradient(inst, x_prev, yhat_prev, cfg, stream, counters);
  return beta * m_prev + (1.0 - beta) * g + beta * (g - g_prev);
}

UpperStep upper_step(const Vector& x, const Vector& m, double eta) {
  const double norm = m.norm();
  if (norm == 0.0) return {x, true};
  return {x - eta * (m / norm), false};
}

hypergrad::EstimatorConfig estimator_config(const core::Schedule& s, const BilevelInstance& inst) {
  hypergrad::EstimatorConfig cfg;
  cfg.Q = s.Q;
  cfg.S = s.S;
  cfg.l_g1 = inst.constants.l_g1;
  return cfg;
}

std::vector<double> running_average(const std::vector<double>& values) {
  std::vector<double> out;
  out.reserve(values.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    sum += values[i];
    out.push_back(sum / static_cast<double>(i + 1));
  }
  return out;
}

RunResult run_accbo(const BilevelInstance& inst, const Vector& x0, const core::Schedule& schedule,
                    LowerOption option, const core::RandomStream& stream, const RunOptions& options) {
  problems::check_dim(x0, inst.dim_x(), "x0");
  core::validate_schedule(schedule, inst.constants);
  require(option == LowerOption::two || has_isotropic_lower_level(inst),
          "option one requires an isotropic quadratic lower level");
  require(options.log_every >= 1, "log_every must be at least 1");
  const auto& p = *inst.problem;
  const auto cfg = estimator_config(schedule, inst);

  RunResult result;
  OracleCounters& calls = result.calls;
  AccboState s;
  s.option = option;
  s.schedule = schedule;
  s.x = x0;
  s.x_prev = x0;
  double sum_after = 0.0;

  IterationLog last_log;
  last_log.t = -1;
  try {
    const Vector y0 = warm_start(inst, x0, Vector::Zero(inst.dim_y()), schedule.alpha_init, schedule.T0, stream, &calls);
    check_finite(y0, "warm start", 0);
    s.y = s.y_prev = s.y_hat = s.y_hat_prev = y0;
    s.m = Vector::Zero(inst.dim_x());
    Vector y_star = p.lower_minimizer(x0);
    double grad_norm = problems::true_hypergradient(inst, x0, y_star).norm();
    result.warm_start_error = (y0 - y_star).norm();

    for (std::int64_t t = 0; t < schedule.T; ++t) {
      IterationLog log;
      log.t = t;
      log.grad_norm = grad_norm;
      log.y_err = (s.y - y_star).norm();
      log.yhat_err = (s.y_hat - y_star).norm();

      AccboState next = s;
      const auto lower_stream = stream.child("lower", static_cast<std::uint64_t>(t));
      if (option == LowerOption::one) {
        next = lower_step_option1(s, inst, lower_stream, &calls);
      } else if (t > 0 && t % schedule.I == 0) {
        next = lower_round_option2(s, inst, schedule.N, lower_stream, &calls);
      }
      check_finite(next.y, "lower iterate", t);
      const Vector y_hat_next = average_step(s.y_hat, next.y, schedule.tau);

      const Vector m = momentum_update(s.m, s.x, s.x_prev, s.y_hat, s.y_hat_prev, inst, cfg, schedule.beta, t == 0,
                                       stream.child("upper", static_cast<std::uint64_t>(t)), &calls);
      check_finite(m, "momentum", t);
      const UpperStep up = upper_step(s.x, m, schedule.eta);

      log.m_norm = m.norm();
      log.yhat_step = (y_hat_next - s.y_hat).norm();
      log.zero_momentum = up.zero_momentum;
      log.calls = calls;
      if (up.zero_momentum) ++result.zero_momentum_events;
      if (t % options.log_every == 0) result.logs.push_back(log);
      last_log = log;

      s.x_prev = s.x;
      s.x = up.x;
      s.y = next.y;
      s.y_prev = next.y_prev;
      s.y_hat_prev = s.y_hat;
      s.y_hat = y_hat_next;
      s.m = m;
      s.t = t + 1;

      y_star = p.lower_minimizer(s.x);
      const double after = problems::true_hypergradient(inst, s.x, y_star).norm();
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
  result.x_final = s.x;
  result.avg_grad_norm =
      result.grad_norm_after.empty() ? 0.0 : sum_after / static_cast<double>(result.grad_norm_after.size());
  return result;
}

}  // namespace accbo::optimizer
