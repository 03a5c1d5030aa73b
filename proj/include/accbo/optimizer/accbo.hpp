#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "accbo/core/random_stream.hpp"
#include "accbo/core/schedule.hpp"
#include "accbo/hypergrad/estimator.hpp"
#include "accbo/problems/instance.hpp"

namespace accbo::optimizer {

using hypergrad::OracleCounters;

enum class LowerOption { one, two };

std::string to_string(LowerOption option);
LowerOption lower_option_from_string(const std::string& name);

/// True when the lower level is mu/2 ||y - y*(x)||^2 (required by option one).
bool has_isotropic_lower_level(const problems::BilevelInstance& inst);

struct AccboState {
  Vector x;
  Vector x_prev;
  Vector y;
  Vector y_prev;
  Vector y_hat;
  Vector y_hat_prev;
  Vector m;
  std::int64_t t = 0;
  LowerOption option = LowerOption::one;
  core::Schedule schedule;
};

/// One row per outer iteration t, describing (x_t, y_t, y_hat_t, m_t).
struct IterationLog {
  std::int64_t t = 0;
  /// ||grad Phi(x_t)||.
  double grad_norm = 0.0;
  double m_norm = 0.0;
  /// ||y_t - y*(x_t)||.
  double y_err = 0.0;
  /// ||y_hat_t - y*(x_t)||.
  double yhat_err = 0.0;
  /// ||y_hat_{t+1} - y_hat_t||.
  double yhat_step = 0.0;
  /// Cumulative calls after iteration t, warm start included.
  OracleCounters calls;
  bool zero_momentum = false;
};

struct RunOptions {
  /// Stop after the first iteration whose running average of ||grad Phi||
  /// over x_1..x_{t+1} is at most `target`.
  bool stop_at_target = false;
  double target = 0.0;
  /// Keep every k-th iteration log (the last iteration is always kept).
  std::int64_t log_every = 1;
};

struct RunResult {
  std::vector<IterationLog> logs;
  Vector x_final;
  /// ||grad Phi(x_k)|| for k = 1..iterations run.
  std::vector<double> grad_norm_after;
  /// Mean of grad_norm_after.
  double avg_grad_norm = 0.0;
  OracleCounters calls;
  std::int64_t zero_momentum_events = 0;
  /// Warm-start tracking error ||y_0 - y*(x_0)||.
  double warm_start_error = 0.0;
  bool reached_target = false;
  /// Cumulative calls when the running average first met the target.
  std::optional<std::int64_t> calls_to_target;
  std::optional<std::int64_t> iterations_to_target;
  bool aborted = false;
  std::string abort_reason;
};

/// T0 SNAG steps on g(x0, .) from y_init with step alpha_init and the
/// matching Nesterov momentum; step k reads stream.child("warm", k).
Vector warm_start(const problems::BilevelInstance& inst, const Vector& x0, const Vector& y_init, double alpha_init,
                  std::int64_t T0, const core::RandomStream& stream, OracleCounters* counters = nullptr);

/// One SNAG step on g(x_t, .) from (y_t, y_{t-1}).
AccboState lower_step_option1(const AccboState& s, const problems::BilevelInstance& inst,
                              const core::RandomStream& stream, OracleCounters* counters = nullptr);

/// N SNAG steps on g(x_t, .) restarted at y_t; inner step j reads
/// stream.child("#", j). y becomes the final inner iterate.
AccboState lower_round_option2(const AccboState& s, const problems::BilevelInstance& inst, std::int64_t N,
                               const core::RandomStream& stream, OracleCounters* counters = nullptr);

/// (1 - tau) y_hat + tau y_next.
Vector average_step(const Vector& y_hat, const Vector& y_next, double tau);

/// Recursive momentum. With `first` set it returns the estimator at
/// (x_now, yhat_now); otherwise beta m_prev + (1-beta) g_t + beta (g_t - g_prev)
/// where g_prev is evaluated at (x_prev, yhat_prev) with the same stream.
Vector momentum_update(const Vector& m_prev, const Vector& x_now, const Vector& x_prev, const Vector& yhat_now,
                       const Vector& yhat_prev, const problems::BilevelInstance& inst,
                       const hypergrad::EstimatorConfig& cfg, double beta, bool first,
                       const core::RandomStream& stream, OracleCounters* counters = nullptr);

struct UpperStep {
  Vector x;
  bool zero_momentum = false;
};

/// x - eta m / ||m||; x unchanged (and flagged) when m = 0.
UpperStep upper_step(const Vector& x, const Vector& m, double eta);

hypergrad::EstimatorConfig estimator_config(const core::Schedule& s, const problems::BilevelInstance& inst);

/// Warm start followed by schedule.T outer iterations. The run stream is
/// split into ("warm", k), ("lower", t) or ("lower", t, j), and ("upper", t).
/// A non-finite state stops the run; the logs up to that point are kept.
RunResult run_accbo(const problems::BilevelInstance& inst, const Vector& x0, const core::Schedule& schedule,
                    LowerOption option, const core::RandomStream& stream, const RunOptions& options = {});

/// Running average of ||grad Phi(x_k)||, k = 1..t, as a vector over t.
std::vector<double> running_average(const std::vector<double>& values);

}  // namespace accbo::optimizer
