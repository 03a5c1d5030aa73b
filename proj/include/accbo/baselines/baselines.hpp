#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "accbo/core/random_stream.hpp"
#include "accbo/core/schedule.hpp"
#include "accbo/optimizer/accbo.hpp"
#include "accbo/snag/snag.hpp"
#include "accbo/snag/tracking.hpp"

namespace accbo::baselines {

enum class BaselineKind { sgd_tracker, plain_momentum_bilevel };

std::string to_string(BaselineKind kind);

/// w - alpha * grad(w). Throws NumericalAbort on a non-finite gradient.
Vector sgd_tracking_step(const Vector& w, const snag::GradientOracle& grad, double alpha,
                         const core::RandomStream& stream);

/// ||w_t - w*_t|| for t = 0..T of plain SGD on the same drifting family, noise
/// and stream labels as snag::run_tracking_experiment.
std::vector<double> run_sgd_tracking(const snag::QuadraticFamily& family, const snag::DriftProcess& drift,
                                     double alpha, std::int64_t T, const Vector& w0,
                                     const core::RandomStream& stream);

struct PlainMomentumParams {
  /// Step of the single SGD lower-level update per outer iteration.
  double lower_step = 0.0;
};

/// Normalized stochastic hypergradient descent with plain momentum
/// m_t = beta m_{t-1} + (1 - beta) g_t, one SGD step on the lower level per
/// iteration and the hypergradient taken at y_t itself. Uses eta, beta, T,
/// T0, alpha_init, Q and S from `schedule`. Logs and streams follow run_accbo.
optimizer::RunResult run_plain_momentum_bilevel(const problems::BilevelInstance& inst, const Vector& x0,
                                                const core::Schedule& schedule, const PlainMomentumParams& params,
                                                const core::RandomStream& stream,
                                                const optimizer::RunOptions& options = {});

}  // namespace accbo::baselines
