#include "accbo/hypergrad/estimator.hpp"

#include <cmath>
#include <random>

#include "accbo/core/errors.hpp"

namespace accbo::hypergrad {

using problems::BilevelInstance;

void EstimatorConfig::validate(double mu) const {
  require(Q >= 1, "estimator depth Q must be at least 1");
  require(S >= 1, "estimator batch S must be at least 1");
  require(std::isfinite(l_g1) && l_g1 >= mu, "estimator l_g1 must be at least mu");
}

OracleCounters& OracleCounters::operator+=(const OracleCounters& o) {
  g1 += o.g1;
  jvp += o.jvp;
  hvp += o.hvp;
  f += o.f;
  return *this;
}

Vector neumann_inverse_apply(const HvpOracle& hvp, const Vector& v, const EstimatorConfig& cfg, std::int64_t q,
                             const core::RandomStream& stream, OracleCounters* counters) {
  require(q >= 0 && q < cfg.Q, "Neumann depth q must lie in [0, Q)");
  Vector u = v;
  for (std::int64_t i = 1; i <= q; ++i) {
    u -= hvp(u, stream.child("hvp", static_cast<std::uint64_t>(i))) / cfg.l_g1;
  }
  if (counters) counters->hvp += q;
  return (static_cast<double>(cfg.Q) / cfg.l_g1) * u;
}

Vector neumann_series_apply(const HvpOracle& hvp, const Vector& v, const EstimatorConfig& cfg,
                            const core::RandomStream& stream, OracleCounters* counters) {
  Vector u = v;
  Vector acc = v;
  for (std::int64_t i = 1; i < cfg.Q; ++i) {
    u -= hvp(u, stream.child("hvp", static_cast<std::uint64_t>(i))) / cfg.l_g1;
    acc += u;
  }
  if (counters) counters->hvp += cfg.Q - 1;
  return acc / cfg.l_g1;
}

namespace {

Vector single_sample(const BilevelInstance& inst, const Vector& x, const Vector& y, const EstimatorConfig& cfg,
                     std::int64_t q, const core::RandomStream& sample, OracleCounters* counters) {
  const Vector gx = problems::stoch_grad_x_f(inst, x, y, sample.child("fx"));
  const Vector gy = problems::stoch_grad_y_f(inst, x, y, sample.child("fy"));
  HvpOracle hvp = [&](const Vector& v, const core::RandomStream& s) {
    return problems::stoch_hvp_yy_g(inst, x, y, v, s);
  };
  const Vector u = q < 0 ? neumann_series_apply(hvp, gy, cfg, sample, counters)
                         : neumann_inverse_apply(hvp, gy, cfg, q, sample, counters);
  const Vector jv = problems::stoch_jvp_xy_g(inst, x, y, u, sample.child("jvp"));
  if (counters) {
    counters->f += 1;
    counters->jvp += 1;
  }
  return gx - jv;
}

Vector batch(const BilevelInstance& inst, const Vector& x, const Vector& y, const EstimatorConfig& cfg,
             std::int64_t q, const core::RandomStream& stream, OracleCounters* counters) {
  cfg.validate(inst.constants.mu);
  Vector acc = Vector::Zero(inst.dim_x());
  for (std::int64_t s = 0; s < cfg.S; ++s) {
    acc += single_sample(inst, x, y, cfg, q, stream.child("sample", static_cast<std::uint64_t>(s)), counters);
  }
  acc /= static_cast<double>(cfg.S);
  if (!acc.allFinite()) throw NumericalAbort("hypergradient estimate is not finite");
  return acc;
}

}  // namespace

Vector estimate_hypergradient(const BilevelInstance& inst, const Vector& x, const Vector& y,
                              const EstimatorConfig& cfg, const core::RandomStream& stream,
                              OracleCounters* counters) {
  std::int64_t q = -1;
  if (cfg.randomize_depth) {
    auto engine = stream.child("q").engine();
    std::uniform_int_distribution<std::int64_t> pick(0, cfg.Q - 1);
    q = pick(engine);
  }
  return batch(inst, x, y, cfg, q, stream, counters);
}

Vector estimate_hypergradient_fixed_q(const BilevelInstance& inst, const Vector& x, const Vector& y,
                                      const EstimatorConfig& cfg, std::int64_t q, const core::RandomStream& stream,
                                      OracleCounters* counters) {
  require(q >= 0 && q < cfg.Q, "Neumann depth q must lie in [0, Q)");
  return batch(inst, x, y, cfg, q, stream, counters);
}

Vector estimate_depth_average(const BilevelInstance& inst, const Vector& x, const Vector& y,
                              const EstimatorConfig& cfg, const core::RandomStream& stream) {
  Vector acc = Vector::Zero(inst.dim_x());
  for (std::int64_t q = 0; q < cfg.Q; ++q) acc += estimate_hypergradient_fixed_q(inst, x, y, cfg, q, stream);
  return acc / static_cast<double>(cfg.Q);
}

double bias_bound(const core::ProblemConstants& c, std::int64_t Q) {
  c.validate();
  require(Q >= 1, "bias bound needs Q >= 1");
  return c.l_g1 * c.l_f0 / c.mu * std::pow(1.0 - c.mu / c.l_g1, static_cast<double>(Q));
}

BiasVarianceEstimate empirical_bias_and_variance(const BilevelInstance& inst, const Vector& x,
                                                 const EstimatorConfig& cfg, std::int64_t n_samples,
                                                 const core::RandomStream& stream) {
  require(n_samples >= 1000, "bias/variance estimate needs at least 1000 samples");
  const Vector y = problems::lower_minimizer(inst, x);
  const Vector truth = problems::true_hypergradient(inst, x);
  const Eigen::Index d = inst.dim_x();
  // Shifted accumulation around the truth keeps the variance numerically stable.
  Vector sum = Vector::Zero(d);
  double sum_sq = 0.0;
  for (std::int64_t k = 0; k < n_samples; ++k) {
    const Vector e = estimate_hypergradient(inst, x, y, cfg, stream.child("mc", static_cast<std::uint64_t>(k))) - truth;
    sum += e;
    sum_sq += e.squaredNorm();
  }
  const double n = static_cast<double>(n_samples);
  BiasVarianceEstimate out;
  const Vector mean_err = sum / n;
  out.mean = truth + mean_err;
  out.bias_bound = bias_bound(inst.constants, cfg.Q);
  out.bias_est = mean_err.norm();
  out.var_est = std::max(0.0, (sum_sq - n * mean_err.squaredNorm()) / (n - 1.0));
  out.se = std::sqrt(out.var_est / n);
  return out;
}

}  // namespace accbo::hypergrad
