#pragma once

#include <cstdint>
#include <functional>

#include "accbo/core/constants.hpp"
#include "accbo/core/random_stream.hpp"
#include "accbo/problems/instance.hpp"

namespace accbo::hypergrad {

struct EstimatorConfig {
  /// Neumann truncation depth.
  std::int64_t Q = 1;
  /// Batch size.
  std::int64_t S = 1;
  /// Scaling constant; must dominate the lower-level Hessian.
  double l_g1 = 1.0;
  /// When false the random depth q is replaced by the full truncated series
  /// (1/l) sum_{q<Q} (I - H/l)^q, i.e. its expectation over q.
  bool randomize_depth = true;

  void validate(double mu) const;

  friend bool operator==(const EstimatorConfig&, const EstimatorConfig&) = default;
};

/// Cumulative oracle calls by kind. One `f` call returns both partial
/// gradients of the upper level for one sample.
struct OracleCounters {
  std::int64_t g1 = 0;
  std::int64_t jvp = 0;
  std::int64_t hvp = 0;
  std::int64_t f = 0;

  std::int64_t total() const { return g1 + jvp + hvp + f; }
  OracleCounters& operator+=(const OracleCounters& o);

  friend bool operator==(const OracleCounters&, const OracleCounters&) = default;
};

using HvpOracle = std::function<Vector(const Vector& v, const core::RandomStream& stream)>;

/// (Q/l) * prod_{i=1..q} (I - H_i/l) v, the i-th factor drawn from
/// stream.child("hvp", i). q = 0 gives (Q/l) v.
Vector neumann_inverse_apply(const HvpOracle& hvp, const Vector& v, const EstimatorConfig& cfg, std::int64_t q,
                             const core::RandomStream& stream, OracleCounters* counters = nullptr);

/// (1/l) sum_{q=0}^{Q-1} prod_{i=1..q} (I - H_i/l) v along one chain.
Vector neumann_series_apply(const HvpOracle& hvp, const Vector& v, const EstimatorConfig& cfg,
                            const core::RandomStream& stream, OracleCounters* counters = nullptr);

/// Batched Neumann hypergradient at (x, y). One depth q ~ Uniform{0..Q-1} is
/// drawn from stream.child("q") and shared by the S samples; sample s reads
/// stream.child("sample", s). Samples are summed in index order.
Vector estimate_hypergradient(const problems::BilevelInstance& inst, const Vector& x, const Vector& y,
                              const EstimatorConfig& cfg, const core::RandomStream& stream,
                              OracleCounters* counters = nullptr);

/// The same estimator with the depth fixed to q.
Vector estimate_hypergradient_fixed_q(const problems::BilevelInstance& inst, const Vector& x, const Vector& y,
                                      const EstimatorConfig& cfg, std::int64_t q, const core::RandomStream& stream,
                                      OracleCounters* counters = nullptr);

/// Average of the fixed-depth estimator over every q in {0..Q-1}, all
/// sharing `stream`.
Vector estimate_depth_average(const problems::BilevelInstance& inst, const Vector& x, const Vector& y,
                              const EstimatorConfig& cfg, const core::RandomStream& stream);

/// (l_g1 l_f0 / mu) (1 - mu/l_g1)^Q.
double bias_bound(const core::ProblemConstants& c, std::int64_t Q);

struct BiasVarianceEstimate {
  double bias_bound = 0.0;
  double bias_est = 0.0;
  double var_est = 0.0;
  double se = 0.0;
  Vector mean;
};

/// Monte-Carlo bias ||mean - grad Phi(x)|| and total variance of the
/// estimator at (x, y*(x)); draw k uses stream.child("mc", k). se is
/// sqrt(var_est / n_samples).
BiasVarianceEstimate empirical_bias_and_variance(const problems::BilevelInstance& inst, const Vector& x,
                                                 const EstimatorConfig& cfg, std::int64_t n_samples,
                                                 const core::RandomStream& stream);

}  // namespace accbo::hypergrad
