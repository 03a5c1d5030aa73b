#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "accbo/core/random_stream.hpp"
#include "accbo/core/types.hpp"
#include "accbo/snag/snag.hpp"

namespace accbo::snag {

struct TrackingBoundParams {
  double mu = 1.0;
  double alpha = 0.04;
  /// Smoothness of the tracked family; alpha must not exceed 1/(25 L).
  double L = 1.0;
  double sigma = 0.0;
  double delta_drift = 0.0;
  std::int64_t T = 1;
  double delta_prob = 0.05;
  double V0 = 0.0;

  void validate() const;
};

/// (1 - sqrt(mu alpha)/4)^t V0 + (5 sqrt(alpha) sigma^2 / sqrt(mu) + 80 Delta^2 / alpha) ln(eT/delta).
double tracking_bound_with_drift(const TrackingBoundParams& p, std::int64_t t);
/// The same without the drift term.
double tracking_bound_no_drift(const TrackingBoundParams& p, std::int64_t t);

enum class DriftKind { none, fixed_direction, random_walk, external };

std::string to_string(DriftKind kind);
DriftKind drift_kind_from_string(const std::string& name);

/// Moves the minimizer between steps: w*_{t+1} = w*_t + displacement(t).
struct DriftProcess {
  DriftKind kind = DriftKind::none;
  double delta = 0.0;
  /// fixed_direction: normalized internally.
  Vector direction;
  /// external: one displacement per step; steps past the end do not move.
  std::vector<Vector> external;

  Vector displacement(std::int64_t t, Eigen::Index dim, const core::RandomStream& stream) const;
  /// Largest per-step displacement norm.
  double max_step() const;
  void validate(Eigen::Index dim) const;
};

/// phi_t(w) = 1/2 (w - w*_t)^T H (w - w*_t) with stochastic gradients whose
/// noise has iid entries of std sigma / sqrt(8 d).
struct QuadraticFamily {
  Matrix H;
  Vector w_star0;
  double sigma = 0.0;

  static QuadraticFamily isotropic(Eigen::Index dim, double mu, double sigma);
  /// Diagonal spectrum spaced geometrically in [mu, L].
  static QuadraticFamily anisotropic(Eigen::Index dim, double mu, double L, double sigma);

  Eigen::Index dim() const { return H.rows(); }
  double mu() const;
  double L() const;
  bool is_isotropic() const;
};

struct TrackingRow {
  std::int64_t t = 0;
  double V = 0.0;
  double bound = 0.0;
  double dist = 0.0;
  double phi_gap = 0.0;
};

/// Runs SNAG against the drifting family for p.T steps from w0 and records
/// the potential at t = 0..T. The bound column uses the with-drift form when
/// the drift is not `none`, p.V0 is replaced by the measured V_0 and
/// p.delta_drift is raised to the drift's largest step if it is smaller.
std::vector<TrackingRow> run_tracking_experiment(const QuadraticFamily& family, const DriftProcess& drift,
                                                 TrackingBoundParams p, const Vector& w0,
                                                 const core::RandomStream& stream);

struct ViolationSummary {
  std::int64_t runs = 0;
  std::int64_t violations = 0;
  double rate = 0.0;
  /// Per-run max_t V_t / bound_t, in seed order.
  std::vector<double> max_ratio;
  /// Per-run max_t V_t, in seed order.
  std::vector<double> max_V;
};

/// Fraction of independent runs (seed streams stream.child("seed", k)) in
/// which V_t > bound_t for some t. Aggregation is in seed order, so the
/// result does not depend on `threads`.
ViolationSummary mc_tracking_violation_rate(const QuadraticFamily& family, const DriftProcess& drift,
                                            const TrackingBoundParams& p, const Vector& w0, std::int64_t n_seeds,
                                            const core::RandomStream& stream, int threads = 1);

}  // namespace accbo::snag
