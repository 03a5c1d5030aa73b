#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "accbo/core/constants.hpp"

namespace accbo::core {

enum class ScheduleMode { theorem, practical };

std::string to_string(ScheduleMode mode);
ScheduleMode schedule_mode_from_string(const std::string& name);

/// Explicit values that replace derived ones. In practical mode at least one of
/// `one_minus_beta` or `alpha` must be given; every field left empty is filled
/// from the same relations theorem mode uses, evaluated at the supplied beta.
struct ScheduleOverrides {
  std::optional<double> one_minus_beta;
  std::optional<double> alpha;
  std::optional<double> alpha_init;
  std::optional<double> eta;
  std::optional<double> tau;
  std::optional<std::int64_t> T;
  std::optional<std::int64_t> T0;
  std::optional<std::int64_t> I;
  std::optional<std::int64_t> N;
  std::optional<std::int64_t> S;
  std::optional<std::int64_t> Q;

  friend bool operator==(const ScheduleOverrides&, const ScheduleOverrides&) = default;
};

struct ScheduleRequest {
  double epsilon = 0.05;
  double delta = 0.05;
  /// Initial suboptimality Phi(x0) - inf Phi.
  double d0 = 1.0;
  /// O(1) scale that couples the admissible lower-level noise to the schedule.
  double sigma_tilde_g1 = 1.0;
  /// ||y0_init - y*(x0)||, used for the warm-start length.
  double initial_lower_distance = 1.0;
  ScheduleMode mode = ScheduleMode::theorem;
  ScheduleOverrides overrides;

  friend bool operator==(const ScheduleRequest&, const ScheduleRequest&) = default;
};

struct Schedule {
  double alpha = 0.0;
  double alpha_init = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double eta = 0.0;
  double tau = 0.0;
  std::int64_t T = 1;
  std::int64_t T0 = 1;
  std::int64_t I = 1;
  std::int64_t N = 1;
  std::int64_t S = 1;
  std::int64_t Q = 1;
  double logP = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;
  double d0 = 0.0;

  double sigma_tilde_g1 = 1.0;
  /// Lower-level gradient noise level the schedule is built for: (mu*alpha)^{1/4} * sigma_tilde.
  double sigma_g1 = 0.0;
  /// Bound on consecutive averaged-iterate displacement.
  double vartheta = 0.0;
  /// Bound 2*epsilon/L0 on the averaged tracking error.
  double tracking_radius = 0.0;
  double L0 = 0.0;

  double epsilon_ceiling = 0.0;
  /// Set when epsilon exceeds the admissibility ceiling (warning, not an error).
  bool epsilon_above_ceiling = false;
  /// Set when theorem mode had to shrink 1 - beta to keep alpha <= 1/(25 l_g1).
  bool alpha_capped = false;
  ScheduleMode mode = ScheduleMode::theorem;

  friend bool operator==(const Schedule&, const Schedule&) = default;
};

/// Nesterov momentum (1 - sqrt(mu*alpha)) / (1 + sqrt(mu*alpha)).
double nesterov_momentum(double mu, double alpha);

/// Largest epsilon for which the convergence theorem is stated.
double epsilon_ceiling(const ProblemConstants& c, const ScheduleRequest& request);

/// Derives every hyperparameter of the bilevel method. Pure: identical inputs
/// give bit-identical outputs. Integer counts are rounded up.
Schedule derive_schedule(const ProblemConstants& c, const ScheduleRequest& request);

/// Throws ConstraintViolation when a schedule breaks its invariants.
void validate_schedule(const Schedule& s, const ProblemConstants& c);

}  // namespace accbo::core
