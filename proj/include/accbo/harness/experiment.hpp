#pragma once

#include <optional>
#include <vector>

#include "accbo/baselines/baselines.hpp"
#include "accbo/harness/config.hpp"
#include "accbo/optimizer/accbo.hpp"
#include "accbo/problems/instance.hpp"

namespace accbo::harness {

/// Instance, start point and schedule for one (epsilon, x0) cell.
struct PreparedRun {
  /// The configured instance with sigma_g1 set for this schedule.
  problems::BilevelInstance inst;
  Vector x0;
  core::Schedule schedule;
  /// Plain-momentum schedule: same counts and beta, baseline eta.
  core::Schedule baseline_schedule;
  double baseline_lower_step = 0.0;
};

/// Reads the configured instance (inline or from file).
problems::BilevelInstance resolve_instance(const ExperimentConfig& cfg);

/// d0 = Phi(x0) - inf Phi and the warm-start distance ||y*(x0)|| come from
/// the instance; 1 - beta follows the configured rule unless overridden.
PreparedRun prepare_run(const problems::BilevelInstance& base, const Vector& x0, const ScheduleConfig& sc,
                        double epsilon, const BaselineConfig& baseline = {});

struct RunSpec {
  Algorithm algorithm = Algorithm::accbo;
  optimizer::LowerOption option = optimizer::LowerOption::one;
};

optimizer::RunResult execute(const PreparedRun& run, const RunSpec& spec, std::uint64_t seed,
                             const optimizer::RunOptions& options);

/// Median with unreached entries counted as +infinity; nullopt when the
/// median itself is unreached. Even counts average the middle pair.
std::optional<double> median_calls(const std::vector<std::optional<std::int64_t>>& calls);

/// Least-squares slope of log(calls) against log(1/eps). Needs two points.
std::optional<double> loglog_slope(const std::vector<double>& epsilons, const std::vector<double>& calls);

}  // namespace accbo::harness
