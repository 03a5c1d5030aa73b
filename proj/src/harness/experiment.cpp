#include "accbo/harness/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "accbo/core/constants.hpp"
#include "accbo/core/errors.hpp"
#include "accbo/harness/io.hpp"
#include "accbo/problems/serialization.hpp"

namespace accbo::harness {

problems::BilevelInstance resolve_instance(const ExperimentConfig& cfg) {
  if (cfg.instance) return problems::instance_from_json(*cfg.instance, "instance");
  if (cfg.instance_file) {
    const auto doc = read_json_file(cfg.base_dir / *cfg.instance_file);
    return problems::instance_from_json(doc, "instance_file");
  }
  core::config_error("instance", "missing required field");
}

PreparedRun prepare_run(const problems::BilevelInstance& base, const Vector& x0, const ScheduleConfig& sc,
                        double epsilon, const BaselineConfig& baseline) {
  problems::check_dim(x0, base.dim_x(), "x0");
  const auto& c = base.constants;

  core::ScheduleRequest req;
  req.epsilon = epsilon;
  req.delta = sc.delta;
  req.d0 = problems::phi_value(base, x0) - base.problem->phi_infimum();
  req.sigma_tilde_g1 = sc.sigma_tilde_g1;
  req.initial_lower_distance = base.problem->lower_minimizer(x0).norm();
  req.mode = sc.mode;
  req.overrides = sc.overrides;
  if (!req.overrides.one_minus_beta && sc.beta_rule != BetaRule::none) {
    if (sc.beta_rule == BetaRule::tracking) {
      const double L0 = core::derive_smoothness_constants(c).L0;
      req.overrides.one_minus_beta = c.mu * c.mu * epsilon * epsilon /
                                     (sc.beta_constant * L0 * L0 * sc.sigma_tilde_g1 * sc.sigma_tilde_g1);
    } else {
      const double sb = core::derive_sigma_bar(c);
      req.overrides.one_minus_beta = epsilon * epsilon / (sc.beta_constant * sb * sb);
    }
  }
  core::Schedule s = core::derive_schedule(c, req);
  if (sc.T_multiple > 1.0 && !sc.overrides.T) {
    req.overrides.T = static_cast<std::int64_t>(std::ceil(static_cast<double>(s.T) * sc.T_multiple));
    s = core::derive_schedule(c, req);
  }

  PreparedRun out;
  out.inst = problems::with_noise(base, {base.noise.sigma_f1, sc.lower_noise.value_or(s.sigma_g1), base.noise.sigma_g2});
  out.x0 = x0;
  out.schedule = s;
  out.baseline_schedule = s;
  out.baseline_schedule.eta = baseline.eta.value_or(epsilon * (1.0 - s.beta) / s.L0);
  out.baseline_lower_step = baseline.lower_step.value_or(0.5 / c.l_g1);
  return out;
}

optimizer::RunResult execute(const PreparedRun& run, const RunSpec& spec, std::uint64_t seed,
                             const optimizer::RunOptions& options) {
  const core::RandomStream stream(seed);
  if (spec.algorithm == Algorithm::accbo) {
    return optimizer::run_accbo(run.inst, run.x0, run.schedule, spec.option, stream, options);
  }
  return baselines::run_plain_momentum_bilevel(run.inst, run.x0, run.baseline_schedule, {run.baseline_lower_step},
                                               stream, options);
}

std::optional<double> median_calls(const std::vector<std::optional<std::int64_t>>& calls) {
  if (calls.empty()) return std::nullopt;
  std::vector<double> v;
  for (const auto& c : calls) v.push_back(c ? static_cast<double>(*c) : std::numeric_limits<double>::infinity());
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  const double m = n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  if (!std::isfinite(m)) return std::nullopt;
  return m;
}

std::optional<double> loglog_slope(const std::vector<double>& epsilons, const std::vector<double>& calls) {
  require(epsilons.size() == calls.size(), "slope fit needs matching epsilon and call lists");
  if (epsilons.size() < 2) return std::nullopt;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(epsilons.size());
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    const double x = std::log(1.0 / epsilons[i]);
    const double y = std::log(calls[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = n * sxx - sx * sx;
  if (!(std::abs(den) > 0.0)) return std::nullopt;
  return (n * sxy - sx * sy) / den;
}

}  // namespace accbo::harness
