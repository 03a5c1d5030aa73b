#include "accbo/core/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "accbo/core/errors.hpp"

namespace accbo::core {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kE = std::exp(1.0);

// a / b with b == 0 read as "no constraint".
double ratio_or_inf(double a, double b) { return b > 0.0 ? a / b : kInf; }

std::int64_t ceil_count(double value, const char* name) {
  if (std::isnan(value)) throw ConstraintViolation(std::string("schedule count ") + name + " is NaN");
  if (value <= 1.0) return 1;
  if (!std::isfinite(value) || value >= 9.0e18) {
    throw ConstraintViolation(std::string("schedule count ") + name + " overflows");
  }
  return static_cast<std::int64_t>(std::ceil(value));
}

// ln(a)/ln(b) for a, b in (0,1); 1 when the target is already met.
double log_ratio_count(double target, double contraction) {
  if (!(target < 1.0)) return 1.0;
  if (target <= 0.0) return kInf;
  return std::log(target) / std::log(contraction);
}

std::int64_t neumann_depth(const ProblemConstants& c, double epsilon) {
  const double denom = c.l_g1 * c.l_f0;
  if (denom <= 0.0 || c.l_g1 <= c.mu) return 1;
  const double target = c.mu * epsilon / denom;
  if (target >= 1.0) return 1;
  return ceil_count(std::log(target) / std::log(1.0 - c.mu / c.l_g1), "Q");
}

double log_p(const ProblemConstants& c, const ScheduleRequest& r, double L0, double sigma_bar) {
  const double st = r.sigma_tilde_g1;
  const double inner = 170.0 * 64.0 * kE * r.d0 * L0 * L0 * st * st /
                       (r.delta * c.mu * c.mu * std::pow(r.epsilon, 3)) *
                       std::max(c.l_g1 / st, sigma_bar / r.d0);
  return 2.0 * std::log(inner);
}

void check_request(const ScheduleRequest& r) {
  require(std::isfinite(r.epsilon) && r.epsilon > 0.0, "epsilon must be positive");
  require(std::isfinite(r.delta) && r.delta > 0.0 && r.delta < 1.0, "delta must lie in (0,1)");
  require(std::isfinite(r.d0) && r.d0 > 0.0, "d0 must be positive");
  require(std::isfinite(r.sigma_tilde_g1) && r.sigma_tilde_g1 > 0.0, "sigma_tilde_g1 must be positive");
  require(std::isfinite(r.initial_lower_distance) && r.initial_lower_distance >= 0.0,
          "initial_lower_distance must be nonnegative");
  const auto& o = r.overrides;
  auto positive = [](const std::optional<double>& v, const char* name) {
    if (v) require(std::isfinite(*v) && *v > 0.0, std::string("override ") + name + " must be positive");
  };
  positive(o.one_minus_beta, "one_minus_beta");
  positive(o.alpha, "alpha");
  positive(o.alpha_init, "alpha_init");
  positive(o.eta, "eta");
  positive(o.tau, "tau");
  if (o.one_minus_beta) require(*o.one_minus_beta <= 1.0, "override one_minus_beta must be at most 1");
  if (o.tau) require(*o.tau <= 1.0, "override tau must be at most 1");
  auto count = [](const std::optional<std::int64_t>& v, const char* name) {
    if (v) require(*v >= 1, std::string("override ") + name + " must be at least 1");
  };
  count(o.T, "T");
  count(o.T0, "T0");
  count(o.I, "I");
  count(o.N, "N");
  count(o.S, "S");
  count(o.Q, "Q");
}

double ceiling_given(const ProblemConstants& c, const ScheduleRequest& r, double L0, double L1,
                     double Lbar1, double sigma_bar) {
  const double st = r.sigma_tilde_g1;
  const double mu = c.mu;
  const double l = c.l_g1;
  double out = kInf;
  out = std::min(out, ratio_or_inf(L0, 32.0 * L1));
  out = std::min(out, ratio_or_inf(l * L0, mu * Lbar1));
  out = std::min(out, ratio_or_inf(L0, 8.0 * Lbar1));
  out = std::min(out, L0 * l * st / (mu * mu));
  if (L1 > 0.0) out = std::min(out, (L0 / mu) * std::sqrt(l * st / L1));
  const double last = 164.0 * 32.0 * kE * r.d0 * L0 * L0 * st * st / (r.delta * mu * mu) *
                      std::max(l / st, sigma_bar / r.d0);
  out = std::min(out, std::cbrt(last));
  return out;
}

}  // namespace

std::string to_string(ScheduleMode mode) {
  return mode == ScheduleMode::theorem ? "theorem" : "practical";
}

ScheduleMode schedule_mode_from_string(const std::string& name) {
  if (name == "theorem") return ScheduleMode::theorem;
  if (name == "practical") return ScheduleMode::practical;
  throw ConstraintViolation("unknown schedule mode '" + name + "'");
}

double nesterov_momentum(double mu, double alpha) {
  require(mu > 0.0 && alpha > 0.0, "nesterov_momentum needs positive mu and alpha");
  const double s = std::sqrt(mu * alpha);
  return (1.0 - s) / (1.0 + s);
}

double epsilon_ceiling(const ProblemConstants& c, const ScheduleRequest& r) {
  c.validate();
  check_request(r);
  const auto smooth = derive_smoothness_constants(c);
  const double sigma_bar = derive_sigma_bar(c);
  require(smooth.L0 > 0.0, "derived L0 must be positive");
  const double Lbar1 = 2.0 * c.Lx1 * (1.0 + c.Lx1 * 2.0 * r.epsilon / smooth.L0);
  return ceiling_given(c, r, smooth.L0, smooth.L1, Lbar1, sigma_bar);
}

Schedule derive_schedule(const ProblemConstants& c, const ScheduleRequest& r) {
  c.validate();
  check_request(r);
  const auto& o = r.overrides;
  const double mu = c.mu;
  const double l = c.l_g1;
  const double eps = r.epsilon;
  const double st = r.sigma_tilde_g1;

  const auto smooth = derive_smoothness_constants(c);
  const double L0 = smooth.L0;
  const double L1 = smooth.L1;
  require(L0 > 0.0, "derived L0 must be positive to build a schedule");
  const double sigma_bar = derive_sigma_bar(c);

  Schedule s;
  s.mode = r.mode;
  s.epsilon = eps;
  s.delta = r.delta;
  s.d0 = r.d0;
  s.sigma_tilde_g1 = st;
  s.L0 = L0;
  s.tracking_radius = 2.0 * eps / L0;
  s.logP = log_p(c, r, L0, sigma_bar);
  const double lnP = std::max(s.logP, std::log(4.0));

  s.Q = o.Q.value_or(neumann_depth(c, eps));
  require(s.Q <= std::numeric_limits<int>::max(), "Neumann depth Q is too large");
  const auto est = derive_estimator_lipschitz(c, static_cast<int>(s.Q), s.tracking_radius);

  double omb = 0.0;
  if (o.one_minus_beta) {
    omb = *o.one_minus_beta;
  } else if (o.alpha) {
    omb = std::min(1.0, mu * *o.alpha);
  } else {
    require(r.mode == ScheduleMode::theorem,
            "practical schedules need one_minus_beta or alpha supplied");
    omb = std::min({mu * mu * eps * eps / (164.0 * 16.0 * L0 * L0 * st * st * lnP),
                    ratio_or_inf(l, 4.0 * st * L1), ratio_or_inf(eps * eps, 4.0 * sigma_bar * sigma_bar)});
    const double cap = mu / (25.0 * l);
    if (omb > cap) {
      omb = cap;
      s.alpha_capped = true;
    }
  }
  s.beta = 1.0 - omb;

  s.alpha = o.alpha.value_or(omb / mu);
  s.alpha_init = o.alpha_init.value_or(omb / (mu + l));
  s.gamma = nesterov_momentum(mu, s.alpha);
  const double root = std::sqrt(mu * s.alpha);
  s.tau = o.tau.value_or(std::min(1.0, root));
  s.eta = o.eta.value_or(std::min(st / l, ratio_or_inf(r.d0, sigma_bar)) * omb);

  s.T = o.T.value_or(ceil_count(4.0 * r.d0 / (s.eta * eps), "T"));
  if (o.T0) {
    s.T0 = *o.T0;
  } else {
    const double r0 = r.initial_lower_distance;
    const double target = r0 > 0.0 ? std::pow(mu * s.alpha, 3) * eps * eps / (256.0 * L0 * L0 * r0 * r0) : 1.0;
    s.T0 = ceil_count(log_ratio_count(target, 1.0 - mu * s.alpha / 4.0), "T0");
  }
  s.I = o.I.value_or(ceil_count(mu * eps / (2.0 * omb * L0 * st), "I"));
  s.N = o.N.value_or(ceil_count(log_ratio_count(mu * s.alpha / 128.0, 1.0 - root / 4.0), "N"));
  if (o.S) {
    s.S = *o.S;
  } else {
    const double ratio = est.Lbar0 * est.Lbar0 / (L0 * L0);
    s.S = ceil_count(std::max({128.0 * lnP, 128.0 * ratio * lnP, mu * mu * ratio / (l * l)}), "S");
  }

  s.sigma_g1 = std::pow(omb, 0.25) * st;
  s.vartheta = mu * eps * eps / (24.0 * L0 * L0 * st);

  s.epsilon_ceiling = ceiling_given(c, r, L0, L1, est.Lbar1, sigma_bar);
  s.epsilon_above_ceiling = eps > s.epsilon_ceiling;

  validate_schedule(s, c);
  return s;
}

void validate_schedule(const Schedule& s, const ProblemConstants& c) {
  const double mu = c.mu;
  require(std::isfinite(s.alpha) && s.alpha > 0.0, "schedule alpha must be positive");
  require(std::isfinite(s.alpha_init) && s.alpha_init > 0.0, "schedule alpha_init must be positive");
  require(s.alpha <= (1.0 + 1e-12) / (25.0 * c.l_g1), "schedule alpha exceeds 1/(25 l_g1)");
  require(s.beta >= 0.0 && s.beta < 1.0, "schedule beta must lie in [0,1)");
  require(std::isfinite(s.eta) && s.eta > 0.0, "schedule eta must be positive");
  require(s.tau > 0.0 && s.tau <= 1.0, "schedule tau must lie in (0,1]");
  const double root = std::sqrt(mu * s.alpha);
  require(std::abs(s.gamma * (1.0 + root) - (1.0 - root)) <= 1e-14,
          "schedule gamma is inconsistent with alpha");
  require(s.T >= 1 && s.T0 >= 1 && s.I >= 1 && s.N >= 1 && s.S >= 1 && s.Q >= 1,
          "schedule counts must be at least 1");
}

}  // namespace accbo::core
