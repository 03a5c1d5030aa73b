#include <doctest.h>

#include <cmath>
#include <random>

#include "accbo/core/errors.hpp"
#include "accbo/optimizer/accbo.hpp"
#include "accbo/problems/fixtures.hpp"
#include "accbo/snag/snag.hpp"

using namespace accbo;
using namespace accbo::optimizer;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

Matrix rotation(double th) {
  Matrix R(2, 2);
  R << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
  return R;
}

// Isotropic instance whose upper level is centered at its own optimum, so
// grad_y f vanishes at argmin Phi.
std::shared_ptr<const problems::QuadraticBilevel> centered_instance() {
  const Matrix A = 2.0 * rotation(0.5);
  const Vector b = vec2(0.5, -0.3);
  const Vector c = vec2(0.4, -0.2);
  const problems::QuadraticUpper up{0.2, c, 0.04, A * c + b};
  return std::make_shared<const problems::QuadraticBilevel>(problems::QuadraticBilevel::isotropic(1.0, A, b, up, 10.0));
}

core::Schedule practical(const problems::BilevelInstance& inst, double omb, double eps = 0.05) {
  core::ScheduleRequest r;
  r.mode = core::ScheduleMode::practical;
  r.epsilon = eps;
  r.d0 = 1.0;
  r.sigma_tilde_g1 = 0.1;
  r.overrides.one_minus_beta = omb;
  r.overrides.S = 1;
  return core::derive_schedule(inst.constants, r);
}

AccboState state_at(const problems::BilevelInstance& inst, const core::Schedule& s, LowerOption opt, const Vector& x,
                    const Vector& y) {
  AccboState st;
  st.x = st.x_prev = x;
  st.y = st.y_prev = st.y_hat = st.y_hat_prev = y;
  st.m = Vector::Zero(inst.dim_x());
  st.option = opt;
  st.schedule = s;
  return st;
}

}  // namespace

TEST_SUITE("accbo") {

TEST_CASE("warm start") {
  const auto inst = problems::make_instance(problems::reference_isotropic(), {});
  const Vector x0 = vec2(1.0, -2.0);
  const Vector ystar = inst.exact().lower_minimizer(x0);
  SUBCASE("the minimizer is a fixed point") {
    CHECK((warm_start(inst, x0, ystar, 0.01, 50, core::RandomStream(1)) - ystar).norm() < 1e-14);
  }
  SUBCASE("schedule length reaches the warm-start target") {
    core::ScheduleRequest r;
    r.mode = core::ScheduleMode::practical;
    r.epsilon = 0.05;
    r.overrides.one_minus_beta = 0.002;
    r.initial_lower_distance = ystar.norm();
    const auto s = core::derive_schedule(inst.constants, r);
    OracleCounters calls;
    const Vector y0 = warm_start(inst, x0, Vector::Zero(2), s.alpha_init, s.T0, core::RandomStream(1), &calls);
    CHECK(calls.g1 == s.T0);
    const double target = std::sqrt(inst.constants.mu * s.alpha / 32.0) * r.epsilon / s.L0;
    CHECK((y0 - ystar).norm() <= target);
  }
  SUBCASE("replay") {
    const auto noisy = problems::with_noise(inst, {0, 0.3, 0});
    CHECK(warm_start(noisy, x0, Vector::Zero(2), 0.01, 100, core::RandomStream(4)) ==
          warm_start(noisy, x0, Vector::Zero(2), 0.01, 100, core::RandomStream(4)));
  }
}

TEST_CASE("option one lower step") {
  const auto inst = problems::make_instance(problems::reference_isotropic(), {});
  const auto s = practical(inst, 0.01);
  const Vector x = vec2(0.5, 0.5);
  const Vector ystar = inst.exact().lower_minimizer(x);

  SUBCASE("frozen x contracts the potential") {
    auto st = state_at(inst, s, LowerOption::one, x, ystar + vec2(1, 1));
    const double mu = inst.constants.mu;
    auto V = [&](const AccboState& a) {
      snag::SnagState ss{a.y, a.y_prev, s.alpha, s.gamma, mu, 0};
      return snag::potential(ss, ystar, inst.exact().lower_gap(x, a.y));
    };
    for (int t = 0; t < 200; ++t) {
      const auto next = lower_step_option1(st, inst, core::RandomStream(t));
      CHECK(V(next) <= (1 - std::sqrt(mu * s.alpha)) * V(st) + 1e-12);
      st = next;
    }
  }
  SUBCASE("minimizer drift per step is at most eta l / mu") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    const double bound = s.eta * inst.constants.l_g1 / inst.constants.mu;
    for (int k = 0; k < 20; ++k) {
      const Vector m = vec2(nd(rng), nd(rng));
      const Vector x1 = upper_step(x, m, s.eta).x;
      CHECK((inst.exact().lower_minimizer(x1) - ystar).norm() <= bound * (1 + 1e-12));
    }
  }
  SUBCASE("three steps match a hand transcription in 1-d") {
    const auto one_d = problems::make_instance(problems::identity_quadratic(1), {});
    const auto s1 = practical(one_d, 0.01);
    Vector xv(1), yv(1);
    xv << 0.3;
    yv << 1.0;
    auto st = state_at(one_d, s1, LowerOption::one, xv, yv);
    double y = 1.0, yp = 1.0;
    for (int k = 0; k < 3; ++k) {
      const double z = y + s1.gamma * (y - yp);
      const double next = z - s1.alpha * (z - 0.3);
      yp = y;
      y = next;
      st = lower_step_option1(st, one_d, core::RandomStream(k));
      CHECK(std::abs(st.y[0] - y) <= 1e-14);
      CHECK(std::abs(st.y_prev[0] - yp) <= 1e-14);
    }
  }
  SUBCASE("option one needs an isotropic lower level") {
    const auto gen = problems::make_instance(problems::reference_general(), {});
    const auto sg = practical(gen, 0.01);
    CHECK_THROWS_AS(run_accbo(gen, Vector::Zero(2), sg, LowerOption::one, core::RandomStream(1)), ConstraintViolation);
  }
}

TEST_CASE("option two rounds") {
  const auto inst = problems::make_instance(problems::reference_general(), {});
  const auto s = practical(inst, 0.004);
  const Vector x = vec2(0.2, -0.3);
  const Vector ystar = inst.exact().lower_minimizer(x);
  SUBCASE("N = 0 keeps y") {
    const auto st = state_at(inst, s, LowerOption::two, x, ystar + Vector::Ones(3));
    CHECK(lower_round_option2(st, inst, 0, core::RandomStream(1)).y == st.y);
  }
  SUBCASE("a noiseless round contracts the potential by (1 - sqrt(mu alpha))^N") {
    const auto st = state_at(inst, s, LowerOption::two, x, ystar + Vector::Ones(3));
    const double mu = inst.constants.mu;
    auto V = [&](const Vector& y, const Vector& yp) {
      snag::SnagState ss{y, yp, s.alpha, s.gamma, mu, 0};
      return snag::potential(ss, ystar, inst.exact().lower_gap(x, y));
    };
    const auto next = lower_round_option2(st, inst, s.N, core::RandomStream(1));
    CHECK(V(next.y, next.y_prev) <= std::pow(1 - std::sqrt(mu * s.alpha), double(s.N)) * V(st.y, st.y) * (1 + 1e-9));
  }
  SUBCASE("I = 2 over six outer steps runs two rounds") {
    core::ScheduleRequest r;
    r.mode = core::ScheduleMode::practical;
    r.overrides.one_minus_beta = 0.004;
    r.overrides.I = 2;
    r.overrides.N = 5;
    r.overrides.T = 6;
    r.overrides.T0 = 7;
    r.overrides.S = 1;
    const auto s6 = core::derive_schedule(inst.constants, r);
    const auto res = run_accbo(inst, x, s6, LowerOption::two, core::RandomStream(1));
    CHECK(res.calls.g1 == 7 + 2 * 5);
    REQUIRE(res.logs.size() == 6);
    CHECK(res.logs[1].calls.g1 == 7);
    CHECK(res.logs[2].calls.g1 == 12);
    CHECK(res.logs[4].calls.g1 == 17);
  }
}

TEST_CASE("averaging step") {
  const Vector a = vec2(0, 2), b = vec2(2, 0);
  CHECK(average_step(a, b, 1.0) == b);
  CHECK(average_step(a, b, 0.0) == a);
  CHECK(average_step(a, b, 0.5) == vec2(1, 1));
  CHECK_THROWS_AS(average_step(a, b, 1.5), ConstraintViolation);
}

TEST_CASE("momentum update") {
  const auto inst = problems::make_instance(problems::reference_isotropic(), {0.2, 0.2, 0.2});
  const hypergrad::EstimatorConfig cfg{5, 1, inst.constants.l_g1, true};
  std::mt19937_64 rng(6);
  std::normal_distribution<double> nd;
  auto rv = [&] { return vec2(nd(rng), nd(rng)); };
  for (int k = 0; k < 20; ++k) {
    const Vector m_prev = rv(), x = rv(), xp = rv(), yh = rv(), yhp = rv();
    const double beta = 0.9;
    const core::RandomStream s(100 + k);
    const Vector g = hypergrad::estimate_hypergradient(inst, x, yh, cfg, s);
    const Vector gp = hypergrad::estimate_hypergradient(inst, xp, yhp, cfg, s);
    const Vector m = momentum_update(m_prev, x, xp, yh, yhp, inst, cfg, beta, false, s);
    CHECK((m - (g + beta * (m_prev - gp))).norm() <= 1e-14 * std::max(1.0, m.norm()));
    CHECK(momentum_update(m_prev, x, xp, yh, yhp, inst, cfg, 0.0, false, s) == g);
    const Vector still = momentum_update(m_prev, x, x, yh, yh, inst, cfg, beta, false, s);
    CHECK((still - (beta * m_prev + (1 - beta) * g)).norm() <= 1e-14 * std::max(1.0, still.norm()));
    CHECK(momentum_update(m_prev, x, xp, yh, yhp, inst, cfg, beta, true, s) == g);
  }
}

TEST_CASE("normalized upper step") {
  const Vector x = vec2(1, 1);
  const auto a = upper_step(x, vec2(3, 4), 1.0);
  CHECK((a.x - vec2(0.4, 0.2)).norm() < 1e-15);
  CHECK(!a.zero_momentum);
  const auto z = upper_step(x, Vector::Zero(2), 1.0);
  CHECK(z.x == x);
  CHECK(z.zero_momentum);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> nd;
  for (int k = 0; k < 100; ++k) {
    const Vector m = vec2(nd(rng), nd(rng));
    CHECK((upper_step(x, m, 0.3).x - x).norm() == doctest::Approx(0.3).epsilon(1e-14));
  }
}

TEST_CASE("noiseless run without momentum reaches the optimum") {
  const auto p = centered_instance();
  const auto inst = problems::make_instance(p, {});
  core::ScheduleRequest r;
  r.mode = core::ScheduleMode::practical;
  r.epsilon = 0.05;
  r.overrides.one_minus_beta = 1.0;
  r.overrides.alpha = 0.01;
  r.overrides.eta = 0.002;
  r.overrides.T = 3000;
  r.overrides.S = 1;
  const Vector x0 = p->phi_argmin() + vec2(1.0, 0.0);
  r.d0 = problems::phi_value(inst, x0) - p->phi_infimum();
  r.overrides.Q = 1;
  while (hypergrad::bias_bound(inst.constants, *r.overrides.Q) >= 1e-10) ++*r.overrides.Q;
  const auto s = core::derive_schedule(inst.constants, r);
  CHECK(s.beta == 0.0);
  const auto res = run_accbo(inst, x0, s, LowerOption::one, core::RandomStream(1));
  CHECK(!res.aborted);
  CHECK(res.grad_norm_after.back() <= r.epsilon);
  CHECK((res.x_final - p->phi_argmin()).norm() < 0.1);
}

TEST_CASE("runs replay exactly") {
  const auto inst0 = problems::make_instance(problems::reference_isotropic(), {});
  auto s = practical(inst0, 0.01, 0.1);
  s.T = 300;
  const auto inst = problems::with_noise(inst0, {0.1, s.sigma_g1, 0.1});
  for (auto opt : {LowerOption::one, LowerOption::two}) {
    const auto a = run_accbo(inst, vec2(2, 1), s, opt, core::RandomStream(5));
    const auto b = run_accbo(inst, vec2(2, 1), s, opt, core::RandomStream(5));
    REQUIRE(a.logs.size() == b.logs.size());
    for (std::size_t i = 0; i < a.logs.size(); ++i) {
      CHECK(a.logs[i].grad_norm == b.logs[i].grad_norm);
      CHECK(a.logs[i].m_norm == b.logs[i].m_norm);
      CHECK(a.logs[i].yhat_err == b.logs[i].yhat_err);
      CHECK(a.logs[i].calls == b.logs[i].calls);
    }
    CHECK(a.x_final == b.x_final);
  }
}

TEST_CASE("option two with I = N = 1 tracks like option one") {
  const auto inst0 = problems::make_instance(problems::reference_isotropic(), {});
  core::ScheduleRequest r;
  r.mode = core::ScheduleMode::practical;
  r.epsilon = 0.1;
  r.sigma_tilde_g1 = 1.0;
  r.overrides.one_minus_beta = 0.01;
  // Small upper steps keep the lower level noise-dominated; under strong
  // minimizer drift the restarted rounds lag by about (1 + s) / (2 s), s = sqrt(mu alpha).
  r.overrides.eta = 1e-4;
  r.overrides.I = 1;
  r.overrides.N = 1;
  r.overrides.T = 2000;
  r.overrides.S = 1;
  const auto s = core::derive_schedule(inst0.constants, r);
  const auto inst = problems::with_noise(inst0, {0, s.sigma_g1, 0});
  const auto a = run_accbo(inst, vec2(2, 1), s, LowerOption::one, core::RandomStream(7));
  const auto b = run_accbo(inst, vec2(2, 1), s, LowerOption::two, core::RandomStream(7));
  double ea = 0, eb = 0;
  for (const auto& l : a.logs) ea += l.y_err;
  for (const auto& l : b.logs) eb += l.y_err;
  MESSAGE("summed tracking error, option one " << ea << ", option two " << eb);
  CHECK(ea <= 3 * eb);
  CHECK(eb <= 3 * ea);
}

TEST_CASE("stop at target and sparse logs") {
  const auto inst0 = problems::make_instance(problems::reference_isotropic(), {});
  auto s = practical(inst0, 0.01, 0.1);
  s.T = 5000;
  RunOptions opts;
  opts.stop_at_target = true;
  opts.target = 2.0;
  opts.log_every = 100;
  const auto res = run_accbo(inst0, vec2(1, 0), s, LowerOption::one, core::RandomStream(1), opts);
  REQUIRE(res.reached_target);
  CHECK(res.iterations_to_target.value() == static_cast<std::int64_t>(res.grad_norm_after.size()));
  const auto avg = running_average(res.grad_norm_after);
  CHECK(avg.back() <= 2.0);
  for (std::size_t i = 0; i + 1 < res.logs.size(); ++i) CHECK(res.logs[i].t % 100 == 0);
  CHECK(res.logs.back().t == *res.iterations_to_target - 1);
  CHECK(res.calls_to_target.value() == res.calls.total());
}

TEST_CASE("running average") {
  const auto avg = running_average({1.0, 3.0, 5.0});
  CHECK(avg == std::vector<double>{1.0, 2.0, 3.0});
  CHECK(lower_option_from_string(to_string(LowerOption::two)) == LowerOption::two);
}

}
