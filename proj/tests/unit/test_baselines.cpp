#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "accbo/baselines/baselines.hpp"
#include "accbo/problems/fixtures.hpp"

using namespace accbo;
using namespace accbo::baselines;

namespace {

snag::GradientOracle quad(double mu, double w_star) {
  return [mu, w_star](const Vector& z, const core::RandomStream&) -> Vector {
    return mu * (z.array() - w_star).matrix();
  };
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double tail_mean(const std::vector<double>& v) {
  double s = 0;
  const std::size_t start = v.size() / 2;
  for (std::size_t i = start; i < v.size(); ++i) s += v[i];
  return s / static_cast<double>(v.size() - start);
}

}  // namespace

TEST_SUITE("baselines") {

TEST_CASE("SGD tracking step") {
  const Vector w = Vector::Ones(1);
  CHECK(sgd_tracking_step(w, quad(1.0, 0.0), 0.5, core::RandomStream(1))[0] == 0.5);
  for (double alpha : {0.01, 0.1, 0.5}) {
    for (double w0 : {-3.0, 0.2, 5.0}) {
      const Vector a = Vector::Constant(1, w0);
      const Vector b = sgd_tracking_step(a, quad(2.0, 1.0), alpha, core::RandomStream(1));
      CHECK(std::abs(b[0] - 1.0) <= (1 - 2.0 * alpha) * std::abs(w0 - 1.0) + 1e-15);
    }
  }
}

TEST_CASE("SNAG tracks a drifting minimizer more closely than SGD") {
  const auto fam = snag::QuadraticFamily::isotropic(2, 1.0, 0.01);
  snag::DriftProcess drift;
  drift.kind = snag::DriftKind::fixed_direction;
  drift.delta = 0.01;
  drift.direction = Vector::Ones(2);
  snag::TrackingBoundParams p;
  p.alpha = 0.04;
  p.sigma = 0.01;
  p.T = 1000;
  std::vector<double> snag_err, sgd_err;
  for (int seed = 0; seed < 50; ++seed) {
    const core::RandomStream s(seed);
    const auto rows = snag::run_tracking_experiment(fam, drift, p, Vector::Zero(2), s);
    std::vector<double> d;
    for (const auto& r : rows) d.push_back(r.dist);
    snag_err.push_back(tail_mean(d));
    sgd_err.push_back(tail_mean(run_sgd_tracking(fam, drift, p.alpha, p.T, Vector::Zero(2), s)));
  }
  CHECK(median(snag_err) <= median(sgd_err));
}

TEST_CASE("plain momentum bilevel") {
  const auto inst0 = problems::make_instance(problems::reference_isotropic(), {});
  core::ScheduleRequest r;
  r.mode = core::ScheduleMode::practical;
  r.epsilon = 0.1;
  r.overrides.one_minus_beta = 0.01;
  r.overrides.T = 400;
  r.overrides.S = 1;
  auto s = core::derive_schedule(inst0.constants, r);
  const auto inst = problems::with_noise(inst0, {0.1, s.sigma_g1, 0.1});
  Vector x0(2);
  x0 << 2, 1;
  const PlainMomentumParams params{0.5 / inst.constants.l_g1};

  SUBCASE("identical seeds give identical logs") {
    const auto a = run_plain_momentum_bilevel(inst, x0, s, params, core::RandomStream(3));
    const auto b = run_plain_momentum_bilevel(inst, x0, s, params, core::RandomStream(3));
    REQUIRE(a.logs.size() == b.logs.size());
    for (std::size_t i = 0; i < a.logs.size(); ++i) {
      CHECK(a.logs[i].grad_norm == b.logs[i].grad_norm);
      CHECK(a.logs[i].m_norm == b.logs[i].m_norm);
    }
    CHECK(a.x_final == b.x_final);
  }
  SUBCASE("beta = 0 moves x by eta along the fresh estimate") {
    s.beta = 0.0;
    s.T = 1;
    const auto res = run_plain_momentum_bilevel(inst, x0, s, params, core::RandomStream(3));
    CHECK((res.x_final - x0).norm() == doctest::Approx(s.eta).epsilon(1e-12));
    CHECK(res.logs.size() == 1);
  }
  SUBCASE("per-iteration cost is one lower step plus one estimate") {
    const auto res = run_plain_momentum_bilevel(inst, x0, s, params, core::RandomStream(3));
    CHECK(res.calls.g1 == s.T0 + s.T);
    CHECK(res.calls.f == s.T);
  }
  CHECK(to_string(BaselineKind::plain_momentum_bilevel) != to_string(BaselineKind::sgd_tracker));
}

}
