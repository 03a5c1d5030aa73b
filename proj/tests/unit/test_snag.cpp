#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "accbo/core/errors.hpp"
#include "accbo/snag/snag.hpp"
#include "accbo/snag/tracking.hpp"
#include "../support/oracles.hpp"

using namespace accbo;
using namespace accbo::snag;

namespace {

GradientOracle quadratic_grad(const Matrix& H, const Vector& w_star) {
  return [H, w_star](const Vector& z, const core::RandomStream&) -> Vector { return H * (z - w_star); };
}

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  return v[static_cast<std::size_t>(q * static_cast<double>(v.size() - 1))];
}

}  // namespace

TEST_SUITE("snag") {

TEST_CASE("one step by hand") {
  Vector w0(1);
  w0 << 1.0;
  auto s = SnagState::start(w0, 1.0, 0.25);
  CHECK(s.gamma == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(extrapolate(s)[0] == 1.0);
  const auto next = snag_step(s, quadratic_grad(Matrix::Identity(1, 1), Vector::Zero(1)), core::RandomStream(1));
  CHECK(next.w[0] == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(next.w_prev[0] == 1.0);
  CHECK(next.t == 1);
}

TEST_CASE("gamma = 0 is a plain gradient step") {
  Vector w(2), wp(2);
  w << 0.4, -0.3;
  wp << 1.0, 2.0;
  SnagState s{w, wp, 0.1, 0.0, 1.0, 0};
  Matrix H(2, 2);
  H << 2, 0.5, 0.5, 1;
  const auto next = snag_step(s, quadratic_grad(H, Vector::Zero(2)), core::RandomStream(1));
  CHECK((next.w - (w - 0.1 * H * w)).norm() < 1e-16);
}

TEST_CASE("five noiseless steps match a scripted recursion") {
  const double mu = 1.0, alpha = 0.04;
  const double root = std::sqrt(mu * alpha);
  const double gamma = (1 - root) / (1 + root);
  double w[2] = {1, 0}, wp[2] = {1, 0};
  Vector w0(2);
  w0 << 1, 0;
  auto s = SnagState::start(w0, mu, alpha);
  const auto grad = quadratic_grad(mu * Matrix::Identity(2, 2), Vector::Zero(2));
  for (int k = 0; k < 5; ++k) {
    double next[2];
    for (int i = 0; i < 2; ++i) {
      const double z = w[i] + gamma * (w[i] - wp[i]);
      next[i] = z - alpha * mu * z;
    }
    for (int i = 0; i < 2; ++i) {
      wp[i] = w[i];
      w[i] = next[i];
    }
    s = snag_step(s, grad, core::RandomStream(k));
    CHECK(std::abs(s.w[0] - w[0]) <= 1e-14);
    CHECK(std::abs(s.w[1] - w[1]) <= 1e-14);
  }
}

TEST_CASE("non-finite gradients abort") {
  auto s = SnagState::start(Vector::Ones(1), 1.0, 0.01);
  GradientOracle bad = [](const Vector&, const core::RandomStream&) { return Vector::Constant(1, std::nan("")); };
  CHECK_THROWS_AS(snag_step(s, bad, core::RandomStream(1)), NumericalAbort);
}

TEST_CASE("potential") {
  SUBCASE("zero at the minimizer") {
    Vector w(2);
    w << 1, 2;
    SnagState s{w, w, 0.1, 0.0, 1.0, 0};
    CHECK(potential(s, w, 0.0) == 0.0);
  }
  SUBCASE("1-d example equals the explicit P form") {
    Vector one = Vector::Ones(1);
    SnagState s{one, one, 0.25, 1.0 / 3.0, 1.0, 0};
    const double gap = 0.5;
    CHECK(potential(s, Vector::Zero(1), gap) == doctest::Approx(1.0).epsilon(1e-15));
    // P = 1/(2a) [1, r-1; r-1, (r-1)^2] with r = sqrt(mu a) = 0.5.
    const double r = 0.5, a = 0.25;
    const double quad = (1.0 + 2 * (r - 1) + (r - 1) * (r - 1)) / (2 * a);
    CHECK(quad + gap == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("rank-one form equals a full-matrix form on random states") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> nd;
    for (int k = 0; k < 50; ++k) {
      const Eigen::Index d = 1 + static_cast<Eigen::Index>(rng() % 5);
      Vector w(d), wp(d), ws(d);
      for (Eigen::Index i = 0; i < d; ++i) {
        w[i] = nd(rng);
        wp[i] = nd(rng);
        ws[i] = nd(rng);
      }
      const double mu = 0.5 + std::abs(nd(rng)), alpha = 0.01 * (1 + std::abs(nd(rng)));
      SnagState s{w, wp, alpha, 0.0, mu, 0};
      const double r = std::sqrt(mu * alpha);
      Matrix P(2 * d, 2 * d);
      const Matrix I = Matrix::Identity(d, d);
      P << I, (r - 1) * I, (r - 1) * I, (r - 1) * (r - 1) * I;
      P /= 2 * alpha;
      Vector stacked(2 * d);
      stacked << w - ws, wp - ws;
      const double want = stacked.dot(P * stacked) + 0.3;
      CHECK(oracle::rel_err(potential(s, ws, 0.3), want) <= 1e-12);
      CHECK(oracle::rel_err(potential_full_matrix(s, ws, 0.3), want) <= 1e-12);
    }
  }
}

TEST_CASE("tracking bounds") {
  TrackingBoundParams p;
  p.mu = 1;
  p.alpha = 0.04;
  p.T = 1000;
  p.delta_prob = 0.01;
  p.V0 = 1;
  SUBCASE("noiseless driftless bound is the pure decay") {
    for (std::int64_t t : {0, 1, 10, 500}) {
      const double decay = std::pow(1 - std::sqrt(0.04) / 4, double(t));
      CHECK(tracking_bound_with_drift(p, t) == doctest::Approx(decay).epsilon(1e-14));
      CHECK(tracking_bound_no_drift(p, t) == doctest::Approx(decay).epsilon(1e-14));
    }
    CHECK(tracking_bound_with_drift(p, 0) == 1.0);
  }
  SUBCASE("transcription") {
    p.sigma = 0.1;
    p.delta_drift = 0.001;
    CHECK(oracle::rel_err(tracking_bound_with_drift(p, 500),
                          oracle::tracking_with_drift(1, 0.04, 0.1, 0.001, 1000, 0.01, 1, 500)) <= 1e-12);
    CHECK(oracle::rel_err(tracking_bound_no_drift(p, 500),
                          oracle::tracking_no_drift(1, 0.04, 0.1, 1000, 0.01, 1, 500)) <= 1e-12);
  }
  SUBCASE("step size above 1/(25 L) is rejected") {
    p.alpha = 0.05;
    CHECK_THROWS_AS(p.validate(), ConstraintViolation);
  }
}

TEST_CASE("noiseless driftless runs contract by 1 - sqrt(mu alpha)") {
  const auto fam = QuadraticFamily::anisotropic(4, 1.0, 10.0, 0.0);
  TrackingBoundParams p;
  p.mu = 1;
  p.L = 10;
  p.alpha = 1.0 / 250;
  p.T = 500;
  Vector w0 = Vector::Ones(4);
  const auto rows = run_tracking_experiment(fam, {}, p, w0, core::RandomStream(1));
  REQUIRE(rows.size() == 501);
  const double rho2 = 1 - std::sqrt(p.mu * p.alpha);
  for (std::size_t t = 0; t + 1 < rows.size(); ++t) CHECK(rows[t + 1].V <= rho2 * rows[t].V + 1e-12);
}

TEST_CASE("fixed-direction drift stays below the bound") {
  const auto fam = QuadraticFamily::isotropic(2, 1.0, 0.0);
  DriftProcess drift;
  drift.kind = DriftKind::fixed_direction;
  drift.delta = 0.01;
  drift.direction = Vector::Ones(2);
  TrackingBoundParams p;
  p.alpha = 0.04;
  p.T = 2000;
  const auto rows = run_tracking_experiment(fam, drift, p, Vector::Ones(2), core::RandomStream(2));
  double late = 0;
  for (const auto& r : rows) {
    CHECK(r.V <= r.bound);
    if (r.t > 1000) late = std::max(late, r.dist);
  }
  CHECK(late < 1.0);
}

TEST_CASE("trajectories replay exactly") {
  const auto fam = QuadraticFamily::isotropic(3, 1.0, 0.5);
  DriftProcess drift;
  drift.kind = DriftKind::random_walk;
  drift.delta = 0.01;
  TrackingBoundParams p;
  p.alpha = 0.04;
  p.sigma = 0.5;
  p.T = 300;
  const auto a = run_tracking_experiment(fam, drift, p, Vector::Ones(3), core::RandomStream(9));
  const auto b = run_tracking_experiment(fam, drift, p, Vector::Ones(3), core::RandomStream(9));
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].V == b[i].V);
    CHECK(a[i].dist == b[i].dist);
  }
}

TEST_CASE("drift processes") {
  DriftProcess d;
  d.kind = DriftKind::random_walk;
  d.delta = 0.2;
  const core::RandomStream s(1);
  CHECK(d.displacement(3, 4, s).norm() == doctest::Approx(0.2).epsilon(1e-14));
  d.kind = DriftKind::external;
  d.external = {Vector::Ones(2)};
  CHECK(d.displacement(0, 2, s) == Vector::Ones(2));
  CHECK(d.displacement(5, 2, s).norm() == 0.0);
  CHECK(drift_kind_from_string(to_string(DriftKind::fixed_direction)) == DriftKind::fixed_direction);
}

TEST_CASE("Monte-Carlo violation rate") {
  const auto fam = QuadraticFamily::isotropic(2, 1.0, 0.0);
  TrackingBoundParams p;
  p.alpha = 0.04;
  p.T = 500;
  const Vector w0 = Vector::Ones(2);
  SUBCASE("noiseless driftless rate is zero") {
    const auto r = mc_tracking_violation_rate(fam, {}, p, w0, 100, core::RandomStream(1));
    CHECK(r.rate == 0.0);
  }
  SUBCASE("noisy rate stays below delta and does not depend on threads") {
    auto noisy = fam;
    noisy.sigma = 0.5;
    p.sigma = 0.5;
    p.T = 2000;
    const auto one = mc_tracking_violation_rate(noisy, {}, p, w0, 1000, core::RandomStream(3), 1);
    const auto four = mc_tracking_violation_rate(noisy, {}, p, w0, 1000, core::RandomStream(3), 4);
    MESSAGE("observed violation rate " << one.rate);
    CHECK(one.rate <= 0.05);
    CHECK(one.max_V == four.max_V);
  }
  SUBCASE("doubling sigma never lowers the max-V quantiles") {
    auto a = fam, b = fam;
    a.sigma = 0.3;
    b.sigma = 0.6;
    p.sigma = 0.6;
    const auto ra = mc_tracking_violation_rate(a, {}, p, w0, 200, core::RandomStream(5));
    const auto rb = mc_tracking_violation_rate(b, {}, p, w0, 200, core::RandomStream(5));
    for (double q : {0.1, 0.5, 0.9}) CHECK(quantile(rb.max_V, q) >= quantile(ra.max_V, q));
  }
  SUBCASE("too few seeds") {
    CHECK_THROWS_AS(mc_tracking_violation_rate(fam, {}, p, w0, 10, core::RandomStream(1)), ConstraintViolation);
  }
}

}
