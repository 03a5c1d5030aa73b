#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "accbo/core/constants.hpp"
#include "accbo/core/errors.hpp"
#include "accbo/core/json_reader.hpp"
#include "accbo/core/random_stream.hpp"
#include "accbo/core/schedule.hpp"
#include "../support/oracles.hpp"

using namespace accbo;
using core::ProblemConstants;

namespace {

ProblemConstants random_constants(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 3.0);
  ProblemConstants c;
  c.mu = 0.1 + u(rng);
  c.l_g1 = c.mu * (1.0 + u(rng));
  c.l_g2 = u(rng);
  c.l_f0 = u(rng);
  c.Lx0 = u(rng);
  c.Lx1 = u(rng);
  c.Ly0 = u(rng);
  c.Ly1 = u(rng);
  c.sigma_f1 = u(rng);
  c.sigma_g1 = u(rng);
  c.sigma_g2 = u(rng);
  return c;
}

}  // namespace

TEST_SUITE("core") {

TEST_CASE("smoothness constants: only Lx0 survives") {
  ProblemConstants c;
  c.mu = 1;
  c.l_g1 = 1;
  c.Lx0 = 1;
  const auto s = core::derive_smoothness_constants(c);
  CHECK(s.L0 == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(s.L1 == 0.0);
}

TEST_CASE("smoothness constants: L1 from Lx1") {
  ProblemConstants c;
  c.mu = 1;
  c.l_g1 = 1;
  c.Lx1 = 2;
  CHECK(core::derive_smoothness_constants(c).L1 == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("smoothness constants match the transcription on the mixed example") {
  ProblemConstants c;
  c.mu = 2;
  c.l_g1 = 4;
  c.l_g2 = 1;
  c.l_f0 = 3;
  c.Lx0 = 1;
  c.Lx1 = 0.5;
  c.Ly0 = 1;
  c.Ly1 = 0.2;
  const auto s = core::derive_smoothness_constants(c);
  CHECK(oracle::rel_err(s.L0, oracle::L0(c)) <= 1e-12);
  CHECK(oracle::rel_err(s.L1, oracle::L1(c)) <= 1e-12);
}

TEST_CASE("sigma_bar examples") {
  ProblemConstants zero;
  CHECK(core::derive_sigma_bar(zero) == 0.0);

  ProblemConstants only_f;
  only_f.mu = 1;
  only_f.l_g1 = 0;
  only_f.sigma_f1 = 1;
  CHECK(core::derive_sigma_bar(only_f) == doctest::Approx(1.0).epsilon(1e-15));

  ProblemConstants c;
  c.mu = 1;
  c.l_g1 = 1;
  c.l_f0 = 1;
  c.sigma_f1 = 0.1;
  c.sigma_g2 = 0.2;
  CHECK(oracle::rel_err(core::derive_sigma_bar(c), oracle::sigma_bar(c)) <= 1e-12);
}

TEST_CASE("derived constants agree with the transcription on random sets") {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 50; ++k) {
    const auto c = random_constants(rng);
    const auto s = core::derive_smoothness_constants(c);
    CHECK(oracle::rel_err(s.L0, oracle::L0(c)) <= 1e-12);
    CHECK(oracle::rel_err(s.L1, oracle::L1(c)) <= 1e-12);
    CHECK(oracle::rel_err(core::derive_sigma_bar(c), oracle::sigma_bar(c)) <= 1e-12);
  }
}

TEST_CASE("monotonicity of sigma_bar and L1") {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 50; ++k) {
    auto c = random_constants(rng);
    const double sb = core::derive_sigma_bar(c);
    const double L1 = core::derive_smoothness_constants(c).L1;
    auto up = c;
    up.sigma_f1 += 0.5;
    up.sigma_g2 += 0.5;
    CHECK(core::derive_sigma_bar(up) >= sb);
    up = c;
    up.Lx1 += 0.5;
    CHECK(core::derive_smoothness_constants(up).L1 >= L1);
  }
}

TEST_CASE("bias Lipschitz constant never exceeds L0") {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 50; ++k) {
    const auto c = random_constants(rng);
    CHECK(core::derive_bias_lipschitz(c) <= core::derive_smoothness_constants(c).L0);
  }
}

TEST_CASE("invalid constants are rejected") {
  ProblemConstants c;
  c.mu = 0;
  CHECK_THROWS_AS(core::derive_smoothness_constants(c), ConstraintViolation);
  c.mu = 2;
  c.l_g1 = 1;
  CHECK_THROWS_AS(core::derive_smoothness_constants(c), ConstraintViolation);
  c.l_g1 = 2;
  c.Lx0 = std::nan("");
  CHECK_THROWS_AS(c.validate(), ConstraintViolation);
}

TEST_CASE("Nesterov momentum at mu=1, alpha=0.25 is 1/3") {
  CHECK(core::nesterov_momentum(1.0, 0.25) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("schedule relations") {
  ProblemConstants c;
  c.mu = 1;
  c.l_g1 = 2;
  c.l_f0 = 1;
  c.Lx0 = 1;
  core::ScheduleRequest r;
  r.mode = core::ScheduleMode::practical;
  r.epsilon = 0.05;
  r.d0 = 1.0;

  SUBCASE("tau is sqrt(mu alpha) and gamma the Nesterov momentum") {
    r.overrides.alpha = 0.01;
    const auto s = core::derive_schedule(c, r);
    CHECK(s.tau == doctest::Approx(std::sqrt(c.mu * 0.01)).epsilon(1e-15));
    const double root = std::sqrt(0.01);
    CHECK(s.gamma == doctest::Approx((1 - root) / (1 + root)).epsilon(1e-15));
  }
  SUBCASE("T = 4 d0 / (eta eps)") {
    r.overrides.one_minus_beta = 0.01;
    r.overrides.eta = 0.01;
    const auto s = core::derive_schedule(c, r);
    CHECK(s.T == 8000);
  }
  SUBCASE("practical mode needs beta or alpha") {
    CHECK_THROWS_AS(core::derive_schedule(c, r), ConstraintViolation);
  }
  SUBCASE("theorem mode respects the step cap and is pure") {
    r.mode = core::ScheduleMode::theorem;
    const auto a = core::derive_schedule(c, r);
    const auto b = core::derive_schedule(c, r);
    CHECK(a == b);
    CHECK(a.alpha <= 1.0 / (25.0 * c.l_g1) * (1 + 1e-12));
    CHECK(a.beta < 1.0);
    CHECK(a.sigma_g1 == doctest::Approx(std::pow(c.mu * a.alpha, 0.25) * r.sigma_tilde_g1).epsilon(1e-14));
    CHECK(a.tracking_radius == doctest::Approx(2 * r.epsilon / a.L0).epsilon(1e-15));
  }
  SUBCASE("bad requests") {
    r.overrides.one_minus_beta = 0.01;
    r.epsilon = -1;
    CHECK_THROWS_AS(core::derive_schedule(c, r), ConstraintViolation);
    r.epsilon = 0.05;
    r.delta = 1.5;
    CHECK_THROWS_AS(core::derive_schedule(c, r), ConstraintViolation);
  }
}

TEST_CASE("Neumann depth drives the bias below mu eps / (l l_f0) scale") {
  ProblemConstants c;
  c.mu = 1;
  c.l_g1 = 2;
  c.l_f0 = 1;
  c.Lx0 = 1;
  core::ScheduleRequest r;
  r.mode = core::ScheduleMode::practical;
  r.overrides.one_minus_beta = 0.01;
  r.epsilon = 0.01;
  const auto s = core::derive_schedule(c, r);
  CHECK(oracle::bias_bound(c, s.Q) <= r.epsilon * (1 + 1e-12));
  CHECK(oracle::bias_bound(c, s.Q - 1) > r.epsilon);
}

TEST_CASE("random streams") {
  const core::RandomStream root(42);
  SUBCASE("same path gives identical draws") {
    auto e1 = root.child("a", 3).child("b").engine();
    auto e2 = core::RandomStream(42).child("a", 3).child("b").engine();
    for (int i = 0; i < 10; ++i) CHECK(e1() == e2());
  }
  SUBCASE("distinct paths give distinct keys") {
    std::set<std::uint64_t> keys;
    for (std::uint64_t i = 0; i < 100; ++i) {
      keys.insert(root.child("x", i).key());
      keys.insert(root.child("y", i).key());
    }
    keys.insert(root.key());
    keys.insert(core::RandomStream(43).key());
    CHECK(keys.size() == 202);
  }
  SUBCASE("child does not mutate the parent") {
    const auto k = root.key();
    (void)root.child("z");
    CHECK(root.key() == k);
    CHECK(root.child("a", 1, 2).path().size() == 2);
  }
  SUBCASE("gaussian draws have the requested scale") {
    Vector sum = Vector::Zero(4);
    double sq = 0;
    const int n = 20000;
    for (int k = 0; k < n; ++k) {
      const Vector v = core::gaussian_vector(root.child("g", k), 4, 2.0);
      sum += v;
      sq += v.squaredNorm();
    }
    CHECK((sum / n).norm() < 0.1);
    CHECK(sq / n == doctest::Approx(16.0).epsilon(0.05));
    CHECK(core::unit_sphere_direction(root, 5).norm() == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("json reader reports field paths") {
  const core::Json doc = core::Json::parse(R"({"a": 1.5, "b": [1, 2], "extra": true})");
  core::JsonObjectReader r(doc, "root");
  CHECK(r.required_double("a") == 1.5);
  CHECK(r.required_vector("b").size() == 2);
  try {
    r.required_double("missing");
    FAIL("expected an error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("root.missing") != std::string::npos);
  }
  try {
    r.finish();
    FAIL("expected an error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("extra") != std::string::npos);
  }
}

TEST_CASE("dumped doubles round-trip exactly") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 100; ++i) {
    const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 20) - 10);
    const core::Json doc = core::Json::parse(core::dump_json(core::Json{{"v", v}}));
    CHECK(doc["v"].get<double>() == v);
  }
}

}
