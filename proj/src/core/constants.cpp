#include "accbo/core/constants.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "accbo/core/errors.hpp"

namespace accbo::core {

namespace {

void check_field(double value, const char* name) {
  require(std::isfinite(value), std::string("constant ") + name + " must be finite");
  require(value >= 0.0, std::string("constant ") + name + " must be nonnegative");
}

// Bracket shared by L0 and Lbar.
double smoothness_bracket(const ProblemConstants& c) {
  const double mu = c.mu;
  const double l = c.l_g1;
  return c.Lx0 + c.Lx1 * l * c.l_f0 / mu + (l / mu) * (c.Ly0 + c.Ly1 * c.l_f0) +
         c.l_f0 * (l * c.l_g2 + c.l_g2 * mu) / (mu * mu);
}

void check_fields(const ProblemConstants& c) {
  check_field(c.mu, "mu");
  check_field(c.l_g1, "l_g1");
  check_field(c.l_g2, "l_g2");
  check_field(c.l_f0, "l_f0");
  check_field(c.Lx0, "Lx0");
  check_field(c.Lx1, "Lx1");
  check_field(c.Ly0, "Ly0");
  check_field(c.Ly1, "Ly1");
  check_field(c.sigma_f1, "sigma_f1");
  check_field(c.sigma_g1, "sigma_g1");
  check_field(c.sigma_g2, "sigma_g2");
  require(c.mu > 0.0, "constant mu must be positive");
}

}  // namespace

void ProblemConstants::validate() const {
  check_fields(*this);
  require(l_g1 >= mu, "constant l_g1 must be at least mu");
}

SmoothnessConstants derive_smoothness_constants(const ProblemConstants& c) {
  c.validate();
  const double ratio = c.l_g1 / c.mu;
  const double scale = std::sqrt(1.0 + ratio * ratio);
  return {scale * smoothness_bracket(c), scale * c.Lx1};
}

// The variance bound is a plain formula, so l_g1 < mu is allowed here.
double derive_sigma_bar(const ProblemConstants& c) {
  check_fields(c);
  const double sf2 = c.sigma_f1 * c.sigma_f1;
  const double l2 = c.l_g1 * c.l_g1;
  const double inner = (sf2 + c.l_f0 * c.l_f0) * (c.sigma_g2 * c.sigma_g2 + 2.0 * l2) + sf2 * l2;
  return std::sqrt(sf2 + 3.0 / (c.mu * c.mu) * inner);
}

double derive_bias_lipschitz(const ProblemConstants& c) {
  c.validate();
  return smoothness_bracket(c);
}

EstimatorLipschitz derive_estimator_lipschitz(const ProblemConstants& c, int Q, double radius) {
  c.validate();
  require(Q >= 1, "Neumann depth Q must be at least 1");
  require(std::isfinite(radius) && radius >= 0.0, "radius must be finite and nonnegative");
  const double mu = c.mu;
  const double l = c.l_g1;
  const double q = static_cast<double>(Q);

  const double base = c.Lx0 + c.Lx1 * l * c.l_f0 / mu;
  const double first = c.Lx0 + c.Lx1 * (l * c.l_f0 / mu + base * radius);

  const double ly = c.Ly0 + c.Ly1 * c.l_f0;
  const double chain_num = c.l_f0 * c.l_f0 * l * l * c.l_g2 * c.l_g2 * q * q;
  double chain = 0.0;
  if (chain_num > 0.0) {
    const double gap = l - mu;
    chain = gap > 0.0 ? chain_num / (gap * gap) : std::numeric_limits<double>::infinity();
  }
  const double second = 6.0 * q / (2.0 * mu * l - mu * mu) *
                        (l * l * ly * ly + c.l_f0 * c.l_f0 * c.l_g2 * c.l_g2 + chain);

  EstimatorLipschitz out;
  out.Lbar0 = std::sqrt(4.0 * first * first + second);
  out.Lbar1 = 2.0 * c.Lx1 * (1.0 + c.Lx1 * radius);
  return out;
}

DerivedConstants derive_constants(const ProblemConstants& c, int Q, double radius) {
  const auto smooth = derive_smoothness_constants(c);
  const auto est = derive_estimator_lipschitz(c, Q, radius);
  DerivedConstants d;
  d.L0 = smooth.L0;
  d.L1 = smooth.L1;
  d.Lbar = derive_bias_lipschitz(c);
  d.sigma_bar = derive_sigma_bar(c);
  d.Lbar0 = est.Lbar0;
  d.Lbar1 = est.Lbar1;
  return d;
}

}  // namespace accbo::core
