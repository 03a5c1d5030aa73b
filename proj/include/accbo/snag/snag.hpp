#pragma once

#include <cstdint>
#include <functional>

#include "accbo/core/random_stream.hpp"
#include "accbo/core/types.hpp"

namespace accbo::snag {

/// Stochastic gradient at the extrapolated point; the stream selects the sample.
using GradientOracle = std::function<Vector(const Vector& z, const core::RandomStream& stream)>;

/// (w_t, w_{t-1}) plus the constant step parameters of the recursion.
struct SnagState {
  Vector w;
  Vector w_prev;
  double alpha = 0.0;
  double gamma = 0.0;
  double mu = 0.0;
  std::int64_t t = 0;

  /// w_prev = w0 and gamma set from (mu, alpha).
  static SnagState start(const Vector& w0, double mu, double alpha);
};

/// z_t = w_t + gamma (w_t - w_{t-1}).
Vector extrapolate(const SnagState& s);

/// One step: w_{t+1} = z_t - alpha * grad(z_t). Throws NumericalAbort on a
/// non-finite gradient.
SnagState snag_step(const SnagState& s, const GradientOracle& grad, const core::RandomStream& stream);

/// V = 1/(2 alpha) ||(w - w*) + (sqrt(mu alpha) - 1)(w_prev - w*)||^2 + phi_gap.
double potential(const SnagState& s, const Vector& minimizer, double phi_gap);

/// The same potential evaluated through the explicit 2d x 2d matrix P.
double potential_full_matrix(const SnagState& s, const Vector& minimizer, double phi_gap);

}  // namespace accbo::snag
