#include "accbo/snag/snag.hpp"

#include <cmath>

#include "accbo/core/errors.hpp"
#include "accbo/core/schedule.hpp"

namespace accbo::snag {

SnagState SnagState::start(const Vector& w0, double mu, double alpha) {
  SnagState s;
  s.w = w0;
  s.w_prev = w0;
  s.alpha = alpha;
  s.mu = mu;
  s.gamma = core::nesterov_momentum(mu, alpha);
  return s;
}

Vector extrapolate(const SnagState& s) { return s.w + s.gamma * (s.w - s.w_prev); }

SnagState snag_step(const SnagState& s, const GradientOracle& grad, const core::RandomStream& stream) {
  const Vector z = extrapolate(s);
  const Vector g = grad(z, stream);
  if (g.size() != z.size() || !g.allFinite()) {
    throw NumericalAbort("SNAG step " + std::to_string(s.t) + ": non-finite or misshapen gradient");
  }
  SnagState next = s;
  next.w_prev = s.w;
  next.w = z - s.alpha * g;
  next.t = s.t + 1;
  return next;
}

double potential(const SnagState& s, const Vector& minimizer, double phi_gap) {
  require(phi_gap >= -1e-12, "potential: phi_gap is negative");
  const double root = std::sqrt(s.mu * s.alpha);
  const Vector v = (s.w - minimizer) + (root - 1.0) * (s.w_prev - minimizer);
  return v.squaredNorm() / (2.0 * s.alpha) + phi_gap;
}

double potential_full_matrix(const SnagState& s, const Vector& minimizer, double phi_gap) {
  require(phi_gap >= -1e-12, "potential: phi_gap is negative");
  const Eigen::Index d = s.w.size();
  const double root = std::sqrt(s.mu * s.alpha);
  Matrix block(2, 2);
  block << 1.0, root - 1.0, root - 1.0, (1.0 - root) * (1.0 - root);
  block /= 2.0 * s.alpha;
  Matrix P = Matrix::Zero(2 * d, 2 * d);
  for (Eigen::Index i = 0; i < 2; ++i)
    for (Eigen::Index j = 0; j < 2; ++j) P.block(i * d, j * d, d, d) = block(i, j) * Matrix::Identity(d, d);
  Vector theta(2 * d);
  theta << s.w - minimizer, s.w_prev - minimizer;
  return theta.dot(P * theta) + phi_gap;
}

}  // namespace accbo::snag
