#pragma once

namespace accbo::core {

/// Smoothness, curvature and noise constants of a bilevel problem.
///
/// `mu` is the strong-convexity modulus of the lower level in y, `l_g1` its
/// smoothness, `l_g2` the Lipschitz constant of the lower-level second
/// derivatives, `l_f0` a bound on the upper-level y-gradient. The four
/// relaxed-smoothness constants describe the upper level; the three sigmas
/// are oracle noise scales.
struct ProblemConstants {
  double mu = 1.0;
  double l_g1 = 1.0;
  double l_g2 = 0.0;
  double l_f0 = 0.0;
  double Lx0 = 0.0;
  double Lx1 = 0.0;
  double Ly0 = 0.0;
  double Ly1 = 0.0;
  double sigma_f1 = 0.0;
  double sigma_g1 = 0.0;
  double sigma_g2 = 0.0;

  /// Throws ConstraintViolation unless mu > 0, l_g1 >= mu and every field is
  /// finite and nonnegative.
  void validate() const;

  friend bool operator==(const ProblemConstants&, const ProblemConstants&) = default;
};

struct SmoothnessConstants {
  double L0 = 0.0;
  double L1 = 0.0;
};

/// Relaxed-smoothness constants (L0, L1) of the composite objective.
SmoothnessConstants derive_smoothness_constants(const ProblemConstants& c);

/// Standard deviation bound of the Neumann hypergradient estimator.
double derive_sigma_bar(const ProblemConstants& c);

/// Constant of the lower-level-error term in the hypergradient bias. Never
/// exceeds L0.
double derive_bias_lipschitz(const ProblemConstants& c);

struct EstimatorLipschitz {
  double Lbar0 = 0.0;
  double Lbar1 = 0.0;
};

/// Mean-square Lipschitz constants of the stochastic estimator with Neumann
/// depth `Q`. `radius` stands in for the tracking error ||y - y*(x)||.
EstimatorLipschitz derive_estimator_lipschitz(const ProblemConstants& c, int Q, double radius);

struct DerivedConstants {
  double L0 = 0.0;
  double L1 = 0.0;
  double Lbar = 0.0;
  double sigma_bar = 0.0;
  double Lbar0 = 0.0;
  double Lbar1 = 0.0;
};

/// All derived constants at once. Callers that follow the averaging guarantee
/// pass radius = 2 * epsilon / L0.
DerivedConstants derive_constants(const ProblemConstants& c, int Q, double radius);

}  // namespace accbo::core
