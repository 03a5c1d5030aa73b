#include "accbo/snag/tracking.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>

#include "accbo/core/errors.hpp"

namespace accbo::snag {

void TrackingBoundParams::validate() const {
  require(std::isfinite(mu) && mu > 0.0, "tracking bound: mu must be positive");
  require(std::isfinite(alpha) && alpha > 0.0, "tracking bound: alpha must be positive");
  require(std::isfinite(L) && L >= mu, "tracking bound: L must be at least mu");
  require(alpha <= (1.0 + 1e-12) / (25.0 * L), "tracking bound: alpha exceeds 1/(25 L)");
  require(std::isfinite(sigma) && sigma >= 0.0, "tracking bound: sigma must be nonnegative");
  require(std::isfinite(delta_drift) && delta_drift >= 0.0, "tracking bound: drift must be nonnegative");
  require(T >= 1, "tracking bound: T must be at least 1");
  require(delta_prob > 0.0 && delta_prob < 1.0, "tracking bound: delta must lie in (0,1)");
  require(std::isfinite(V0) && V0 >= 0.0, "tracking bound: V0 must be nonnegative");
}

namespace {

double log_term(const TrackingBoundParams& p) {
  return std::log(std::exp(1.0) * static_cast<double>(p.T) / p.delta_prob);
}

double decay(const TrackingBoundParams& p, std::int64_t t) {
  return std::pow(1.0 - std::sqrt(p.mu * p.alpha) / 4.0, static_cast<double>(t)) * p.V0;
}

}  // namespace

double tracking_bound_with_drift(const TrackingBoundParams& p, std::int64_t t) {
  const double noise = 5.0 * std::sqrt(p.alpha) * p.sigma * p.sigma / std::sqrt(p.mu);
  const double drift = 80.0 * p.delta_drift * p.delta_drift / p.alpha;
  return decay(p, t) + (noise + drift) * log_term(p);
}

double tracking_bound_no_drift(const TrackingBoundParams& p, std::int64_t t) {
  const double noise = 5.0 * std::sqrt(p.alpha) * p.sigma * p.sigma / std::sqrt(p.mu);
  return decay(p, t) + noise * log_term(p);
}

std::string to_string(DriftKind kind) {
  switch (kind) {
    case DriftKind::none: return "none";
    case DriftKind::fixed_direction: return "fixed_direction";
    case DriftKind::random_walk: return "random_walk";
    case DriftKind::external: return "external";
  }
  return "unknown";
}

DriftKind drift_kind_from_string(const std::string& name) {
  if (name == "none") return DriftKind::none;
  if (name == "fixed_direction") return DriftKind::fixed_direction;
  if (name == "random_walk") return DriftKind::random_walk;
  if (name == "external") return DriftKind::external;
  throw ConstraintViolation("unknown drift kind '" + name + "'");
}

void DriftProcess::validate(Eigen::Index dim) const {
  require(std::isfinite(delta) && delta >= 0.0, "drift delta must be nonnegative");
  if (kind == DriftKind::fixed_direction) {
    require(direction.size() == dim, "drift direction has the wrong dimension");
    require(direction.norm() > 0.0, "drift direction must be nonzero");
  }
  if (kind == DriftKind::external) {
    for (const auto& step : external) {
      require(step.size() == dim, "external drift step has the wrong dimension");
      require(step.norm() <= delta * (1.0 + 1e-12), "external drift step exceeds delta");
    }
  }
}

Vector DriftProcess::displacement(std::int64_t t, Eigen::Index dim, const core::RandomStream& stream) const {
  switch (kind) {
    case DriftKind::none: return Vector::Zero(dim);
    case DriftKind::fixed_direction: return delta * direction.normalized();
    case DriftKind::random_walk: return delta * core::unit_sphere_direction(stream.child("drift", static_cast<std::uint64_t>(t)), dim);
    case DriftKind::external:
      if (t >= 0 && static_cast<std::size_t>(t) < external.size()) return external[static_cast<std::size_t>(t)];
      return Vector::Zero(dim);
  }
  return Vector::Zero(dim);
}

double DriftProcess::max_step() const {
  switch (kind) {
    case DriftKind::none: return 0.0;
    case DriftKind::fixed_direction:
    case DriftKind::random_walk: return delta;
    case DriftKind::external: {
      double m = 0.0;
      for (const auto& v : external) m = std::max(m, v.norm());
      return m;
    }
  }
  return 0.0;
}

QuadraticFamily QuadraticFamily::isotropic(Eigen::Index dim, double mu, double sigma) {
  return {mu * Matrix::Identity(dim, dim), Vector::Zero(dim), sigma};
}

QuadraticFamily QuadraticFamily::anisotropic(Eigen::Index dim, double mu, double L, double sigma) {
  Vector spectrum(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double frac = dim > 1 ? static_cast<double>(i) / static_cast<double>(dim - 1) : 0.0;
    spectrum[i] = mu * std::pow(L / mu, frac);
  }
  return {spectrum.asDiagonal(), Vector::Zero(dim), sigma};
}

double QuadraticFamily::mu() const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(H, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double QuadraticFamily::L() const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(H, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

bool QuadraticFamily::is_isotropic() const {
  return (H - H(0, 0) * Matrix::Identity(H.rows(), H.cols())).norm() == 0.0;
}

std::vector<TrackingRow> run_tracking_experiment(const QuadraticFamily& family, const DriftProcess& drift,
                                                 TrackingBoundParams p, const Vector& w0,
                                                 const core::RandomStream& stream) {
  const Eigen::Index d = family.dim();
  require(w0.size() == d && family.w_star0.size() == d, "tracking experiment: dimension mismatch");
  drift.validate(d);
  const bool with_drift = drift.kind != DriftKind::none;
  require(!with_drift || family.is_isotropic(), "tracking with drift requires an isotropic family");

  const double per_entry = family.sigma / std::sqrt(8.0 * static_cast<double>(d));
  Vector w_star = family.w_star0;
  const auto gap = [&](const Vector& w) {
    const Vector e = w - w_star;
    return 0.5 * e.dot(family.H * e);
  };
  GradientOracle grad = [&](const Vector& z, const core::RandomStream& s) -> Vector {
    Vector g = family.H * (z - w_star);
    if (per_entry > 0.0) {
      auto engine = s.engine();
      Vector noise(d);
      core::fill_gaussian(engine, noise, per_entry);
      g += noise;
    }
    return g;
  };

  SnagState state = SnagState::start(w0, p.mu, p.alpha);
  std::vector<TrackingRow> rows;
  rows.reserve(static_cast<std::size_t>(p.T) + 1);
  const double V0 = potential(state, w_star, gap(state.w));
  p.V0 = V0;
  if (with_drift) p.delta_drift = std::max(p.delta_drift, drift.max_step());
  p.validate();
  for (std::int64_t t = 0;; ++t) {
    TrackingRow row;
    row.t = t;
    row.phi_gap = gap(state.w);
    row.V = potential(state, w_star, row.phi_gap);
    row.bound = with_drift ? tracking_bound_with_drift(p, t) : tracking_bound_no_drift(p, t);
    row.dist = (state.w - w_star).norm();
    if (!std::isfinite(row.V)) throw NumericalAbort("tracking experiment: non-finite potential at t=" + std::to_string(t));
    rows.push_back(row);
    if (t == p.T) break;
    state = snag_step(state, grad, stream.child("grad", static_cast<std::uint64_t>(t)));
    if (with_drift) w_star += drift.displacement(t, d, stream);
  }
  return rows;
}

ViolationSummary mc_tracking_violation_rate(const QuadraticFamily& family, const DriftProcess& drift,
                                            const TrackingBoundParams& p, const Vector& w0, std::int64_t n_seeds,
                                            const core::RandomStream& stream, int threads) {
  require(n_seeds >= 100, "Monte-Carlo violation rate needs at least 100 seeds");
  ViolationSummary out;
  out.runs = n_seeds;
  out.max_ratio.assign(static_cast<std::size_t>(n_seeds), 0.0);
  out.max_V.assign(static_cast<std::size_t>(n_seeds), 0.0);
  std::vector<char> violated(static_cast<std::size_t>(n_seeds), 0);

  auto work = [&](std::int64_t begin, std::int64_t step) {
    for (std::int64_t k = begin; k < n_seeds; k += step) {
      const auto rows =
          run_tracking_experiment(family, drift, p, w0, stream.child("seed", static_cast<std::uint64_t>(k)));
      double ratio = 0.0, vmax = 0.0;
      bool bad = false;
      for (const auto& r : rows) {
        vmax = std::max(vmax, r.V);
        if (r.bound > 0.0) ratio = std::max(ratio, r.V / r.bound);
        if (r.V > r.bound) bad = true;
      }
      const auto idx = static_cast<std::size_t>(k);
      out.max_ratio[idx] = ratio;
      out.max_V[idx] = vmax;
      violated[idx] = bad ? 1 : 0;
    }
  };

  const int n_threads = std::max(1, std::min<int>(threads, static_cast<int>(n_seeds)));
  if (n_threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n_threads));
    std::vector<std::thread> pool;
    for (int i = 0; i < n_threads; ++i) {
      pool.emplace_back([&, i] {
        try {
          work(i, n_threads);
        } catch (...) {
          errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  for (char v : violated) out.violations += v;
  out.rate = static_cast<double>(out.violations) / static_cast<double>(n_seeds);
  return out;
}

}  // namespace accbo::snag
