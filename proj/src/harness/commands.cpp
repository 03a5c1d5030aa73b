#include "accbo/harness/commands.hpp"

#include <cmath>
#include <iostream>
#include <limits>

#include "accbo/core/constants.hpp"
#include "accbo/core/errors.hpp"
#include "accbo/harness/experiment.hpp"
#include "accbo/harness/io.hpp"
#include "accbo/harness/parallel.hpp"
#include "accbo/hypergrad/estimator.hpp"
#include "accbo/snag/tracking.hpp"

namespace accbo::harness {

using core::Json;

namespace {

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::string seed_tag(std::uint64_t seed) { return "seed" + std::to_string(seed); }

Json schedule_json(const core::Schedule& s) {
  Json out;
  out["alpha"] = s.alpha;
  out["alpha_init"] = s.alpha_init;
  out["beta"] = s.beta;
  out["gamma"] = s.gamma;
  out["eta"] = s.eta;
  out["tau"] = s.tau;
  out["T"] = s.T;
  out["T0"] = s.T0;
  out["I"] = s.I;
  out["N"] = s.N;
  out["S"] = s.S;
  out["Q"] = s.Q;
  out["logP"] = s.logP;
  out["epsilon"] = s.epsilon;
  out["delta"] = s.delta;
  out["d0"] = s.d0;
  out["sigma_tilde_g1"] = s.sigma_tilde_g1;
  out["sigma_g1"] = s.sigma_g1;
  out["vartheta"] = s.vartheta;
  out["tracking_radius"] = s.tracking_radius;
  out["L0"] = s.L0;
  out["epsilon_ceiling"] = s.epsilon_ceiling;
  out["epsilon_above_ceiling"] = s.epsilon_above_ceiling;
  out["alpha_capped"] = s.alpha_capped;
  out["mode"] = core::to_string(s.mode);
  return out;
}

Json calls_json(const hypergrad::OracleCounters& c) {
  Json out;
  out["g1"] = c.g1;
  out["jvp"] = c.jvp;
  out["hvp"] = c.hvp;
  out["f"] = c.f;
  out["total"] = c.total();
  return out;
}

Json optional_int_json(const std::optional<std::int64_t>& v) { return v ? Json(*v) : Json(nullptr); }
Json optional_double_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

CsvTable run_log_table(const optimizer::RunResult& r) {
  CsvTable table({"t", "grad_norm", "m_norm", "y_err", "yhat_err", "yhat_step", "calls_g1", "calls_jvp", "calls_hvp",
                  "calls_f"});
  for (const auto& l : r.logs) {
    table.add_row({std::to_string(l.t), format_double(l.grad_norm), format_double(l.m_norm), format_double(l.y_err),
                   format_double(l.yhat_err), format_double(l.yhat_step), std::to_string(l.calls.g1),
                   std::to_string(l.calls.jvp), std::to_string(l.calls.hvp), std::to_string(l.calls.f)});
  }
  return table;
}

snag::QuadraticFamily make_family(const TrackConfig& t, double sigma) {
  const auto dim = static_cast<Eigen::Index>(t.dim);
  if (t.family == "isotropic") return snag::QuadraticFamily::isotropic(dim, t.mu, sigma);
  return snag::QuadraticFamily::anisotropic(dim, t.mu, t.L, sigma);
}

snag::DriftProcess make_drift(const DriftConfig& d) {
  snag::DriftProcess out;
  out.kind = d.kind;
  out.delta = d.delta;
  if (d.direction) out.direction = to_vector(*d.direction);
  return out;
}

}  // namespace

void cmd_snag_track(const ExperimentConfig& cfg, const std::filesystem::path& out) {
  const TrackConfig& t = *cfg.track;
  const auto seeds = cfg.seeds.resolve();
  const std::int64_t n_sigma = static_cast<std::int64_t>(t.sigmas.size());
  const std::int64_t n_drift = static_cast<std::int64_t>(t.drifts.size());
  const std::int64_t n_cells = n_sigma * n_drift;

  struct Cell {
    snag::QuadraticFamily family;
    snag::DriftProcess drift;
    snag::TrackingBoundParams params;
    Vector w0;
    std::string name;
  };
  std::vector<Cell> cells;
  for (std::int64_t i = 0; i < n_sigma; ++i) {
    for (std::int64_t j = 0; j < n_drift; ++j) {
      Cell c;
      c.family = make_family(t, t.sigmas[static_cast<std::size_t>(i)]);
      c.drift = make_drift(t.drifts[static_cast<std::size_t>(j)]);
      c.drift.validate(c.family.dim());
      c.params.mu = c.family.mu();
      c.params.L = c.family.L();
      c.params.alpha = t.alpha;
      c.params.sigma = c.family.sigma;
      c.params.delta_drift = c.drift.delta;
      c.params.T = t.T;
      c.params.delta_prob = t.delta;
      c.params.validate();
      c.w0 = t.w0 ? to_vector(*t.w0) : Vector(c.family.w_star0 + Vector::Ones(c.family.dim()));
      c.name = "s" + std::to_string(i) + "_d" + std::to_string(j);
      cells.push_back(std::move(c));
    }
  }

  // Trajectories: one task per (cell, seed).
  const std::int64_t n_traj = n_cells * static_cast<std::int64_t>(seeds.size());
  std::vector<CsvTable> tables(static_cast<std::size_t>(n_traj), CsvTable({"t", "V", "bound", "dist", "phi_gap"}));
  parallel_for(n_traj, cfg.threads, [&](std::int64_t k) {
    const auto& cell = cells[static_cast<std::size_t>(k / static_cast<std::int64_t>(seeds.size()))];
    const auto seed = seeds[static_cast<std::size_t>(k % static_cast<std::int64_t>(seeds.size()))];
    const auto rows = snag::run_tracking_experiment(cell.family, cell.drift, cell.params, cell.w0,
                                                    core::RandomStream(seed).child("trajectory"));
    auto& table = tables[static_cast<std::size_t>(k)];
    for (const auto& r : rows) {
      table.add_row({std::to_string(r.t), format_double(r.V), format_double(r.bound), format_double(r.dist),
                     format_double(r.phi_gap)});
    }
  });
  for (std::int64_t k = 0; k < n_traj; ++k) {
    const auto& cell = cells[static_cast<std::size_t>(k / static_cast<std::int64_t>(seeds.size()))];
    const auto seed = seeds[static_cast<std::size_t>(k % static_cast<std::int64_t>(seeds.size()))];
    write_csv(out / ("track_" + cell.name + "_" + seed_tag(seed) + ".csv"), tables[static_cast<std::size_t>(k)]);
  }

  Json summary;
  summary["command"] = to_string(cfg.command);
  summary["delta"] = t.delta;
  summary["cells"] = Json::array();
  for (std::int64_t c = 0; c < n_cells; ++c) {
    const auto& cell = cells[static_cast<std::size_t>(c)];
    log_info("snag-track cell " + cell.name + ": " + std::to_string(t.mc_runs) + " Monte-Carlo runs");
    const auto mc = snag::mc_tracking_violation_rate(cell.family, cell.drift, cell.params, cell.w0, t.mc_runs,
                                                     core::RandomStream(seeds.front()).child("mc", c), cfg.threads);
    double worst = 0.0;
    for (double r : mc.max_ratio) worst = std::max(worst, r);
    Json j;
    j["name"] = cell.name;
    j["sigma"] = cell.params.sigma;
    j["drift"] = snag::to_string(cell.drift.kind);
    j["drift_delta"] = cell.drift.delta;
    j["runs"] = mc.runs;
    j["violations"] = mc.violations;
    j["violation_rate"] = mc.rate;
    j["max_ratio"] = worst;
    j["within_delta"] = mc.rate <= t.delta;
    summary["cells"].push_back(j);
  }
  write_json(out / "snag_track_summary.json", summary);
}

void cmd_bias(const ExperimentConfig& cfg, const std::filesystem::path& out) {
  const BiasConfig& b = *cfg.bias;
  const auto inst = resolve_instance(cfg);
  const Vector x = b.x ? to_vector(*b.x) : Vector::Zero(inst.dim_x());
  problems::check_dim(x, inst.dim_x(), "bias.x");
  const auto seeds = cfg.seeds.resolve();
  const double sb = core::derive_sigma_bar(inst.constants);
  const double var_limit = b.variance_slack * sb * sb / static_cast<double>(b.S);

  const std::int64_t nq = static_cast<std::int64_t>(b.Q.size());
  const std::int64_t n = nq * static_cast<std::int64_t>(seeds.size());
  std::vector<hypergrad::BiasVarianceEstimate> est(static_cast<std::size_t>(n));
  parallel_for(n, cfg.threads, [&](std::int64_t k) {
    const auto seed = seeds[static_cast<std::size_t>(k / nq)];
    const auto Q = b.Q[static_cast<std::size_t>(k % nq)];
    hypergrad::EstimatorConfig ec{Q, b.S, inst.constants.l_g1, true};
    est[static_cast<std::size_t>(k)] = hypergrad::empirical_bias_and_variance(
        inst, x, ec, b.samples, core::RandomStream(seed).child("Q", static_cast<std::uint64_t>(Q)));
  });

  Json summary;
  summary["command"] = to_string(cfg.command);
  summary["sigma_bar_sq"] = sb * sb;
  summary["variance_limit"] = var_limit;
  summary["rows"] = Json::array();
  std::vector<std::string> failures;
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    CsvTable table({"Q", "S", "bias_bound", "bias_est", "var_est", "se"});
    for (std::int64_t q = 0; q < nq; ++q) {
      const auto& e = est[s * static_cast<std::size_t>(nq) + static_cast<std::size_t>(q)];
      const auto Q = b.Q[static_cast<std::size_t>(q)];
      table.add_row({std::to_string(Q), std::to_string(b.S), format_double(e.bias_bound), format_double(e.bias_est),
                     format_double(e.var_est), format_double(e.se)});
      const bool bias_ok = e.bias_est <= e.bias_bound + 4.0 * e.se;
      const bool var_ok = e.var_est <= var_limit;
      Json j;
      j["seed"] = seeds[s];
      j["Q"] = Q;
      j["bias_bound"] = e.bias_bound;
      j["bias_est"] = e.bias_est;
      j["var_est"] = e.var_est;
      j["se"] = e.se;
      j["bias_ok"] = bias_ok;
      j["variance_ok"] = var_ok;
      summary["rows"].push_back(j);
      if (!bias_ok) failures.push_back("seed " + std::to_string(seeds[s]) + " Q=" + std::to_string(Q) + ": bias");
      if (!var_ok) failures.push_back("seed " + std::to_string(seeds[s]) + " Q=" + std::to_string(Q) + ": variance");
    }
    write_csv(out / ("bias_" + seed_tag(seeds[s]) + ".csv"), table);
  }
  summary["failures"] = failures;
  write_json(out / "bias_summary.json", summary);
  if (!failures.empty()) throw AssertionFailure("bias contract failed for " + failures.front());
}

void cmd_accbo(const ExperimentConfig& cfg, const std::filesystem::path& out) {
  const RunConfig& rc = *cfg.run;
  const auto base = resolve_instance(cfg);
  const Vector x0 = to_vector(rc.x0);
  problems::check_dim(x0, base.dim_x(), "run.x0");
  const PreparedRun prepared = prepare_run(base, x0, cfg.schedule, cfg.schedule.epsilon, rc.baseline);
  if (prepared.schedule.epsilon_above_ceiling)
    log_info("epsilon is above the admissibility ceiling " + format_double(prepared.schedule.epsilon_ceiling));
  const auto seeds = cfg.seeds.resolve();

  optimizer::RunOptions opts;
  opts.stop_at_target = rc.stop_at_target;
  opts.target = rc.target_multiple * cfg.schedule.epsilon;
  opts.log_every = rc.log_every;
  const RunSpec spec{rc.algorithm, rc.option};

  std::vector<optimizer::RunResult> results(seeds.size());
  parallel_for(static_cast<std::int64_t>(seeds.size()), cfg.threads, [&](std::int64_t k) {
    log_debug("accbo run " + seed_tag(seeds[static_cast<std::size_t>(k)]));
    results[static_cast<std::size_t>(k)] = execute(prepared, spec, seeds[static_cast<std::size_t>(k)], opts);
  });

  Json summary;
  summary["command"] = to_string(cfg.command);
  summary["algorithm"] = to_string(rc.algorithm);
  summary["option"] = optimizer::to_string(rc.option);
  summary["schedule"] = schedule_json(rc.algorithm == Algorithm::accbo ? prepared.schedule : prepared.baseline_schedule);
  summary["lower_noise"] = prepared.inst.noise.sigma_g1;
  summary["target"] = opts.target;
  summary["runs"] = Json::array();
  std::string abort;
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    const auto& r = results[k];
    write_csv(out / ("run_" + seed_tag(seeds[k]) + ".csv"), run_log_table(r));
    Json j;
    j["seed"] = seeds[k];
    j["iterations"] = static_cast<std::int64_t>(r.grad_norm_after.size());
    j["final_avg_grad_norm"] = r.avg_grad_norm;
    j["final_grad_norm"] = r.grad_norm_after.empty() ? Json(nullptr) : Json(r.grad_norm_after.back());
    j["total_calls"] = r.calls.total();
    j["calls"] = calls_json(r.calls);
    j["zero_momentum_events"] = r.zero_momentum_events;
    j["warm_start_error"] = r.warm_start_error;
    j["reached_target"] = r.reached_target;
    j["calls_to_target"] = optional_int_json(r.calls_to_target);
    j["iterations_to_target"] = optional_int_json(r.iterations_to_target);
    j["aborted"] = r.aborted;
    if (r.aborted) {
      j["abort_reason"] = r.abort_reason;
      if (abort.empty()) abort = seed_tag(seeds[k]) + ": " + r.abort_reason;
    }
    summary["runs"].push_back(j);
  }
  write_json(out / "accbo_summary.json", summary);
  if (!abort.empty()) throw NumericalAbort(abort);
}

void cmd_sweep(const ExperimentConfig& cfg, const std::filesystem::path& out) {
  const SweepConfig& sc = *cfg.sweep;
  const auto base = resolve_instance(cfg);
  const Vector x0 = to_vector(sc.x0);
  problems::check_dim(x0, base.dim_x(), "sweep.x0");
  const auto seeds = cfg.seeds.resolve();

  std::vector<PreparedRun> prepared;
  for (double eps : sc.epsilons) prepared.push_back(prepare_run(base, x0, cfg.schedule, eps, sc.baseline));

  struct Cell {
    std::size_t eps_index;
    RunSpec spec;
  };
  std::vector<Cell> cells;
  for (std::size_t e = 0; e < sc.epsilons.size(); ++e) {
    for (auto a : sc.algorithms) {
      if (a == Algorithm::accbo) {
        for (auto o : sc.options) cells.push_back({e, {a, o}});
      } else {
        cells.push_back({e, {a, optimizer::LowerOption::one}});
      }
    }
  }

  const std::int64_t n_seeds = static_cast<std::int64_t>(seeds.size());
  const std::int64_t n = static_cast<std::int64_t>(cells.size()) * n_seeds;
  std::vector<std::optional<std::int64_t>> calls(static_cast<std::size_t>(n));
  std::vector<char> aborted(static_cast<std::size_t>(n), 0);
  parallel_for(n, cfg.threads, [&](std::int64_t k) {
    const auto& cell = cells[static_cast<std::size_t>(k / n_seeds)];
    const double eps = sc.epsilons[cell.eps_index];
    optimizer::RunOptions opts;
    opts.stop_at_target = true;
    opts.target = sc.target_multiple * eps;
    opts.log_every = std::numeric_limits<std::int64_t>::max();
    const auto r = execute(prepared[cell.eps_index], cell.spec, seeds[static_cast<std::size_t>(k % n_seeds)], opts);
    calls[static_cast<std::size_t>(k)] = r.calls_to_target;
    aborted[static_cast<std::size_t>(k)] = r.aborted ? 1 : 0;
  });

  CsvTable table({"epsilon", "algorithm", "option", "seeds", "reached", "median_calls"});
  Json summary;
  summary["command"] = to_string(cfg.command);
  summary["target_multiple"] = sc.target_multiple;
  summary["cells"] = Json::array();
  std::vector<std::optional<double>> medians;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto& cell = cells[c];
    std::vector<std::optional<std::int64_t>> cell_calls(calls.begin() + static_cast<std::ptrdiff_t>(c) * n_seeds,
                                                         calls.begin() + static_cast<std::ptrdiff_t>(c + 1) * n_seeds);
    std::int64_t reached = 0, n_aborted = 0;
    for (std::int64_t s = 0; s < n_seeds; ++s) {
      if (cell_calls[static_cast<std::size_t>(s)]) ++reached;
      if (aborted[c * static_cast<std::size_t>(n_seeds) + static_cast<std::size_t>(s)]) ++n_aborted;
    }
    const auto med = median_calls(cell_calls);
    medians.push_back(med);
    const std::string option = cell.spec.algorithm == Algorithm::accbo ? optimizer::to_string(cell.spec.option) : "";
    table.add_row({format_double(sc.epsilons[cell.eps_index]), to_string(cell.spec.algorithm), option,
                   std::to_string(n_seeds), std::to_string(reached), med ? format_double(*med) : "inf"});
    Json j;
    j["epsilon"] = sc.epsilons[cell.eps_index];
    j["algorithm"] = to_string(cell.spec.algorithm);
    j["option"] = option.empty() ? Json(nullptr) : Json(option);
    j["seeds"] = n_seeds;
    j["reached"] = reached;
    j["aborted"] = n_aborted;
    j["median_calls"] = optional_double_json(med);
    Json per_seed = Json::array();
    for (const auto& v : cell_calls) per_seed.push_back(optional_int_json(v));
    j["calls_to_target"] = per_seed;
    summary["cells"].push_back(j);
  }

  summary["slopes"] = Json::array();
  for (auto o : sc.options) {
    if (std::find(sc.algorithms.begin(), sc.algorithms.end(), Algorithm::accbo) == sc.algorithms.end()) break;
    std::vector<double> eps, med;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (cells[c].spec.algorithm != Algorithm::accbo || cells[c].spec.option != o || !medians[c]) continue;
      eps.push_back(sc.epsilons[cells[c].eps_index]);
      med.push_back(*medians[c]);
    }
    Json j;
    j["algorithm"] = "accbo";
    j["option"] = optimizer::to_string(o);
    j["points"] = static_cast<std::int64_t>(eps.size());
    j["slope"] = optional_double_json(loglog_slope(eps, med));
    summary["slopes"].push_back(j);
  }
  write_csv(out / "sweep.csv", table);
  write_json(out / "sweep_summary.json", summary);
}

int run_command(const ExperimentConfig& cfg, const std::filesystem::path& out) {
  try {
    switch (cfg.command) {
      case Command::snag_track: cmd_snag_track(cfg, out); break;
      case Command::bias: cmd_bias(cfg, out); break;
      case Command::accbo: cmd_accbo(cfg, out); break;
      case Command::sweep: cmd_sweep(cfg, out); break;
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ConstraintViolation& e) {
    std::cerr << "constraint violation: " << e.what() << '\n';
    return kExitConfig;
  } catch (const AssertionFailure& e) {
    std::cerr << "assertion failed: " << e.what() << '\n';
    return kExitAssertion;
  } catch (const NumericalAbort& e) {
    std::cerr << "numerical abort: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace accbo::harness
