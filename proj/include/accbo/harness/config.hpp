#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "accbo/core/json_reader.hpp"
#include "accbo/core/schedule.hpp"
#include "accbo/optimizer/accbo.hpp"
#include "accbo/snag/tracking.hpp"

namespace accbo::harness {

enum class Command { snag_track, bias, accbo, sweep };

std::string to_string(Command c);
Command command_from_string(const std::string& name);

/// Either an explicit list, or `count` consecutive seeds starting at `base`.
struct SeedConfig {
  std::uint64_t base = 1;
  std::int64_t count = 1;
  std::optional<std::vector<std::uint64_t>> list;

  std::vector<std::uint64_t> resolve() const;
  friend bool operator==(const SeedConfig&, const SeedConfig&) = default;
};

/// How 1 - beta is picked before the schedule fills in the rest.
///   tracking: 1 - beta = mu^2 eps^2 / (c L0^2 sigma_tilde^2)
///   variance: 1 - beta = eps^2 / (c sigma_bar^2)
///   none:     whatever the mode and overrides give
enum class BetaRule { none, tracking, variance };

std::string to_string(BetaRule r);
BetaRule beta_rule_from_string(const std::string& name);

struct ScheduleConfig {
  core::ScheduleMode mode = core::ScheduleMode::theorem;
  double epsilon = 0.05;
  double delta = 0.05;
  double sigma_tilde_g1 = 1.0;
  BetaRule beta_rule = BetaRule::none;
  double beta_constant = 1.0;
  /// The derived T is multiplied by this (a cap for target-stopped runs).
  double T_multiple = 1.0;
  /// Lower-level gradient noise; the schedule's sigma_g1 when unset.
  std::optional<double> lower_noise;
  core::ScheduleOverrides overrides;

  friend bool operator==(const ScheduleConfig&, const ScheduleConfig&) = default;
};

enum class Algorithm { accbo, plain_momentum };

std::string to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& name);

/// Baseline knobs. Defaults: lower step 1/(2 l_g1), eta = eps (1 - beta) / L0.
struct BaselineConfig {
  std::optional<double> lower_step;
  std::optional<double> eta;

  friend bool operator==(const BaselineConfig&, const BaselineConfig&) = default;
};

struct DriftConfig {
  snag::DriftKind kind = snag::DriftKind::none;
  double delta = 0.0;
  std::optional<std::vector<double>> direction;

  friend bool operator==(const DriftConfig&, const DriftConfig&) = default;
};

struct TrackConfig {
  std::string family = "isotropic";
  std::int64_t dim = 2;
  double mu = 1.0;
  double L = 1.0;
  double alpha = 0.04;
  std::int64_t T = 2000;
  double delta = 0.05;
  std::vector<double> sigmas{0.0};
  std::vector<DriftConfig> drifts{DriftConfig{}};
  /// Start point; w*_0 + (1, ..., 1) when unset.
  std::optional<std::vector<double>> w0;
  std::int64_t mc_runs = 100;

  friend bool operator==(const TrackConfig&, const TrackConfig&) = default;
};

struct BiasConfig {
  /// Evaluation point; the lower minimizer is used for y.
  std::optional<std::vector<double>> x;
  std::vector<std::int64_t> Q{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
  std::int64_t S = 1;
  std::int64_t samples = 10000;
  double variance_slack = 1.05;

  friend bool operator==(const BiasConfig&, const BiasConfig&) = default;
};

struct RunConfig {
  Algorithm algorithm = Algorithm::accbo;
  optimizer::LowerOption option = optimizer::LowerOption::one;
  std::vector<double> x0;
  bool stop_at_target = false;
  /// Target for the running average is target_multiple * epsilon.
  double target_multiple = 20.0;
  /// Row stride of the run log CSV (the last iteration is always written).
  std::int64_t log_every = 1;
  BaselineConfig baseline;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

struct SweepConfig {
  std::vector<double> epsilons;
  std::vector<Algorithm> algorithms{Algorithm::accbo, Algorithm::plain_momentum};
  std::vector<optimizer::LowerOption> options{optimizer::LowerOption::one};
  std::vector<double> x0;
  double target_multiple = 20.0;
  BaselineConfig baseline;

  friend bool operator==(const SweepConfig&, const SweepConfig&) = default;
};

/// One experiment document. Only the section of `command` is present.
struct ExperimentConfig {
  Command command = Command::accbo;
  SeedConfig seeds;
  int threads = 1;
  /// Instance document (fixture shorthand or full description), or a path
  /// to one, resolved relative to the config file.
  std::optional<core::Json> instance;
  std::optional<std::string> instance_file;
  ScheduleConfig schedule;

  std::optional<TrackConfig> track;
  std::optional<BiasConfig> bias;
  std::optional<RunConfig> run;
  std::optional<SweepConfig> sweep;

  /// Directory that relative paths are resolved against.
  std::filesystem::path base_dir;

  friend bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
    return a.command == b.command && a.seeds == b.seeds && a.threads == b.threads && a.instance == b.instance &&
           a.instance_file == b.instance_file && a.schedule == b.schedule && a.track == b.track &&
           a.bias == b.bias && a.run == b.run && a.sweep == b.sweep;
  }
};

/// `expected` fills in a missing "command" field and rejects a different one.
ExperimentConfig config_from_json(const core::Json& node, const std::filesystem::path& base_dir = {},
                                  std::optional<Command> expected = std::nullopt);
core::Json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::filesystem::path& path, std::optional<Command> expected = std::nullopt);

/// Checks the cross-field invariants (seeds, epsilons, referenced files).
void validate_config(const ExperimentConfig& cfg);

}  // namespace accbo::harness
