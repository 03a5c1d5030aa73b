#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "accbo/harness/config.hpp"

namespace accbo::harness {

/// A command-level check (bias contract and the like) did not hold.
class AssertionFailure : public std::runtime_error {
 public:
  explicit AssertionFailure(const std::string& what) : std::runtime_error(what) {}
};

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitAssertion = 3, kExitNumerical = 4 };

/// Writes snag_track_summary.json and one trajectory CSV per (cell, seed).
void cmd_snag_track(const ExperimentConfig& cfg, const std::filesystem::path& out);
/// Writes bias_seed<k>.csv and bias_summary.json; throws AssertionFailure
/// after writing when a row breaks the bias or variance contract.
void cmd_bias(const ExperimentConfig& cfg, const std::filesystem::path& out);
/// Writes run_seed<k>.csv and accbo_summary.json; throws NumericalAbort
/// after writing when a run aborted.
void cmd_accbo(const ExperimentConfig& cfg, const std::filesystem::path& out);
/// Writes sweep.csv and sweep_summary.json.
void cmd_sweep(const ExperimentConfig& cfg, const std::filesystem::path& out);

/// Dispatches on cfg.command and maps failures to exit codes, reporting the
/// message on stderr.
int run_command(const ExperimentConfig& cfg, const std::filesystem::path& out);

}  // namespace accbo::harness
