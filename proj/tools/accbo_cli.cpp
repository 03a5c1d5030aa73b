// Command-line front end: accbo <snag-track|bias|accbo|sweep> --config <path> [options]

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "accbo/core/errors.hpp"
#include "accbo/harness/commands.hpp"
#include "accbo/harness/config.hpp"

using namespace accbo;

int main(int argc, char** argv) {
  CLI::App app{"Accelerated stochastic bilevel optimization experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::int64_t> seeds;
  std::optional<std::uint64_t> base_seed;
  std::optional<int> threads;

  for (const char* name : {"snag-track", "bias", "accbo", "sweep"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "experiment config (JSON)")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seeds", seeds, "number of seeds (overrides the config)");
    sub->add_option("--base-seed", base_seed, "first seed (overrides the config)");
    sub->add_option("--threads", threads, "worker threads (overrides the config)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : harness::kExitConfig;
  }

  const auto command = harness::command_from_string(app.get_subcommands().front()->get_name());
  harness::ExperimentConfig cfg;
  try {
    cfg = harness::load_config(config_path, command);
    if (seeds) {
      cfg.seeds.list.reset();
      cfg.seeds.count = *seeds;
    }
    if (base_seed) {
      cfg.seeds.list.reset();
      cfg.seeds.base = *base_seed;
    }
    if (threads) {
      if (*threads < 1) throw ConfigError("--threads must be at least 1");
      cfg.threads = *threads;
    }
    harness::validate_config(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return harness::kExitConfig;
  }
  return harness::run_command(cfg, out_dir);
}
