#include <algorithm>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "msukf/commands.hpp"
#include "msukf/config.hpp"

int main(int argc, char** argv) {
  using namespace msukf::cli;

  CLI::App app{"Multi-scaled unscented Kalman filter experiments"};
  app.require_subcommand(1);

  CommandOptions opts;
  opts.workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::string out_dir;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config_path, "Experiment config (JSON)")->required();
    sub->add_option("--workers", opts.workers, "Parallel Monte-Carlo workers")
        ->check(CLI::PositiveNumber);
    sub->add_option("--out", out_dir, "Output directory (overrides output.dir)");
  };
  auto* compare = app.add_subcommand("compare", "Compare scaling candidates over MC runs");
  auto* sweep = app.add_subcommand("sweep", "Grid search over alpha");
  auto* simulate = app.add_subcommand("simulate", "Single run: trajectory and estimates");
  add_common(compare);
  add_common(sweep);
  add_common(simulate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfigError;
  }

  if (!out_dir.empty()) opts.out_dir = out_dir;
  try {
    opts.seed_override = seed_from_env();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  }

  if (compare->parsed()) return cmd_compare(opts, std::cout, std::cerr);
  if (sweep->parsed()) return cmd_sweep(opts, std::cout, std::cerr);
  return cmd_simulate(opts, std::cout, std::cerr);
}
