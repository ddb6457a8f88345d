#pragma once

#include <iosfwd>
#include <optional>
#include <string>

namespace msukf::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitEstimationFailure = 3;

struct CommandOptions {
  std::string config_path;
  int workers{1};
  /// Overrides output.dir from the config.
  std::optional<std::string> out_dir;
  /// Overrides mc.base_seed (the CLI fills this from MSUKF_SEED).
  std::optional<std::uint64_t> seed_override;
};

/// summary.csv + tstd_per_step.csv (+ errors.csv when enabled); prints the table.
int cmd_compare(const CommandOptions& opts, std::ostream& out, std::ostream& err);

/// sweep_surface.csv + best.json.
int cmd_sweep(const CommandOptions& opts, std::ostream& out, std::ostream& err);

/// trajectory.csv + estimates.csv for a single run.
int cmd_simulate(const CommandOptions& opts, std::ostream& out, std::ostream& err);

/// Parses MSUKF_SEED; nullopt when unset. Throws ConfigError when malformed.
std::optional<std::uint64_t> seed_from_env();

}  // namespace msukf::cli
