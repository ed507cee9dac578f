#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>

#include "cli/config.hpp"

namespace audbandit::cli {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitConfig = 2, kExitRuntime = 3 };

// Names the environment variable holding the default output directory.
inline constexpr const char* kOutDirEnv = "AUDBANDIT_OUT_DIR";

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> replications;
  std::optional<std::filesystem::path> out;
};

void apply_overrides(CliConfig& config, const Overrides& overrides);

// --out, then the config's output_dir, then $AUDBANDIT_OUT_DIR, then
// ./audbandit-out.
std::filesystem::path resolve_output_dir(const CliConfig& config);

void cmd_partition(const CliConfig& config, std::ostream& out);
void cmd_run(const CliConfig& config, const std::filesystem::path& dir, std::ostream& out);
void cmd_compare(const CliConfig& config, const std::filesystem::path& dir, std::ostream& out);
void cmd_sweep(const CliConfig& config, SweepMode mode, const std::filesystem::path& dir,
               std::ostream& out);
void cmd_validate(const CliConfig& config, const std::filesystem::path& dir, std::ostream& out);

// Full command line handling; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace audbandit::cli
