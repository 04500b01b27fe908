// commands.hpp — quench, tomography, calibrate and validate-config verbs
//
// Exit codes: 0 success, 2 configuration or precondition error, 3 numerical
// failure (integrator alarm, fit or solver non-convergence). Outputs written
// before a numerical failure are kept and listed in the manifest.

#pragma once

#include "rabiqpt/cli/config.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace rabiqpt::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

struct Invocation {
    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<int> threads;
    std::optional<std::uint64_t> seed;
};

// Loads the config and applies command-line overrides.
ExperimentConfig resolve_config(const Invocation& inv);

// Each verb returns an exit code and reports problems on `err`.
int cmd_quench(const ExperimentConfig& cfg, std::ostream& log, std::ostream& err);
int cmd_tomography(const ExperimentConfig& cfg, std::ostream& log, std::ostream& err);
int cmd_calibrate(const ExperimentConfig& cfg, std::ostream& log, std::ostream& err);
int cmd_validate_config(const ExperimentConfig& cfg, std::ostream& log, std::ostream& err);

// Resolves the config and dispatches on `verb`, mapping exceptions to exit codes.
int run_command(const std::string& verb, const Invocation& inv, std::ostream& log, std::ostream& err);

}  // namespace rabiqpt::cli
