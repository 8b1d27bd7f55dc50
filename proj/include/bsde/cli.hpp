#pragma once

#include <optional>
#include <string>

#include "bsde/config.hpp"

namespace bsde {

// Exit codes: 0 pass, 1 verdict fail, 2 config error, 3 numerical failure.
inline constexpr int kExitPass = 0;
inline constexpr int kExitVerdictFail = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitNumericalFailure = 3;

struct CliOptions {
    std::string command; // solve | audit | compare | minimal | unique | partition | gn
    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed_override;
    std::optional<std::size_t> paths_override;
    std::optional<std::size_t> steps_override;
    std::optional<unsigned> workers_override;
    bool verbose = false;
};

// Runs one command end to end: loads and validates the config, executes, and
// writes result tables under out_dir. Returns the process exit code; all
// error text goes to stderr, verdicts to stdout.
int run_cli(const CliOptions& options);

} // namespace bsde
