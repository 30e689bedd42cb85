#pragma once

#include <optional>
#include <string>

#include "crcg/config.hpp"

namespace crcg {

struct CliOverrides {
    std::optional<int> seed;
    std::optional<std::string> method;
    std::optional<double> tau;
    std::optional<std::string> out;
};

// --seed collapses the seed list to one entry; the rest replace their config
// fields.
Config apply_overrides(Config config, const CliOverrides& overrides);

// generate | train | eval | sweep-tau | report. Echoes the resolved config to
// output_dir/config.resolved.json, then writes the command's artifacts under
// output_dir. Missing inputs throw std::runtime_error naming the artifact.
int execute(const std::string& command, const Config& config);

// argv entry point; errors print to stderr and map to exit code 1.
int run_cli(int argc, const char* const* argv);

}  // namespace crcg
