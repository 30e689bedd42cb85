#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crcg/compose.hpp"
#include "crcg/nn.hpp"

namespace crcg {

struct Config {
    ScenarioConfig scenario;
    TrainConfig train;
    std::string output_dir = "out";
    std::vector<int> seeds = {0, 1, 2, 3, 4};
    std::uint64_t master_seed = 42;
};

// Accepts a file path or inline JSON (first non-space byte '{'). Every field
// has a default; unknown keys and type mismatches throw with the offending
// name.
Config parse_config(const std::string& source);

// Deterministic pretty JSON with every default filled in.
std::string resolved_json(const Config& config);

}  // namespace crcg
