#pragma once

#include <map>
#include <string>

#include "crcg/features.hpp"
#include "crcg/graph.hpp"
#include "crcg/rng.hpp"

namespace crcg {

struct MotifParams {
    int node_count = 5;
    // Branch cap for StarShaped (branch paths) and TreeShaped (max children).
    int branch_count = 3;
    // Advisory shape hints; constructions are fully determined by node_count.
    std::map<std::string, double> extra;
    FeatureSpec feature_spec;
};

// Smallest node_count the kind can realize (depends on branch_count for
// StarShaped).
int structural_minimum(MotifKind kind, const MotifParams& params);

// Connected graph of exactly params.node_count nodes whose provenance carries
// one segment covering all nodes. Throws std::invalid_argument naming the
// structural minimum when node_count is below it.
Graph generate_motif(MotifKind kind, const MotifParams& params, Rng& rng);

}  // namespace crcg
