#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "crcg/graph.hpp"
#include "crcg/motif.hpp"
#include "crcg/rng.hpp"

namespace crcg {

struct Adjacent {};
struct Cross {
    int shared = 1;
};
struct Entangled {
    int edge_count = 2;
};
struct Containment {};

using ConnectionKind = std::variant<Adjacent, Cross, Entangled, Containment>;

// Fuses g2 into g1. Adjacent adds one random cross edge; Cross identifies
// `shared` random node pairs (merged nodes keep g1's feature row); Entangled
// adds `edge_count` distinct random cross edges; Containment maps g2's nodes
// into g1 by a random injection and unions the edge images. Provenance
// segments of both inputs survive with remapped ids.
Graph connect(const Graph& g1, const Graph& g2, const ConnectionKind& kind, Rng& rng);

// Edge (u,v) iff cosine similarity of feature rows u and v, restricted to
// `dims` when present, exceeds threshold. Zero-norm rows have similarity 0.
std::vector<std::pair<int, int>> edges_by_similarity(const Eigen::MatrixXd& features, double threshold,
                                                     const std::optional<std::vector<int>>& dims = std::nullopt);

struct NoiseCounts {
    int edge_del = 0;
    int edge_add = 0;
    int node_del = 0;
    int node_add = 0;
};

// Applies exactly the requested counts in the order edge deletions, edge
// additions, node deletions, node additions. Added nodes draw Normal(0,1)
// features and attach by 1 to 3 random edges; deleted nodes compact indices.
Graph inject_noise(const Graph& g, const NoiseCounts& counts, Rng& rng);

enum class ParamMap { Identity, Increment, Double };
enum class LabelMap { ClassOfM, ClassOfMAndA };

std::string_view to_string(ParamMap f);
ParamMap param_map_from_string(std::string_view name);
std::string_view to_string(LabelMap h);
LabelMap label_map_from_string(std::string_view name);

int apply_param_map(ParamMap f, int a);

struct CompositionInstance {
    double pair_prob = 0.8;
    ParamMap f_map = ParamMap::Increment;
    LabelMap h_map = LabelMap::ClassOfM;
    // Empty pool means all four connection methods.
    std::vector<ConnectionKind> connection_pool;
    int a_min = 5;
    int a_max = 8;
    int num_classes = 5;
    int feature_dim = 8;
};

// One sample of the general composition procedure: causal motif m in 1..5,
// confounder motif m+5 with probability pair_prob (else one of the other four
// confounder kinds, equal mass), two irrelevant motifs, label h(m, a).
Graph compose_sample(const CompositionInstance& inst, Rng& rng);

enum class ScenarioVariant { NoConfounder, Probability, SizeScaled, Complexity };

std::string_view to_string(ScenarioVariant variant);
ScenarioVariant scenario_variant_from_string(std::string_view name);

enum class ComplexityLevel { VeryLow, Low, Medium, High, VeryHigh, ExtremelyHigh };

std::string_view to_string(ComplexityLevel level);
ComplexityLevel complexity_level_from_string(std::string_view name);

// Feature std of attached motifs per level; larger std drowns the kind's mean
// signature, so significance falls as the level rises.
double complexity_std(ComplexityLevel level);

struct ScenarioConfig {
    ScenarioVariant variant = ScenarioVariant::Probability;
    int noise_sets = 1;
    double p = 0.2;
    int multiplier = 1;
    ComplexityLevel std_level = ComplexityLevel::Medium;
    int num_classes = 5;
    int n_train = 2000;
    int n_test = 500;
    double noise_edge_frac = 0.10;
    double noise_node_frac = 0.10;
    int a_min = 5;
    int a_max = 8;
    ParamMap f_map = ParamMap::Increment;
    LabelMap h_map = LabelMap::ClassOfM;
    int feature_dim = 8;

    std::string name() const;
};

// Train: with the scenario's coin probability attaches the confounder kind
// paired with the first causal motif (SizeScaled attaches multiplier copies;
// Complexity sets the attachment feature std); a failed coin attaches
// size-matched irrelevant motifs instead. Test: the attached kind is uniform
// over the 20 confounder and irrelevant kinds.
Graph attach_confounder(const Graph& g, const ScenarioConfig& scenario, Split split, Rng& rng);

// Deterministic per-sample build; the rng stream is derived from
// (master_seed, split tag, index), so any generation order gives identical
// datasets.
Graph generate_sample(const ScenarioConfig& cfg, Split split, std::uint64_t master_seed, int index);

std::pair<Dataset, Dataset> generate_scenario(const ScenarioConfig& cfg, std::uint64_t master_seed,
                                              int threads = 1);

// Label implied by the causal segments alone; nullopt if they match no rule.
std::optional<int> label_from_causal_segments(const Graph& g);

}  // namespace crcg
