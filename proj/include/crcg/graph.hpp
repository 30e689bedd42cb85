#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace crcg {

enum class MotifKind {
    StarShaped,
    PathShaped,
    FanShaped,
    AcutePolygon,
    RandomBipartite,
    TreeShaped,
    TridentShaped,
    ConeConnected,
    ChainWithBypass,
    PartialPolygon,
    Complete,
    CycleGraph,
    DoubleCycle,
    TriangleChain,
    RingShaped,
    Diamond,
    HShaped,
    Wheel,
    Hourglass,
    DcdTrident,
    CircularCross,
    Ladder,
    StarGraph,
    SingleTriangle,
    CrossArm,
};

inline constexpr int kMotifKindCount = 25;

// 1-based position in the declaration order above; pools are defined on it.
int kind_index(MotifKind kind);
MotifKind kind_from_index(int index);

std::string_view to_string(MotifKind kind);
MotifKind motif_kind_from_string(std::string_view name);

enum class SegmentRole { Causal, Confounder, Irrelevant };

std::string_view to_string(SegmentRole role);
SegmentRole role_from_string(std::string_view name);

struct Segment {
    MotifKind motif_kind = MotifKind::StarShaped;
    std::vector<int> node_ids;
    SegmentRole role = SegmentRole::Irrelevant;
};

struct NoiseRecord {
    int edges_deleted = 0;
    int edges_added = 0;
    int nodes_deleted = 0;
    int nodes_added = 0;
};

struct Provenance {
    std::vector<Segment> segments;
    NoiseRecord noise;
    // Per-sample derived rng seed, recorded by the scenario generator for replay.
    std::optional<std::uint64_t> seed;
};

// Undirected simple graph. Edges are kept sorted with u < v; no self-loops.
struct Graph {
    int node_count = 0;
    std::vector<std::pair<int, int>> edges;
    Eigen::MatrixXd features;
    std::optional<int> label;
    Provenance provenance;

    bool has_edge(int u, int v) const;
    // Inserts in sorted position; duplicate insertions are ignored.
    void add_edge(int u, int v);
};

bool graphs_equal(const Graph& a, const Graph& b);

enum class Split { Train, Test };

std::string_view to_string(Split split);

struct ScenarioConfig;

struct Dataset {
    std::vector<Graph> graphs;
    Split split = Split::Train;
    std::shared_ptr<const ScenarioConfig> scenario;
    std::uint64_t master_seed = 0;
    int num_classes = 0;
};

// Empty result means every invariant holds.
std::vector<std::string> validate(const Graph& g);
std::vector<std::string> validate(const Dataset& d);

// D^(-1/2) (A + I) D^(-1/2) with D the degree matrix of A + I.
Eigen::MatrixXd normalized_adjacency(const Graph& g);

bool is_connected(const Graph& g);

}  // namespace crcg
