#include "crcg/graph.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace crcg {

namespace {

constexpr std::array<std::string_view, kMotifKindCount> kMotifNames = {
    "star_shaped",    "path_shaped",    "fan_shaped",     "acute_polygon",
    "random_bipartite", "tree_shaped",  "trident_shaped", "cone_connected",
    "chain_with_bypass", "partial_polygon", "complete",   "cycle_graph",
    "double_cycle",   "triangle_chain", "ring_shaped",    "diamond",
    "h_shaped",       "wheel",          "hourglass",      "dcd_trident",
    "circular_cross", "ladder",         "star_graph",     "single_triangle",
    "cross_arm",
};

}  // namespace

int kind_index(MotifKind kind) {
    return static_cast<int>(kind) + 1;
}

MotifKind kind_from_index(int index) {
    if (index < 1 || index > kMotifKindCount) {
        throw std::invalid_argument("motif kind index out of range: " + std::to_string(index));
    }
    return static_cast<MotifKind>(index - 1);
}

std::string_view to_string(MotifKind kind) {
    return kMotifNames[static_cast<std::size_t>(kind)];
}

MotifKind motif_kind_from_string(std::string_view name) {
    for (int i = 0; i < kMotifKindCount; ++i) {
        if (kMotifNames[static_cast<std::size_t>(i)] == name) return static_cast<MotifKind>(i);
    }
    throw std::invalid_argument("unknown motif kind: " + std::string(name));
}

std::string_view to_string(SegmentRole role) {
    switch (role) {
        case SegmentRole::Causal: return "causal";
        case SegmentRole::Confounder: return "confounder";
        case SegmentRole::Irrelevant: return "irrelevant";
    }
    throw std::logic_error("bad role");
}

SegmentRole role_from_string(std::string_view name) {
    if (name == "causal") return SegmentRole::Causal;
    if (name == "confounder") return SegmentRole::Confounder;
    if (name == "irrelevant") return SegmentRole::Irrelevant;
    throw std::invalid_argument("unknown role: " + std::string(name));
}

std::string_view to_string(Split split) {
    return split == Split::Train ? "train" : "test";
}

bool Graph::has_edge(int u, int v) const {
    if (u > v) std::swap(u, v);
    return std::binary_search(edges.begin(), edges.end(), std::make_pair(u, v));
}

void Graph::add_edge(int u, int v) {
    if (u == v) throw std::invalid_argument("self-loop rejected");
    if (u > v) std::swap(u, v);
    const auto e = std::make_pair(u, v);
    const auto it = std::lower_bound(edges.begin(), edges.end(), e);
    if (it != edges.end() && *it == e) return;
    edges.insert(it, e);
}

bool graphs_equal(const Graph& a, const Graph& b) {
    if (a.node_count != b.node_count || a.edges != b.edges) return false;
    if (a.label != b.label) return false;
    if (a.features.rows() != b.features.rows() || a.features.cols() != b.features.cols()) return false;
    if (a.features.size() > 0 && !(a.features.array() == b.features.array()).all()) return false;
    if (a.provenance.segments.size() != b.provenance.segments.size()) return false;
    for (std::size_t i = 0; i < a.provenance.segments.size(); ++i) {
        const auto& sa = a.provenance.segments[i];
        const auto& sb = b.provenance.segments[i];
        if (sa.motif_kind != sb.motif_kind || sa.role != sb.role || sa.node_ids != sb.node_ids) return false;
    }
    const auto& na = a.provenance.noise;
    const auto& nb = b.provenance.noise;
    return na.edges_deleted == nb.edges_deleted && na.edges_added == nb.edges_added &&
           na.nodes_deleted == nb.nodes_deleted && na.nodes_added == nb.nodes_added &&
           a.provenance.seed == b.provenance.seed;
}

std::vector<std::string> validate(const Graph& g) {
    std::vector<std::string> violations;
    if (g.node_count < 0) violations.push_back("negative node_count");
    for (const auto& [u, v] : g.edges) {
        if (u == v) {
            violations.push_back("self-loop at node " + std::to_string(u));
        }
        if (u < 0 || v < 0 || u >= g.node_count || v >= g.node_count) {
            violations.push_back("edge endpoint out of range: (" + std::to_string(u) + "," +
                                 std::to_string(v) + ") with node_count " + std::to_string(g.node_count));
        }
    }
    for (std::size_t i = 0; i + 1 < g.edges.size(); ++i) {
        if (g.edges[i] == g.edges[i + 1]) {
            violations.push_back("duplicate edge (" + std::to_string(g.edges[i].first) + "," +
                                 std::to_string(g.edges[i].second) + ")");
        }
        if (g.edges[i] > g.edges[i + 1]) {
            violations.push_back("edges not sorted");
            break;
        }
    }
    if (g.features.rows() != g.node_count) {
        violations.push_back("features row count " + std::to_string(g.features.rows()) +
                             " does not match node_count " + std::to_string(g.node_count));
    }
    if (g.features.size() > 0 && !g.features.allFinite()) {
        violations.push_back("non-finite feature value");
    }
    if (g.label && *g.label < 0) {
        violations.push_back("negative label");
    }
    for (const auto& seg : g.provenance.segments) {
        for (int id : seg.node_ids) {
            if (id < 0 || id >= g.node_count) {
                violations.push_back("provenance node id out of range: " + std::to_string(id));
            }
        }
    }
    return violations;
}

std::vector<std::string> validate(const Dataset& d) {
    std::vector<std::string> violations;
    for (std::size_t i = 0; i < d.graphs.size(); ++i) {
        const auto& g = d.graphs[i];
        for (auto& v : validate(g)) {
            violations.push_back("graph " + std::to_string(i) + ": " + v);
        }
        if (!g.label) {
            violations.push_back("graph " + std::to_string(i) + ": missing label");
        } else if (*g.label >= d.num_classes) {
            violations.push_back("graph " + std::to_string(i) + ": label " + std::to_string(*g.label) +
                                 " not below num_classes " + std::to_string(d.num_classes));
        }
    }
    return violations;
}

Eigen::MatrixXd normalized_adjacency(const Graph& g) {
    const int n = g.node_count;
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
    for (const auto& [u, v] : g.edges) {
        a(u, v) = 1.0;
        a(v, u) = 1.0;
    }
    Eigen::VectorXd dinv_sqrt = a.rowwise().sum().array().sqrt().inverse();
    return dinv_sqrt.asDiagonal() * a * dinv_sqrt.asDiagonal();
}

bool is_connected(const Graph& g) {
    if (g.node_count <= 1) return true;
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(g.node_count));
    for (const auto& [u, v] : g.edges) {
        adj[static_cast<std::size_t>(u)].push_back(v);
        adj[static_cast<std::size_t>(v)].push_back(u);
    }
    std::vector<char> seen(static_cast<std::size_t>(g.node_count), 0);
    std::vector<int> stack = {0};
    seen[0] = 1;
    int visited = 1;
    while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        for (int v : adj[static_cast<std::size_t>(u)]) {
            if (!seen[static_cast<std::size_t>(v)]) {
                seen[static_cast<std::size_t>(v)] = 1;
                ++visited;
                stack.push_back(v);
            }
        }
    }
    return visited == g.node_count;
}

}  // namespace crcg
