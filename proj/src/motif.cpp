#include "crcg/motif.hpp"

#include <numeric>
#include <stdexcept>

namespace crcg {

namespace {

void path(Graph& g, int from, int to) {
    for (int i = from; i < to; ++i) g.add_edge(i, i + 1);
}

void cycle(Graph& g, int from, int to) {
    path(g, from, to);
    g.add_edge(from, to);
}

// Hub at `hub`, arms over nodes [first, first + count) assigned round-robin.
void radial_arms(Graph& g, int hub, int first, int count, int arms) {
    for (int i = 0; i < count; ++i) {
        const int node = first + i;
        const int prev = i < arms ? hub : node - arms;
        g.add_edge(prev, node);
    }
}

void build_edges(Graph& g, MotifKind kind, const MotifParams& params, Rng& rng) {
    const int n = params.node_count;
    switch (kind) {
        case MotifKind::StarShaped:
            radial_arms(g, 0, 1, n - 1, params.branch_count);
            return;
        case MotifKind::PathShaped:
            path(g, 0, n - 1);
            return;
        case MotifKind::FanShaped:
            path(g, 1, n - 1);
            for (int i = 1; i < n; ++i) g.add_edge(0, i);
            return;
        case MotifKind::AcutePolygon:
            cycle(g, 0, n - 1);
            g.add_edge(0, 2);
            return;
        case MotifKind::RandomBipartite: {
            const int p1 = (n + 1) / 2;
            for (int u = 0; u < p1; ++u) {
                for (int v = p1; v < n; ++v) {
                    if (rng.bernoulli(0.5)) g.add_edge(u, v);
                }
            }
            if (!is_connected(g)) {
                // Cross-part zigzag path touching every node.
                std::vector<int> order;
                for (int i = 0; i < p1; ++i) {
                    order.push_back(i);
                    if (p1 + i < n) order.push_back(p1 + i);
                }
                for (std::size_t i = 0; i + 1 < order.size(); ++i) g.add_edge(order[i], order[i + 1]);
            }
            return;
        }
        case MotifKind::TreeShaped: {
            std::vector<int> children(static_cast<std::size_t>(n), 0);
            for (int i = 1; i < n; ++i) {
                std::vector<int> open;
                for (int j = 0; j < i; ++j) {
                    if (children[static_cast<std::size_t>(j)] < params.branch_count) open.push_back(j);
                }
                const int parent = open[static_cast<std::size_t>(
                    rng.uniform_int(0, static_cast<std::int64_t>(open.size()) - 1))];
                g.add_edge(parent, i);
                ++children[static_cast<std::size_t>(parent)];
            }
            return;
        }
        case MotifKind::TridentShaped:
            path(g, 0, n - 4);
            for (int prong = n - 3; prong < n; ++prong) g.add_edge(n - 4, prong);
            return;
        case MotifKind::ConeConnected:
            cycle(g, 2, n - 1);
            for (int i = 2; i < n; ++i) g.add_edge(1, i);
            for (int i = 1; i < n; ++i) g.add_edge(0, i);
            return;
        case MotifKind::ChainWithBypass:
            path(g, 0, n - 1);
            g.add_edge(0, n - 2);
            return;
        case MotifKind::PartialPolygon:
            path(g, 0, n - 2);
            g.add_edge((n - 1) / 2, n - 1);
            return;
        case MotifKind::Complete:
            for (int u = 0; u < n; ++u) {
                for (int v = u + 1; v < n; ++v) g.add_edge(u, v);
            }
            return;
        case MotifKind::CycleGraph:
            cycle(g, 0, n - 1);
            return;
        case MotifKind::DoubleCycle: {
            const int a = (n + 2) / 2;
            path(g, 0, a - 1);
            g.add_edge(0, a - 1);
            g.add_edge(0, a);
            path(g, a, n - 1);
            g.add_edge(0, n - 1);
            return;
        }
        case MotifKind::TriangleChain:
            path(g, 0, n - 1);
            for (int i = 0; i + 2 < n; ++i) g.add_edge(i, i + 2);
            return;
        case MotifKind::RingShaped: {
            const int groups = (n + 1) / 2;
            for (int i = 0; 2 * i + 1 < n; ++i) g.add_edge(2 * i, 2 * i + 1);
            for (int i = 0; i < groups; ++i) g.add_edge(2 * i, 2 * ((i + 1) % groups));
            return;
        }
        case MotifKind::Diamond:
            g.add_edge(0, 1);
            g.add_edge(0, 2);
            g.add_edge(1, 2);
            g.add_edge(1, 3);
            g.add_edge(2, 3);
            path(g, 3, n - 1);
            return;
        case MotifKind::HShaped: {
            const int p = (n + 1) / 2;
            path(g, 0, p - 1);
            path(g, p, n - 1);
            g.add_edge((p - 1) / 2, p + (n - p - 1) / 2);
            return;
        }
        case MotifKind::Wheel:
            cycle(g, 1, n - 1);
            for (int i = 1; i < n; ++i) g.add_edge(0, i);
            return;
        case MotifKind::Hourglass:
            g.add_edge(0, 1);
            g.add_edge(0, 2);
            g.add_edge(1, 2);
            g.add_edge(2, 3);
            g.add_edge(2, 4);
            g.add_edge(3, 4);
            if (n > 5) {
                g.add_edge(0, 5);
                path(g, 5, n - 1);
            }
            return;
        case MotifKind::DcdTrident: {
            const int tail = n - 7;
            path(g, 0, tail);
            for (int i = 1; i <= 3; ++i) g.add_edge(0, tail + i);
            for (int i = 4; i <= 6; ++i) g.add_edge(tail, tail + i);
            return;
        }
        case MotifKind::CircularCross: {
            cycle(g, 0, n - 1);
            const int half = n / 2;
            const int quarter = (n + 3) / 4;
            g.add_edge(0, half);
            g.add_edge(quarter, quarter + half);
            return;
        }
        case MotifKind::Ladder: {
            const int rungs = n / 2;
            path(g, 0, rungs - 1);
            path(g, rungs, 2 * rungs - 1);
            for (int i = 0; i < rungs; ++i) g.add_edge(i, rungs + i);
            if (n % 2) g.add_edge(rungs - 1, n - 1);
            return;
        }
        case MotifKind::StarGraph:
            for (int i = 1; i < n; ++i) g.add_edge(0, i);
            return;
        case MotifKind::SingleTriangle:
            g.add_edge(0, 1);
            g.add_edge(0, 2);
            g.add_edge(1, 2);
            path(g, 2, n - 1);
            return;
        case MotifKind::CrossArm:
            radial_arms(g, 0, 1, n - 1, 4);
            return;
    }
    throw std::logic_error("unhandled motif kind");
}

}  // namespace

int structural_minimum(MotifKind kind, const MotifParams& params) {
    switch (kind) {
        case MotifKind::StarShaped: return params.branch_count + 1;
        case MotifKind::PathShaped: return 2;
        case MotifKind::FanShaped: return 2;
        case MotifKind::AcutePolygon: return 4;
        case MotifKind::RandomBipartite: return 2;
        case MotifKind::TreeShaped: return 2;
        case MotifKind::TridentShaped: return 4;
        case MotifKind::ConeConnected: return 5;
        case MotifKind::ChainWithBypass: return 4;
        case MotifKind::PartialPolygon: return 4;
        case MotifKind::Complete: return 2;
        case MotifKind::CycleGraph: return 3;
        case MotifKind::DoubleCycle: return 5;
        case MotifKind::TriangleChain: return 3;
        case MotifKind::RingShaped: return 5;
        case MotifKind::Diamond: return 4;
        case MotifKind::HShaped: return 6;
        case MotifKind::Wheel: return 4;
        case MotifKind::Hourglass: return 5;
        case MotifKind::DcdTrident: return 8;
        case MotifKind::CircularCross: return 6;
        case MotifKind::Ladder: return 4;
        case MotifKind::StarGraph: return 2;
        case MotifKind::SingleTriangle: return 3;
        case MotifKind::CrossArm: return 5;
    }
    throw std::logic_error("unhandled motif kind");
}

Graph generate_motif(MotifKind kind, const MotifParams& params, Rng& rng) {
    if ((kind == MotifKind::StarShaped || kind == MotifKind::TreeShaped) && params.branch_count < 1) {
        throw std::invalid_argument(std::string(to_string(kind)) + " requires branch_count >= 1");
    }
    const int minimum = structural_minimum(kind, params);
    if (params.node_count < minimum) {
        throw std::invalid_argument(std::string(to_string(kind)) + " requires node_count >= " +
                                    std::to_string(minimum) + ", got " + std::to_string(params.node_count));
    }
    Graph g;
    g.node_count = params.node_count;
    build_edges(g, kind, params, rng);
    g.features = generate_features(params.feature_spec, params.node_count, rng);
    Segment seg;
    seg.motif_kind = kind;
    seg.node_ids.resize(static_cast<std::size_t>(params.node_count));
    std::iota(seg.node_ids.begin(), seg.node_ids.end(), 0);
    seg.role = SegmentRole::Irrelevant;
    g.provenance.segments.push_back(std::move(seg));
    return g;
}

}  // namespace crcg
