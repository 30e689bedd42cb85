#include "crcg/compose.hpp"

#include <algorithm>
#include <charconv>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace crcg {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

// First `count` entries of a uniformly random permutation of 0..upper-1.
std::vector<int> sample_distinct(Rng& rng, int count, int upper) {
    if (count < 0 || count > upper) throw std::invalid_argument("sample_distinct: count out of range");
    std::vector<int> pool(static_cast<std::size_t>(upper));
    std::iota(pool.begin(), pool.end(), 0);
    for (int i = 0; i < count; ++i) {
        const int j = static_cast<int>(rng.uniform_int(i, upper - 1));
        std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
    }
    pool.resize(static_cast<std::size_t>(count));
    return pool;
}

void check_widths(const Graph& g1, const Graph& g2) {
    if (g1.features.cols() != g2.features.cols()) {
        throw std::invalid_argument("connect: feature width mismatch");
    }
}

void append_segments(Graph& out, const Graph& g2, const std::vector<int>& remap) {
    for (const auto& seg : g2.provenance.segments) {
        Segment s;
        s.motif_kind = seg.motif_kind;
        s.role = seg.role;
        s.node_ids.reserve(seg.node_ids.size());
        for (int id : seg.node_ids) s.node_ids.push_back(remap[static_cast<std::size_t>(id)]);
        out.provenance.segments.push_back(std::move(s));
    }
}

void sum_noise(Graph& out, const Graph& g2) {
    out.provenance.noise.edges_deleted += g2.provenance.noise.edges_deleted;
    out.provenance.noise.edges_added += g2.provenance.noise.edges_added;
    out.provenance.noise.nodes_deleted += g2.provenance.noise.nodes_deleted;
    out.provenance.noise.nodes_added += g2.provenance.noise.nodes_added;
}

// Disjoint union; remap receives where g2's nodes landed.
Graph union_graphs(const Graph& g1, const Graph& g2, std::vector<int>& remap) {
    Graph out = g1;
    const int n1 = g1.node_count;
    out.node_count = n1 + g2.node_count;
    out.features.conservativeResize(out.node_count, Eigen::NoChange);
    out.features.bottomRows(g2.node_count) = g2.features;
    remap.resize(static_cast<std::size_t>(g2.node_count));
    std::iota(remap.begin(), remap.end(), n1);
    for (const auto& [u, v] : g2.edges) out.add_edge(u + n1, v + n1);
    append_segments(out, g2, remap);
    sum_noise(out, g2);
    return out;
}

Graph connect_adjacent(const Graph& g1, const Graph& g2, Rng& rng) {
    std::vector<int> remap;
    Graph out = union_graphs(g1, g2, remap);
    const int u = static_cast<int>(rng.uniform_int(0, g1.node_count - 1));
    const int v = g1.node_count + static_cast<int>(rng.uniform_int(0, g2.node_count - 1));
    out.add_edge(u, v);
    return out;
}

Graph connect_cross(const Graph& g1, const Graph& g2, int shared, Rng& rng) {
    if (shared < 1) throw std::invalid_argument("cross: shared must be positive");
    if (shared > std::min(g1.node_count, g2.node_count)) {
        throw std::invalid_argument("cross: shared exceeds the smaller motif");
    }
    const auto picks1 = sample_distinct(rng, shared, g1.node_count);
    const auto picks2 = sample_distinct(rng, shared, g2.node_count);
    std::vector<int> remap(static_cast<std::size_t>(g2.node_count), -1);
    for (int i = 0; i < shared; ++i) {
        remap[static_cast<std::size_t>(picks2[static_cast<std::size_t>(i)])] =
            picks1[static_cast<std::size_t>(i)];
    }
    Graph out = g1;
    out.node_count = g1.node_count + g2.node_count - shared;
    out.features.conservativeResize(out.node_count, Eigen::NoChange);
    int next = g1.node_count;
    for (int v = 0; v < g2.node_count; ++v) {
        if (remap[static_cast<std::size_t>(v)] < 0) {
            remap[static_cast<std::size_t>(v)] = next;
            out.features.row(next) = g2.features.row(v);
            ++next;
        }
    }
    for (const auto& [u, v] : g2.edges) {
        out.add_edge(remap[static_cast<std::size_t>(u)], remap[static_cast<std::size_t>(v)]);
    }
    append_segments(out, g2, remap);
    sum_noise(out, g2);
    return out;
}

Graph connect_entangled(const Graph& g1, const Graph& g2, int edge_count, Rng& rng) {
    if (edge_count < 2) throw std::invalid_argument("entangled: edge_count must be at least 2");
    if (static_cast<long long>(edge_count) > static_cast<long long>(g1.node_count) * g2.node_count) {
        throw std::invalid_argument("entangled: edge_count exceeds available cross pairs");
    }
    std::vector<int> remap;
    Graph out = union_graphs(g1, g2, remap);
    const auto picks = sample_distinct(rng, edge_count, g1.node_count * g2.node_count);
    for (int idx : picks) {
        out.add_edge(idx / g2.node_count, g1.node_count + idx % g2.node_count);
    }
    return out;
}

Graph connect_containment(const Graph& g1, const Graph& g2, Rng& rng) {
    if (g2.node_count > g1.node_count) {
        throw std::invalid_argument("containment: contained motif must not exceed the host");
    }
    const auto targets = sample_distinct(rng, g2.node_count, g1.node_count);
    Graph out = g1;
    for (const auto& [u, v] : g2.edges) {
        out.add_edge(targets[static_cast<std::size_t>(u)], targets[static_cast<std::size_t>(v)]);
    }
    append_segments(out, g2, targets);
    sum_noise(out, g2);
    return out;
}

void remove_edges_at(Graph& g, const std::vector<int>& indices) {
    std::vector<char> drop(g.edges.size(), 0);
    for (int i : indices) drop[static_cast<std::size_t>(i)] = 1;
    std::vector<std::pair<int, int>> kept;
    kept.reserve(g.edges.size() - indices.size());
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
        if (!drop[i]) kept.push_back(g.edges[i]);
    }
    g.edges = std::move(kept);
}

void remove_nodes(Graph& g, const std::vector<int>& ids) {
    std::vector<char> gone(static_cast<std::size_t>(g.node_count), 0);
    for (int id : ids) gone[static_cast<std::size_t>(id)] = 1;
    std::vector<int> newid(static_cast<std::size_t>(g.node_count), -1);
    int next = 0;
    for (int i = 0; i < g.node_count; ++i) {
        if (!gone[static_cast<std::size_t>(i)]) newid[static_cast<std::size_t>(i)] = next++;
    }
    Eigen::MatrixXd feats(next, g.features.cols());
    for (int i = 0; i < g.node_count; ++i) {
        if (newid[static_cast<std::size_t>(i)] >= 0) feats.row(newid[static_cast<std::size_t>(i)]) = g.features.row(i);
    }
    std::vector<std::pair<int, int>> kept;
    for (const auto& [u, v] : g.edges) {
        const int nu = newid[static_cast<std::size_t>(u)];
        const int nv = newid[static_cast<std::size_t>(v)];
        if (nu >= 0 && nv >= 0) kept.emplace_back(std::min(nu, nv), std::max(nu, nv));
    }
    std::sort(kept.begin(), kept.end());
    g.edges = std::move(kept);
    g.features = std::move(feats);
    g.node_count = next;
    for (auto& seg : g.provenance.segments) {
        std::vector<int> remaining;
        for (int id : seg.node_ids) {
            if (newid[static_cast<std::size_t>(id)] >= 0) remaining.push_back(newid[static_cast<std::size_t>(id)]);
        }
        seg.node_ids = std::move(remaining);
    }
}

void add_random_nodes(Graph& g, int count, Rng& rng) {
    if (count == 0) return;
    const Eigen::Index dim = g.features.cols();
    g.features.conservativeResize(g.node_count + count, Eigen::NoChange);
    for (int j = 0; j < count; ++j) {
        const int node = g.node_count;
        for (Eigen::Index c = 0; c < dim; ++c) g.features(node, c) = rng.normal();
        const int attach = static_cast<int>(rng.uniform_int(1, 3));
        const auto targets = sample_distinct(rng, std::min(attach, node), node);
        g.node_count = node + 1;
        for (int t : targets) g.add_edge(t, node);
    }
}

FeatureSpec kind_feature_spec(MotifKind kind, double stddev, int dim) {
    FeatureSpec spec;
    spec.method = FeatureMethod::Normal;
    // Feature mean carries the kind index, so the motif identity is visible to
    // the learner unless stddev drowns it.
    spec.mean = static_cast<double>(kind_index(kind));
    spec.stddev = stddev;
    spec.dim = dim;
    return spec;
}

Graph build_kind(int kind_idx, int node_count, double stddev, int dim, SegmentRole role, Rng& rng) {
    const MotifKind kind = kind_from_index(kind_idx);
    MotifParams params;
    params.feature_spec = kind_feature_spec(kind, stddev, dim);
    params.node_count = std::max(node_count, structural_minimum(kind, params));
    Graph g = generate_motif(kind, params, rng);
    g.provenance.segments.front().role = role;
    return g;
}

Graph connect_with_fallback(const Graph& g1, const Graph& g2, const ConnectionKind& kind, Rng& rng) {
    if (std::holds_alternative<Containment>(kind) && g2.node_count > g1.node_count) {
        return connect(g1, g2, Adjacent{}, rng);
    }
    return connect(g1, g2, kind, rng);
}

int clamp_to_minimum(int kind_idx, int node_count) {
    MotifParams probe;
    return std::max(node_count, structural_minimum(kind_from_index(kind_idx), probe));
}

constexpr int kConfounderPoolFirst = 6;
constexpr int kIrrelevantPoolFirst = 11;
constexpr int kPoolLast = 25;

void apply_irrelevant_noise(Graph& g, const ScenarioConfig& cfg, Rng& rng) {
    std::vector<char> irrelevant(static_cast<std::size_t>(g.node_count), 0);
    for (const auto& seg : g.provenance.segments) {
        if (seg.role != SegmentRole::Irrelevant) continue;
        for (int id : seg.node_ids) irrelevant[static_cast<std::size_t>(id)] = 1;
    }
    std::vector<int> irr_edge_indices;
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
        if (irrelevant[static_cast<std::size_t>(g.edges[i].first)] &&
            irrelevant[static_cast<std::size_t>(g.edges[i].second)]) {
            irr_edge_indices.push_back(static_cast<int>(i));
        }
    }
    const int edge_ops = static_cast<int>(cfg.noise_edge_frac * static_cast<double>(irr_edge_indices.size()));
    if (edge_ops > 0) {
        const auto picks = sample_distinct(rng, edge_ops, static_cast<int>(irr_edge_indices.size()));
        std::vector<int> doomed;
        doomed.reserve(picks.size());
        for (int p : picks) doomed.push_back(irr_edge_indices[static_cast<std::size_t>(p)]);
        remove_edges_at(g, doomed);
        g.provenance.noise.edges_deleted += edge_ops;

        std::vector<std::pair<int, int>> candidates;
        for (int u = 0; u < g.node_count; ++u) {
            if (!irrelevant[static_cast<std::size_t>(u)]) continue;
            for (int v = u + 1; v < g.node_count; ++v) {
                if (irrelevant[static_cast<std::size_t>(v)] && !g.has_edge(u, v)) candidates.emplace_back(u, v);
            }
        }
        const int additions = std::min<int>(edge_ops, static_cast<int>(candidates.size()));
        for (int p : sample_distinct(rng, additions, static_cast<int>(candidates.size()))) {
            g.add_edge(candidates[static_cast<std::size_t>(p)].first, candidates[static_cast<std::size_t>(p)].second);
        }
        g.provenance.noise.edges_added += additions;
    }
    std::vector<int> irr_nodes;
    for (int i = 0; i < g.node_count; ++i) {
        if (irrelevant[static_cast<std::size_t>(i)]) irr_nodes.push_back(i);
    }
    const int node_ops = static_cast<int>(cfg.noise_node_frac * static_cast<double>(irr_nodes.size()));
    if (node_ops > 0) {
        std::vector<int> doomed;
        for (int p : sample_distinct(rng, node_ops, static_cast<int>(irr_nodes.size()))) {
            doomed.push_back(irr_nodes[static_cast<std::size_t>(p)]);
        }
        remove_nodes(g, doomed);
        g.provenance.noise.nodes_deleted += node_ops;
        add_random_nodes(g, node_ops, rng);
        g.provenance.noise.nodes_added += node_ops;
    }
}

}  // namespace

Graph connect(const Graph& g1, const Graph& g2, const ConnectionKind& kind, Rng& rng) {
    check_widths(g1, g2);
    return std::visit(
        overloaded{
            [&](const Adjacent&) { return connect_adjacent(g1, g2, rng); },
            [&](const Cross& c) { return connect_cross(g1, g2, c.shared, rng); },
            [&](const Entangled& e) { return connect_entangled(g1, g2, e.edge_count, rng); },
            [&](const Containment&) { return connect_containment(g1, g2, rng); },
        },
        kind);
}

std::vector<std::pair<int, int>> edges_by_similarity(const Eigen::MatrixXd& features, double threshold,
                                                     const std::optional<std::vector<int>>& dims) {
    if (features.rows() < 2) throw std::invalid_argument("edges_by_similarity: need at least 2 rows");
    Eigen::MatrixXd sub;
    if (dims) {
        if (dims->empty()) throw std::invalid_argument("edges_by_similarity: dims must not be empty");
        sub.resize(features.rows(), static_cast<Eigen::Index>(dims->size()));
        for (std::size_t i = 0; i < dims->size(); ++i) {
            const int d = (*dims)[i];
            if (d < 0 || d >= features.cols()) throw std::invalid_argument("edges_by_similarity: dim out of range");
            sub.col(static_cast<Eigen::Index>(i)) = features.col(d);
        }
    } else {
        sub = features;
    }
    const Eigen::VectorXd norms = sub.rowwise().norm();
    std::vector<std::pair<int, int>> edges;
    for (Eigen::Index u = 0; u < sub.rows(); ++u) {
        for (Eigen::Index v = u + 1; v < sub.rows(); ++v) {
            if (norms(u) < 1e-12 || norms(v) < 1e-12) continue;
            const double sim = sub.row(u).dot(sub.row(v)) / (norms(u) * norms(v));
            if (sim > threshold) edges.emplace_back(static_cast<int>(u), static_cast<int>(v));
        }
    }
    return edges;
}

Graph inject_noise(const Graph& g, const NoiseCounts& counts, Rng& rng) {
    if (counts.edge_del < 0 || counts.edge_add < 0 || counts.node_del < 0 || counts.node_add < 0) {
        throw std::invalid_argument("inject_noise: negative count");
    }
    if (counts.edge_del > static_cast<int>(g.edges.size())) {
        throw std::invalid_argument("inject_noise: edge_del exceeds edge count");
    }
    if (counts.node_del >= g.node_count && counts.node_del > 0) {
        throw std::invalid_argument("inject_noise: node_del must leave at least one node");
    }
    Graph out = g;
    if (counts.edge_del > 0) {
        remove_edges_at(out, sample_distinct(rng, counts.edge_del, static_cast<int>(out.edges.size())));
    }
    if (counts.edge_add > 0) {
        std::vector<std::pair<int, int>> candidates;
        for (int u = 0; u < out.node_count; ++u) {
            for (int v = u + 1; v < out.node_count; ++v) {
                if (!out.has_edge(u, v)) candidates.emplace_back(u, v);
            }
        }
        if (counts.edge_add > static_cast<int>(candidates.size())) {
            throw std::invalid_argument("inject_noise: edge_add exceeds absent pairs");
        }
        for (int p : sample_distinct(rng, counts.edge_add, static_cast<int>(candidates.size()))) {
            out.add_edge(candidates[static_cast<std::size_t>(p)].first, candidates[static_cast<std::size_t>(p)].second);
        }
    }
    if (counts.node_del > 0) {
        remove_nodes(out, sample_distinct(rng, counts.node_del, out.node_count));
    }
    add_random_nodes(out, counts.node_add, rng);
    out.provenance.noise.edges_deleted += counts.edge_del;
    out.provenance.noise.edges_added += counts.edge_add;
    out.provenance.noise.nodes_deleted += counts.node_del;
    out.provenance.noise.nodes_added += counts.node_add;
    return out;
}

std::string_view to_string(ParamMap f) {
    switch (f) {
        case ParamMap::Identity: return "identity";
        case ParamMap::Increment: return "increment";
        case ParamMap::Double: return "double";
    }
    throw std::logic_error("bad param map");
}

ParamMap param_map_from_string(std::string_view name) {
    if (name == "identity") return ParamMap::Identity;
    if (name == "increment") return ParamMap::Increment;
    if (name == "double") return ParamMap::Double;
    throw std::invalid_argument("unknown param map: " + std::string(name));
}

std::string_view to_string(LabelMap h) {
    switch (h) {
        case LabelMap::ClassOfM: return "class_of_m";
        case LabelMap::ClassOfMAndA: return "class_of_m_and_a";
    }
    throw std::logic_error("bad label map");
}

LabelMap label_map_from_string(std::string_view name) {
    if (name == "class_of_m") return LabelMap::ClassOfM;
    if (name == "class_of_m_and_a") return LabelMap::ClassOfMAndA;
    throw std::invalid_argument("unknown label map: " + std::string(name));
}

int apply_param_map(ParamMap f, int a) {
    switch (f) {
        case ParamMap::Identity: return a;
        case ParamMap::Increment: return a + 1;
        case ParamMap::Double: return 2 * a;
    }
    throw std::logic_error("bad param map");
}

Graph compose_sample(const CompositionInstance& inst, Rng& rng) {
    static const std::vector<ConnectionKind> kDefaultPool = {Adjacent{}, Cross{1}, Entangled{2}, Containment{}};
    const auto& pool = inst.connection_pool.empty() ? kDefaultPool : inst.connection_pool;
    const auto pick = [&]() -> const ConnectionKind& {
        return pool[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(pool.size()) - 1))];
    };

    const int m = static_cast<int>(rng.uniform_int(1, 5));
    int k = m + 5;
    if (!rng.bernoulli(inst.pair_prob)) {
        const int r = static_cast<int>(rng.uniform_int(0, 3));
        k = kConfounderPoolFirst + r + (kConfounderPoolFirst + r >= m + 5 ? 1 : 0);
    }
    const int a = static_cast<int>(rng.uniform_int(inst.a_min, inst.a_max));
    const int fa = apply_param_map(inst.f_map, a);

    Graph g = build_kind(m, clamp_to_minimum(m, a), 1.0, inst.feature_dim, SegmentRole::Causal, rng);
    Graph conf = build_kind(k, clamp_to_minimum(k, fa), 1.0, inst.feature_dim, SegmentRole::Confounder, rng);
    g = connect_with_fallback(g, conf, pick(), rng);
    for (int j = 0; j < 2; ++j) {
        const int kind = static_cast<int>(rng.uniform_int(kIrrelevantPoolFirst, kPoolLast));
        const int size = static_cast<int>(rng.uniform_int(inst.a_min, inst.a_max));
        Graph noise = build_kind(kind, clamp_to_minimum(kind, size), 1.0, inst.feature_dim,
                                 SegmentRole::Irrelevant, rng);
        g = connect_with_fallback(g, noise, pick(), rng);
    }
    g.label = inst.h_map == LabelMap::ClassOfM ? m - 1 : (m - 1 + a) % inst.num_classes;
    return g;
}

std::string_view to_string(ScenarioVariant variant) {
    switch (variant) {
        case ScenarioVariant::NoConfounder: return "no_confounder";
        case ScenarioVariant::Probability: return "probability";
        case ScenarioVariant::SizeScaled: return "size_scaled";
        case ScenarioVariant::Complexity: return "complexity";
    }
    throw std::logic_error("bad variant");
}

ScenarioVariant scenario_variant_from_string(std::string_view name) {
    if (name == "no_confounder") return ScenarioVariant::NoConfounder;
    if (name == "probability") return ScenarioVariant::Probability;
    if (name == "size_scaled") return ScenarioVariant::SizeScaled;
    if (name == "complexity") return ScenarioVariant::Complexity;
    throw std::invalid_argument("unknown scenario variant: " + std::string(name));
}

std::string_view to_string(ComplexityLevel level) {
    switch (level) {
        case ComplexityLevel::VeryLow: return "very_low";
        case ComplexityLevel::Low: return "low";
        case ComplexityLevel::Medium: return "medium";
        case ComplexityLevel::High: return "high";
        case ComplexityLevel::VeryHigh: return "very_high";
        case ComplexityLevel::ExtremelyHigh: return "extremely_high";
    }
    throw std::logic_error("bad level");
}

ComplexityLevel complexity_level_from_string(std::string_view name) {
    if (name == "very_low") return ComplexityLevel::VeryLow;
    if (name == "low") return ComplexityLevel::Low;
    if (name == "medium") return ComplexityLevel::Medium;
    if (name == "high") return ComplexityLevel::High;
    if (name == "very_high") return ComplexityLevel::VeryHigh;
    if (name == "extremely_high") return ComplexityLevel::ExtremelyHigh;
    throw std::invalid_argument("unknown complexity level: " + std::string(name));
}

double complexity_std(ComplexityLevel level) {
    switch (level) {
        case ComplexityLevel::VeryLow: return 4.0;
        case ComplexityLevel::Low: return 2.0;
        case ComplexityLevel::Medium: return 1.0;
        case ComplexityLevel::High: return 0.5;
        case ComplexityLevel::VeryHigh: return 0.25;
        case ComplexityLevel::ExtremelyHigh: return 0.1;
    }
    throw std::logic_error("bad level");
}

std::string ScenarioConfig::name() const {
    std::string out(to_string(variant));
    switch (variant) {
        case ScenarioVariant::NoConfounder:
            out += "_s" + std::to_string(noise_sets);
            break;
        case ScenarioVariant::Probability: {
            char buf[32];
            const auto res = std::to_chars(buf, buf + sizeof(buf), p);
            out += "_p";
            out.append(buf, res.ptr);
            break;
        }
        case ScenarioVariant::SizeScaled:
            out += "_m" + std::to_string(multiplier);
            break;
        case ScenarioVariant::Complexity:
            out += '_';
            out += to_string(std_level);
            break;
    }
    return out;
}

Graph attach_confounder(const Graph& g, const ScenarioConfig& scenario, Split split, Rng& rng) {
    const Segment* causal = nullptr;
    for (const auto& seg : g.provenance.segments) {
        if (seg.role == SegmentRole::Causal) {
            causal = &seg;
            break;
        }
    }
    if (!causal) throw std::invalid_argument("attach_confounder: graph has no causal segment");
    const int m = kind_index(causal->motif_kind);
    if (m < 1 || m > 5) throw std::invalid_argument("attach_confounder: causal kind outside the causal pool");

    const int a = static_cast<int>(causal->node_ids.size());
    const int fa = apply_param_map(scenario.f_map, a);
    const int copies = scenario.variant == ScenarioVariant::SizeScaled ? scenario.multiplier : 1;
    const double stddev =
        scenario.variant == ScenarioVariant::Complexity ? complexity_std(scenario.std_level) : 1.0;

    int attach_kind;
    if (split == Split::Train) {
        const double coin = scenario.variant == ScenarioVariant::Probability ? scenario.p : 0.5;
        attach_kind = rng.bernoulli(coin)
                          ? m + 5
                          : static_cast<int>(rng.uniform_int(kIrrelevantPoolFirst, kPoolLast));
    } else {
        attach_kind = static_cast<int>(rng.uniform_int(kConfounderPoolFirst, kPoolLast));
    }
    const SegmentRole role =
        attach_kind < kIrrelevantPoolFirst ? SegmentRole::Confounder : SegmentRole::Irrelevant;

    Graph out = g;
    const int dim = static_cast<int>(g.features.cols());
    for (int c = 0; c < copies; ++c) {
        Graph extra = build_kind(attach_kind, clamp_to_minimum(attach_kind, fa), stddev, dim, role, rng);
        out = connect(out, extra, Adjacent{}, rng);
    }
    return out;
}

Graph generate_sample(const ScenarioConfig& cfg, Split split, std::uint64_t master_seed, int index) {
    if (cfg.num_classes < 2 || cfg.num_classes > 5) {
        throw std::invalid_argument("num_classes must be in [2, 5]");
    }
    Rng rng = Rng::stream(master_seed, to_string(split), static_cast<std::uint64_t>(index));
    const int y = static_cast<int>(rng.uniform_int(0, cfg.num_classes - 1));

    const auto build = [&](int kind_idx) {
        const int a = static_cast<int>(rng.uniform_int(cfg.a_min, cfg.a_max));
        return build_kind(kind_idx, clamp_to_minimum(kind_idx, a), 1.0, cfg.feature_dim,
                          SegmentRole::Causal, rng);
    };

    Graph g;
    switch (y) {
        case 0: {
            Graph m1 = build(1);
            Graph m2 = build(2);
            g = connect(m1, m2, Adjacent{}, rng);
            break;
        }
        case 1: {
            Graph m1 = build(1);
            Graph m3 = build(3);
            g = connect(m1, m3, Adjacent{}, rng);
            Graph m5 = build(5);
            g = connect(g, m5, Cross{1}, rng);
            break;
        }
        case 2: {
            Graph m1 = build(1);
            Graph m2 = build(2);
            g = connect(m1, m2, Entangled{2}, rng);
            Graph m5 = build(5);
            g = connect(g, m5, Cross{1}, rng);
            break;
        }
        case 3:
            g = build(5);
            break;
        case 4: {
            Graph m3 = build(3);
            Graph m4 = build(4);
            g = connect(m3, m4, Cross{1}, rng);
            break;
        }
        default:
            throw std::logic_error("label out of rule range");
    }

    if (cfg.variant == ScenarioVariant::NoConfounder) {
        for (int s = 0; s < cfg.noise_sets; ++s) {
            const int kind = static_cast<int>(rng.uniform_int(kIrrelevantPoolFirst, kPoolLast));
            const int size = static_cast<int>(rng.uniform_int(cfg.a_min, cfg.a_max));
            Graph noise = build_kind(kind, clamp_to_minimum(kind, size), 1.0, cfg.feature_dim,
                                     SegmentRole::Irrelevant, rng);
            g = connect(g, noise, Adjacent{}, rng);
        }
    } else {
        g = attach_confounder(g, cfg, split, rng);
    }
    apply_irrelevant_noise(g, cfg, rng);
    g.label = y;
    g.provenance.seed = derive_seed(master_seed, to_string(split), static_cast<std::uint64_t>(index));
    return g;
}

std::pair<Dataset, Dataset> generate_scenario(const ScenarioConfig& cfg, std::uint64_t master_seed,
                                              int threads) {
    const auto scenario = std::make_shared<const ScenarioConfig>(cfg);
    const auto make = [&](Split split, int n) {
        Dataset d;
        d.split = split;
        d.master_seed = master_seed;
        d.num_classes = cfg.num_classes;
        d.scenario = scenario;
        d.graphs.resize(static_cast<std::size_t>(n));
        if (threads <= 1) {
            for (int i = 0; i < n; ++i) d.graphs[static_cast<std::size_t>(i)] = generate_sample(cfg, split, master_seed, i);
        } else {
            std::vector<std::thread> workers;
            std::exception_ptr first_error;
            std::mutex error_mutex;
            for (int t = 0; t < threads; ++t) {
                workers.emplace_back([&, t] {
                    try {
                        for (int i = t; i < n; i += threads) {
                            d.graphs[static_cast<std::size_t>(i)] = generate_sample(cfg, split, master_seed, i);
                        }
                    } catch (...) {
                        const std::lock_guard<std::mutex> lock(error_mutex);
                        if (!first_error) first_error = std::current_exception();
                    }
                });
            }
            for (auto& w : workers) w.join();
            if (first_error) std::rethrow_exception(first_error);
        }
        return d;
    };
    return {make(Split::Train, cfg.n_train), make(Split::Test, cfg.n_test)};
}

std::optional<int> label_from_causal_segments(const Graph& g) {
    std::vector<int> kinds;
    for (const auto& seg : g.provenance.segments) {
        if (seg.role == SegmentRole::Causal) kinds.push_back(kind_index(seg.motif_kind));
    }
    std::sort(kinds.begin(), kinds.end());
    if (kinds == std::vector<int>{1, 2}) return 0;
    if (kinds == std::vector<int>{1, 3, 5}) return 1;
    if (kinds == std::vector<int>{1, 2, 5}) return 2;
    if (kinds == std::vector<int>{5}) return 3;
    if (kinds == std::vector<int>{3, 4}) return 4;
    return std::nullopt;
}

}  // namespace crcg
