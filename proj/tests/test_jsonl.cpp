#include <doctest.h>

#include <Eigen/Dense>
#include <sstream>
#include <string>

#include "crcg/jsonl.hpp"
#include "crcg/rng.hpp"

using namespace crcg;

namespace {

Dataset sample_dataset() {
    Dataset d;
    d.num_classes = 3;
    Rng rng(99);
    for (int i = 0; i < 5; ++i) {
        Graph g;
        g.node_count = 3 + i;
        g.features = Eigen::MatrixXd::Zero(g.node_count, 2);
        for (int r = 0; r < g.node_count; ++r) {
            g.features(r, 0) = rng.normal();
            g.features(r, 1) = rng.uniform(-10.0, 10.0);
        }
        for (int u = 0; u + 1 < g.node_count; ++u) g.add_edge(u, u + 1);
        g.label = i % 3;
        Segment seg;
        seg.motif_kind = MotifKind::PathShaped;
        for (int v = 0; v < g.node_count; ++v) seg.node_ids.push_back(v);
        seg.role = SegmentRole::Causal;
        g.provenance.segments.push_back(seg);
        g.provenance.noise.edges_added = i;
        g.provenance.seed = derive_seed(42, "sample", static_cast<std::uint64_t>(i));
        d.graphs.push_back(std::move(g));
    }
    return d;
}

std::string serialize_to_string(const Dataset& d) {
    std::ostringstream out;
    jsonl::serialize(d, out);
    return out.str();
}

}  // namespace

TEST_SUITE("jsonl") {

TEST_CASE("round-trip preserves every graph exactly") {
    const Dataset d = sample_dataset();
    const std::string text = serialize_to_string(d);
    std::istringstream in(text);
    const Dataset back = jsonl::deserialize(in);
    REQUIRE(back.graphs.size() == d.graphs.size());
    for (std::size_t i = 0; i < d.graphs.size(); ++i) {
        CHECK(graphs_equal(d.graphs[i], back.graphs[i]));
    }
    CHECK(back.num_classes == d.num_classes);
}

TEST_CASE("serialization is byte-deterministic") {
    const Dataset d = sample_dataset();
    CHECK(serialize_to_string(d) == serialize_to_string(d));
    std::istringstream in(serialize_to_string(d));
    const Dataset back = jsonl::deserialize(in);
    CHECK(serialize_to_string(back) == serialize_to_string(d));
}

TEST_CASE("extreme doubles survive the round-trip bit-for-bit") {
    Dataset d;
    d.num_classes = 1;
    Graph g;
    g.node_count = 1;
    g.features = Eigen::MatrixXd::Zero(1, 6);
    g.features(0, 0) = 0.1;
    g.features(0, 1) = 1.0 / 3.0;
    g.features(0, 2) = 1e-300;
    g.features(0, 3) = -9.87654321e18;
    g.features(0, 4) = 1.0000000000000002;
    g.features(0, 5) = 0.0;
    g.label = 0;
    d.graphs.push_back(g);
    std::istringstream in(serialize_to_string(d));
    const Dataset back = jsonl::deserialize(in);
    for (int c = 0; c < 6; ++c) {
        CHECK(back.graphs[0].features(0, c) == d.graphs[0].features(0, c));
    }
}

TEST_CASE("empty dataset serializes to nothing and parses back empty") {
    Dataset d;
    CHECK(serialize_to_string(d).empty());
    std::istringstream in("");
    CHECK(jsonl::deserialize(in).graphs.empty());
}

TEST_CASE("missing key is reported with its line number") {
    const Dataset d = sample_dataset();
    std::string text = serialize_to_string(d);
    const auto pos = text.find(",\"edges\"");
    REQUIRE(pos != std::string::npos);
    const auto end = text.find(",\"features\"", pos);
    text.erase(pos, end - pos);
    std::istringstream in(text);
    CHECK_THROWS_WITH(jsonl::deserialize(in), "line 1: graph: missing key \"edges\"");
}

TEST_CASE("unknown key is rejected") {
    std::istringstream in(
        R"({"id":0,"label":0,"num_nodes":1,"edges":[],"features":[[0]],"bogus":1,)"
        R"("provenance":{"segments":[],"noise":{"edges_deleted":0,"edges_added":0,"nodes_deleted":0,"nodes_added":0}}})");
    CHECK_THROWS_WITH(jsonl::deserialize(in), "line 1: graph: unknown key \"bogus\"");
}

TEST_CASE("truncated final line aborts the parse without partial output") {
    const Dataset d = sample_dataset();
    std::string text = serialize_to_string(d);
    text.resize(text.size() - 30);
    std::istringstream in(text);
    CHECK_THROWS_AS(jsonl::deserialize(in), std::runtime_error);
    try {
        std::istringstream again(text);
        jsonl::deserialize(again);
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("line 5") != std::string::npos);
    }
}

TEST_CASE("id must match position in the file") {
    std::istringstream in(
        R"({"id":3,"label":0,"num_nodes":1,"edges":[],"features":[[0]],)"
        R"("provenance":{"segments":[],"noise":{"edges_deleted":0,"edges_added":0,"nodes_deleted":0,"nodes_added":0}}})");
    CHECK_THROWS_WITH(jsonl::deserialize(in), "line 1: id 3 does not match position 0");
}

TEST_CASE("type mismatches are rejected with field names") {
    std::istringstream in(
        R"({"id":0,"label":"zero","num_nodes":1,"edges":[],"features":[[0]],)"
        R"("provenance":{"segments":[],"noise":{"edges_deleted":0,"edges_added":0,"nodes_deleted":0,"nodes_added":0}}})");
    CHECK_THROWS_WITH(jsonl::deserialize(in), "line 1: label: expected integer");
}

TEST_CASE("graph without a label cannot be serialized") {
    Graph g;
    g.node_count = 1;
    g.features = Eigen::MatrixXd::Zero(1, 1);
    CHECK_THROWS_AS(jsonl::serialize_graph(g, 0), std::invalid_argument);
}

TEST_CASE("deserialized structural invariants are enforced") {
    std::istringstream in(
        R"({"id":0,"label":0,"num_nodes":2,"edges":[[0,5]],"features":[[0],[0]],)"
        R"("provenance":{"segments":[],"noise":{"edges_deleted":0,"edges_added":0,"nodes_deleted":0,"nodes_added":0}}})");
    CHECK_THROWS_AS(jsonl::deserialize(in), std::runtime_error);
}

}
