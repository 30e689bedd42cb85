#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "crcg/graph.hpp"
#include "crcg/rng.hpp"

using namespace crcg;

namespace {

bool mentions(const std::vector<std::string>& violations, const std::string& needle) {
    for (const auto& v : violations) {
        if (v.find(needle) != std::string::npos) return true;
    }
    return false;
}

double spectral_radius(const Eigen::MatrixXd& m) {
    Eigen::VectorXd v = Eigen::VectorXd::Ones(m.rows());
    v.normalize();
    double lambda = 0.0;
    for (int i = 0; i < 200; ++i) {
        Eigen::VectorXd w = m * v;
        lambda = w.norm();
        if (lambda == 0.0) return 0.0;
        v = w / lambda;
    }
    return lambda;
}

}  // namespace

TEST_SUITE("graph") {

TEST_CASE("add_edge normalizes orientation and drops duplicates") {
    Graph g;
    g.node_count = 4;
    g.features = Eigen::MatrixXd::Zero(4, 1);
    g.add_edge(2, 0);
    g.add_edge(0, 2);
    g.add_edge(1, 3);
    CHECK(g.edges.size() == 2);
    CHECK(g.has_edge(0, 2));
    CHECK(g.has_edge(2, 0));
    CHECK(g.has_edge(3, 1));
    CHECK_FALSE(g.has_edge(0, 1));
    CHECK(g.edges.front() == std::make_pair(0, 2));
    CHECK_THROWS_WITH(g.add_edge(1, 1), "self-loop rejected");
}

TEST_CASE("validate flags out-of-range endpoints") {
    Graph g;
    g.node_count = 3;
    g.features = Eigen::MatrixXd::Zero(3, 1);
    g.edges.emplace_back(0, 5);
    CHECK(mentions(validate(g), "edge endpoint out of range"));
}

TEST_CASE("validate flags self-loops pushed directly") {
    Graph g;
    g.node_count = 3;
    g.features = Eigen::MatrixXd::Zero(3, 1);
    g.edges.emplace_back(1, 1);
    CHECK(mentions(validate(g), "self-loop"));
}

TEST_CASE("validate flags feature row mismatch and non-finite values") {
    Graph g;
    g.node_count = 2;
    g.features = Eigen::MatrixXd::Zero(3, 1);
    CHECK(mentions(validate(g), "does not match node_count"));
    g.features = Eigen::MatrixXd::Zero(2, 1);
    g.features(0, 0) = std::nan("");
    CHECK(mentions(validate(g), "non-finite"));
}

TEST_CASE("validate flags unsorted and duplicate edge lists") {
    Graph g;
    g.node_count = 3;
    g.features = Eigen::MatrixXd::Zero(3, 1);
    g.edges = {{1, 2}, {0, 1}};
    CHECK(mentions(validate(g), "edges not sorted"));
    g.edges = {{0, 1}, {0, 1}};
    CHECK(mentions(validate(g), "duplicate edge"));
}

TEST_CASE("validate accepts a minimal clean graph") {
    Graph g;
    g.node_count = 2;
    g.features = Eigen::MatrixXd::Zero(2, 1);
    g.add_edge(0, 1);
    CHECK(validate(g).empty());
}

TEST_CASE("dataset validation checks labels against the class count") {
    Graph g;
    g.node_count = 1;
    g.features = Eigen::MatrixXd::Zero(1, 1);
    Dataset d;
    d.num_classes = 2;
    d.graphs.push_back(g);
    CHECK(mentions(validate(d), "missing label"));
    d.graphs[0].label = 2;
    CHECK(mentions(validate(d), "not below num_classes"));
    d.graphs[0].label = 1;
    CHECK(validate(d).empty());
}

TEST_CASE("normalized adjacency of a single node is the identity") {
    Graph g;
    g.node_count = 1;
    const Eigen::MatrixXd m = normalized_adjacency(g);
    CHECK(m.rows() == 1);
    CHECK(m(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("normalized adjacency of one edge is uniform one half") {
    Graph g;
    g.node_count = 2;
    g.add_edge(0, 1);
    const Eigen::MatrixXd m = normalized_adjacency(g);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) CHECK(m(i, j) == doctest::Approx(0.5).epsilon(1e-12));
    }
}

TEST_CASE("normalized adjacency of a triangle is uniform one third") {
    Graph g;
    g.node_count = 3;
    g.add_edge(0, 1);
    g.add_edge(1, 2);
    g.add_edge(0, 2);
    const Eigen::MatrixXd m = normalized_adjacency(g);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) CHECK(m(i, j) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    }
}

TEST_CASE("normalized adjacency is symmetric with spectral radius at most one") {
    Rng rng(101);
    for (int trial = 0; trial < 20; ++trial) {
        Graph g;
        g.node_count = static_cast<int>(rng.uniform_int(2, 10));
        for (int u = 0; u < g.node_count; ++u) {
            for (int v = u + 1; v < g.node_count; ++v) {
                if (rng.bernoulli(0.4)) g.add_edge(u, v);
            }
        }
        const Eigen::MatrixXd m = normalized_adjacency(g);
        CHECK((m - m.transpose()).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(spectral_radius(m) <= 1.0 + 1e-9);
    }
}

TEST_CASE("connectivity check distinguishes paths from split graphs") {
    Graph path;
    path.node_count = 4;
    path.add_edge(0, 1);
    path.add_edge(1, 2);
    path.add_edge(2, 3);
    CHECK(is_connected(path));

    Graph split;
    split.node_count = 4;
    split.add_edge(0, 1);
    split.add_edge(2, 3);
    CHECK_FALSE(is_connected(split));

    Graph lone;
    lone.node_count = 1;
    CHECK(is_connected(lone));
}

TEST_CASE("graphs_equal compares structure, features, label, and provenance") {
    Graph a;
    a.node_count = 2;
    a.features = Eigen::MatrixXd::Constant(2, 1, 1.5);
    a.add_edge(0, 1);
    a.label = 3;
    Graph b = a;
    CHECK(graphs_equal(a, b));
    b.features(1, 0) = 2.0;
    CHECK_FALSE(graphs_equal(a, b));
    b = a;
    b.label = 1;
    CHECK_FALSE(graphs_equal(a, b));
    b = a;
    b.provenance.noise.edges_added = 1;
    CHECK_FALSE(graphs_equal(a, b));
}

TEST_CASE("motif kind names round-trip through both mappings") {
    for (int i = 1; i <= kMotifKindCount; ++i) {
        const MotifKind kind = kind_from_index(i);
        CHECK(kind_index(kind) == i);
        CHECK(motif_kind_from_string(to_string(kind)) == kind);
    }
    CHECK(to_string(kind_from_index(1)) == "star_shaped");
    CHECK(to_string(kind_from_index(11)) == "complete");
    CHECK(to_string(kind_from_index(25)) == "cross_arm");
    CHECK_THROWS_WITH(kind_from_index(0), "motif kind index out of range: 0");
    CHECK_THROWS_WITH(kind_from_index(26), "motif kind index out of range: 26");
    CHECK_THROWS_AS(motif_kind_from_string("pentagon"), std::invalid_argument);
}

TEST_CASE("segment roles and splits have stable names") {
    CHECK(to_string(SegmentRole::Causal) == "causal");
    CHECK(to_string(SegmentRole::Confounder) == "confounder");
    CHECK(to_string(SegmentRole::Irrelevant) == "irrelevant");
    CHECK(role_from_string("confounder") == SegmentRole::Confounder);
    CHECK_THROWS_AS(role_from_string("causal_x"), std::invalid_argument);
    CHECK(to_string(Split::Train) == "train");
    CHECK(to_string(Split::Test) == "test");
}

}
