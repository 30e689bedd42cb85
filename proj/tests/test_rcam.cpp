#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "crcg/rcam.hpp"
#include "crcg/rng.hpp"

using namespace crcg;

namespace {

RepBatch hand_fixture() {
    RepBatch batch;
    Eigen::MatrixXd g0(2, 2);
    g0 << 1, 0, 0, 1;
    Eigen::MatrixXd g1(1, 2);
    g1 << 0, 1;
    Eigen::MatrixXd g2(1, 2);
    g2 << 0, 1;
    batch.reps = {g0, g1, g2};
    batch.labels = {0, 0, 1};
    batch.preds = {0, 1, 1};
    return batch;
}

RepBatch random_batch(Rng& rng, int num_classes) {
    RepBatch batch;
    const int graphs = static_cast<int>(rng.uniform_int(3, 6));
    for (int i = 0; i < graphs; ++i) {
        const int nodes = static_cast<int>(rng.uniform_int(1, 5));
        Eigen::MatrixXd reps(nodes, 4);
        for (int r = 0; r < nodes; ++r) {
            for (int c = 0; c < 4; ++c) reps(r, c) = rng.uniform(-1.0, 1.0);
        }
        batch.reps.push_back(reps);
        batch.labels.push_back(static_cast<int>(rng.uniform_int(0, num_classes - 1)));
        batch.preds.push_back(static_cast<int>(rng.uniform_int(0, num_classes - 1)));
    }
    return batch;
}

// Reference marking: direct quadruple loop over class, family, and node pairs.
MarkSet brute_marks(const RepBatch& batch, int num_classes, double tau) {
    const std::size_t n = batch.reps.size();
    std::vector<std::set<int>> anchors(n);
    std::vector<std::set<int>> deceptive(n);
    struct Row {
        int graph;
        int node;
    };
    for (int c = 0; c < num_classes; ++c) {
        std::vector<Row> s_plus;
        std::vector<Row> s_minus;
        std::vector<Row> i_minus;
        for (std::size_t i = 0; i < n; ++i) {
            for (int r = 0; r < batch.reps[i].rows(); ++r) {
                const Row row{static_cast<int>(i), r};
                if (batch.labels[i] == c && batch.preds[i] == c) s_plus.push_back(row);
                if (batch.labels[i] == c && batch.preds[i] != c) s_minus.push_back(row);
                if (batch.preds[i] == c && batch.labels[i] != c) i_minus.push_back(row);
            }
        }
        const auto scan = [&](const std::vector<Row>& pos, const std::vector<Row>& neg,
                              std::vector<std::set<int>>& into) {
            for (const Row& a : pos) {
                for (const Row& b : neg) {
                    const Eigen::RowVectorXd ra = batch.reps[static_cast<std::size_t>(a.graph)].row(a.node);
                    const Eigen::RowVectorXd rb = batch.reps[static_cast<std::size_t>(b.graph)].row(b.node);
                    if (cosine_value(ra, rb) > tau) {
                        into[static_cast<std::size_t>(a.graph)].insert(a.node);
                        into[static_cast<std::size_t>(b.graph)].insert(b.node);
                    }
                }
            }
        };
        scan(s_plus, s_minus, anchors);
        scan(s_plus, i_minus, deceptive);
    }
    MarkSet out;
    out.anchors.resize(n);
    out.deceptive.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.anchors[i].assign(anchors[i].begin(), anchors[i].end());
        out.deceptive[i].assign(deceptive[i].begin(), deceptive[i].end());
    }
    return out;
}

double brute_pool_sum(const RepBatch& batch, const std::vector<std::vector<int>>& marked) {
    double total = 0.0;
    for (std::size_t i = 0; i < batch.reps.size(); ++i) {
        if (marked[i].empty()) continue;
        Eigen::RowVectorXd pooled = Eigen::RowVectorXd::Zero(batch.reps[i].cols());
        for (int node : marked[i]) pooled += batch.reps[i].row(node);
        pooled /= static_cast<double>(marked[i].size());
        total += cosine_value(pooled, batch.reps[i].colwise().mean());
    }
    return total;
}

}  // namespace

TEST_SUITE("rcam") {

TEST_CASE("row norm reciprocals guard zero rows") {
    Eigen::MatrixXd m(2, 2);
    m << 3, 4, 0, 5;
    const Eigen::VectorXd u = row_norm_reciprocals(m);
    CHECK(u(0) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(u(1) == doctest::Approx(0.2).epsilon(1e-12));

    Eigen::MatrixXd zero(1, 2);
    zero << 0, 0;
    CHECK(row_norm_reciprocals(zero)(0) == 0.0);

    Eigen::MatrixXd unit(1, 2);
    unit << 1, 0;
    CHECK(row_norm_reciprocals(unit)(0) == 1.0);

    CHECK_THROWS_AS(row_norm_reciprocals(Eigen::MatrixXd(0, 2)), std::invalid_argument);
}

TEST_CASE("cross cosine matrix matches hand values") {
    Eigen::MatrixXd p(2, 2);
    p << 1, 0, 1, 1;
    Eigen::MatrixXd q(1, 2);
    q << 0, 2;
    const Eigen::MatrixXd m = cross_cosine_matrix(p, q);
    CHECK(m(0, 0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(m(1, 0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));

    const Eigen::MatrixXd self = cross_cosine_matrix(p, p);
    CHECK(self(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(self(1, 1) == doctest::Approx(1.0).epsilon(1e-12));

    Eigen::MatrixXd with_zero(2, 2);
    with_zero << 0, 0, 1, 1;
    const Eigen::MatrixXd z = cross_cosine_matrix(with_zero, q);
    CHECK(z(0, 0) == 0.0);

    Eigen::MatrixXd narrow(1, 3);
    CHECK_THROWS_AS(cross_cosine_matrix(p, narrow), std::invalid_argument);
}

TEST_CASE("cross cosine matrix agrees with the double loop on random pairs") {
    Rng rng(41);
    for (int trial = 0; trial < 50; ++trial) {
        const int n1 = static_cast<int>(rng.uniform_int(1, 8));
        const int n2 = static_cast<int>(rng.uniform_int(1, 8));
        const int h = static_cast<int>(rng.uniform_int(1, 6));
        Eigen::MatrixXd p(n1, h);
        Eigen::MatrixXd q(n2, h);
        for (int r = 0; r < n1; ++r) {
            for (int c = 0; c < h; ++c) p(r, c) = rng.uniform(-2.0, 2.0);
        }
        for (int r = 0; r < n2; ++r) {
            for (int c = 0; c < h; ++c) q(r, c) = rng.uniform(-2.0, 2.0);
        }
        if (trial % 5 == 0) p.row(0).setZero();
        const Eigen::MatrixXd m = cross_cosine_matrix(p, q);
        for (int r = 0; r < n1; ++r) {
            for (int c = 0; c < n2; ++c) {
                const double expected = cosine_value(p.row(r), q.row(c));
                CHECK(std::abs(m(r, c) - expected) <= 1e-9);
                CHECK(m(r, c) >= -1.0 - 1e-12);
                CHECK(m(r, c) <= 1.0 + 1e-12);
            }
        }
    }
}

TEST_CASE("partition separates truth-keyed and prediction-keyed families") {
    const RepBatch batch = hand_fixture();
    const auto parts = partition_representations(batch, 2);
    REQUIRE(parts.size() == 2);

    CHECK(parts[0].s_plus.rows.rows() == 2);
    CHECK(parts[0].s_plus.origins[0].graph == 0);
    CHECK(parts[0].s_plus.origins[1].node == 1);
    CHECK(parts[0].s_minus.rows.rows() == 1);
    CHECK(parts[0].s_minus.origins[0].graph == 1);
    CHECK(parts[0].i_plus.rows.rows() == 2);
    CHECK(parts[0].i_minus.rows.rows() == 0);

    CHECK(parts[1].s_plus.rows.rows() == 1);
    CHECK(parts[1].s_plus.origins[0].graph == 2);
    CHECK(parts[1].s_minus.rows.rows() == 0);
    CHECK(parts[1].i_minus.rows.rows() == 1);
    CHECK(parts[1].i_minus.origins[0].graph == 1);
}

TEST_CASE("partition rejects malformed batches") {
    RepBatch empty;
    CHECK_THROWS_AS(partition_representations(empty, 2), std::invalid_argument);
    RepBatch ragged = hand_fixture();
    ragged.preds.pop_back();
    CHECK_THROWS_AS(partition_representations(ragged, 2), std::invalid_argument);
    RepBatch bad = hand_fixture();
    bad.labels[0] = 5;
    CHECK_THROWS_AS(partition_representations(bad, 2), std::invalid_argument);
}

TEST_CASE("threshold marking records both endpoints") {
    Eigen::MatrixXd m(2, 2);
    m << 0.9, 0.2, 0.5, 0.95;
    const std::vector<Origin> rows = {{0, 0}, {0, 1}};
    const std::vector<Origin> cols = {{1, 0}, {1, 1}};
    const auto marked = mark_above_threshold(m, 0.8, rows, cols);
    const std::set<std::pair<int, int>> expected = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
    CHECK(marked == expected);

    CHECK(mark_above_threshold(m, 1.0, rows, cols).empty());
    CHECK(mark_above_threshold(m, -1.0, rows, cols).size() == 4);
    CHECK(mark_above_threshold(m, 0.91, rows, cols) ==
          std::set<std::pair<int, int>>{{0, 1}, {1, 1}});

    const std::vector<Origin> short_rows = {{0, 0}};
    CHECK_THROWS_AS(mark_above_threshold(m, 0.5, short_rows, cols), std::invalid_argument);
}

TEST_CASE("raising the threshold never adds marks") {
    Rng rng(42);
    for (int trial = 0; trial < 10; ++trial) {
        const RepBatch batch = random_batch(rng, 3);
        std::size_t prev_total = static_cast<std::size_t>(-1);
        for (double tau : {-0.9, -0.5, 0.0, 0.4, 0.8, 0.99}) {
            const MarkSet marks = brute_marks(batch, 3, tau);
            const MarkSet fast = compute_marks(batch, 3, tau);
            std::size_t total = 0;
            for (std::size_t i = 0; i < batch.reps.size(); ++i) {
                CHECK(marks.anchors[i] == fast.anchors[i]);
                CHECK(marks.deceptive[i] == fast.deceptive[i]);
                total += fast.anchors[i].size() + fast.deceptive[i].size();
            }
            CHECK(total <= prev_total);
            prev_total = total;
        }
    }
}

TEST_CASE("marking agrees with the monolithic matrix beyond one tile of rows") {
    Rng rng(47);
    RepBatch batch;
    const auto add = [&](int graphs, int nodes, int label, int pred) {
        for (int i = 0; i < graphs; ++i) {
            Eigen::MatrixXd reps(nodes, 3);
            for (int r = 0; r < nodes; ++r) {
                for (int c = 0; c < 3; ++c) reps(r, c) = rng.uniform(-1.0, 1.0);
            }
            batch.reps.push_back(reps);
            batch.labels.push_back(label);
            batch.preds.push_back(pred);
        }
    };
    // Class 0 pools reach 2400 and 2200 rows, past the internal tile size.
    add(60, 40, 0, 0);
    add(55, 40, 0, 1);
    add(12, 40, 1, 0);
    add(8, 40, 1, 1);
    const double tau = 0.999;

    MarkSet expect;
    expect.anchors.resize(batch.reps.size());
    expect.deceptive.resize(batch.reps.size());
    const auto fold = [&](const StackedReps& plus, const StackedReps& minus,
                          std::vector<std::vector<int>>& into) {
        if (plus.rows.rows() == 0 || minus.rows.rows() == 0) return;
        const auto m = cross_cosine_matrix(plus.rows, minus.rows);
        for (const auto& [graph, node] : mark_above_threshold(m, tau, plus.origins, minus.origins)) {
            into[static_cast<std::size_t>(graph)].push_back(node);
        }
    };
    for (const auto& part : partition_representations(batch, 2)) {
        fold(part.s_plus, part.s_minus, expect.anchors);
        fold(part.i_plus, part.i_minus, expect.deceptive);
    }
    for (auto* lists : {&expect.anchors, &expect.deceptive}) {
        for (auto& list : *lists) {
            std::sort(list.begin(), list.end());
            list.erase(std::unique(list.begin(), list.end()), list.end());
        }
    }

    const MarkSet got = compute_marks(batch, 2, tau);
    CHECK(got.anchors == expect.anchors);
    CHECK(got.deceptive == expect.deceptive);
    std::size_t marked = 0;
    std::size_t nodes = 0;
    for (std::size_t i = 0; i < batch.reps.size(); ++i) {
        marked += got.anchors[i].size() + got.deceptive[i].size();
        nodes += static_cast<std::size_t>(batch.reps[i].rows());
    }
    CHECK(marked > 0);
    CHECK(marked < nodes);
}

TEST_CASE("hand fixture marks the similarity-linked nodes") {
    const RepBatch batch = hand_fixture();
    const MarkSet marks = compute_marks(batch, 2, 0.5);
    CHECK(marks.anchors[0] == std::vector<int>{1});
    CHECK(marks.anchors[1] == std::vector<int>{0});
    CHECK(marks.anchors[2].empty());
    CHECK(marks.deceptive[0].empty());
    CHECK(marks.deceptive[1] == std::vector<int>{0});
    CHECK(marks.deceptive[2] == std::vector<int>{0});
}

TEST_CASE("hand fixture loss components match the worked values") {
    const RepBatch batch = hand_fixture();
    RcamConfig cfg;
    cfg.tau = 0.5;
    const CausalLoss loss = causal_loss(batch, 2, cfg);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    CHECK(loss.l_a == doctest::Approx(-(inv_sqrt2 + 1.0)).epsilon(1e-12));
    CHECK(loss.l_i == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(loss.l_c == doctest::Approx(1.0 - inv_sqrt2).epsilon(1e-12));
}

TEST_CASE("pool similarity losses match direct formulas") {
    RepBatch batch;
    Eigen::MatrixXd reps(2, 2);
    reps << 1, 0, 0, std::sqrt(3.0);
    batch.reps = {reps};
    batch.labels = {0};
    batch.preds = {0};

    MarkSet marks;
    marks.anchors = {{0}};
    marks.deceptive = {{1}};
    CHECK(emphasis_loss(batch, marks) == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(ignoring_loss(batch, marks) == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-12));

    MarkSet everything;
    everything.anchors = {{0, 1}};
    everything.deceptive = {{}};
    CHECK(emphasis_loss(batch, everything) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(ignoring_loss(batch, everything) == 0.0);
}

TEST_CASE("an all-correct batch yields zero causal loss") {
    Rng rng(43);
    RepBatch batch = random_batch(rng, 3);
    batch.preds = batch.labels;
    RcamConfig cfg;
    const CausalLoss loss = causal_loss(batch, 3, cfg);
    CHECK(loss.l_a == 0.0);
    CHECK(loss.l_i == 0.0);
    CHECK(loss.l_c == 0.0);
    for (const auto& nodes : loss.marks.anchors) CHECK(nodes.empty());
    for (const auto& nodes : loss.marks.deceptive) CHECK(nodes.empty());
}

TEST_CASE("causal loss agrees with the reference computation on random batches") {
    Rng rng(44);
    RcamConfig cfg;
    cfg.tau = 0.3;
    for (int trial = 0; trial < 20; ++trial) {
        const RepBatch batch = random_batch(rng, 3);
        const CausalLoss loss = causal_loss(batch, 3, cfg);
        const MarkSet reference = brute_marks(batch, 3, cfg.tau);
        CHECK(loss.l_a == doctest::Approx(-brute_pool_sum(batch, reference.anchors)).epsilon(1e-12));
        CHECK(loss.l_i == doctest::Approx(brute_pool_sum(batch, reference.deceptive)).epsilon(1e-12));
        CHECK(loss.l_c == doctest::Approx(loss.l_a + loss.l_i).epsilon(1e-12));
    }
}

TEST_CASE("relabeling classes by a permutation leaves marks unchanged") {
    Rng rng(45);
    const RepBatch batch = random_batch(rng, 3);
    RepBatch renamed = batch;
    const int perm[3] = {2, 0, 1};
    for (std::size_t i = 0; i < batch.labels.size(); ++i) {
        renamed.labels[i] = perm[batch.labels[i]];
        renamed.preds[i] = perm[batch.preds[i]];
    }
    const MarkSet a = compute_marks(batch, 3, 0.4);
    const MarkSet b = compute_marks(renamed, 3, 0.4);
    CHECK(a.anchors == b.anchors);
    CHECK(a.deceptive == b.deceptive);
}

TEST_CASE("reordering graphs permutes marks and preserves losses") {
    Rng rng(46);
    const RepBatch batch = random_batch(rng, 3);
    const std::size_t n = batch.reps.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = (i + 2) % n;
    RepBatch shuffled;
    for (std::size_t i : order) {
        shuffled.reps.push_back(batch.reps[i]);
        shuffled.labels.push_back(batch.labels[i]);
        shuffled.preds.push_back(batch.preds[i]);
    }
    RcamConfig cfg;
    cfg.tau = 0.2;
    const CausalLoss base = causal_loss(batch, 3, cfg);
    const CausalLoss moved = causal_loss(shuffled, 3, cfg);
    CHECK(moved.l_a == doctest::Approx(base.l_a).epsilon(1e-12));
    CHECK(moved.l_i == doctest::Approx(base.l_i).epsilon(1e-12));
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(moved.marks.anchors[i] == base.marks.anchors[order[i]]);
        CHECK(moved.marks.deceptive[i] == base.marks.deceptive[order[i]]);
    }
}

TEST_CASE("threshold domain is enforced") {
    const RepBatch batch = hand_fixture();
    RcamConfig cfg;
    cfg.tau = -1.0;
    CHECK_THROWS_AS(causal_loss(batch, 2, cfg), std::invalid_argument);
    cfg.tau = 1.5;
    CHECK_THROWS_AS(causal_loss(batch, 2, cfg), std::invalid_argument);
    cfg.tau = 1.0;
    CHECK_NOTHROW(causal_loss(batch, 2, cfg));
}

TEST_CASE("scope names round-trip") {
    CHECK(to_string(RcamConfig::Scope::PerBatch) == "per_batch");
    CHECK(to_string(RcamConfig::Scope::PerEpoch) == "per_epoch");
    CHECK(rcam_scope_from_string("per_batch") == RcamConfig::Scope::PerBatch);
    CHECK(rcam_scope_from_string("per_epoch") == RcamConfig::Scope::PerEpoch);
    CHECK_THROWS_AS(rcam_scope_from_string("per_step"), std::invalid_argument);
}

}
